//! Resource-bounded reachability and plain reachability operators.

use crate::lattice::{BoundedNat, Value};
use crate::model::{ResourceGraph, ResourceNode};
use crate::valuation::Valuation;

/// One step on `[S, {⊥,0,…,M}]`: `0` at target nodes, otherwise the join
/// over non-bottom successor levels `m` of the capped sum `min(M, m + n)`.
/// The join over an empty set is `⊥`.
pub fn step_resource(g: &ResourceGraph, k: &Valuation) -> Valuation {
    let mut out = k.clone();
    for (s, node) in g.nodes.iter().enumerate() {
        let v = match node {
            ResourceNode::Target => BoundedNat::Level(0),
            ResourceNode::Inner { succ, resource } => {
                let mut best: Option<u32> = None;
                for &t in succ {
                    if let BoundedNat::Level(m) = k.get(t).as_res() {
                        let capped = (m + resource).min(g.bound);
                        best = Some(best.map_or(capped, |b| b.max(capped)));
                    }
                }
                match best {
                    Some(level) => BoundedNat::Level(level),
                    None => BoundedNat::Bottom,
                }
            }
        };
        out.set(s, Value::Res(v));
    }
    out
}

/// One step of the collapsed operator on `[S, {⊥,⊤}]`: `⊤` at target nodes,
/// otherwise the join of the successor values.
pub fn step_resource_reach(g: &ResourceGraph, k: &Valuation) -> Valuation {
    let mut out = k.clone();
    for (s, node) in g.nodes.iter().enumerate() {
        let v = match node {
            ResourceNode::Target => true,
            ResourceNode::Inner { succ, .. } => succ.iter().any(|&t| k.get(t).as_bool()),
        };
        out.set(s, Value::Bool(v));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{load_model, Model};
    use crate::valuation::IndexSet;
    use std::sync::Arc;

    /// `s0 --2--> s1 --2--> s2 = ✓` with `M = 3`.
    pub(crate) fn chain_22() -> ResourceGraph {
        let text = r#"{"type":"resource","states":["s0","s1","s2"],"bound":3,
            "nodes":{
                "s0":{"succ":["s1"],"resource":2},
                "s1":{"succ":["s2"],"resource":2},
                "s2":"__target__"
            }}"#;
        match load_model(text).unwrap() {
            Model::Resource(g) => g,
            _ => unreachable!(),
        }
    }

    fn val(g: &ResourceGraph, vs: Vec<BoundedNat>) -> Valuation {
        Valuation::new(
            IndexSet::new(g.states.clone()),
            vs.into_iter().map(Value::Res).collect(),
        )
    }

    #[test]
    fn target_nodes_step_to_zero() {
        let g = chain_22();
        let k = val(
            &g,
            vec![BoundedNat::Bottom, BoundedNat::Bottom, BoundedNat::Bottom],
        );
        let out = step_resource(&g, &k);
        assert_eq!(out.get(2).as_res(), BoundedNat::Level(0));
    }

    #[test]
    fn capped_sum_and_empty_join() {
        let g = chain_22();
        let k = val(
            &g,
            vec![BoundedNat::Bottom, BoundedNat::Bottom, BoundedNat::Level(0)],
        );
        let out = step_resource(&g, &k);
        assert_eq!(out.get(1).as_res(), BoundedNat::Level(2), "min(3, 0+2)");
        assert_eq!(
            out.get(0).as_res(),
            BoundedNat::Bottom,
            "join over empty set"
        );
        let out2 = step_resource(&g, &out);
        assert_eq!(out2.get(0).as_res(), BoundedNat::Level(3), "min(3, 2+2)");
    }

    #[test]
    fn reach_step_examples() {
        let g = chain_22();
        let idx = IndexSet::new(g.states.clone());
        let k = Valuation::bottom(Arc::clone(&idx), &crate::lattice::Lattice::Bool2);
        let out = step_resource_reach(&g, &k);
        assert!(out.get(2).as_bool(), "target is ⊤");
        assert!(!out.get(0).as_bool(), "all-⊥ successors stay ⊥");
        let out2 = step_resource_reach(&g, &out);
        assert!(out2.get(1).as_bool(), "one ⊤ successor suffices");
    }
}
