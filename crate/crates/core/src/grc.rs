//! Global reachability condition checkers, one per instance.
//!
//! Each checker decides — exactly where the instance permits, otherwise at a
//! stated approximation — whether the relevant fixed point lies in the fixed
//! sublattice of its Galois connection.

use crate::galois::GaloisConnection;
use crate::lattice::{BoundedNat, Value};
use crate::model::{Dlts, LassoWord, MarkovChain, Mdp, Next, Nfa, ResourceGraph};
use crate::op::OperatorHandle;
use crate::oracle::{dlts_run_oracle, RunOutcome};
use crate::solver::{kleene_lfp, strongly_connected_components, ConvergencePolicy, SolveError};
use std::collections::VecDeque;
use std::sync::Arc;

/// Outcome of a global reachability check.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Holds {
        scope: String,
    },
    Fails {
        scope: String,
        witnesses: Vec<String>,
    },
    /// Reserved for checks that can neither confirm nor refute at the
    /// configured budget; current checkers always reach a verdict.
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn scope(&self) -> &str {
        match self {
            Verdict::Holds { scope } | Verdict::Fails { scope, .. } => scope,
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn witnesses(&self) -> &[String] {
        match self {
            Verdict::Fails { witnesses, .. } => witnesses,
            _ => &[],
        }
    }

    pub fn is_exact(&self) -> bool {
        self.scope() == "exact" || self.scope().starts_with("vacuous")
    }
}

/// Almost-sure reachability of `✓`, decided qualitatively: it holds iff the
/// only bottom SCC reachable from any state is `✓` itself. Witnesses are the
/// states with reachability probability strictly below one.
pub fn grc_mc(mc: &MarkovChain) -> Verdict {
    let n = mc.states.len();
    // Node n stands for ✓.
    let succ = |s: usize| -> Vec<usize> {
        if s == n {
            Vec::new()
        } else {
            mc.transitions[s]
                .iter()
                .map(|(next, _)| match next {
                    Next::State(t) => *t,
                    Next::Target => n,
                })
                .collect()
        }
    };
    let sccs = strongly_connected_components(n + 1, |s| succ(s).into_iter());
    let mut scc_of = vec![0usize; n + 1];
    for (i, scc) in sccs.iter().enumerate() {
        for &s in scc {
            scc_of[s] = i;
        }
    }
    let mut bad_seed = vec![false; n];
    for scc in &sccs {
        if scc.contains(&n) {
            continue;
        }
        let leaves = scc
            .iter()
            .any(|&s| succ(s).iter().any(|&t| scc_of[t] != scc_of[s]));
        if !leaves {
            for &s in scc {
                bad_seed[s] = true;
            }
        }
    }
    // States that can reach a non-✓ bottom SCC miss ✓ with positive
    // probability.
    let mut reaches_bad = bad_seed;
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if !reaches_bad[s] && succ(s).iter().any(|&t| t < n && reaches_bad[t]) {
                reaches_bad[s] = true;
                changed = true;
            }
        }
    }
    let witnesses: Vec<String> = (0..n)
        .filter(|&s| reaches_bad[s])
        .map(|s| mc.states[s].clone())
        .collect();
    if witnesses.is_empty() {
        Verdict::Holds {
            scope: "exact".into(),
        }
    } else {
        Verdict::Fails {
            scope: "exact".into(),
            witnesses,
        }
    }
}

/// Resource-bounded reachability condition: computes `μΦ` exactly and tests
/// the literal fixed-sublattice membership, i.e. every coordinate is `⊥` or
/// `M`. Witnesses are the states with an intermediate level (note a target
/// node itself has level `0 < M` and therefore fails the literal condition).
pub fn grc_resource(g: &ResourceGraph) -> Result<Verdict, SolveError> {
    let op = OperatorHandle::resource_bounded(Arc::new(g.clone()));
    let trace = kleene_lfp(&op, &ConvergencePolicy::exact())?;
    debug_assert!(trace.converged, "finite lattice, exact convergence");
    let mu = trace.fixed_point();
    let connection = GaloisConnection::resource(g.bound);
    let holds = connection.in_fix_unit(mu, 0.0)?;
    if holds {
        Ok(Verdict::Holds {
            scope: "exact".into(),
        })
    } else {
        let witnesses = (0..g.states.len())
            .filter(|&s| match mu.get(s).as_res() {
                BoundedNat::Bottom => false,
                BoundedNat::Level(l) => l != g.bound,
            })
            .map(|s| format!("{} (value {})", g.states[s], mu.get(s).as_res()))
            .collect();
        Ok(Verdict::Fails {
            scope: "exact".into(),
            witnesses,
        })
    }
}

/// Termination of every `(state, lasso)` pair in the supplied set, by direct
/// simulation with cycle detection. The verdict is scoped to the supplied
/// lassos, not all infinite words; a loop witness is definitive.
pub fn grc_dlts(dlts: &Dlts, lassos: &[LassoWord]) -> Verdict {
    if lassos.is_empty() {
        return Verdict::Holds {
            scope: "vacuous (empty lasso set)".into(),
        };
    }
    let mut witnesses = Vec::new();
    for lasso in lassos {
        for s in 0..dlts.states.len() {
            if dlts_run_oracle(dlts, s, lasso) == RunOutcome::Loops {
                witnesses.push(format!("{}|{}", dlts.states[s], lasso.render()));
            }
        }
    }
    if witnesses.is_empty() {
        Verdict::Holds {
            scope: format!("approximate(lassos={})", lassos.len()),
        }
    } else {
        Verdict::Fails {
            scope: "exact".into(),
            witnesses,
        }
    }
}

/// Unambiguity of an NFA, decided exactly by the product (squaring)
/// construction: the automaton is ambiguous iff some ordered pair `(p, q)`
/// with `p ≠ q` is reachable from a diagonal pair and can reach a
/// co-accepting pair. A failing verdict carries a witness word with two
/// distinct accepting runs.
pub fn grc_ufa(nfa: &Nfa) -> Verdict {
    match find_ambiguity_witness(nfa) {
        None => Verdict::Holds {
            scope: "exact".into(),
        },
        Some(w) => {
            let word: String = w
                .word
                .iter()
                .map(|&a| nfa.alphabet[a].as_str())
                .collect::<Vec<_>>()
                .join("");
            let render = |run: &[usize]| {
                run.iter()
                    .map(|&s| nfa.states[s].as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            Verdict::Fails {
                scope: "exact".into(),
                witnesses: vec![format!(
                    "word={word}; start={}; run1={}; run2={}",
                    nfa.states[w.start],
                    render(&w.run1),
                    render(&w.run2)
                )],
            }
        }
    }
}

pub struct AmbiguityWitness {
    pub start: usize,
    pub word: Vec<usize>,
    pub run1: Vec<usize>,
    pub run2: Vec<usize>,
}

/// Searches the pair graph for a diagonal-to-split-to-accepting path.
pub fn find_ambiguity_witness(nfa: &Nfa) -> Option<AmbiguityWitness> {
    let n = nfa.states.len();
    let pair = |p: usize, q: usize| p * n + q;
    // Forward BFS from all diagonal pairs, remembering parents.
    let mut fwd_parent: Vec<Option<(usize, usize)>> = vec![None; n * n];
    let mut fwd_seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        fwd_seen[pair(s, s)] = true;
        queue.push_back(pair(s, s));
    }
    let mut order = Vec::new();
    while let Some(pq) = queue.pop_front() {
        order.push(pq);
        let (p, q) = (pq / n, pq % n);
        for a in 0..nfa.alphabet.len() {
            for &p2 in &nfa.delta[p][a] {
                for &q2 in &nfa.delta[q][a] {
                    let t = pair(p2, q2);
                    if !fwd_seen[t] {
                        fwd_seen[t] = true;
                        fwd_parent[t] = Some((pq, a));
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    // Backward BFS from co-accepting pairs, remembering the way forward.
    let mut to_accept: Vec<Option<(usize, usize)>> = vec![None; n * n];
    let mut bwd_seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for p in 0..n {
        for q in 0..n {
            if nfa.accepting[p] && nfa.accepting[q] {
                bwd_seen[pair(p, q)] = true;
                queue.push_back(pair(p, q));
            }
        }
    }
    // Reverse pair edges on demand.
    let mut rev: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n * n];
    for p in 0..n {
        for q in 0..n {
            for a in 0..nfa.alphabet.len() {
                for &p2 in &nfa.delta[p][a] {
                    for &q2 in &nfa.delta[q][a] {
                        rev[pair(p2, q2)].push((pair(p, q), a));
                    }
                }
            }
        }
    }
    while let Some(pq) = queue.pop_front() {
        for &(src, a) in &rev[pq] {
            if !bwd_seen[src] {
                bwd_seen[src] = true;
                to_accept[src] = Some((pq, a));
                queue.push_back(src);
            }
        }
    }
    // A split pair reachable both ways witnesses ambiguity. Scanning in
    // forward BFS order keeps the witness word short.
    let split = order
        .into_iter()
        .find(|&pq| pq / n != pq % n && fwd_seen[pq] && bwd_seen[pq])?;

    // Reconstruct: prefix from the diagonal to the split, then the
    // accepting continuation.
    let mut prefix_rev = Vec::new();
    let mut run1_rev = vec![split / n];
    let mut run2_rev = vec![split % n];
    let mut cur = split;
    while let Some((prev, a)) = fwd_parent[cur] {
        prefix_rev.push(a);
        run1_rev.push(prev / n);
        run2_rev.push(prev % n);
        cur = prev;
    }
    let start = cur / n;
    let mut word: Vec<usize> = prefix_rev.iter().rev().copied().collect();
    let mut run1: Vec<usize> = run1_rev.iter().rev().copied().collect();
    let mut run2: Vec<usize> = run2_rev.iter().rev().copied().collect();
    let mut cur = split;
    while let Some((next, a)) = to_accept[cur] {
        word.push(a);
        run1.push(next / n);
        run2.push(next % n);
        cur = next;
    }
    Some(AmbiguityWitness {
        start,
        word,
        run1,
        run2,
    })
}

/// Saturated run-count DP: whether any `(state, word)` with `|word| ≤ bound`
/// has at least two accepting runs. Counts are capped at 2, so the state
/// space is the finite set of capped count vectors.
pub fn nfa_ambiguous_bounded(nfa: &Nfa, bound: usize) -> bool {
    let n = nfa.states.len();
    let cap = |x: u32| x.min(2);
    let start: Vec<u32> = nfa.accepting.iter().map(|&a| u32::from(a)).collect();
    if start.iter().any(|&x| x >= 2) {
        return false; // unreachable: 0/1 seeds
    }
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.clone());
    let mut layer = vec![start];
    for _ in 0..bound {
        let mut next_layer = Vec::new();
        for v in &layer {
            for a in 0..nfa.alphabet.len() {
                let mut w = vec![0u32; n];
                for (s, slot) in w.iter_mut().enumerate() {
                    let mut sum = 0u32;
                    for &t in &nfa.delta[s][a] {
                        sum = cap(sum + v[t]);
                    }
                    *slot = sum;
                }
                if w.iter().any(|&x| x >= 2) {
                    return true;
                }
                if seen.insert(w.clone()) {
                    next_layer.push(w);
                }
            }
        }
        if next_layer.is_empty() {
            break;
        }
        layer = next_layer;
    }
    false
}

/// Desk-scale check of the MDP condition on the frontier approximant: run
/// frontier value iteration under `policy`, then require every state's
/// frontier to collapse to a single point whose first coordinate is within
/// `tol` of 1. The verdict is stamped approximate whenever iteration did not
/// converge cleanly.
pub fn grc_mdp(mdp: &Mdp, policy: &ConvergencePolicy, tol: f64) -> Result<Verdict, SolveError> {
    let op = OperatorHandle::mdp_partial_frontier(
        Arc::new(mdp.clone()),
        crate::op::DEFAULT_EXPLOSION_LIMIT,
    );
    let trace = kleene_lfp(&op, policy)?;
    grc_mdp_from_frontiers(mdp, trace.fixed_point(), trace.is_approximate(), tol)
}

/// The collapse test against an already computed frontier valuation.
pub fn grc_mdp_from_frontiers(
    mdp: &Mdp,
    frontiers: &crate::valuation::Valuation,
    approximate: bool,
    tol: f64,
) -> Result<Verdict, SolveError> {
    let scope = if approximate {
        "approximate(frontier iteration)".to_string()
    } else {
        "exact".to_string()
    };
    let mut witnesses = Vec::new();
    for s in 0..mdp.states.len() {
        let f = frontiers.get(s).as_frontier();
        let collapsed = f.len() == 1 && (f.points()[0].p - 1.0).abs() <= tol;
        if !collapsed {
            witnesses.push(format!(
                "{} (frontier {})",
                mdp.states[s],
                crate::jsonout::value(&Value::Front(f.clone())).render()
            ));
        }
    }
    if witnesses.is_empty() {
        Ok(Verdict::Holds { scope })
    } else {
        Ok(Verdict::Fails { scope, witnesses })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_model, Model};
    use crate::oracle::{nfa_count_oracle, nfa_enumerate_runs};

    fn mc(text: &str) -> MarkovChain {
        match load_model(text).unwrap() {
            Model::Mc(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn geometric_holds() {
        let m = mc(r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":0.5,"__target__":0.5}},"rewards":{"s":1}}"#);
        assert_eq!(
            grc_mc(&m),
            Verdict::Holds {
                scope: "exact".into()
            }
        );
    }

    #[test]
    fn self_loop_fails_with_witness() {
        let m = mc(r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":1.0}},"rewards":{"s":1}}"#);
        let v = grc_mc(&m);
        assert!(!v.holds());
        assert_eq!(v.witnesses(), ["s"]);
    }

    #[test]
    fn trap_branch_marks_the_branching_state() {
        // s0 → ✓ (0.9) | trap (0.1); the trap never terminates.
        let m = mc(r#"{"type":"mc","states":["s0","trap"],
            "transitions":{"s0":{"__target__":0.9,"trap":0.1},"trap":{"trap":1.0}},
            "rewards":{"s0":0,"trap":0}}"#);
        let v = grc_mc(&m);
        assert!(!v.holds());
        assert!(v.witnesses().contains(&"s0".to_string()));
        assert!(v.witnesses().contains(&"trap".to_string()));
    }

    #[test]
    fn resource_chain_fails_on_intermediate_levels() {
        let g = crate::op::resource::tests::chain_22();
        let v = grc_resource(&g).unwrap();
        assert!(!v.holds());
        assert!(v.witnesses().iter().any(|w| w.starts_with("s1")));
        // The target node itself carries level 0 < M and fails the literal
        // membership test as well.
        assert!(v.witnesses().iter().any(|w| w.starts_with("s2")));
    }

    #[test]
    fn resource_without_targets_holds_vacuously() {
        let text = r#"{"type":"resource","states":["s"],"bound":2,
            "nodes":{"s":{"succ":["s"],"resource":1}}}"#;
        let Model::Resource(g) = load_model(text).unwrap() else {
            unreachable!()
        };
        assert!(grc_resource(&g).unwrap().holds());
    }

    #[test]
    fn dlts_scopes() {
        let d = crate::op::dlts::tests::terminating();
        let ab = LassoWord::new(vec![], vec!["a".into(), "b".into()]).unwrap();
        let v = grc_dlts(&d, &[ab]);
        assert!(v.holds());
        assert!(v.scope().starts_with("approximate"));
        assert!(grc_dlts(&d, &[]).scope().starts_with("vacuous"));

        let text = r#"{"type":"dlts","states":["s"],"labels":["a"],
            "step":{"s":{"a":"s"}},"safe":[]}"#;
        let Model::Dlts(looper) = load_model(text).unwrap() else {
            unreachable!()
        };
        let a = LassoWord::new(vec![], vec!["a".into()]).unwrap();
        let v = grc_dlts(&looper, &[a]);
        assert!(!v.holds());
        assert_eq!(v.witnesses(), ["s|(a)"]);
        assert!(v.is_exact(), "a loop witness is definitive");
    }

    #[test]
    fn dfa_is_unambiguous() {
        let text = r#"{"type":"nfa","states":["p","q"],"alphabet":["a","b"],
            "delta":{"p":{"a":["q"],"b":["p"]},"q":{"a":["p"]}},
            "accepting":["q"]}"#;
        let Model::Nfa(n) = load_model(text).unwrap() else {
            unreachable!()
        };
        assert!(grc_ufa(&n).holds());
        assert!(!nfa_ambiguous_bounded(&n, 2 * 2 * 2));
    }

    #[test]
    fn parallel_accepting_paths_are_caught_and_reverified() {
        let n = crate::op::ufa::tests::ambiguous();
        let v = grc_ufa(&n);
        assert!(!v.holds());
        let w = find_ambiguity_witness(&n).unwrap();
        assert_eq!(w.word, vec![0], "witness word is \"a\"");
        // Independent re-checks: counting DP and explicit run enumeration.
        assert!(nfa_count_oracle(&n, &w.word)[w.start] >= crate::ext::ExtNat::Finite(2));
        assert!(nfa_enumerate_runs(&n, w.start, &w.word).len() >= 2);
        assert_ne!(w.run1, w.run2);
        assert!(nfa_ambiguous_bounded(&n, 2 * 3 * 3));
    }

    #[test]
    fn empty_nfa_is_unambiguous() {
        let text = r#"{"type":"nfa","states":["p"],"alphabet":["a"],
            "delta":{},"accepting":[]}"#;
        let Model::Nfa(n) = load_model(text).unwrap() else {
            unreachable!()
        };
        assert!(grc_ufa(&n).holds());
    }

    #[test]
    fn mdp_collapse_and_trap() {
        let two = crate::op::mdp::tests::two_choice();
        let policy = ConvergencePolicy::tolerance(1e-9);
        let v = grc_mdp(&two, &policy, 1e-6).unwrap();
        assert!(v.holds(), "{v:?}");

        let text = r#"{"type":"mdp","states":["s0","trap"],"choices":{
            "s0":[{"dist":{"__target__":1.0},"reward":0},
                  {"dist":{"trap":1.0},"reward":1}],
            "trap":[{"dist":{"trap":1.0},"reward":1}]}}"#;
        let Model::Mdp(trap) = load_model(text).unwrap() else {
            unreachable!()
        };
        let v = grc_mdp(&trap, &policy, 1e-6).unwrap();
        assert!(!v.holds());
        assert!(v.witnesses().iter().any(|w| w.starts_with("trap")), "{v:?}");
    }
}
