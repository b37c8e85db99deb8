//! Ascending (Kleene) fixed-point iteration and an exact linear solver for
//! finite Markov-chain total rewards.

use crate::ext::ExtReal;
use crate::galois::GaloisConnection;
use crate::lattice::{LatticeError, Value};
use crate::model::{MarkovChain, Next};
use crate::op::{OperatorHandle, StepError};
use crate::valuation::{IndexSet, Valuation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("internal: {0}")]
    Internal(String),
}

/// How iteration decides it is done.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    /// Stop at exact stage equality (discrete lattices).
    Exact,
    /// Stop when consecutive stages agree within an absolute tolerance.
    Tolerance(f64),
    /// Run exactly this many stages.
    Bounded(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePolicy {
    pub mode: Mode,
    pub max_iterations: usize,
    /// Coordinates climbing past this value are promoted to `∞` and stay
    /// there — sound for ascending chains.
    pub divergence_cap: f64,
}

impl ConvergencePolicy {
    pub fn exact() -> Self {
        ConvergencePolicy {
            mode: Mode::Exact,
            max_iterations: 100_000,
            divergence_cap: 1e12,
        }
    }

    pub fn tolerance(eps: f64) -> Self {
        assert!(eps > 0.0, "tolerance must be positive");
        ConvergencePolicy {
            mode: Mode::Tolerance(eps),
            max_iterations: 100_000,
            divergence_cap: 1e12,
        }
    }

    pub fn bounded(stages: usize) -> Self {
        ConvergencePolicy {
            mode: Mode::Bounded(stages),
            max_iterations: stages,
            divergence_cap: 1e12,
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        assert!(cap > 0.0, "cap must be positive");
        self.divergence_cap = cap;
        self
    }

    fn stage_equal(
        &self,
        op: &OperatorHandle,
        a: &Valuation,
        b: &Valuation,
    ) -> Result<bool, LatticeError> {
        match self.mode {
            Mode::Exact | Mode::Bounded(_) => Ok(a == b),
            Mode::Tolerance(eps) => a.eq_tol(b, op.lattice(), eps),
        }
    }

    pub fn describe(&self) -> String {
        match self.mode {
            Mode::Exact => "exact".to_string(),
            Mode::Tolerance(eps) => format!("tolerance({eps:e})"),
            Mode::Bounded(n) => format!("bounded({n})"),
        }
    }
}

/// The computed prefix `Φ^0(⊥), Φ^1(⊥), …` of an initial chain.
#[derive(Clone, Debug)]
pub struct ChainTrace {
    pub iterates: Vec<Valuation>,
    pub converged: bool,
    pub steps: usize,
    pub policy: ConvergencePolicy,
    /// Whether any coordinate was cap-promoted to `∞`.
    pub promoted: bool,
}

impl ChainTrace {
    /// The last iterate: the fixed point when `converged`, otherwise the
    /// best available under-approximation.
    pub fn fixed_point(&self) -> &Valuation {
        self.iterates
            .last()
            .expect("trace holds at least the bottom stage")
    }

    /// Whether the result is only an approximation (did not converge, or
    /// relied on cap-promotion).
    pub fn is_approximate(&self) -> bool {
        !self.converged || self.promoted
    }

    pub fn scope(&self) -> String {
        let base = self.policy.describe();
        match (self.converged, self.promoted) {
            (true, false) => base,
            (true, true) => format!("{base}; cap-promoted"),
            (false, promoted) => {
                let suffix = if promoted { "; cap-promoted" } else { "" };
                format!(
                    "approximate({base}, max_iterations={}{suffix})",
                    self.policy.max_iterations
                )
            }
        }
    }
}

/// Iterates `op` from its bottom element under `policy`.
pub fn kleene_lfp(
    op: &OperatorHandle,
    policy: &ConvergencePolicy,
) -> Result<ChainTrace, SolveError> {
    let mut iterates = vec![op.bottom()];
    let mut promoted = false;
    let bound = match policy.mode {
        Mode::Bounded(n) => n,
        _ => policy.max_iterations,
    };
    for step in 0..bound {
        let mut next = op.step(&iterates[step])?;
        promoted |= next.promote_above(policy.divergence_cap);
        let done = policy.stage_equal(op, &next, &iterates[step])?;
        iterates.push(next);
        if done && !matches!(policy.mode, Mode::Bounded(_)) {
            return Ok(ChainTrace {
                converged: true,
                steps: step + 1,
                iterates,
                policy: policy.clone(),
                promoted,
            });
        }
    }
    let steps = iterates.len() - 1;
    let converged = if steps == 0 {
        false
    } else {
        policy.stage_equal(op, &iterates[steps], &iterates[steps - 1])?
    };
    Ok(ChainTrace {
        converged,
        steps,
        iterates,
        policy: policy.clone(),
        promoted,
    })
}

/// The two chains of a connected operator pair, with per-stage transported
/// images `L(Φ^i ⊥)` and `R(Ψ^i ⊥)`.
#[derive(Clone, Debug)]
pub struct PairedTrace {
    pub concrete_stages: Vec<Valuation>,
    pub abstract_stages: Vec<Valuation>,
    pub lowered_stages: Vec<Valuation>,
    pub uppered_stages: Vec<Valuation>,
}

/// Runs both chains for `stages` successor steps (stage 0 is bottom).
pub fn chain_pair(
    op_concrete: &OperatorHandle,
    op_abstract: &OperatorHandle,
    transport: &GaloisConnection,
    stages: usize,
) -> Result<PairedTrace, SolveError> {
    let mut concrete_stages = vec![op_concrete.bottom()];
    let mut abstract_stages = vec![op_abstract.bottom()];
    for i in 0..stages {
        let c = op_concrete.step(&concrete_stages[i])?;
        let a = op_abstract.step(&abstract_stages[i])?;
        concrete_stages.push(c);
        abstract_stages.push(a);
    }
    let lowered_stages = concrete_stages
        .iter()
        .map(|v| transport.apply_lower(v))
        .collect::<Result<Vec<_>, _>>()?;
    let uppered_stages = abstract_stages
        .iter()
        .map(|v| transport.apply_upper(v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PairedTrace {
        concrete_stages,
        abstract_stages,
        lowered_stages,
        uppered_stages,
    })
}

/// How each state was classified for the exact total-reward solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RewardClass {
    /// Can reach a recurrent class that accrues positive reward: value `∞`.
    Divergent,
    /// Inside a zero-reward bottom SCC: value `0`.
    NullRecurrent,
    /// Transient w.r.t. absorption; solved by elimination.
    Transient,
}

/// Exact total expected rewards for a finite MC: graph classification of
/// `∞` and zero coordinates, then Gaussian elimination of
/// `(I − P|transient) x = rew`. Falls back to capped iteration if the
/// eliminated system is numerically singular, which the classification
/// should preclude.
pub fn mc_total_exact(mc: &MarkovChain) -> Result<Valuation, SolveError> {
    let n = mc.states.len();
    let sccs = strongly_connected_components(n, |s| {
        mc.transitions[s].iter().filter_map(|(next, _)| match next {
            Next::State(t) => Some(*t),
            Next::Target => None,
        })
    });

    // A bottom SCC here is one with no edge leaving it, ✓ included: such a
    // class is recurrent. Divergent iff it accrues positive reward.
    let mut scc_of = vec![0usize; n];
    for (i, scc) in sccs.iter().enumerate() {
        for &s in scc {
            scc_of[s] = i;
        }
    }
    let mut divergent_seed = vec![false; n];
    let mut null_seed = vec![false; n];
    for scc in &sccs {
        let leaves = scc.iter().any(|&s| {
            mc.transitions[s].iter().any(|(next, _)| match next {
                Next::Target => true,
                Next::State(t) => scc_of[*t] != scc_of[s],
            })
        });
        if !leaves {
            let positive = scc.iter().any(|&s| mc.rewards[s] > 0);
            for &s in scc {
                if positive {
                    divergent_seed[s] = true;
                } else {
                    null_seed[s] = true;
                }
            }
        }
    }
    let mut class = vec![RewardClass::Transient; n];
    let reaches_divergent = backward_closure(mc, &divergent_seed);
    for s in 0..n {
        if reaches_divergent[s] {
            class[s] = RewardClass::Divergent;
        } else if null_seed[s] {
            class[s] = RewardClass::NullRecurrent;
        }
    }

    let transient: Vec<usize> = (0..n)
        .filter(|&s| class[s] == RewardClass::Transient)
        .collect();
    let pos = {
        let mut pos = vec![usize::MAX; n];
        for (i, &s) in transient.iter().enumerate() {
            pos[s] = i;
        }
        pos
    };
    let t = transient.len();
    let mut matrix = vec![vec![0.0f64; t + 1]; t];
    for (row, &s) in transient.iter().enumerate() {
        matrix[row][row] += 1.0;
        matrix[row][t] = f64::from(mc.rewards[s]);
        for &(next, p) in &mc.transitions[s] {
            if let Next::State(u) = next {
                if class[u] == RewardClass::Transient {
                    matrix[row][pos[u]] -= p;
                }
                // Successors classified NullRecurrent contribute value 0;
                // Divergent successors cannot occur for a transient state.
            }
        }
    }
    let solution = match gaussian_eliminate(&mut matrix) {
        Some(x) => x,
        None => {
            // Must not happen; classification precedes the solve. Keep an
            // honest fallback anyway.
            let op = OperatorHandle::mc_total(std::sync::Arc::new(mc.clone()));
            let trace = kleene_lfp(
                &op,
                &ConvergencePolicy::tolerance(1e-9).with_max_iterations(1_000_000),
            )?;
            if !trace.converged {
                return Err(SolveError::Internal(
                    "singular total-reward system and iteration did not converge".into(),
                ));
            }
            return Ok(trace.fixed_point().clone());
        }
    };

    let idx = IndexSet::new(mc.states.clone());
    let values = (0..n)
        .map(|s| {
            Value::Ext(match class[s] {
                RewardClass::Divergent => ExtReal::Infinity,
                RewardClass::NullRecurrent => ExtReal::ZERO,
                RewardClass::Transient => ExtReal::Finite(solution[pos[s]]),
            })
        })
        .collect();
    Ok(Valuation::new(idx, values))
}

/// States from which a seeded state is reachable (seeds included).
fn backward_closure(mc: &MarkovChain, seed: &[bool]) -> Vec<bool> {
    let n = mc.states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in mc.transitions.iter().enumerate() {
        for &(next, _) in row {
            if let Next::State(t) = next {
                preds[t].push(s);
            }
        }
    }
    let mut hit = seed.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&s| seed[s]).collect();
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !hit[p] {
                hit[p] = true;
                stack.push(p);
            }
        }
    }
    hit
}

/// Iterative Tarjan SCC over `0..n` with a successor function. Components
/// are returned in reverse topological order of the condensation.
pub fn strongly_connected_components<I, F>(n: usize, succ: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    #[derive(Clone, Copy)]
    struct NodeState {
        index: usize,
        lowlink: usize,
        on_stack: bool,
        visited: bool,
    }
    let mut nodes = vec![
        NodeState {
            index: 0,
            lowlink: 0,
            on_stack: false,
            visited: false,
        };
        n
    ];
    let mut counter = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    // Explicit DFS frames: (node, successor list, next successor position).
    let mut frames: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for root in 0..n {
        if nodes[root].visited {
            continue;
        }
        nodes[root].visited = true;
        nodes[root].index = counter;
        nodes[root].lowlink = counter;
        counter += 1;
        nodes[root].on_stack = true;
        stack.push(root);
        frames.push((root, succ(root).collect(), 0));
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if !nodes[w].visited {
                    nodes[w].visited = true;
                    nodes[w].index = counter;
                    nodes[w].lowlink = counter;
                    counter += 1;
                    nodes[w].on_stack = true;
                    stack.push(w);
                    frames.push((w, succ(w).collect(), 0));
                } else if nodes[w].on_stack {
                    nodes[v].lowlink = nodes[v].lowlink.min(nodes[w].index);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    nodes[p].lowlink = nodes[p].lowlink.min(nodes[v].lowlink);
                }
                if nodes[v].lowlink == nodes[v].index {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("Tarjan stack underflow");
                        nodes[w].on_stack = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Solves the augmented system in place; `None` when a pivot degenerates.
fn gaussian_eliminate(matrix: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = matrix.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                matrix[a][col]
                    .abs()
                    .partial_cmp(&matrix[b][col].abs())
                    .expect("pivot is never NaN")
            })
            .expect("non-empty column range");
        if matrix[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        matrix.swap(col, pivot_row);
        let pivot = matrix[col].clone();
        for (row, entries) in matrix.iter_mut().enumerate() {
            if row != col {
                let factor = entries[col] / pivot[col];
                if factor != 0.0 {
                    for (e, p) in entries[col..].iter_mut().zip(&pivot[col..]) {
                        *e -= factor * p;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| matrix[i][n] / matrix[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundedNat;
    use crate::model::{load_model, Model};
    use std::sync::Arc;

    fn mc(text: &str) -> Arc<MarkovChain> {
        match load_model(text).unwrap() {
            Model::Mc(mc) => Arc::new(mc),
            _ => unreachable!(),
        }
    }

    fn geometric() -> Arc<MarkovChain> {
        mc(r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":0.5,"__target__":0.5}},"rewards":{"s":1}}"#)
    }

    #[test]
    fn resource_chain_converges_exactly() {
        let g = Arc::new(crate::op::resource::tests::chain_22());
        let op = OperatorHandle::resource_bounded(g);
        let trace = kleene_lfp(&op, &ConvergencePolicy::exact()).unwrap();
        assert!(trace.converged);
        assert!(trace.steps <= 4);
        let fp = trace.fixed_point();
        assert_eq!(fp.get(0).as_res(), BoundedNat::Level(3));
        assert_eq!(fp.get(1).as_res(), BoundedNat::Level(2));
        assert_eq!(fp.get(2).as_res(), BoundedNat::Level(0));
        assert_eq!(trace.scope(), "exact");
    }

    #[test]
    fn geometric_total_by_tolerance() {
        let op = OperatorHandle::mc_total(geometric());
        let trace = kleene_lfp(&op, &ConvergencePolicy::tolerance(1e-9)).unwrap();
        assert!(trace.converged);
        let ExtReal::Finite(x) = trace.fixed_point().get(0).as_ext() else {
            panic!()
        };
        assert!((x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn divergent_chain_promotes_to_infinity() {
        let op = OperatorHandle::mc_total(mc(r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":1.0}},"rewards":{"s":1}}"#));
        let policy = ConvergencePolicy::tolerance(1e-9)
            .with_cap(1e3)
            .with_max_iterations(5_000);
        let trace = kleene_lfp(&op, &policy).unwrap();
        assert!(trace.promoted);
        assert!(trace.converged, "∞ is stationary once promoted");
        assert!(trace.is_approximate());
        assert_eq!(trace.fixed_point().get(0).as_ext(), ExtReal::Infinity);
        assert!(trace.scope().contains("cap-promoted"));
    }

    #[test]
    fn non_convergence_carries_last_iterate() {
        let op = OperatorHandle::mc_total(geometric());
        let policy = ConvergencePolicy::tolerance(1e-30).with_max_iterations(10);
        let trace = kleene_lfp(&op, &policy).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.steps, 10);
        assert_eq!(trace.iterates.len(), 11);
        assert!(trace.scope().starts_with("approximate("));
    }

    #[test]
    fn exact_solver_geometric() {
        let v = mc_total_exact(&geometric()).unwrap();
        let ExtReal::Finite(x) = v.get(0).as_ext() else {
            panic!()
        };
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_solver_two_state_chain() {
        let v = mc_total_exact(&mc(r#"{"type":"mc","states":["s0","s1"],
            "transitions":{"s0":{"s1":1.0},"s1":{"__target__":1.0}},
            "rewards":{"s0":1,"s1":1}}"#))
        .unwrap();
        assert_eq!(v.get(0).as_ext(), ExtReal::Finite(2.0));
        assert_eq!(v.get(1).as_ext(), ExtReal::Finite(1.0));
    }

    #[test]
    fn exact_solver_zero_reward_loop() {
        let v = mc_total_exact(&mc(r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":1.0}},"rewards":{"s":0}}"#))
        .unwrap();
        assert_eq!(v.get(0).as_ext(), ExtReal::ZERO);
    }

    #[test]
    fn exact_solver_divergent_loop() {
        let v = mc_total_exact(&mc(r#"{"type":"mc","states":["s0","s1"],
            "transitions":{"s0":{"s1":0.5,"__target__":0.5},"s1":{"s1":1.0}},
            "rewards":{"s0":0,"s1":3}}"#))
        .unwrap();
        assert_eq!(v.get(0).as_ext(), ExtReal::Infinity, "reaches the trap");
        assert_eq!(v.get(1).as_ext(), ExtReal::Infinity);
    }

    #[test]
    fn chain_pair_stage_zero_is_bottom() {
        let op_c = OperatorHandle::mc_partial(geometric());
        let op_a = OperatorHandle::mc_total(geometric());
        let g = GaloisConnection::mc_reward();
        let pair = chain_pair(&op_c, &op_a, &g, 0).unwrap();
        assert_eq!(pair.concrete_stages.len(), 1);
        assert_eq!(pair.concrete_stages[0], op_c.bottom());
        assert_eq!(pair.abstract_stages[0], op_a.bottom());
    }

    #[test]
    fn chain_pair_geometric_stages() {
        // Hand-computed stages: partial (½,½), (¾,1), (⅞,11/8);
        // total 1, 3/2, 7/4. π2 of the partial chain stays strictly below.
        let op_c = OperatorHandle::mc_partial(geometric());
        let op_a = OperatorHandle::mc_total(geometric());
        let g = GaloisConnection::mc_reward();
        let pair = chain_pair(&op_c, &op_a, &g, 5).unwrap();
        let stage = |i: usize| pair.concrete_stages[i].get(0).clone();
        assert_eq!(stage(1), Value::prob_reward(0.5, ExtReal::Finite(0.5)));
        assert_eq!(stage(2), Value::prob_reward(0.75, ExtReal::Finite(1.0)));
        assert_eq!(stage(3), Value::prob_reward(0.875, ExtReal::Finite(1.375)));
        assert_eq!(
            pair.abstract_stages[1].get(0).as_ext(),
            ExtReal::Finite(1.0)
        );
        assert_eq!(
            pair.abstract_stages[2].get(0).as_ext(),
            ExtReal::Finite(1.5)
        );
        assert_eq!(
            pair.abstract_stages[3].get(0).as_ext(),
            ExtReal::Finite(1.75)
        );
        for i in 1..=5 {
            let lowered = pair.lowered_stages[i].get(0).as_ext();
            let total = pair.abstract_stages[i].get(0).as_ext();
            assert!(lowered < total, "π1 below 1 keeps π2 strictly below total");
        }
    }

    #[test]
    fn tarjan_finds_components() {
        // 0 ↔ 1, 2 alone, 3 → 0.
        let edges = [vec![1], vec![0], vec![], vec![0]];
        let mut sccs = strongly_connected_components(4, |s| edges[s].iter().copied());
        for c in &mut sccs {
            c.sort_unstable();
        }
        sccs.sort();
        assert!(sccs.contains(&vec![0, 1]));
        assert!(sccs.contains(&vec![2]));
        assert!(sccs.contains(&vec![3]));
    }
}
