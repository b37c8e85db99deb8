//! Independent brute-force ground truth for every instance.
//!
//! These deliberately avoid the operator machinery: Markov-chain values come
//! from explicit path enumeration, MDP frontiers from depth-bounded
//! history-dependent scheduler recursion without intermediate pruning, NFA
//! counts from a word-indexed DP double-checked by run enumeration, DLTS
//! verdicts from direct simulation, and resource values from a capped-sum
//! graph search.

use crate::ext::{ExtNat, ExtReal};
use crate::frontier::{FrontierPoint, ParetoFrontier};
use crate::lattice::{BoundedNat, Value};
use crate::model::{Dlts, LassoWord, MarkovChain, Mdp, Next, Nfa, ResourceGraph, ResourceNode};
use crate::op::LetterMc;
use crate::valuation::{IndexSet, Valuation};
use thiserror::Error;

/// Hard ceiling on enumerated paths / achievable points per query.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle out of budget: {detail}")]
    Budget { detail: String },
}

/// Finite-horizon reachability probability and partial expected reward by
/// path enumeration: sums `Pr(path → ✓)` and `Pr(path → ✓) · rew(path)` over
/// all paths of at most `horizon` states.
pub fn mc_partial_oracle(mc: &MarkovChain, horizon: usize) -> Result<Valuation, OracleError> {
    let idx = IndexSet::new(mc.states.clone());
    let mut values = Vec::with_capacity(mc.states.len());
    for s in 0..mc.states.len() {
        let mut acc = (0.0f64, 0.0f64);
        let mut paths: u64 = 0;
        walk_partial(mc, s, horizon, 1.0, 0.0, &mut acc, &mut paths)?;
        values.push(Value::prob_reward(acc.0, ExtReal::Finite(acc.1)));
    }
    Ok(Valuation::new(idx, values))
}

fn walk_partial(
    mc: &MarkovChain,
    s: usize,
    left: usize,
    prob: f64,
    rew: f64,
    acc: &mut (f64, f64),
    paths: &mut u64,
) -> Result<(), OracleError> {
    if left == 0 {
        return Ok(());
    }
    *paths += 1;
    if *paths > DEFAULT_BUDGET {
        return Err(OracleError::Budget {
            detail: format!("mc_partial path enumeration exceeded {DEFAULT_BUDGET}"),
        });
    }
    let rew_here = rew + f64::from(mc.rewards[s]);
    for &(next, p) in &mc.transitions[s] {
        match next {
            Next::Target => {
                acc.0 += prob * p;
                acc.1 += prob * p * rew_here;
            }
            Next::State(t) => {
                walk_partial(mc, t, left - 1, prob * p, rew_here, acc, paths)?;
            }
        }
    }
    Ok(())
}

/// Finite-horizon total expected reward by path enumeration: expected sum of
/// rewards over the first `horizon` steps, `✓` acting as a zero-reward sink.
pub fn mc_total_oracle(mc: &MarkovChain, horizon: usize) -> Result<Valuation, OracleError> {
    let idx = IndexSet::new(mc.states.clone());
    let mut values = Vec::with_capacity(mc.states.len());
    for s in 0..mc.states.len() {
        let mut acc = 0.0f64;
        let mut paths: u64 = 0;
        walk_total(mc, s, horizon, 1.0, 0.0, &mut acc, &mut paths)?;
        values.push(Value::Ext(ExtReal::Finite(acc)));
    }
    Ok(Valuation::new(idx, values))
}

fn walk_total(
    mc: &MarkovChain,
    s: usize,
    left: usize,
    prob: f64,
    rew: f64,
    acc: &mut f64,
    paths: &mut u64,
) -> Result<(), OracleError> {
    if left == 0 {
        return Ok(());
    }
    *paths += 1;
    if *paths > DEFAULT_BUDGET {
        return Err(OracleError::Budget {
            detail: format!("mc_total path enumeration exceeded {DEFAULT_BUDGET}"),
        });
    }
    let rew_here = rew + f64::from(mc.rewards[s]);
    if left == 1 {
        *acc += prob * rew_here;
        return Ok(());
    }
    for &(next, p) in &mc.transitions[s] {
        match next {
            // Absorbed at ✓: no further reward accrues on this path.
            Next::Target => *acc += prob * p * rew_here,
            Next::State(t) => walk_total(mc, t, left - 1, prob * p, rew_here, acc, paths)?,
        }
    }
    Ok(())
}

/// Depth-`horizon` achievable `(probability, partial reward)` points over
/// history-dependent deterministic schedulers, as a canonical frontier.
///
/// Independent subtrees choose independently, which is exactly
/// history-dependence; the full point multiset is kept (no pruning until the
/// final canonicalization).
pub fn mdp_pareto_oracle(mdp: &Mdp, horizon: usize) -> Result<Valuation, OracleError> {
    let idx = IndexSet::new(mdp.states.clone());
    let mut values = Vec::with_capacity(mdp.states.len());
    for s in 0..mdp.states.len() {
        let pts = achievable(mdp, s, horizon)?;
        let frontier = ParetoFrontier::from_points(
            pts.into_iter()
                .map(|(p, r)| FrontierPoint::new(p, ExtReal::Finite(r)))
                .collect(),
        );
        values.push(Value::Front(frontier));
    }
    Ok(Valuation::new(idx, values))
}

fn achievable(mdp: &Mdp, s: usize, depth: usize) -> Result<Vec<(f64, f64)>, OracleError> {
    if depth == 0 {
        return Ok(vec![(0.0, 0.0)]);
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for choice in &mdp.choices[s] {
        let mut target_prob = 0.0f64;
        let mut support: Vec<(usize, f64)> = Vec::new();
        for &(next, p) in &choice.dist {
            match next {
                Next::Target => target_prob += p,
                Next::State(t) => support.push((t, p)),
            }
        }
        let sub: Vec<Vec<(f64, f64)>> = support
            .iter()
            .map(|&(t, _)| achievable(mdp, t, depth - 1))
            .collect::<Result<_, _>>()?;
        let combos: u64 = sub
            .iter()
            .fold(1u64, |acc, v| acc.saturating_mul(v.len() as u64));
        if combos > DEFAULT_BUDGET {
            return Err(OracleError::Budget {
                detail: format!("mdp scheduler enumeration exceeded {DEFAULT_BUDGET}"),
            });
        }
        let reward = f64::from(choice.reward);
        let mut pick = vec![0usize; support.len()];
        'selections: loop {
            let mut p = target_prob;
            let mut r = reward * target_prob;
            for (i, &(_, prob)) in support.iter().enumerate() {
                let (sp, sr) = sub[i][pick[i]];
                p += prob * sp;
                r += prob * (sr + reward * sp);
            }
            out.push((p, r));
            if out.len() as u64 > DEFAULT_BUDGET {
                return Err(OracleError::Budget {
                    detail: format!("mdp achievable-point set exceeded {DEFAULT_BUDGET}"),
                });
            }
            let mut i = 0;
            loop {
                if i == pick.len() {
                    break 'selections;
                }
                pick[i] += 1;
                if pick[i] < sub[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
    Ok(out)
}

/// Exact accepting-run count per start state for one word, by dynamic
/// programming over suffixes.
pub fn nfa_count_oracle(nfa: &Nfa, word: &[usize]) -> Vec<ExtNat> {
    let mut counts: Vec<ExtNat> = nfa
        .accepting
        .iter()
        .map(|&a| if a { ExtNat::ONE } else { ExtNat::ZERO })
        .collect();
    for &a in word.iter().rev() {
        counts = (0..nfa.states.len())
            .map(|s| {
                nfa.delta[s][a]
                    .iter()
                    .fold(ExtNat::ZERO, |acc, &t| acc + counts[t])
            })
            .collect();
    }
    counts
}

/// Explicit enumeration of accepting runs (state sequences) for short words.
pub fn nfa_enumerate_runs(nfa: &Nfa, start: usize, word: &[usize]) -> Vec<Vec<usize>> {
    let mut runs = Vec::new();
    let mut current = vec![start];
    enumerate_runs_from(nfa, word, &mut current, &mut runs);
    runs
}

fn enumerate_runs_from(
    nfa: &Nfa,
    word: &[usize],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let here = *current.last().expect("run is never empty");
    match word.split_first() {
        None => {
            if nfa.accepting[here] {
                out.push(current.clone());
            }
        }
        Some((&a, rest)) => {
            for &t in &nfa.delta[here][a] {
                current.push(t);
                enumerate_runs_from(nfa, rest, current, out);
                current.pop();
            }
        }
    }
}

/// Run count and summed path probability per start state for one word under
/// a Markov chain over the alphabet.
pub fn nfa_prob_oracle(nfa: &Nfa, mc: &LetterMc, word: &[usize]) -> Vec<(ExtNat, ExtReal)> {
    let mut values: Vec<(ExtNat, ExtReal)> = nfa
        .accepting
        .iter()
        .map(|&acc| {
            if acc {
                (ExtNat::ONE, ExtReal::Finite(1.0))
            } else {
                (ExtNat::ZERO, ExtReal::ZERO)
            }
        })
        .collect();
    // Walk the word right to left; `next_head` is the letter after the
    // current one, or the target when the suffix is empty.
    let mut next_head: Option<usize> = None;
    for &a in word.iter().rev() {
        let c = match next_head {
            Some(b) => mc.prob(a, b),
            None => mc.prob(a, nfa.alphabet.len()),
        };
        values = (0..nfa.states.len())
            .map(|s| {
                let mut count = ExtNat::ZERO;
                let mut mass = ExtReal::ZERO;
                for &t in &nfa.delta[s][a] {
                    count = count + values[t].0;
                    mass = mass + values[t].1 * c;
                }
                (count, mass)
            })
            .collect();
        next_head = Some(a);
    }
    values
}

/// Outcome of simulating one `(state, lasso)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// Terminated after `steps` letters; `safe` is the safety of the state
    /// the final step was taken from.
    Terminates {
        steps: usize,
        safe: bool,
    },
    Loops,
}

/// Direct simulation with cycle detection on `(state, lasso-suffix)` pairs.
pub fn dlts_run_oracle(dlts: &Dlts, start: usize, lasso: &LassoWord) -> RunOutcome {
    let mut seen: Vec<(usize, LassoWord)> = Vec::new();
    let mut state = start;
    let mut word = lasso.clone();
    let mut steps = 0;
    loop {
        if seen.iter().any(|(s, w)| *s == state && *w == word) {
            return RunOutcome::Loops;
        }
        seen.push((state, word.clone()));
        let label = dlts
            .labels
            .iter()
            .position(|l| l == word.head())
            .expect("lasso labels validated against the model");
        steps += 1;
        match dlts.step[state][label] {
            Next::Target => {
                return RunOutcome::Terminates {
                    steps,
                    safe: dlts.safe[state],
                }
            }
            Next::State(t) => {
                state = t;
                word = word.tail();
            }
        }
    }
}

/// The best capped resource sum over paths to a target node, by search over
/// `(state, accumulated-capped-sum)` pairs; `⊥` when no target is reachable.
pub fn resource_path_oracle(g: &ResourceGraph, start: usize) -> BoundedNat {
    let m = g.bound;
    let n = g.states.len();
    let mut visited = vec![vec![false; (m + 1) as usize]; n];
    let mut stack = vec![(start, 0u32)];
    let mut best: Option<u32> = None;
    while let Some((s, acc)) = stack.pop() {
        if visited[s][acc as usize] {
            continue;
        }
        visited[s][acc as usize] = true;
        match &g.nodes[s] {
            ResourceNode::Target => {
                best = Some(best.map_or(acc, |b| b.max(acc)));
            }
            ResourceNode::Inner { succ, resource } => {
                let next_acc = (acc + resource).min(m);
                for &t in succ {
                    stack.push((t, next_acc));
                }
            }
        }
    }
    match best {
        Some(level) => BoundedNat::Level(level),
        None => BoundedNat::Bottom,
    }
}
