//! Shared fixture corpus for the integration suites.
//!
//! Random models use dyadic probabilities (multiples of 1/64) so that both
//! evaluation routes of an identity perform exact IEEE arithmetic and
//! "exact" laws can be asserted literally.

#![allow(dead_code)]

use fixcorr::model::{Choice, ResourceNode};
use fixcorr::{
    Dlts, ExtNat, ExtReal, FrontierPoint, LassoWord, Lattice, MarkovChain, Mdp, Next, Nfa,
    ParetoFrontier, ResourceGraph, Valuation, Value,
};
use rand::rngs::StdRng;
use rand::Rng;
use rand::SeedableRng;
use std::sync::Arc;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// A dyadic distribution over the given successors: weights are multiples
/// of 1/64 and sum to exactly 1.0.
pub fn dyadic_dist(rng: &mut StdRng, targets: &[Next]) -> Vec<(Next, f64)> {
    assert!(!targets.is_empty());
    let mut weights = vec![0u32; targets.len()];
    for _ in 0..64 {
        weights[rng.gen_range(0..targets.len())] += 1;
    }
    let mut dist: Vec<(Next, f64)> = targets
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0)
        .map(|(&t, &w)| (t, f64::from(w) / 64.0))
        .collect();
    dist.sort_by_key(|(n, _)| match n {
        Next::State(i) => *i,
        Next::Target => usize::MAX,
    });
    dist
}

/// Random MC where every state moves to `✓` with probability at least 1/64:
/// almost-sure reachability holds by construction.
pub fn random_as_mc(rng: &mut StdRng, max_states: usize) -> MarkovChain {
    let n = rng.gen_range(1..=max_states);
    let mut transitions = Vec::with_capacity(n);
    for _ in 0..n {
        let mut targets = vec![Next::Target];
        for t in 0..n {
            if rng.gen_bool(0.5) {
                targets.push(Next::State(t));
            }
        }
        let mut dist = dyadic_dist(rng, &targets);
        if !dist.iter().any(|(t, _)| *t == Next::Target) {
            // Move one 1/64 grain of mass onto ✓.
            dist[0].1 -= 1.0 / 64.0;
            if dist[0].1 == 0.0 {
                dist.remove(0);
            }
            dist.push((Next::Target, 1.0 / 64.0));
        }
        transitions.push(dist);
    }
    MarkovChain {
        states: state_names(n),
        transitions,
        rewards: (0..n).map(|_| rng.gen_range(0..=9)).collect(),
    }
}

/// Random MC with a reachable absorbing positive-reward trap: almost-sure
/// reachability fails and the total reward diverges on the trap.
pub fn random_trap_mc(rng: &mut StdRng, max_states: usize) -> MarkovChain {
    let mut mc = random_as_mc(rng, max_states);
    let trap = mc.states.len();
    mc.states.push("trap".into());
    mc.transitions.push(vec![(Next::State(trap), 1.0)]);
    mc.rewards.push(rng.gen_range(1..=9));
    // Divert 1/4 of state 0's mass into the trap.
    let row = &mut mc.transitions[0];
    for entry in row.iter_mut() {
        entry.1 *= 0.75;
    }
    row.push((Next::State(trap), 0.25));
    row.sort_by_key(|(n, _)| match n {
        Next::State(i) => *i,
        Next::Target => usize::MAX,
    });
    mc
}

/// Random tiny MDP with dyadic distributions.
pub fn random_tiny_mdp(rng: &mut StdRng, max_states: usize, max_choices: usize) -> Mdp {
    let n = rng.gen_range(1..=max_states);
    let mut choices = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.gen_range(1..=max_choices);
        let mut list = Vec::with_capacity(k);
        for _ in 0..k {
            let mut targets = Vec::new();
            if rng.gen_bool(0.6) {
                targets.push(Next::Target);
            }
            for t in 0..n {
                if rng.gen_bool(0.4) {
                    targets.push(Next::State(t));
                }
            }
            if targets.is_empty() {
                targets.push(Next::Target);
            }
            list.push(Choice {
                dist: dyadic_dist(rng, &targets),
                reward: rng.gen_range(0..=9),
            });
        }
        choices.push(list);
    }
    Mdp {
        states: state_names(n),
        choices,
    }
}

/// Random resource graph; roughly a third of the states are targets.
pub fn random_resource_graph(rng: &mut StdRng, max_states: usize, max_bound: u32) -> ResourceGraph {
    let n = rng.gen_range(1..=max_states);
    let bound = rng.gen_range(1..=max_bound);
    let nodes = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                ResourceNode::Target
            } else {
                let succ: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                ResourceNode::Inner {
                    succ,
                    resource: rng.gen_range(0..=bound + 1),
                }
            }
        })
        .collect();
    ResourceGraph {
        states: state_names(n),
        nodes,
        bound,
    }
}

/// Random NFA over two letters.
pub fn random_nfa(rng: &mut StdRng, max_states: usize) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let delta = (0..n)
        .map(|_| {
            (0..2)
                .map(|_| (0..n).filter(|_| rng.gen_bool(0.35)).collect())
                .collect()
        })
        .collect();
    Nfa {
        states: state_names(n),
        alphabet: vec!["a".into(), "b".into()],
        delta,
        accepting: (0..n).map(|_| rng.gen_bool(0.4)).collect(),
    }
}

// Named fixtures.

pub fn geometric_mc() -> MarkovChain {
    MarkovChain {
        states: vec!["s".into()],
        transitions: vec![vec![(Next::State(0), 0.5), (Next::Target, 0.5)]],
        rewards: vec![1],
    }
}

pub fn trap_mc() -> MarkovChain {
    MarkovChain {
        states: vec!["s".into()],
        transitions: vec![vec![(Next::State(0), 1.0)]],
        rewards: vec![1],
    }
}

/// One state, choices A = (δ✓, 0) and B = (½✓ + ½s, 5); the limit frontier
/// collapses to {(1, 10)}.
pub fn two_choice_mdp() -> Mdp {
    Mdp {
        states: vec!["s".into()],
        choices: vec![vec![
            Choice {
                dist: vec![(Next::Target, 1.0)],
                reward: 0,
            },
            Choice {
                dist: vec![(Next::State(0), 0.5), (Next::Target, 0.5)],
                reward: 5,
            },
        ]],
    }
}

/// A jump-or-trap MDP: the trap state's frontier stays at {(0, 0)}.
pub fn trap_choice_mdp() -> Mdp {
    Mdp {
        states: vec!["s0".into(), "trap".into()],
        choices: vec![
            vec![
                Choice {
                    dist: vec![(Next::Target, 1.0)],
                    reward: 0,
                },
                Choice {
                    dist: vec![(Next::State(1), 1.0)],
                    reward: 1,
                },
            ],
            vec![Choice {
                dist: vec![(Next::State(1), 1.0)],
                reward: 1,
            }],
        ],
    }
}

/// `s0 --2--> s1 --2--> s2 = ✓` with `M = 3`.
pub fn resource_chain_22() -> ResourceGraph {
    ResourceGraph {
        states: state_names(3),
        nodes: vec![
            ResourceNode::Inner {
                succ: vec![1],
                resource: 2,
            },
            ResourceNode::Inner {
                succ: vec![2],
                resource: 2,
            },
            ResourceNode::Target,
        ],
        bound: 3,
    }
}

pub fn terminating_dlts() -> Dlts {
    Dlts {
        states: vec!["s0".into(), "s1".into()],
        labels: vec!["a".into(), "b".into()],
        step: vec![
            vec![Next::State(1), Next::Target],
            vec![Next::Target, Next::Target],
        ],
        safe: vec![false, true],
    }
}

pub fn looping_dlts() -> Dlts {
    Dlts {
        states: vec!["s".into()],
        labels: vec!["a".into(), "b".into()],
        step: vec![vec![Next::State(0), Next::Target]],
        safe: vec![true],
    }
}

pub fn lasso(prefix: &[&str], cycle: &[&str]) -> LassoWord {
    LassoWord::new(
        prefix.iter().map(|s| s.to_string()).collect(),
        cycle.iter().map(|s| s.to_string()).collect(),
    )
    .unwrap()
}

/// Deterministic two-state automaton: unambiguous.
pub fn dfa() -> Nfa {
    Nfa {
        states: vec!["p".into(), "q".into()],
        alphabet: vec!["a".into(), "b".into()],
        delta: vec![vec![vec![1], vec![0]], vec![vec![0], vec![]]],
        accepting: vec![false, true],
    }
}

/// `δ(s)(a) = {t, u}`, both accepting: the word "a" is ambiguous.
pub fn ambiguous_nfa() -> Nfa {
    Nfa {
        states: vec!["s".into(), "t".into(), "u".into()],
        alphabet: vec!["a".into(), "b".into()],
        delta: vec![
            vec![vec![1, 2], vec![]],
            vec![vec![], vec![]],
            vec![vec![], vec![]],
        ],
        accepting: vec![false, true, true],
    }
}

/// Two disjoint length-5 `a`-chains from a common start: the only ambiguous
/// word is `aaaaa`, invisible on word domains bounded below 5.
pub fn deep_ambiguous_nfa() -> Nfa {
    let n = 11;
    let mut delta = vec![vec![vec![], vec![]]; n];
    // 0 -a→ {1, 6}; 1..=5 chain; 6..=10 chain; 5 and 10 accepting.
    delta[0][0] = vec![1, 6];
    for (i, row) in delta.iter_mut().enumerate() {
        if (1..5).contains(&i) || (6..10).contains(&i) {
            row[0] = vec![i + 1];
        }
    }
    let mut accepting = vec![false; n];
    accepting[5] = true;
    accepting[10] = true;
    Nfa {
        states: state_names(n),
        alphabet: vec!["a".into(), "b".into()],
        delta,
        accepting,
    }
}

// Random valuations per lattice, over dyadic grids.

pub fn random_value(rng: &mut StdRng, lat: &Lattice) -> Value {
    match lat {
        Lattice::Bool2 => Value::Bool(rng.gen_bool(0.5)),
        Lattice::UnitInterval => Value::Unit(f64::from(rng.gen_range(0..=64u32)) / 64.0),
        Lattice::ExtRealLat => {
            if rng.gen_bool(0.1) {
                Value::Ext(ExtReal::Infinity)
            } else {
                Value::Ext(ExtReal::Finite(f64::from(rng.gen_range(0..=256u32)) / 64.0))
            }
        }
        Lattice::ExtNatLat => {
            if rng.gen_bool(0.1) {
                Value::Nat(ExtNat::Infinity)
            } else {
                Value::Nat(ExtNat::Finite(rng.gen_range(0..=4)))
            }
        }
        Lattice::BoundedNat(m) => {
            if rng.gen_bool(0.25) {
                Value::Res(fixcorr::BoundedNat::Bottom)
            } else {
                Value::Res(fixcorr::BoundedNat::Level(rng.gen_range(0..=*m)))
            }
        }
        Lattice::Product(a, b) => Value::pair(random_value(rng, a), random_value(rng, b)),
        Lattice::Lex2 => Value::lex(rng.gen_bool(0.5), rng.gen_bool(0.5)),
        Lattice::Frontier => {
            let k = rng.gen_range(1..=3);
            let pts = (0..k)
                .map(|_| {
                    FrontierPoint::new(
                        f64::from(rng.gen_range(0..=64u32)) / 64.0,
                        ExtReal::Finite(f64::from(rng.gen_range(0..=256u32)) / 64.0),
                    )
                })
                .collect();
            Value::Front(ParetoFrontier::from_points(pts))
        }
    }
}

pub fn random_valuation(
    rng: &mut StdRng,
    index: &Arc<fixcorr::IndexSet>,
    lat: &Lattice,
) -> Valuation {
    let values = (0..index.len()).map(|_| random_value(rng, lat)).collect();
    Valuation::new(Arc::clone(index), values)
}
