//! MDP operators derived from the MC operator by aggregating over
//! decompositions.
//!
//! `lift_partial_step` evaluates the MC partial-reward formula on every
//! global decomposition of the MDP — one choice per state and one generator
//! point per state — and unions the principal lowersets of the results.
//! `lift_total_step` joins the second components over all choice
//! decompositions, evaluated at the top point `(1, k(s'))` of each fiber
//! (the fiber join is attained there because both result components are
//! monotone in the selection). Both are extensionally equal to the direct
//! per-state operators; keeping the global enumeration makes that equality
//! a checkable fact rather than a definition.

use super::StepError;
use crate::ext::ExtReal;
use crate::frontier::{FrontierPoint, ParetoFrontier};
use crate::lattice::Value;
use crate::model::{Choice, Mdp, Next};
use crate::valuation::Valuation;

/// `(p, r)` of the MC partial-reward operator for one `(distribution,
/// reward)` pair against a pointwise selection.
fn mc_formula(choice: &Choice, selection: &[FrontierPoint]) -> FrontierPoint {
    let reward = f64::from(choice.reward);
    let mut p = 0.0f64;
    let mut r = ExtReal::ZERO;
    for &(next, prob) in &choice.dist {
        match next {
            Next::Target => {
                p += prob;
                r = r + ExtReal::Finite(reward * prob);
            }
            Next::State(t) => {
                let sel = selection[t];
                p += prob * sel.p;
                r = r + (sel.r + ExtReal::Finite(reward * sel.p)) * prob;
            }
        }
    }
    FrontierPoint::new(p, r)
}

/// Iterates over all index tuples bounded by `sizes`.
struct Odometer {
    digits: Vec<usize>,
    sizes: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(sizes: Vec<usize>) -> Odometer {
        let done = sizes.contains(&0);
        Odometer {
            digits: vec![0; sizes.len()],
            sizes,
            done,
        }
    }

    fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.digits)
        }
    }

    fn advance(&mut self) {
        for i in 0..self.digits.len() {
            self.digits[i] += 1;
            if self.digits[i] < self.sizes[i] {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

/// The lifted partial-reward step: union over global decompositions.
pub fn lift_partial_step(mdp: &Mdp, k: &Valuation, limit: u64) -> Result<Valuation, StepError> {
    let n = mdp.states.len();
    let choice_sizes: Vec<usize> = mdp.choices.iter().map(|c| c.len()).collect();
    let gen_sizes: Vec<usize> = (0..n).map(|s| k.get(s).as_frontier().len()).collect();
    let mut total: u64 = 1;
    for &c in &choice_sizes {
        total = total.saturating_mul(c as u64);
    }
    for &g in &gen_sizes {
        total = total.saturating_mul(g as u64);
    }
    if total > limit {
        return Err(StepError::DecompositionExplosion { size: total, limit });
    }

    let mut per_state: Vec<Vec<FrontierPoint>> = vec![Vec::new(); n];
    let mut choice_iter = Odometer::new(choice_sizes);
    while let Some(choice_pick) = choice_iter.current().map(<[usize]>::to_vec) {
        let mut gen_iter = Odometer::new(gen_sizes.clone());
        while let Some(gen_pick) = gen_iter.current() {
            let selection: Vec<FrontierPoint> = (0..n)
                .map(|s| k.get(s).as_frontier().points()[gen_pick[s]])
                .collect();
            for s in 0..n {
                let choice = &mdp.choices[s][choice_pick[s]];
                per_state[s].push(mc_formula(choice, &selection));
            }
            gen_iter.advance();
        }
        choice_iter.advance();
    }

    let mut out = k.clone();
    for (s, points) in per_state.into_iter().enumerate() {
        out.set(s, Value::Front(ParetoFrontier::from_points(points)));
    }
    Ok(out)
}

/// The lifted total-reward step: join of second components over all choice
/// decompositions.
pub fn lift_total_step(mdp: &Mdp, k: &Valuation) -> Result<Valuation, StepError> {
    let n = mdp.states.len();
    let top_selection: Vec<FrontierPoint> = (0..n)
        .map(|s| FrontierPoint::new(1.0, k.get(s).as_ext()))
        .collect();
    let choice_sizes: Vec<usize> = mdp.choices.iter().map(|c| c.len()).collect();
    let mut best: Vec<Option<ExtReal>> = vec![None; n];
    let mut choice_iter = Odometer::new(choice_sizes);
    while let Some(choice_pick) = choice_iter.current() {
        for s in 0..n {
            let choice = &mdp.choices[s][choice_pick[s]];
            let r = mc_formula(choice, &top_selection).r;
            best[s] = Some(match best[s] {
                Some(b) => b.max(r),
                None => r,
            });
        }
        choice_iter.advance();
    }
    let mut out = k.clone();
    for (s, v) in best.into_iter().enumerate() {
        out.set(s, Value::Ext(v.expect("c(s) is non-empty")));
    }
    Ok(out)
}
