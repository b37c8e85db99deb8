//! Multi-objective and total-reward Bellman operators for MDPs.

use super::StepError;
use crate::ext::ExtReal;
use crate::frontier::{FrontierPoint, ParetoFrontier};
use crate::lattice::Value;
use crate::model::{Choice, Mdp, Next};
use crate::valuation::Valuation;

/// One step of the multi-objective partial-reward operator on frontier
/// valuations. For every choice, every selection of one generator point per
/// successor in the distribution's support contributes the pair
///
/// ```text
/// p = d(✓) + Σ d(s')·π1 k'(s')
/// r = n·d(✓) + Σ d(s')·(π2 k'(s') + n·π1 k'(s'))
/// ```
///
/// as a principal lowerset; the union is returned canonicalized. Restricting
/// selections to generator points is lossless: `p` and `r` are monotone in
/// the selection, so interior points of the lowersets only produce dominated
/// pairs.
pub fn step_mdp_partial(mdp: &Mdp, k: &Valuation, limit: u64) -> Result<Valuation, StepError> {
    let mut out = k.clone();
    for (s, choices) in mdp.choices.iter().enumerate() {
        let mut selections: u64 = 0;
        for choice in choices {
            let mut prod: u64 = 1;
            for &(next, _) in &choice.dist {
                if let Next::State(t) = next {
                    prod = prod.saturating_mul(k.get(t).as_frontier().len() as u64);
                }
            }
            selections = selections.saturating_add(prod);
        }
        if selections > limit {
            return Err(StepError::FrontierExplosion {
                state: mdp.states[s].clone(),
                size: selections,
                limit,
            });
        }
        let mut points = Vec::new();
        for choice in choices {
            collect_choice_points(choice, k, &mut points);
        }
        out.set(s, Value::Front(ParetoFrontier::from_points(points)));
    }
    Ok(out)
}

/// Evaluates one choice over every generator selection of the successors.
fn collect_choice_points(choice: &Choice, k: &Valuation, points: &mut Vec<FrontierPoint>) {
    let reward = f64::from(choice.reward);
    let mut target_prob = 0.0f64;
    let mut support: Vec<(usize, f64)> = Vec::new();
    for &(next, prob) in &choice.dist {
        match next {
            Next::Target => target_prob += prob,
            Next::State(t) => support.push((t, prob)),
        }
    }
    let frontiers: Vec<&ParetoFrontier> = support
        .iter()
        .map(|&(t, _)| k.get(t).as_frontier())
        .collect();
    let mut pick = vec![0usize; support.len()];
    loop {
        let mut p = target_prob;
        let mut r = ExtReal::Finite(reward * target_prob);
        for (i, &(_, prob)) in support.iter().enumerate() {
            let gen = frontiers[i].points()[pick[i]];
            p += prob * gen.p;
            r = r + (gen.r + ExtReal::Finite(reward * gen.p)) * prob;
        }
        points.push(FrontierPoint::new(p, r));
        // Odometer over the generator indices.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < frontiers[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// One step of the total-reward operator on `[S, [0,∞]]`:
/// `max over choices of n + Σ d(s')·k(s')`.
pub fn step_mdp_total(mdp: &Mdp, k: &Valuation) -> Valuation {
    let mut out = k.clone();
    for (s, choices) in mdp.choices.iter().enumerate() {
        let mut best = ExtReal::ZERO;
        for (i, choice) in choices.iter().enumerate() {
            let mut v = ExtReal::Finite(f64::from(choice.reward));
            for &(next, prob) in &choice.dist {
                if let Next::State(t) = next {
                    v = v + k.get(t).as_ext() * prob;
                }
            }
            best = if i == 0 { v } else { best.max(v) };
        }
        out.set(s, Value::Ext(best));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{load_model, Model};
    use crate::op::DEFAULT_EXPLOSION_LIMIT;
    use crate::valuation::IndexSet;

    /// State `s` with choices A = (δ✓, 0) and B = (½✓ + ½s, 5).
    pub(crate) fn two_choice() -> Mdp {
        let text = r#"{"type":"mdp","states":["s"],"choices":{"s":[
            {"dist":{"__target__":1.0},"reward":0},
            {"dist":{"__target__":0.5,"s":0.5},"reward":5}
        ]}}"#;
        match load_model(text).unwrap() {
            Model::Mdp(m) => m,
            _ => unreachable!(),
        }
    }

    fn one(v: Value) -> Valuation {
        Valuation::new(IndexSet::new(vec!["s".into()]), vec![v])
    }

    #[test]
    fn two_choice_first_frontier_step() {
        let mdp = two_choice();
        let k = one(Value::Front(ParetoFrontier::origin()));
        let out = step_mdp_partial(&mdp, &k, DEFAULT_EXPLOSION_LIMIT).unwrap();
        let want = ParetoFrontier::from_points(vec![
            FrontierPoint::new(1.0, ExtReal::ZERO),
            FrontierPoint::new(0.5, ExtReal::Finite(2.5)),
        ]);
        assert_eq!(out.get(0).as_frontier(), &want);
    }

    #[test]
    fn two_choice_total_step_and_fixed_point() {
        let mdp = two_choice();
        let out = step_mdp_total(&mdp, &one(Value::Ext(ExtReal::ZERO)));
        assert_eq!(out.get(0).as_ext(), ExtReal::Finite(5.0));
        let out = step_mdp_total(&mdp, &one(Value::Ext(ExtReal::Finite(10.0))));
        assert_eq!(out.get(0).as_ext(), ExtReal::Finite(10.0), "fixed point");
    }

    #[test]
    fn singleton_choices_reduce_to_mc_steps() {
        let mc = crate::op::mc::tests::geometric();
        let mdp = crate::model::embed_mc_as_mdp(&mc);
        let k = one(Value::Ext(ExtReal::Finite(1.25)));
        let got = step_mdp_total(&mdp, &k);
        let want = crate::op::step_mc_total(&mc, &k);
        assert_eq!(got, want);
    }

    #[test]
    fn explosion_limit_names_the_state() {
        let mdp = two_choice();
        let k = one(Value::Front(ParetoFrontier::from_points(vec![
            FrontierPoint::new(0.1, ExtReal::Finite(3.0)),
            FrontierPoint::new(0.2, ExtReal::Finite(2.0)),
            FrontierPoint::new(0.3, ExtReal::Finite(1.0)),
        ])));
        let err = step_mdp_partial(&mdp, &k, 2).unwrap_err();
        assert!(err.to_string().contains("state s"), "got: {err}");
    }
}
