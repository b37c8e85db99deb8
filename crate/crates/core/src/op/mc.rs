//! Bellman operators for expected rewards on Markov chains.

use crate::ext::ExtReal;
use crate::lattice::Value;
use crate::model::{MarkovChain, Next};
use crate::valuation::Valuation;

/// One partial-reward step on `[S, [0,1] × [0,∞]]`:
///
/// ```text
/// p = P(s,✓) + Σ P(s,s')·π1 k(s')
/// r = rew(s)·P(s,✓) + Σ P(s,s')·(π2 k(s') + rew(s)·π1 k(s'))
/// ```
pub fn step_mc_partial(mc: &MarkovChain, k: &Valuation) -> Valuation {
    let mut out = k.clone();
    for (s, row) in mc.transitions.iter().enumerate() {
        let rew = f64::from(mc.rewards[s]);
        let mut p = 0.0f64;
        let mut r = ExtReal::ZERO;
        for &(next, prob) in row {
            match next {
                Next::Target => {
                    p += prob;
                    r = r + ExtReal::Finite(rew * prob);
                }
                Next::State(t) => {
                    let (p1, r2) = pair_parts(k.get(t));
                    p += prob * p1;
                    r = r + (r2 + ExtReal::Finite(rew * p1)) * prob;
                }
            }
        }
        out.set(s, Value::prob_reward(p, r));
    }
    out
}

/// One total-reward step on `[S, [0,∞]]`: `rew(s) + Σ P(s,s')·k(s')`.
pub fn step_mc_total(mc: &MarkovChain, k: &Valuation) -> Valuation {
    let mut out = k.clone();
    for (s, row) in mc.transitions.iter().enumerate() {
        let mut r = ExtReal::Finite(f64::from(mc.rewards[s]));
        for &(next, prob) in row {
            if let Next::State(t) = next {
                r = r + k.get(t).as_ext() * prob;
            }
        }
        out.set(s, Value::Ext(r));
    }
    out
}

pub(crate) fn pair_parts(v: &Value) -> (f64, ExtReal) {
    let (p, r) = v.as_pair();
    (p.as_unit(), r.as_ext())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{load_model, Model};
    use crate::valuation::IndexSet;

    pub(crate) fn geometric() -> MarkovChain {
        let text = r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":0.5,"__target__":0.5}},"rewards":{"s":1}}"#;
        match load_model(text).unwrap() {
            Model::Mc(mc) => mc,
            _ => unreachable!(),
        }
    }

    fn one(v: Value) -> Valuation {
        Valuation::new(IndexSet::new(vec!["s".into()]), vec![v])
    }

    #[test]
    fn immediate_target_is_constant() {
        let text = r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"__target__":1.0}},"rewards":{"s":3}}"#;
        let Model::Mc(mc) = load_model(text).unwrap() else {
            unreachable!()
        };
        for k in [
            one(Value::prob_reward(0.0, ExtReal::ZERO)),
            one(Value::prob_reward(0.25, ExtReal::Finite(9.0))),
        ] {
            let out = step_mc_partial(&mc, &k);
            assert_eq!(out.get(0), &Value::prob_reward(1.0, ExtReal::Finite(3.0)));
        }
    }

    #[test]
    fn geometric_partial_step_from_bottom() {
        let mc = geometric();
        let out = step_mc_partial(&mc, &one(Value::prob_reward(0.0, ExtReal::ZERO)));
        assert_eq!(out.get(0), &Value::prob_reward(0.5, ExtReal::Finite(0.5)));
    }

    #[test]
    fn geometric_partial_fixed_point() {
        let mc = geometric();
        let out = step_mc_partial(&mc, &one(Value::prob_reward(1.0, ExtReal::Finite(2.0))));
        assert_eq!(out.get(0), &Value::prob_reward(1.0, ExtReal::Finite(2.0)));
    }

    #[test]
    fn geometric_total_steps() {
        let mc = geometric();
        let out = step_mc_total(&mc, &one(Value::Ext(ExtReal::ZERO)));
        assert_eq!(out.get(0).as_ext(), ExtReal::Finite(1.0));
        let out = step_mc_total(&mc, &one(Value::Ext(ExtReal::Finite(2.0))));
        assert_eq!(out.get(0).as_ext(), ExtReal::Finite(2.0), "fixed point");
    }

    #[test]
    fn divergent_total_absorbs_infinity() {
        let text = r#"{"type":"mc","states":["s"],
            "transitions":{"s":{"s":1.0}},"rewards":{"s":1}}"#;
        let Model::Mc(mc) = load_model(text).unwrap() else {
            unreachable!()
        };
        let out = step_mc_total(&mc, &one(Value::Ext(ExtReal::Infinity)));
        assert_eq!(out.get(0).as_ext(), ExtReal::Infinity);
    }
}
