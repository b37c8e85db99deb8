//! Partial- and total-correctness operators for deterministic labeled
//! transition systems over lasso words.
//!
//! The infinite-word index `S × Σ^ω` is realized exactly on the finite
//! closure of the supplied lasso words under single-letter suffixing: the
//! operator's value at `(s, w)` depends only on `(s', tail(w))`, and lasso
//! suffixes cycle.

use crate::lattice::Value;
use crate::model::{Dlts, LassoWord, ModelError, Next};
use crate::valuation::{IndexSet, Valuation};
use std::collections::HashMap;
use std::sync::Arc;

/// The suffix-closed lasso index domain. Entry `i` of a valuation over
/// states `S` is the pair `(state i % |S|, suffix i / |S|)`.
#[derive(Clone, Debug)]
pub struct LassoDomain {
    suffixes: Vec<LassoWord>,
    /// Label id of each suffix's first letter.
    head: Vec<usize>,
    /// Suffix id of each suffix's tail.
    tail: Vec<usize>,
}

impl LassoDomain {
    /// Closes the given lassos under suffixing; labels must exist in the
    /// model.
    pub fn close(dlts: &Dlts, lassos: &[LassoWord]) -> Result<LassoDomain, ModelError> {
        let label_id: HashMap<&str, usize> = dlts
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut suffixes: Vec<LassoWord> = Vec::new();
        let mut seen: HashMap<LassoWord, usize> = HashMap::new();
        let mut work: Vec<LassoWord> = Vec::new();
        for w in lassos {
            if !seen.contains_key(w) {
                seen.insert(w.clone(), suffixes.len());
                suffixes.push(w.clone());
                work.push(w.clone());
            }
        }
        while let Some(w) = work.pop() {
            let t = w.tail();
            if !seen.contains_key(&t) {
                seen.insert(t.clone(), suffixes.len());
                suffixes.push(t.clone());
                work.push(t);
            }
        }
        let mut head = Vec::with_capacity(suffixes.len());
        let mut tail = Vec::with_capacity(suffixes.len());
        for w in &suffixes {
            let h = *label_id.get(w.head()).ok_or_else(|| {
                ModelError::Validation(format!("unknown label {} in lasso word", w.head()))
            })?;
            head.push(h);
            tail.push(seen[&w.tail()]);
        }
        Ok(LassoDomain {
            suffixes,
            head,
            tail,
        })
    }

    pub fn suffixes(&self) -> &[LassoWord] {
        &self.suffixes
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    pub fn head_label(&self, w: usize) -> usize {
        self.head[w]
    }

    pub fn tail_of(&self, w: usize) -> usize {
        self.tail[w]
    }

    /// Position of `(state, suffix)` in the dense index.
    pub fn entry(&self, w: usize, state: usize, n_states: usize) -> usize {
        w * n_states + state
    }

    /// Locates a lasso among the closed suffixes.
    pub fn find(&self, w: &LassoWord) -> Option<usize> {
        self.suffixes.iter().position(|x| x == w)
    }

    pub fn index_set(&self, states: &[String]) -> Arc<IndexSet> {
        let mut labels = Vec::with_capacity(self.suffixes.len() * states.len());
        for w in &self.suffixes {
            for s in states {
                labels.push(format!("{s}|{}", w.render()));
            }
        }
        IndexSet::new(labels)
    }
}

/// One partial-correctness step on `[S × Σ^ω, (2×2)_l]`: a terminal step
/// yields `(⊤, A(s))`; otherwise the pair
/// `(π1 k(s', w'), ¬π1 k(s', w') ∨ π2 k(s', w'))` for `s' = c(s)(σ)` and the
/// suffix `w'`.
pub fn step_dlts_partial(dlts: &Dlts, dom: &LassoDomain, k: &Valuation) -> Valuation {
    let n = dlts.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        let label = dom.head_label(w);
        let tail = dom.tail_of(w);
        for s in 0..n {
            let v = match dlts.step[s][label] {
                Next::Target => Value::lex(true, dlts.safe[s]),
                Next::State(t) => {
                    let (p1, p2) = lex_parts(k.get(dom.entry(tail, t, n)));
                    Value::lex(p1, !p1 || p2)
                }
            };
            out.set(dom.entry(w, s, n), v);
        }
    }
    out
}

/// One total-correctness step on `[S × Σ^ω, 2]`: a terminal step yields
/// `A(s)`; otherwise the successor's value is copied (the composite
/// collapses the pair, so the non-terminal branch simply propagates the
/// single abstract component).
pub fn step_dlts_total(dlts: &Dlts, dom: &LassoDomain, k: &Valuation) -> Valuation {
    let n = dlts.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        let label = dom.head_label(w);
        let tail = dom.tail_of(w);
        for s in 0..n {
            let v = match dlts.step[s][label] {
                Next::Target => dlts.safe[s],
                Next::State(t) => k.get(dom.entry(tail, t, n)).as_bool(),
            };
            out.set(dom.entry(w, s, n), Value::Bool(v));
        }
    }
    out
}

pub(crate) fn lex_parts(v: &Value) -> (bool, bool) {
    let (a, b) = v.as_pair();
    (a.as_bool(), b.as_bool())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::model::{load_model, Model};

    /// `s0 -a→ s1, s0 -b→ ✓; s1 -a→ ✓, s1 -b→ ✓`, safe = {s1}.
    pub(crate) fn terminating() -> Dlts {
        let text = r#"{"type":"dlts","states":["s0","s1"],"labels":["a","b"],
            "step":{"s0":{"a":"s1","b":"__target__"},
                    "s1":{"a":"__target__","b":"__target__"}},
            "safe":["s1"]}"#;
        match load_model(text).unwrap() {
            Model::Dlts(d) => d,
            _ => unreachable!(),
        }
    }

    fn ab_lasso() -> LassoWord {
        LassoWord::new(vec![], vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn closure_contains_all_rotations() {
        let d = terminating();
        let dom = LassoDomain::close(&d, &[ab_lasso()]).unwrap();
        assert_eq!(dom.len(), 2, "(ab)^ω and (ba)^ω");
        assert_eq!(dom.tail_of(dom.tail_of(0)), 0);
    }

    #[test]
    fn terminal_steps_report_safety_of_the_source() {
        let d = terminating();
        let dom = LassoDomain::close(&d, &[ab_lasso()]).unwrap();
        let k = Valuation::bottom(dom.index_set(&d.states), &Lattice::Lex2);
        let out = step_dlts_partial(&d, &dom, &k);
        let w_ab = dom.find(&ab_lasso()).unwrap();
        // s1 reading "a" terminates from a safe state.
        assert_eq!(out.get(dom.entry(w_ab, 1, 2)), &Value::lex(true, true));
        // s0 reading "b" terminates from an unsafe state.
        let w_ba = dom.tail_of(w_ab);
        assert_eq!(out.get(dom.entry(w_ba, 0, 2)), &Value::lex(true, false));
        // s0 reading "a" with bottom successor: vacuous partial correctness.
        assert_eq!(out.get(dom.entry(w_ab, 0, 2)), &Value::lex(false, true));
    }

    #[test]
    fn total_step_copies_or_decides() {
        let d = terminating();
        let dom = LassoDomain::close(&d, &[ab_lasso()]).unwrap();
        let k = Valuation::bottom(dom.index_set(&d.states), &Lattice::Bool2);
        let out = step_dlts_total(&d, &dom, &k);
        let w_ab = dom.find(&ab_lasso()).unwrap();
        let w_ba = dom.tail_of(w_ab);
        assert!(out.get(dom.entry(w_ab, 1, 2)).as_bool(), "terminal safe");
        assert!(!out.get(dom.entry(w_ba, 0, 2)).as_bool(), "terminal unsafe");
        assert!(
            !out.get(dom.entry(w_ab, 0, 2)).as_bool(),
            "copies ⊥ successor"
        );
        let out2 = step_dlts_total(&d, &dom, &out);
        assert!(
            out2.get(dom.entry(w_ab, 0, 2)).as_bool(),
            "copies ⊤ successor"
        );
    }
}
