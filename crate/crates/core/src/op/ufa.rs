//! Language, run-counting, and probability-weighted operators for NFAs.
//!
//! The word index `S × A*` is realized on the finite, suffix-closed set of
//! all words up to a length bound; the value at `(s, w)` depends only on
//! strictly shorter suffixes, so the restriction is exact for every word in
//! the domain.

use crate::ext::{ExtNat, ExtReal};
use crate::lattice::Value;
use crate::model::{MarkovChain, ModelError, Next, Nfa};
use crate::valuation::{IndexSet, Valuation};
use std::collections::HashMap;
use std::sync::Arc;

/// All words over a fixed alphabet up to a length bound, ordered by length
/// then lexicographically by letter id. Entry `i` of a valuation over
/// states `S` is the pair `(state i % |S|, word i / |S|)`.
#[derive(Clone, Debug)]
pub struct WordDomain {
    alphabet_len: usize,
    max_len: usize,
    words: Vec<Vec<usize>>,
    /// `(head letter, tail word id)`, absent for the empty word.
    step: Vec<Option<(usize, usize)>>,
}

impl WordDomain {
    pub fn all_words(alphabet_len: usize, max_len: usize) -> WordDomain {
        if alphabet_len == 0 {
            // Only the empty word exists.
            return WordDomain {
                alphabet_len,
                max_len,
                words: vec![Vec::new()],
                step: vec![None],
            };
        }
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut id: HashMap<Vec<usize>, usize> = HashMap::new();
        id.insert(Vec::new(), 0);
        let mut start = 0;
        for _ in 1..=max_len {
            let end = words.len();
            for w in start..end {
                for a in 0..alphabet_len {
                    let mut longer = Vec::with_capacity(words[w].len() + 1);
                    longer.push(a);
                    longer.extend_from_slice(&words[w]);
                    id.insert(longer.clone(), words.len());
                    words.push(longer);
                }
            }
            start = end;
        }
        // Extending on the left keeps every tail inside the set but breaks
        // the length-lex enumeration order; restore it before numbering.
        let mut sorted = words.clone();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut id: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, w) in sorted.iter().enumerate() {
            id.insert(w.clone(), i);
        }
        let step = sorted
            .iter()
            .map(|w| w.split_first().map(|(&h, t)| (h, id[t])))
            .collect();
        WordDomain {
            alphabet_len,
            max_len,
            words: sorted,
            step,
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, w: usize) -> &[usize] {
        &self.words[w]
    }

    /// `None` for the empty word, otherwise `(head letter, tail id)`.
    pub fn split(&self, w: usize) -> Option<(usize, usize)> {
        self.step[w]
    }

    pub fn find(&self, letters: &[usize]) -> Option<usize> {
        self.words.iter().position(|w| w == letters)
    }

    pub fn entry(&self, w: usize, state: usize, n_states: usize) -> usize {
        w * n_states + state
    }

    pub fn render(&self, w: usize, alphabet: &[String]) -> String {
        self.words[w]
            .iter()
            .map(|&a| alphabet[a].as_str())
            .collect::<Vec<_>>()
            .join("")
    }

    pub fn index_set(&self, states: &[String], alphabet: &[String]) -> Arc<IndexSet> {
        let mut labels = Vec::with_capacity(self.words.len() * states.len());
        for w in 0..self.words.len() {
            let word = self.render(w, alphabet);
            for s in states {
                labels.push(format!("{s}|{word}"));
            }
        }
        IndexSet::new(labels)
    }
}

/// One language step on `[S × A*, 2]`: acceptance at the empty word, the
/// disjunction over `δ(s)(a)` of the suffix values otherwise.
pub fn step_ufa_lang(nfa: &Nfa, dom: &WordDomain, k: &Valuation) -> Valuation {
    let n = nfa.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        match dom.split(w) {
            None => {
                for s in 0..n {
                    out.set(dom.entry(w, s, n), Value::Bool(nfa.accepting[s]));
                }
            }
            Some((a, tail)) => {
                for s in 0..n {
                    let hit = nfa.delta[s][a]
                        .iter()
                        .any(|&t| k.get(dom.entry(tail, t, n)).as_bool());
                    out.set(dom.entry(w, s, n), Value::Bool(hit));
                }
            }
        }
    }
    out
}

/// One run-counting step on `[S × A*, ℕ∪{∞}]`: `i(Acc(s))` at the empty
/// word, the sum over `δ(s)(a)` of the suffix counts otherwise.
pub fn step_ufa_count(nfa: &Nfa, dom: &WordDomain, k: &Valuation) -> Valuation {
    let n = nfa.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        match dom.split(w) {
            None => {
                for s in 0..n {
                    let v = if nfa.accepting[s] {
                        ExtNat::ONE
                    } else {
                        ExtNat::ZERO
                    };
                    out.set(dom.entry(w, s, n), Value::Nat(v));
                }
            }
            Some((a, tail)) => {
                for s in 0..n {
                    let mut sum = ExtNat::ZERO;
                    for &t in &nfa.delta[s][a] {
                        sum = sum + k.get(dom.entry(tail, t, n)).as_nat();
                    }
                    out.set(dom.entry(w, s, n), Value::Nat(sum));
                }
            }
        }
    }
    out
}

/// Letter-indexed transition probabilities of an MC whose states are the
/// NFA alphabet: `prob[a][b]` for letters `a, b` and `prob[a][|A|]` for
/// `a → ✓`.
#[derive(Clone, Debug)]
pub struct LetterMc {
    prob: Vec<Vec<f64>>,
}

impl LetterMc {
    pub fn new(nfa: &Nfa, mc: &MarkovChain) -> Result<LetterMc, ModelError> {
        if mc.states.len() != nfa.alphabet.len() {
            return Err(ModelError::Validation(
                "alphabet mismatch: label MC states must be the NFA alphabet".into(),
            ));
        }
        let mut letter_of_state = vec![usize::MAX; mc.states.len()];
        for (si, name) in mc.states.iter().enumerate() {
            match nfa.alphabet.iter().position(|a| a == name) {
                Some(ai) => letter_of_state[si] = ai,
                None => {
                    return Err(ModelError::Validation(format!(
                        "alphabet mismatch: MC state {name} is not an NFA letter"
                    )))
                }
            }
        }
        let n = nfa.alphabet.len();
        let mut prob = vec![vec![0.0; n + 1]; n];
        for (si, row) in mc.transitions.iter().enumerate() {
            let a = letter_of_state[si];
            for &(next, p) in row {
                match next {
                    Next::Target => prob[a][n] += p,
                    Next::State(t) => prob[a][letter_of_state[t]] += p,
                }
            }
        }
        Ok(LetterMc { prob })
    }

    /// `c(a, b)` where `b` is a letter id, or the target when `b == |A|`.
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.prob[a][b]
    }

    fn continuation(&self, a: usize, tail_head: Option<usize>) -> f64 {
        let n = self.prob.len();
        self.prob(a, tail_head.unwrap_or(n))
    }
}

/// One step of the probability-weighted language operator on
/// `[S × A*, 2 × [0,1]]`. At the empty word both components are `Acc(s)`
/// (read as 0/1); otherwise the first component is the language disjunction
/// and the second is
///
/// ```text
/// min(π1 k(s, a·w'), ⋁_{s' ∈ δ(s)(a)} c(a, b) · π2 k(s', w'))
/// ```
///
/// with `b` the first letter of `w'·✓`. The `π1` coupling reads the current
/// index of the argument valuation.
pub fn step_ufa_prob_lang(nfa: &Nfa, mc: &LetterMc, dom: &WordDomain, k: &Valuation) -> Valuation {
    let n = nfa.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        match dom.split(w) {
            None => {
                for s in 0..n {
                    let acc = nfa.accepting[s];
                    out.set(
                        dom.entry(w, s, n),
                        Value::pair(Value::Bool(acc), Value::Unit(if acc { 1.0 } else { 0.0 })),
                    );
                }
            }
            Some((a, tail)) => {
                let c = mc.continuation(a, dom.split(tail).map(|(h, _)| h));
                for s in 0..n {
                    let mut lang = false;
                    let mut weighted = 0.0f64;
                    for &t in &nfa.delta[s][a] {
                        let (b, p) = k.get(dom.entry(tail, t, n)).as_pair();
                        lang |= b.as_bool();
                        weighted = weighted.max(c * p.as_unit());
                    }
                    let (cur, _) = k.get(dom.entry(w, s, n)).as_pair();
                    let gate = if cur.as_bool() { 1.0 } else { 0.0 };
                    out.set(
                        dom.entry(w, s, n),
                        Value::pair(Value::Bool(lang), Value::Unit(weighted.min(gate))),
                    );
                }
            }
        }
    }
    out
}

/// One step of the probability-summing counting operator on
/// `[S × A*, (ℕ∪{∞}) × [0,∞]]`: run counts in the first component, the sum
/// `Σ_{s' ∈ δ(s)(a)} c(a, b) · π2 k(s', w')` in the second.
pub fn step_ufa_prob_count(nfa: &Nfa, mc: &LetterMc, dom: &WordDomain, k: &Valuation) -> Valuation {
    let n = nfa.states.len();
    let mut out = k.clone();
    for w in 0..dom.len() {
        match dom.split(w) {
            None => {
                for s in 0..n {
                    let acc = nfa.accepting[s];
                    let count = if acc { ExtNat::ONE } else { ExtNat::ZERO };
                    let mass = if acc {
                        ExtReal::Finite(1.0)
                    } else {
                        ExtReal::ZERO
                    };
                    out.set(
                        dom.entry(w, s, n),
                        Value::pair(Value::Nat(count), Value::Ext(mass)),
                    );
                }
            }
            Some((a, tail)) => {
                let c = mc.continuation(a, dom.split(tail).map(|(h, _)| h));
                for s in 0..n {
                    let mut count = ExtNat::ZERO;
                    let mut mass = ExtReal::ZERO;
                    for &t in &nfa.delta[s][a] {
                        let (m, p) = k.get(dom.entry(tail, t, n)).as_pair();
                        count = count + m.as_nat();
                        mass = mass + p.as_ext() * c;
                    }
                    out.set(
                        dom.entry(w, s, n),
                        Value::pair(Value::Nat(count), Value::Ext(mass)),
                    );
                }
            }
        }
    }
    out
}
