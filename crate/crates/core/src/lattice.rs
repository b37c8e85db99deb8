//! Lattice descriptors and dynamically typed lattice elements.
//!
//! Every quantitative domain used by the engine is one of a closed vocabulary
//! of complete-lattice kinds. A [`Lattice`] value describes the kind; a
//! [`Value`] holds an element. Orders, joins, bottoms and equality all
//! dispatch on the descriptor, so a pair of Booleans can be read under the
//! product order or under the lexicographic order depending on the lattice
//! it is checked against.

use crate::ext::{ExtNat, ExtReal};
use crate::frontier::ParetoFrontier;
use std::fmt;
use thiserror::Error;

/// A bounded natural with an added least element, the carrier `{⊥, 0, …, M}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedNat {
    Bottom,
    Level(u32),
}

impl BoundedNat {
    pub fn leq(&self, other: &BoundedNat) -> bool {
        match (self, other) {
            (BoundedNat::Bottom, _) => true,
            (BoundedNat::Level(_), BoundedNat::Bottom) => false,
            (BoundedNat::Level(a), BoundedNat::Level(b)) => a <= b,
        }
    }
}

impl fmt::Display for BoundedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundedNat::Bottom => write!(f, "bot"),
            BoundedNat::Level(n) => write!(f, "{n}"),
        }
    }
}

/// Descriptor of a lattice kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Lattice {
    /// The two-element lattice `{⊥, ⊤}`.
    Bool2,
    /// The unit interval `[0, 1]`.
    UnitInterval,
    /// The extended non-negative reals `[0, ∞]`.
    ExtRealLat,
    /// The extended naturals `ℕ ∪ {∞}`.
    ExtNatLat,
    /// `{⊥, 0, …, M}` with `⊥` strictly below `0`.
    BoundedNat(u32),
    /// Componentwise product of two lattices.
    Product(Box<Lattice>, Box<Lattice>),
    /// Pairs of Booleans under the lexicographic order.
    Lex2,
    /// Finitely generated lowersets of `[0,1] × [0,∞]` as Pareto frontiers.
    Frontier,
}

impl Lattice {
    pub fn product(a: Lattice, b: Lattice) -> Lattice {
        Lattice::Product(Box::new(a), Box::new(b))
    }

    /// The pair lattice `[0,1] × [0,∞]` of the partial-reward domain.
    pub fn prob_reward_pair() -> Lattice {
        Lattice::product(Lattice::UnitInterval, Lattice::ExtRealLat)
    }

    pub fn bottom(&self) -> Value {
        match self {
            Lattice::Bool2 => Value::Bool(false),
            Lattice::UnitInterval => Value::Unit(0.0),
            Lattice::ExtRealLat => Value::Ext(ExtReal::ZERO),
            Lattice::ExtNatLat => Value::Nat(ExtNat::ZERO),
            Lattice::BoundedNat(_) => Value::Res(BoundedNat::Bottom),
            Lattice::Product(a, b) => Value::pair(a.bottom(), b.bottom()),
            Lattice::Lex2 => Value::pair(Value::Bool(false), Value::Bool(false)),
            Lattice::Frontier => Value::Front(ParetoFrontier::origin()),
        }
    }

    /// Whether `v` is an element of this lattice.
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Lattice::Bool2, Value::Bool(_)) => true,
            (Lattice::UnitInterval, Value::Unit(x)) => (0.0..=1.0).contains(x),
            (Lattice::ExtRealLat, Value::Ext(_)) => true,
            (Lattice::ExtNatLat, Value::Nat(_)) => true,
            (Lattice::BoundedNat(m), Value::Res(r)) => match r {
                BoundedNat::Bottom => true,
                BoundedNat::Level(n) => n <= m,
            },
            (Lattice::Product(la, lb), Value::Pair(a, b)) => la.contains(a) && lb.contains(b),
            (Lattice::Lex2, Value::Pair(a, b)) => {
                matches!(**a, Value::Bool(_)) && matches!(**b, Value::Bool(_))
            }
            (Lattice::Frontier, Value::Front(_)) => true,
            _ => false,
        }
    }

    fn expect_member(&self, v: &Value) -> Result<(), LatticeError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(LatticeError::KindMismatch {
                lattice: format!("{self:?}"),
                value: format!("{v:?}"),
            })
        }
    }

    /// The order `a ⊑ b`. Exact comparison throughout; tolerances belong to
    /// the solver's convergence tests, not the order.
    pub fn leq(&self, a: &Value, b: &Value) -> Result<bool, LatticeError> {
        self.expect_member(a)?;
        self.expect_member(b)?;
        Ok(self.leq_unchecked(a, b))
    }

    fn leq_unchecked(&self, a: &Value, b: &Value) -> bool {
        match (self, a, b) {
            (Lattice::Bool2, Value::Bool(x), Value::Bool(y)) => !x || *y,
            (Lattice::UnitInterval, Value::Unit(x), Value::Unit(y)) => x <= y,
            (Lattice::ExtRealLat, Value::Ext(x), Value::Ext(y)) => x.leq(y),
            (Lattice::ExtNatLat, Value::Nat(x), Value::Nat(y)) => x.leq(y),
            (Lattice::BoundedNat(_), Value::Res(x), Value::Res(y)) => x.leq(y),
            (Lattice::Product(la, lb), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                la.leq_unchecked(a1, b1) && lb.leq_unchecked(a2, b2)
            }
            (Lattice::Lex2, Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                let (x1, x2) = (a1.as_bool(), a2.as_bool());
                let (y1, y2) = (b1.as_bool(), b2.as_bool());
                // (a, b) ⊑ (c, d) iff a ≤ c and (a = c implies b ≤ d).
                (!x1 || y1) && (x1 != y1 || !x2 || y2)
            }
            (Lattice::Frontier, Value::Front(x), Value::Front(y)) => x.leq(y),
            _ => unreachable!("membership was checked"),
        }
    }

    /// Binary join.
    pub fn join(&self, a: &Value, b: &Value) -> Result<Value, LatticeError> {
        self.expect_member(a)?;
        self.expect_member(b)?;
        Ok(self.join_unchecked(a, b))
    }

    fn join_unchecked(&self, a: &Value, b: &Value) -> Value {
        match (self, a, b) {
            (Lattice::Bool2, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (Lattice::UnitInterval, Value::Unit(x), Value::Unit(y)) => Value::Unit(x.max(*y)),
            (Lattice::ExtRealLat, Value::Ext(x), Value::Ext(y)) => Value::Ext(x.max(*y)),
            (Lattice::ExtNatLat, Value::Nat(x), Value::Nat(y)) => Value::Nat((*x).max(*y)),
            (Lattice::BoundedNat(_), Value::Res(x), Value::Res(y)) => {
                Value::Res(if x.leq(y) { *y } else { *x })
            }
            (Lattice::Product(la, lb), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                Value::pair(la.join_unchecked(a1, b1), lb.join_unchecked(a2, b2))
            }
            (Lattice::Lex2, _, _) => {
                if self.leq_unchecked(a, b) {
                    b.clone()
                } else if self.leq_unchecked(b, a) {
                    a.clone()
                } else {
                    // Incomparable Lex2 pairs are (⊥,⊤)-style only when one
                    // first component is ⊤; the lexicographic join is then
                    // (⊤, second of the ⊤ side ∨ nothing). Concretely the
                    // only incomparable case cannot occur: Lex2 is a chain
                    // (⊥,⊥) < (⊥,⊤) < (⊤,⊥) < (⊤,⊤).
                    unreachable!("Lex2 is totally ordered")
                }
            }
            (Lattice::Frontier, Value::Front(x), Value::Front(y)) => Value::Front(x.union(y)),
            _ => unreachable!("membership was checked"),
        }
    }

    /// Equality up to a per-coordinate absolute tolerance; discrete kinds
    /// compare exactly regardless of `tol`.
    pub fn eq_tol(&self, a: &Value, b: &Value, tol: f64) -> Result<bool, LatticeError> {
        self.expect_member(a)?;
        self.expect_member(b)?;
        Ok(self.eq_tol_unchecked(a, b, tol))
    }

    fn eq_tol_unchecked(&self, a: &Value, b: &Value, tol: f64) -> bool {
        match (self, a, b) {
            (Lattice::Bool2, Value::Bool(x), Value::Bool(y)) => x == y,
            (Lattice::UnitInterval, Value::Unit(x), Value::Unit(y)) => (x - y).abs() <= tol,
            (Lattice::ExtRealLat, Value::Ext(x), Value::Ext(y)) => x.eq_tol(y, tol),
            (Lattice::ExtNatLat, Value::Nat(x), Value::Nat(y)) => x == y,
            (Lattice::BoundedNat(_), Value::Res(x), Value::Res(y)) => x == y,
            (Lattice::Product(la, lb), Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                la.eq_tol_unchecked(a1, b1, tol) && lb.eq_tol_unchecked(a2, b2, tol)
            }
            (Lattice::Lex2, Value::Pair(a1, a2), Value::Pair(b1, b2)) => a1 == b1 && a2 == b2,
            (Lattice::Frontier, Value::Front(x), Value::Front(y)) => x.eq_tol(y, tol),
            _ => unreachable!("membership was checked"),
        }
    }

    /// Largest coordinate distance between two elements. Discrete mismatches
    /// count via the `{⊥,⊤} → {0,1}` embedding; a finite coordinate against
    /// `∞` (or against `⊥` of a bounded-natural) is `∞`.
    pub fn deviation(&self, a: &Value, b: &Value) -> Result<ExtReal, LatticeError> {
        self.expect_member(a)?;
        self.expect_member(b)?;
        Ok(self.deviation_unchecked(a, b))
    }

    fn deviation_unchecked(&self, a: &Value, b: &Value) -> ExtReal {
        match (self, a, b) {
            (Lattice::Bool2, Value::Bool(x), Value::Bool(y)) => {
                ExtReal::Finite(if x == y { 0.0 } else { 1.0 })
            }
            (Lattice::UnitInterval, Value::Unit(x), Value::Unit(y)) => {
                ExtReal::Finite((x - y).abs())
            }
            (Lattice::ExtRealLat, Value::Ext(x), Value::Ext(y)) => x.deviation(y),
            (Lattice::ExtNatLat, Value::Nat(x), Value::Nat(y)) => {
                x.to_ext_real().deviation(&y.to_ext_real())
            }
            (Lattice::BoundedNat(_), Value::Res(x), Value::Res(y)) => match (x, y) {
                (BoundedNat::Bottom, BoundedNat::Bottom) => ExtReal::ZERO,
                (BoundedNat::Level(m), BoundedNat::Level(n)) => {
                    ExtReal::Finite((*m as f64 - *n as f64).abs())
                }
                _ => ExtReal::Infinity,
            },
            (Lattice::Product(la, lb), Value::Pair(a1, a2), Value::Pair(b1, b2)) => la
                .deviation_unchecked(a1, b1)
                .max(lb.deviation_unchecked(a2, b2)),
            (Lattice::Lex2, Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
                let d1: f64 = if a1 == b1 { 0.0 } else { 1.0 };
                let d2: f64 = if a2 == b2 { 0.0 } else { 1.0 };
                ExtReal::Finite(d1.max(d2))
            }
            (Lattice::Frontier, Value::Front(x), Value::Front(y)) => x.deviation(y),
            _ => unreachable!("membership was checked"),
        }
    }
}

/// A dynamically typed lattice element.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Unit(f64),
    Ext(ExtReal),
    Nat(ExtNat),
    Res(BoundedNat),
    Pair(Box<Value>, Box<Value>),
    Front(ParetoFrontier),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn lex(a: bool, b: bool) -> Value {
        Value::pair(Value::Bool(a), Value::Bool(b))
    }

    pub fn prob_reward(p: f64, r: ExtReal) -> Value {
        Value::pair(Value::Unit(p), Value::Ext(r))
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            other => panic!("expected Bool, got {other:?}"),
        }
    }

    pub fn as_unit(&self) -> f64 {
        match self {
            Value::Unit(x) => *x,
            other => panic!("expected Unit, got {other:?}"),
        }
    }

    pub fn as_ext(&self) -> ExtReal {
        match self {
            Value::Ext(x) => *x,
            other => panic!("expected Ext, got {other:?}"),
        }
    }

    pub fn as_nat(&self) -> ExtNat {
        match self {
            Value::Nat(x) => *x,
            other => panic!("expected Nat, got {other:?}"),
        }
    }

    pub fn as_res(&self) -> BoundedNat {
        match self {
            Value::Res(x) => *x,
            other => panic!("expected Res, got {other:?}"),
        }
    }

    pub fn as_pair(&self) -> (&Value, &Value) {
        match self {
            Value::Pair(a, b) => (a, b),
            other => panic!("expected Pair, got {other:?}"),
        }
    }

    pub fn as_frontier(&self) -> &ParetoFrontier {
        match self {
            Value::Front(f) => f,
            other => panic!("expected Front, got {other:?}"),
        }
    }

    /// Promotes extended-real coordinates above `cap` to `∞`, recursively.
    /// Returns whether anything changed.
    pub fn promote_above(&mut self, cap: f64) -> bool {
        match self {
            Value::Ext(x) => {
                if let ExtReal::Finite(v) = x {
                    if *v > cap {
                        *x = ExtReal::Infinity;
                        return true;
                    }
                }
                false
            }
            Value::Nat(x) => {
                if let ExtNat::Finite(v) = x {
                    if (*v as f64) > cap {
                        *x = ExtNat::Infinity;
                        return true;
                    }
                }
                false
            }
            Value::Pair(a, b) => {
                let pa = a.promote_above(cap);
                let pb = b.promote_above(cap);
                pa || pb
            }
            Value::Front(f) => f.promote_above(cap),
            _ => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("kind mismatch: {value} is not an element of {lattice}")]
    KindMismatch { lattice: String, value: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex2_order() {
        let lex = Lattice::Lex2;
        // (⊥,⊤) ⊑ (⊤,⊥).
        assert!(lex
            .leq(&Value::lex(false, true), &Value::lex(true, false))
            .unwrap());
        assert!(!lex
            .leq(&Value::lex(true, false), &Value::lex(false, true))
            .unwrap());
        // Chain order: ⊥⊥ < ⊥⊤ < ⊤⊥ < ⊤⊤.
        assert!(lex
            .leq(&Value::lex(false, false), &Value::lex(false, true))
            .unwrap());
        assert!(lex
            .leq(&Value::lex(true, false), &Value::lex(true, true))
            .unwrap());
        assert!(!lex
            .leq(&Value::lex(true, true), &Value::lex(true, false))
            .unwrap());
    }

    #[test]
    fn frontier_inclusion_order() {
        let lat = Lattice::Frontier;
        let a = Value::Front(ParetoFrontier::singleton(1.0, ExtReal::ZERO));
        let b = Value::Front(ParetoFrontier::singleton(1.0, ExtReal::Finite(5.0)));
        assert!(lat.leq(&a, &b).unwrap());
        assert!(!lat.leq(&b, &a).unwrap());
    }

    #[test]
    fn bounded_nat_added_bottom() {
        let lat = Lattice::BoundedNat(3);
        assert!(lat
            .leq(
                &Value::Res(BoundedNat::Bottom),
                &Value::Res(BoundedNat::Level(0))
            )
            .unwrap());
        assert!(!lat
            .leq(
                &Value::Res(BoundedNat::Level(2)),
                &Value::Res(BoundedNat::Bottom)
            )
            .unwrap());
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let err = Lattice::Bool2.leq(&Value::Unit(0.5), &Value::Bool(true));
        assert!(err.is_err());
        let err = Lattice::BoundedNat(3).leq(
            &Value::Res(BoundedNat::Level(4)),
            &Value::Res(BoundedNat::Level(1)),
        );
        assert!(err.is_err(), "level above the bound is not a member");
    }

    #[test]
    fn product_vs_lex_on_same_representation() {
        let v = Value::lex(false, true);
        let w = Value::lex(true, false);
        let prod = Lattice::product(Lattice::Bool2, Lattice::Bool2);
        assert!(!prod.leq(&v, &w).unwrap(), "incomparable componentwise");
        assert!(
            Lattice::Lex2.leq(&v, &w).unwrap(),
            "comparable lexicographically"
        );
    }

    #[test]
    fn deviation_examples() {
        let lat = Lattice::ExtRealLat;
        assert_eq!(
            lat.deviation(
                &Value::Ext(ExtReal::Finite(1.0)),
                &Value::Ext(ExtReal::Infinity)
            )
            .unwrap(),
            ExtReal::Infinity
        );
        let pr = Lattice::prob_reward_pair();
        let d = pr
            .deviation(
                &Value::prob_reward(0.25, ExtReal::Finite(1.0)),
                &Value::prob_reward(0.75, ExtReal::Finite(1.25)),
            )
            .unwrap();
        assert_eq!(d, ExtReal::Finite(0.5));
    }
}
