//! Extended non-negative arithmetic.
//!
//! `ExtReal` models `[0, ∞]` and `ExtNat` models `ℕ ∪ {∞}`, both with the
//! convention `0 · ∞ = ∞ · 0 = 0` and `n + ∞ = ∞` for every `n`. Infinity is
//! a tagged variant rather than an IEEE sentinel so that the zero-product
//! rule holds in one place (IEEE would give `0 * inf = NaN`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

/// An element of the extended non-negative reals `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn finite(x: f64) -> ExtReal {
        debug_assert!(
            x >= 0.0 && x.is_finite(),
            "ExtReal::finite out of range: {x}"
        );
        ExtReal::Finite(x)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(*x),
            ExtReal::Infinity => None,
        }
    }

    /// Total order of `[0, ∞]`: every finite value is below `∞`.
    pub fn leq(&self, other: &ExtReal) -> bool {
        match (self, other) {
            (_, ExtReal::Infinity) => true,
            (ExtReal::Infinity, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self.leq(&other) {
            other
        } else {
            self
        }
    }

    /// Equality up to an absolute tolerance; `∞` is only equal to `∞`.
    pub fn eq_tol(&self, other: &ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }

    /// Absolute deviation; `∞` against a finite value is `∞`.
    pub fn deviation(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => ExtReal::ZERO,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
            _ => ExtReal::Infinity,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            (ExtReal::Finite(a), ExtReal::Infinity) | (ExtReal::Infinity, ExtReal::Finite(a)) => {
                if a == 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::Infinity
                }
            }
            (ExtReal::Infinity, ExtReal::Infinity) => ExtReal::Infinity,
        }
    }
}

/// Scales by a plain finite factor, keeping the `0 · ∞ = 0` rule.
impl Mul<f64> for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: f64) -> ExtReal {
        self * ExtReal::Finite(rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Some(Ordering::Equal),
            (ExtReal::Infinity, _) => Some(Ordering::Greater),
            (_, ExtReal::Infinity) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

/// An element of the extended naturals `ℕ ∪ {∞}`.
///
/// Sums saturate to `∞` on `u64` overflow; run counts that large are
/// indistinguishable from divergence for every consumer here. The derived
/// order agrees with the lattice order: finite values by magnitude, `∞` on
/// top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Finite(0);
    pub const ONE: ExtNat = ExtNat::Finite(1);

    pub fn leq(&self, other: &ExtNat) -> bool {
        match (self, other) {
            (_, ExtNat::Infinity) => true,
            (ExtNat::Infinity, ExtNat::Finite(_)) => false,
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a <= b,
        }
    }

    pub fn max(self, other: ExtNat) -> ExtNat {
        if self.leq(&other) {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtNat) -> ExtNat {
        if self.leq(&other) {
            self
        } else {
            other
        }
    }

    pub fn to_ext_real(self) -> ExtReal {
        match self {
            ExtNat::Finite(n) => ExtReal::Finite(n as f64),
            ExtNat::Infinity => ExtReal::Infinity,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => match a.checked_add(b) {
                Some(c) => ExtNat::Finite(c),
                None => ExtNat::Infinity,
            },
            _ => ExtNat::Infinity,
        }
    }
}

impl Mul for ExtNat {
    type Output = ExtNat;
    fn mul(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => match a.checked_mul(b) {
                Some(c) => ExtNat::Finite(c),
                None => ExtNat::Infinity,
            },
            (ExtNat::Finite(0), ExtNat::Infinity) | (ExtNat::Infinity, ExtNat::Finite(0)) => {
                ExtNat::ZERO
            }
            _ => ExtNat::Infinity,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::ZERO * ExtReal::Infinity, ExtReal::ZERO);
        assert_eq!(ExtReal::Infinity * ExtReal::ZERO, ExtReal::ZERO);
        assert_eq!(ExtNat::ZERO * ExtNat::Infinity, ExtNat::ZERO);
    }

    #[test]
    fn positive_times_infinity_is_infinity() {
        assert_eq!(ExtReal::Finite(0.5) * ExtReal::Infinity, ExtReal::Infinity);
        assert_eq!(ExtReal::Infinity * ExtReal::Finite(2.0), ExtReal::Infinity);
    }

    #[test]
    fn infinity_absorbs_sums() {
        assert_eq!(ExtReal::Finite(3.0) + ExtReal::Infinity, ExtReal::Infinity);
        assert_eq!(ExtNat::Finite(7) + ExtNat::Infinity, ExtNat::Infinity);
    }

    #[test]
    fn finite_below_infinity() {
        assert!(ExtReal::Finite(1e300).leq(&ExtReal::Infinity));
        assert!(!ExtReal::Infinity.leq(&ExtReal::Finite(1e300)));
        assert!(ExtNat::Finite(u64::MAX).leq(&ExtNat::Infinity));
    }

    #[test]
    fn nat_sum_saturates() {
        assert_eq!(ExtNat::Finite(u64::MAX) + ExtNat::ONE, ExtNat::Infinity);
    }

    #[test]
    fn deviation_of_infinite_vs_finite() {
        assert_eq!(
            ExtReal::Infinity.deviation(&ExtReal::Finite(1.0)),
            ExtReal::Infinity
        );
        assert_eq!(
            ExtReal::Infinity.deviation(&ExtReal::Infinity),
            ExtReal::ZERO
        );
    }
}
