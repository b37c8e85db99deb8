//! The registered Galois connections between semantic domains.
//!
//! Each connection is a monotone pair `L ⊣ R` between a concrete and an
//! abstract value lattice, applied pointwise to valuations. Membership in
//! the fixed sublattices `Fix(η)` (unit an isomorphism) and `Fix(ε)` (counit
//! an isomorphism) is decided by composing the two maps.

use crate::ext::{ExtNat, ExtReal};
use crate::frontier::ParetoFrontier;
use crate::lattice::{BoundedNat, Lattice, LatticeError, Value};
use crate::valuation::Valuation;

/// Which concrete/abstract domain pair the connection bridges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ConnectionKind {
    /// `[0,1]×[0,∞] ⇄ [0,∞]`: drop/install the reachability component.
    McReward,
    /// Frontiers of `[0,1]×[0,∞] ⇄ [0,∞]`: join then project, or embed as a
    /// principal lowerset at probability 1.
    MdpReward,
    /// `{⊥,0,…,M} ⇄ {⊥,⊤}`: collapse levels to reachability.
    Resource(u32),
    /// Lexicographic Boolean pairs ⇄ Booleans: conjunction one way,
    /// `t ↦ (⊤, t)` the other.
    DltsCorrectness,
    /// `{⊥,⊤} ⇄ ℕ∪{∞}`: inject as 0/1, collapse by `≥ 1`.
    UfaCounting,
    /// Componentwise combination of `UfaCounting` with probability caps:
    /// `2×[0,1] ⇄ (ℕ∪{∞})×[0,∞]`.
    UfaProbPair,
}

#[derive(Clone, Debug)]
pub struct GaloisConnection {
    kind: ConnectionKind,
    name: &'static str,
    concrete: Lattice,
    abstract_dom: Lattice,
}

impl GaloisConnection {
    pub fn mc_reward() -> Self {
        GaloisConnection {
            kind: ConnectionKind::McReward,
            name: "mc_reward",
            concrete: Lattice::prob_reward_pair(),
            abstract_dom: Lattice::ExtRealLat,
        }
    }

    pub fn mdp_reward() -> Self {
        GaloisConnection {
            kind: ConnectionKind::MdpReward,
            name: "mdp_reward",
            concrete: Lattice::Frontier,
            abstract_dom: Lattice::ExtRealLat,
        }
    }

    pub fn resource(bound: u32) -> Self {
        GaloisConnection {
            kind: ConnectionKind::Resource(bound),
            name: "resource",
            concrete: Lattice::BoundedNat(bound),
            abstract_dom: Lattice::Bool2,
        }
    }

    pub fn dlts_correctness() -> Self {
        GaloisConnection {
            kind: ConnectionKind::DltsCorrectness,
            name: "dlts_correctness",
            concrete: Lattice::Lex2,
            abstract_dom: Lattice::Bool2,
        }
    }

    pub fn ufa_counting() -> Self {
        GaloisConnection {
            kind: ConnectionKind::UfaCounting,
            name: "ufa_counting",
            concrete: Lattice::Bool2,
            abstract_dom: Lattice::ExtNatLat,
        }
    }

    pub fn ufa_prob_pair() -> Self {
        GaloisConnection {
            kind: ConnectionKind::UfaProbPair,
            name: "ufa_prob_pair",
            concrete: Lattice::product(Lattice::Bool2, Lattice::UnitInterval),
            abstract_dom: Lattice::product(Lattice::ExtNatLat, Lattice::ExtRealLat),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn concrete_lattice(&self) -> &Lattice {
        &self.concrete
    }

    pub fn abstract_lattice(&self) -> &Lattice {
        &self.abstract_dom
    }

    /// The left adjoint on a single element.
    pub fn lower(&self, v: &Value) -> Result<Value, LatticeError> {
        self.check(&self.concrete, v)?;
        Ok(match self.kind {
            ConnectionKind::McReward => {
                let (_, r) = v.as_pair();
                Value::Ext(r.as_ext())
            }
            ConnectionKind::MdpReward => Value::Ext(v.as_frontier().sup().r),
            ConnectionKind::Resource(_) => match v.as_res() {
                BoundedNat::Bottom => Value::Bool(false),
                BoundedNat::Level(_) => Value::Bool(true),
            },
            ConnectionKind::DltsCorrectness => {
                let (a, b) = v.as_pair();
                Value::Bool(a.as_bool() && b.as_bool())
            }
            ConnectionKind::UfaCounting => Value::Nat(inject_bool(v.as_bool())),
            ConnectionKind::UfaProbPair => {
                let (b, p) = v.as_pair();
                Value::pair(
                    Value::Nat(inject_bool(b.as_bool())),
                    Value::Ext(ExtReal::Finite(p.as_unit())),
                )
            }
        })
    }

    /// The right adjoint on a single element.
    pub fn upper(&self, v: &Value) -> Result<Value, LatticeError> {
        self.check(&self.abstract_dom, v)?;
        Ok(match self.kind {
            ConnectionKind::McReward => Value::prob_reward(1.0, v.as_ext()),
            ConnectionKind::MdpReward => Value::Front(ParetoFrontier::singleton(1.0, v.as_ext())),
            ConnectionKind::Resource(bound) => {
                if v.as_bool() {
                    Value::Res(BoundedNat::Level(bound))
                } else {
                    Value::Res(BoundedNat::Bottom)
                }
            }
            ConnectionKind::DltsCorrectness => Value::lex(true, v.as_bool()),
            ConnectionKind::UfaCounting => Value::Bool(collapse_nat(v.as_nat())),
            ConnectionKind::UfaProbPair => {
                let (n, r) = v.as_pair();
                let capped = match r.as_ext() {
                    ExtReal::Finite(x) => x.min(1.0),
                    ExtReal::Infinity => 1.0,
                };
                Value::pair(Value::Bool(collapse_nat(n.as_nat())), Value::Unit(capped))
            }
        })
    }

    /// Pointwise left adjoint on a valuation over the concrete domain.
    pub fn apply_lower(&self, v: &Valuation) -> Result<Valuation, LatticeError> {
        v.map(|x| self.lower(x))
    }

    /// Pointwise right adjoint on a valuation over the abstract domain.
    pub fn apply_upper(&self, v: &Valuation) -> Result<Valuation, LatticeError> {
        v.map(|x| self.upper(x))
    }

    /// Membership in `Fix(η)`: `R(L(v)) = v` pointwise within `tol`.
    pub fn in_fix_unit(&self, v: &Valuation, tol: f64) -> Result<bool, LatticeError> {
        let round = self.apply_upper(&self.apply_lower(v)?)?;
        round.eq_tol(v, &self.concrete, tol)
    }

    /// Membership in `Fix(ε)`: `L(R(v)) = v` pointwise within `tol`.
    pub fn in_fix_counit(&self, v: &Valuation, tol: f64) -> Result<bool, LatticeError> {
        let round = self.apply_lower(&self.apply_upper(v)?)?;
        round.eq_tol(v, &self.abstract_dom, tol)
    }

    fn check(&self, lat: &Lattice, v: &Value) -> Result<(), LatticeError> {
        if lat.contains(v) {
            Ok(())
        } else {
            Err(LatticeError::KindMismatch {
                lattice: format!("{lat:?} ({})", self.name),
                value: format!("{v:?}"),
            })
        }
    }
}

fn inject_bool(b: bool) -> ExtNat {
    if b {
        ExtNat::ONE
    } else {
        ExtNat::ZERO
    }
}

fn collapse_nat(n: ExtNat) -> bool {
    !matches!(n, ExtNat::Finite(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::IndexSet;

    fn one_point(v: Value) -> Valuation {
        Valuation::new(IndexSet::new(vec!["s".into()]), vec![v])
    }

    #[test]
    fn mc_lower_drops_probability() {
        let g = GaloisConnection::mc_reward();
        let v = g
            .lower(&Value::prob_reward(0.5, ExtReal::Finite(3.0)))
            .unwrap();
        assert_eq!(v, Value::Ext(ExtReal::Finite(3.0)));
        let u = g.upper(&Value::Ext(ExtReal::Finite(3.0))).unwrap();
        assert_eq!(u, Value::prob_reward(1.0, ExtReal::Finite(3.0)));
    }

    #[test]
    fn mdp_lower_is_sup_then_project() {
        let g = GaloisConnection::mdp_reward();
        let f = ParetoFrontier::from_points(vec![
            crate::frontier::FrontierPoint::new(1.0, ExtReal::ZERO),
            crate::frontier::FrontierPoint::new(0.5, ExtReal::Finite(10.0)),
        ]);
        assert_eq!(
            g.lower(&Value::Front(f)).unwrap(),
            Value::Ext(ExtReal::Finite(10.0))
        );
        assert_eq!(
            g.upper(&Value::Ext(ExtReal::Finite(10.0))).unwrap(),
            Value::Front(ParetoFrontier::singleton(1.0, ExtReal::Finite(10.0)))
        );
    }

    #[test]
    fn resource_upper_examples() {
        let g = GaloisConnection::resource(3);
        assert_eq!(
            g.upper(&Value::Bool(true)).unwrap(),
            Value::Res(BoundedNat::Level(3))
        );
        assert_eq!(
            g.upper(&Value::Bool(false)).unwrap(),
            Value::Res(BoundedNat::Bottom)
        );
    }

    #[test]
    fn ufa_injection() {
        let g = GaloisConnection::ufa_counting();
        assert_eq!(
            g.lower(&Value::Bool(true)).unwrap(),
            Value::Nat(ExtNat::ONE)
        );
        assert_eq!(
            g.lower(&Value::Bool(false)).unwrap(),
            Value::Nat(ExtNat::ZERO)
        );
    }

    #[test]
    fn fix_unit_mc_examples() {
        let g = GaloisConnection::mc_reward();
        let inside = one_point(Value::prob_reward(1.0, ExtReal::Finite(7.0)));
        let outside = one_point(Value::prob_reward(0.5, ExtReal::Finite(7.0)));
        assert!(g.in_fix_unit(&inside, 0.0).unwrap());
        assert!(!g.in_fix_unit(&outside, 0.0).unwrap());
    }

    #[test]
    fn fix_unit_resource_examples() {
        let g = GaloisConnection::resource(3);
        let idx = IndexSet::new(vec!["s0".into(), "s1".into()]);
        let inside = Valuation::new(
            idx.clone(),
            vec![
                Value::Res(BoundedNat::Bottom),
                Value::Res(BoundedNat::Level(3)),
            ],
        );
        assert!(g.in_fix_unit(&inside, 0.0).unwrap());
        let outside = Valuation::new(
            idx,
            vec![
                Value::Res(BoundedNat::Bottom),
                Value::Res(BoundedNat::Level(2)),
            ],
        );
        assert!(!g.in_fix_unit(&outside, 0.0).unwrap());
    }

    #[test]
    fn fix_counit_examples() {
        let ufa = GaloisConnection::ufa_counting();
        assert!(ufa
            .in_fix_counit(&one_point(Value::Nat(ExtNat::ONE)), 0.0)
            .unwrap());
        assert!(!ufa
            .in_fix_counit(&one_point(Value::Nat(ExtNat::Finite(2))), 0.0)
            .unwrap());
        // For the reward connections LR is the identity on the abstract side.
        let mc = GaloisConnection::mc_reward();
        for r in [ExtReal::ZERO, ExtReal::Finite(4.25), ExtReal::Infinity] {
            assert!(mc.in_fix_counit(&one_point(Value::Ext(r)), 0.0).unwrap());
        }
        let mdp = GaloisConnection::mdp_reward();
        for r in [ExtReal::ZERO, ExtReal::Finite(10.0), ExtReal::Infinity] {
            assert!(mdp.in_fix_counit(&one_point(Value::Ext(r)), 0.0).unwrap());
        }
    }
}
