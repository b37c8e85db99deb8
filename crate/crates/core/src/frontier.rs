//! Pareto frontiers: finitely generated lowersets of `[0,1] × [0,∞]`.
//!
//! A lowerset is represented by the antichain of its maximal generators, in
//! canonical form: points sorted by ascending first coordinate with strictly
//! decreasing second coordinate. Comparisons inside canonicalization are
//! exact; tolerances enter only through [`ParetoFrontier::eq_tol`].

use crate::ext::ExtReal;

/// One generator point `(p, r)` with `p ∈ [0,1]` and `r ∈ [0,∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontierPoint {
    pub p: f64,
    pub r: ExtReal,
}

impl FrontierPoint {
    pub fn new(p: f64, r: ExtReal) -> Self {
        FrontierPoint { p, r }
    }

    /// Componentwise order of the product lattice.
    pub fn leq(&self, other: &FrontierPoint) -> bool {
        self.p <= other.p && self.r.leq(&other.r)
    }
}

/// A non-empty antichain of generator points in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoFrontier {
    points: Vec<FrontierPoint>,
}

impl ParetoFrontier {
    /// The frontier `{(0, 0)}`, the bottom of the lowerset lattice used here.
    pub fn origin() -> Self {
        ParetoFrontier {
            points: vec![FrontierPoint::new(0.0, ExtReal::ZERO)],
        }
    }

    pub fn singleton(p: f64, r: ExtReal) -> Self {
        ParetoFrontier {
            points: vec![FrontierPoint::new(p, r)],
        }
    }

    /// Canonicalizes an arbitrary generator multiset: dominated and duplicate
    /// points are removed, survivors sorted by ascending `p`.
    pub fn from_points(points: Vec<FrontierPoint>) -> Self {
        assert!(
            !points.is_empty(),
            "frontier must have at least one generator"
        );
        let mut pts = points;
        // Sort by p descending, ties by r descending; then a single sweep
        // keeps exactly the points whose r strictly exceeds everything with
        // larger-or-equal p.
        pts.sort_by(|a, b| {
            b.p.partial_cmp(&a.p)
                .expect("frontier p is never NaN")
                .then_with(|| match (a.r, b.r) {
                    (ExtReal::Infinity, ExtReal::Infinity) => std::cmp::Ordering::Equal,
                    (ExtReal::Infinity, _) => std::cmp::Ordering::Less,
                    (_, ExtReal::Infinity) => std::cmp::Ordering::Greater,
                    (ExtReal::Finite(x), ExtReal::Finite(y)) => {
                        y.partial_cmp(&x).expect("frontier r is never NaN")
                    }
                })
        });
        let mut kept: Vec<FrontierPoint> = Vec::new();
        let mut best_r: Option<ExtReal> = None;
        for pt in pts {
            let dominated = match best_r {
                Some(r) => pt.r.leq(&r),
                None => false,
            };
            if !dominated {
                best_r = Some(pt.r);
                kept.push(pt);
            }
        }
        kept.reverse();
        ParetoFrontier { points: kept }
    }

    pub fn points(&self) -> &[FrontierPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Union of the represented lowersets.
    pub fn union(&self, other: &ParetoFrontier) -> ParetoFrontier {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        ParetoFrontier::from_points(pts)
    }

    /// The join `⊔` of the lowerset in the product lattice: componentwise
    /// maximum over the generators.
    pub fn sup(&self) -> FrontierPoint {
        let mut p = 0.0f64;
        let mut r = ExtReal::ZERO;
        for pt in &self.points {
            if pt.p > p {
                p = pt.p;
            }
            r = r.max(pt.r);
        }
        FrontierPoint::new(p, r)
    }

    /// Lowerset inclusion: every generator of `self` is dominated by some
    /// generator of `other`.
    pub fn leq(&self, other: &ParetoFrontier) -> bool {
        self.points
            .iter()
            .all(|a| other.points.iter().any(|b| a.leq(b)))
    }

    /// Canonical equality with per-coordinate tolerance: equal cardinality
    /// and pairwise-matched points in canonical order.
    pub fn eq_tol(&self, other: &ParetoFrontier, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a.p - b.p).abs() <= tol && a.r.eq_tol(&b.r, tol))
    }

    /// Largest pairwise coordinate deviation; `∞` when the cardinalities
    /// differ or an infinite coordinate faces a finite one.
    pub fn deviation(&self, other: &ParetoFrontier) -> ExtReal {
        if self.points.len() != other.points.len() {
            return ExtReal::Infinity;
        }
        let mut worst = ExtReal::ZERO;
        for (a, b) in self.points.iter().zip(&other.points) {
            worst = worst.max(ExtReal::Finite((a.p - b.p).abs()));
            worst = worst.max(a.r.deviation(&b.r));
        }
        worst
    }

    /// Promotes `r` coordinates above `cap` to `∞`; returns whether any
    /// promotion happened.
    pub fn promote_above(&mut self, cap: f64) -> bool {
        let mut promoted = false;
        for pt in &mut self.points {
            if let ExtReal::Finite(r) = pt.r {
                if r > cap {
                    pt.r = ExtReal::Infinity;
                    promoted = true;
                }
            }
        }
        if promoted {
            *self = ParetoFrontier::from_points(std::mem::take(&mut self.points));
        }
        promoted
    }
}
