//! Valuations: total maps from a finite ordered index set into a lattice.

use crate::ext::ExtReal;
use crate::lattice::{Lattice, LatticeError, Value};
use std::sync::Arc;

/// The finite ordered index set of a valuation. Labels are state names, or
/// rendered `state|word` pairs for word-indexed instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    labels: Vec<String>,
}

impl IndexSet {
    pub fn new(labels: Vec<String>) -> Arc<IndexSet> {
        Arc::new(IndexSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A total map `index → L`, stored densely in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Valuation {
    index: Arc<IndexSet>,
    values: Vec<Value>,
}

impl Valuation {
    pub fn new(index: Arc<IndexSet>, values: Vec<Value>) -> Valuation {
        assert_eq!(index.len(), values.len(), "valuation must be total");
        Valuation { index, values }
    }

    /// The constant valuation at `lat`'s bottom element.
    pub fn bottom(index: Arc<IndexSet>, lat: &Lattice) -> Valuation {
        let values = vec![lat.bottom(); index.len()];
        Valuation { index, values }
    }

    pub fn constant(index: Arc<IndexSet>, v: Value) -> Valuation {
        let values = vec![v; index.len()];
        Valuation { index, values }
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.values[i]
    }

    pub fn set(&mut self, i: usize, v: Value) {
        self.values[i] = v;
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.index
            .labels()
            .iter()
            .map(|s| s.as_str())
            .zip(self.values.iter())
    }

    /// Pointwise map preserving the index set.
    pub fn map<F>(&self, f: F) -> Result<Valuation, LatticeError>
    where
        F: Fn(&Value) -> Result<Value, LatticeError>,
    {
        let values = self.values.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(Valuation {
            index: Arc::clone(&self.index),
            values,
        })
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Valuation, lat: &Lattice) -> Result<bool, LatticeError> {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter().zip(&other.values) {
            if !lat.leq(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise equality within tolerance.
    pub fn eq_tol(&self, other: &Valuation, lat: &Lattice, tol: f64) -> Result<bool, LatticeError> {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter().zip(&other.values) {
            if !lat.eq_tol(a, b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest pointwise deviation.
    pub fn deviation(&self, other: &Valuation, lat: &Lattice) -> Result<ExtReal, LatticeError> {
        debug_assert_eq!(self.len(), other.len());
        let mut worst = ExtReal::ZERO;
        for (a, b) in self.values.iter().zip(&other.values) {
            worst = worst.max(lat.deviation(a, b)?);
        }
        Ok(worst)
    }

    /// Promotes coordinates above `cap` to `∞`; returns whether any changed.
    pub fn promote_above(&mut self, cap: f64) -> bool {
        let mut any = false;
        for v in &mut self.values {
            any |= v.promote_above(cap);
        }
        any
    }
}
