//! Points of the product space `X_1 x ... x X_N`.
//!
//! Each component lives in some `R^(m_i)` ordered entrywise, so the product
//! order is simply the entrywise order across all components. Comparisons
//! are exact floating-point comparisons; no tolerance is applied anywhere in
//! the order structure.

use crate::error::{Error, Result};

/// A point of a finite product of finite-dimensional component spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    components: Vec<Vec<f64>>,
}

impl ProductPoint {
    /// Wraps component vectors into a product point.
    ///
    /// Rejects an empty component list, empty components and non-finite
    /// entries.
    pub fn new(components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidPoint(
                "a point needs at least one component".into(),
            ));
        }
        for (i, c) in components.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidPoint(format!("component {i} is empty")));
            }
            if let Some(k) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidPoint(format!(
                    "component {i} entry {k} is not finite"
                )));
            }
        }
        Ok(Self { components })
    }

    /// A point with every component constant.
    pub fn constant(dims: &[usize], value: f64) -> Result<Self> {
        Self::new(dims.iter().map(|&m| vec![value; m]).collect())
    }

    /// Number of components `N`.
    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// Component dimensions `m_i`.
    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&[f64]> {
        self.components
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                order: self.order(),
            })
    }

    /// Consumes the point, returning the raw component vectors.
    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub(crate) fn same_profile(&self, other: &Self) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.len() == b.len())
    }

    pub(crate) fn profile_mismatch(&self, other: &Self, what: &str) -> Error {
        Error::ProfileMismatch(format!("{what}: {:?} vs {:?}", self.dims(), other.dims()))
    }
}

/// Entrywise product order: `x <= y` in every entry of every component.
pub fn product_leq(x: &ProductPoint, y: &ProductPoint) -> Result<bool> {
    if !x.same_profile(y) {
        return Err(x.profile_mismatch(y, "product_leq"));
    }
    Ok(x.components
        .iter()
        .zip(&y.components)
        .all(|(a, b)| a.iter().zip(b).all(|(p, q)| p <= q)))
}
