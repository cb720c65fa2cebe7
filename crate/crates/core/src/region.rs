//! Sampling boxes for the randomized checks.
//!
//! Every sampled check (declared monotonicity, contraction certification)
//! draws base points uniformly from a user-supplied box, one interval per
//! entry of every component. There is no default box: the caller owns the
//! region on which the hypotheses are claimed to hold.
//!
//! Directed pairs are built by perturbing a base point entrywise in the
//! directions given by a signature row, so that the pair is ordered in the
//! row's induced quasi-order by construction. One perturbation scale is
//! drawn per pair, log-uniform over twelve decades relative to the entry
//! widths; this exercises both tiny and box-sized displacements, and keeps
//! scale comparisons between entries meaningful.

use rand::Rng;

use crate::error::{Error, Result};
use crate::point::ProductPoint;
use crate::signature::Monotonicity;

/// Smallest relative perturbation scale used when sampling directed pairs.
pub const MIN_RELATIVE_PERTURBATION: f64 = 1e-6;

/// A box `prod_i prod_k [lo_{ik}, hi_{ik}]`, one interval per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRegion {
    bounds: Vec<Vec<(f64, f64)>>,
}

impl SampleRegion {
    pub fn new(bounds: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidConfig(
                "a sampling region needs at least one component".into(),
            ));
        }
        for (i, comp) in bounds.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "sampling region component {i} is empty"
                )));
            }
            for (k, &(lo, hi)) in comp.iter().enumerate() {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::InvalidConfig(format!(
                        "sampling region component {i} entry {k} has invalid bounds [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(Self { bounds })
    }

    /// The same interval for every entry of every component.
    pub fn uniform(dims: &[usize], lo: f64, hi: f64) -> Result<Self> {
        Self::new(dims.iter().map(|&m| vec![(lo, hi); m]).collect())
    }

    pub fn order(&self) -> usize {
        self.bounds.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bounds.iter().map(Vec::len).collect()
    }

    pub fn bounds(&self) -> &[Vec<(f64, f64)>] {
        &self.bounds
    }

    /// Fails if any entry interval has zero width; such a box cannot host
    /// pairs of distinct points, so none of the sampled checks accept it.
    pub fn require_nondegenerate(&self) -> Result<()> {
        for (i, comp) in self.bounds.iter().enumerate() {
            for (k, &(lo, hi)) in comp.iter().enumerate() {
                if lo == hi {
                    return Err(Error::DegenerateRegion {
                        component: i,
                        entry: k,
                    });
                }
            }
        }
        Ok(())
    }

    /// Center of the box, used as the default iteration start.
    pub fn center(&self) -> ProductPoint {
        let comps = self
            .bounds
            .iter()
            .map(|comp| comp.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect())
            .collect();
        ProductPoint::new(comps).expect("region bounds are finite")
    }

    /// Draws a point uniformly from the box.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> ProductPoint {
        let comps = self
            .bounds
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(
                        |&(lo, hi)| {
                            if lo == hi {
                                lo
                            } else {
                                rng.gen_range(lo..=hi)
                            }
                        },
                    )
                    .collect()
            })
            .collect();
        ProductPoint::new(comps).expect("sampled entries are finite")
    }

    /// Draws a pair `(x, y)` with `x` in the box and `y` displaced from `x`
    /// entrywise so that `x` precedes `y` in the quasi-order induced by
    /// `row`: entries of increasing variables move up, entries of decreasing
    /// variables move down. Displacements are `scale * width` per entry with
    /// one log-uniform `scale` per call.
    pub fn sample_directed_pair<R: Rng>(
        &self,
        row: &[Monotonicity],
        rng: &mut R,
    ) -> Result<(ProductPoint, ProductPoint)> {
        if row.len() != self.order() {
            return Err(Error::ProfileMismatch(format!(
                "signature row has {} variables, region has {} components",
                row.len(),
                self.order()
            )));
        }
        self.require_nondegenerate()?;
        let x = self.sample_point(rng);
        let exponent = rng.gen_range(MIN_RELATIVE_PERTURBATION.log10()..=0.0);
        let scale = 10f64.powf(exponent);
        let comps = x
            .components()
            .iter()
            .zip(&self.bounds)
            .zip(row)
            .map(|((values, intervals), direction)| {
                values
                    .iter()
                    .zip(intervals)
                    .map(|(&v, &(lo, hi))| {
                        let step = scale * (hi - lo);
                        match direction {
                            Monotonicity::Increasing => v + step,
                            Monotonicity::Decreasing => v - step,
                        }
                    })
                    .collect()
            })
            .collect();
        let y = ProductPoint::new(comps)?;
        Ok((x, y))
    }
}
