//! Systems of coordinate-wise monotone operators.
//!
//! A system bundles `N` operators `T_i : X_1 x ... x X_N -> X_i` with the
//! signature declaring each operator's direction in each variable, the
//! component dimensions and metrics, and the box on which sampled checks
//! run. The declared directions are what the rest of the crate trusts;
//! [`PartiallyMonotoneSystem::validate`] spot-checks them against the actual
//! operators before that trust is extended.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::metric::MetricProfile;
use crate::point::ProductPoint;
use crate::region::{SampleRegion, MIN_RELATIVE_PERTURBATION};
use crate::signature::{MonotoneSignature, Monotonicity};

/// One operator of the system, mapping the full product space into the
/// operator's own component space.
pub type ComponentOperator = Arc<dyn Fn(&ProductPoint) -> Vec<f64> + Send + Sync>;

pub struct PartiallyMonotoneSystem {
    signature: MonotoneSignature,
    operators: Vec<ComponentOperator>,
    dims: Vec<usize>,
    metrics: MetricProfile,
    region: SampleRegion,
}

impl std::fmt::Debug for PartiallyMonotoneSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartiallyMonotoneSystem")
            .field("signature", &self.signature.to_string())
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

impl PartiallyMonotoneSystem {
    pub fn new(
        signature: MonotoneSignature,
        operators: Vec<ComponentOperator>,
        dims: Vec<usize>,
        metrics: MetricProfile,
        region: SampleRegion,
    ) -> Result<Self> {
        let n = signature.order();
        if operators.len() != n {
            return Err(Error::InvalidConfig(format!(
                "signature order {n} but {} operators supplied",
                operators.len()
            )));
        }
        if dims.len() != n {
            return Err(Error::InvalidConfig(format!(
                "signature order {n} but {} component dimensions supplied",
                dims.len()
            )));
        }
        if let Some(i) = dims.iter().position(|&m| m == 0) {
            return Err(Error::InvalidConfig(format!(
                "component {i} has dimension 0"
            )));
        }
        if metrics.order() != n {
            return Err(Error::InvalidConfig(format!(
                "signature order {n} but metric profile has {} components",
                metrics.order()
            )));
        }
        if region.dims() != dims {
            return Err(Error::ProfileMismatch(format!(
                "sampling region shape {:?} differs from component dimensions {:?}",
                region.dims(),
                dims
            )));
        }
        Ok(Self {
            signature,
            operators,
            dims,
            metrics,
            region,
        })
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn signature(&self) -> &MonotoneSignature {
        &self.signature
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn metrics(&self) -> &MetricProfile {
        &self.metrics
    }

    pub fn region(&self) -> &SampleRegion {
        &self.region
    }

    /// Checks that `x` has this system's component dimensions.
    pub fn check_point(&self, x: &ProductPoint) -> Result<()> {
        if x.dims() != self.dims {
            return Err(Error::ProfileMismatch(format!(
                "point shape {:?} differs from system dimensions {:?}",
                x.dims(),
                self.dims
            )));
        }
        Ok(())
    }

    /// Evaluates `T_i(x)`, checking the output length and finiteness.
    pub fn apply_component(&self, i: usize, x: &ProductPoint) -> Result<Vec<f64>> {
        let op = self.operators.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            order: self.order(),
        })?;
        self.check_point(x)?;
        let out = op(x);
        if out.len() != self.dims[i] {
            return Err(Error::OperatorDimension {
                operator: i,
                expected: self.dims[i],
                got: out.len(),
            });
        }
        if let Some(k) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                operator: i,
                entry: k,
            });
        }
        Ok(out)
    }

    /// Evaluates the whole system `T(x) = (T_1(x), ..., T_N(x))`.
    pub fn apply(&self, x: &ProductPoint) -> Result<ProductPoint> {
        let comps = (0..self.order())
            .map(|i| self.apply_component(i, x))
            .collect::<Result<Vec<_>>>()?;
        ProductPoint::new(comps)
    }

    /// Sampled check of the declared signature.
    ///
    /// For every operator `i` and variable `j`, draws `samples` base points
    /// from the region, nudges variable `j` upward entrywise, and requires
    /// `T_i` to move in the declared direction (weak inequalities, compared
    /// exactly). A single counterexample refutes the declaration; passing is
    /// evidence on the sampled region only.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        if samples == 0 {
            return Err(Error::InvalidConfig(
                "monotonicity validation needs at least one sample".into(),
            ));
        }
        self.region.require_nondegenerate()?;
        let n = self.order();
        let total = n * n * samples;
        let outcomes = exec::map_indices(total, |idx| self.validate_one(idx, samples, seed));
        outcomes
            .into_iter()
            .find_map(|o| o.err())
            .map_or(Ok(()), Err)
    }

    fn validate_one(&self, idx: usize, samples: usize, seed: u64) -> Result<()> {
        let sample = idx % samples;
        let j = (idx / samples) % self.order();
        let i = idx / (samples * self.order());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64 + 1);
        let x = self.region.sample_point(&mut rng);
        let exponent = rand::Rng::gen_range(&mut rng, MIN_RELATIVE_PERTURBATION.log10()..=0.0);
        let scale = 10f64.powf(exponent);
        let mut comps = x.components().to_vec();
        for (k, v) in comps[j].iter_mut().enumerate() {
            let (lo, hi) = self.region.bounds()[j][k];
            *v += scale * (hi - lo);
        }
        let y = ProductPoint::new(comps)?;
        let tx = self.apply_component(i, &x)?;
        let ty = self.apply_component(i, &y)?;
        let direction = self.signature.entry(i, j)?;
        let ok = match direction {
            Monotonicity::Increasing => tx.iter().zip(&ty).all(|(a, b)| a <= b),
            Monotonicity::Decreasing => tx.iter().zip(&ty).all(|(a, b)| a >= b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::MonotonicityViolation {
                operator: i,
                variable: j,
                detail: format!(
                    "declared {direction:?}, sample {sample} moved against it (seed {seed})"
                ),
            })
        }
    }
}

/// Builds the component operators of an affine map `x -> M x + c` over the
/// flattened product space, partitioned by `dims`.
pub fn affine_operators(
    dims: &[usize],
    matrix: &[Vec<f64>],
    offset: &[f64],
) -> Result<Vec<ComponentOperator>> {
    let flat: usize = dims.iter().sum();
    if matrix.len() != flat || matrix.iter().any(|row| row.len() != flat) {
        return Err(Error::InvalidConfig(format!(
            "affine matrix must be {flat} x {flat} for dimensions {dims:?}"
        )));
    }
    if offset.len() != flat {
        return Err(Error::InvalidConfig(format!(
            "affine offset must have {flat} entries, got {}",
            offset.len()
        )));
    }
    let mut out: Vec<ComponentOperator> = Vec::with_capacity(dims.len());
    let mut row_start = 0usize;
    for &m in dims {
        let rows: Vec<Vec<f64>> = matrix[row_start..row_start + m].to_vec();
        let shift: Vec<f64> = offset[row_start..row_start + m].to_vec();
        out.push(Arc::new(move |x: &ProductPoint| {
            let mut value = shift.clone();
            for (r, row) in rows.iter().enumerate() {
                let mut acc = 0.0;
                let mut c = 0usize;
                for comp in x.components() {
                    for &v in comp {
                        acc += row[c] * v;
                        c += 1;
                    }
                }
                value[r] += acc;
            }
            value
        }));
        row_start += m;
    }
    Ok(out)
}

/// Reads a signature off the block sign pattern of an affine matrix.
///
/// Block `(i, j)` must be sign-uniform: all entries `>= 0` declares
/// increasing, all `<= 0` declares decreasing, and an all-zero block (the
/// operator ignores that variable) is declared increasing by convention.
pub fn signature_from_affine_blocks(
    dims: &[usize],
    matrix: &[Vec<f64>],
) -> Result<MonotoneSignature> {
    let flat: usize = dims.iter().sum();
    if matrix.len() != flat || matrix.iter().any(|row| row.len() != flat) {
        return Err(Error::InvalidSignature(format!(
            "affine matrix must be {flat} x {flat} for dimensions {dims:?}"
        )));
    }
    let starts: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, &m| {
            let s = *acc;
            *acc += m;
            Some(s)
        })
        .collect();
    let n = dims.len();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut nonneg = true;
            let mut nonpos = true;
            for row in &matrix[starts[i]..starts[i] + dims[i]] {
                for &v in &row[starts[j]..starts[j] + dims[j]] {
                    nonneg &= v >= 0.0;
                    nonpos &= v <= 0.0;
                }
            }
            entries.push(match (nonneg, nonpos) {
                (true, _) => Monotonicity::Increasing,
                (false, true) => Monotonicity::Decreasing,
                (false, false) => {
                    return Err(Error::InvalidSignature(format!(
                        "affine block ({i}, {j}) mixes signs; no direction can be declared"
                    )))
                }
            });
        }
    }
    MonotoneSignature::new(n, entries)
}
