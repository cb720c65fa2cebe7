//! Three-way coupled fixed-point problems.
//!
//! A single map `F(x, y, z)` that is nondecreasing in its first and third
//! arguments and nonincreasing in the second generates an order-3 system by
//! permuting the roles of the arguments:
//!
//! ```text
//! T_1(x, y, z) = F(x, y, z)
//! T_2(x, y, z) = F(y, x, z)
//! T_3(x, y, z) = F(z, y, x)
//! ```
//!
//! All three components share the dimension, metric, and value range of `F`,
//! and the resulting signature is fixed ([`tripled_signature`]). The point of
//! the construction is that contraction and monotonicity hypotheses checked
//! once on `F` transfer verbatim to every `T_i`; [`verify_transfer`] exercises
//! that transfer sample by sample.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::metric::{product_metric, ComponentMetric, MetricProfile};
use crate::phi::ComparisonFunction;
use crate::point::ProductPoint;
use crate::region::{SampleRegion, MIN_RELATIVE_PERTURBATION};
use crate::signature::{MonotoneSignature, Monotonicity};
use crate::system::{ComponentOperator, PartiallyMonotoneSystem};

/// Generating map of a tripled problem: `(x, y, z) -> F(x, y, z)` on slices
/// of a common dimension.
pub type TripledMap = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Absolute slack applied when validating the declared directions of a
/// tripled map. Maps that are constant in one argument produce images equal
/// up to roundoff, in which case an exact weak inequality would fail on
/// sign noise of a few ulps.
pub const FLAT_DIRECTION_SLACK: f64 = 1e-12;

/// A map `F` together with the data needed to pose `x = F(x, y, z)` as a
/// fixed-point problem: component dimension, metric, comparison function,
/// and the value range the arguments live in.
pub struct TripledProblem {
    dim: usize,
    map: TripledMap,
    metric: ComponentMetric,
    phi: ComparisonFunction,
    value_range: (f64, f64),
}

impl fmt::Debug for TripledProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripledProblem")
            .field("dim", &self.dim)
            .field("metric", &self.metric)
            .field("phi", &self.phi)
            .field("value_range", &self.value_range)
            .finish_non_exhaustive()
    }
}

impl TripledProblem {
    pub fn new(
        dim: usize,
        map: TripledMap,
        metric: ComponentMetric,
        phi: ComparisonFunction,
        value_range: (f64, f64),
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig(
                "a tripled problem needs dimension at least 1".into(),
            ));
        }
        let (lo, hi) = value_range;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidConfig(format!(
                "value range must be a finite interval with lo < hi, got ({lo}, {hi})"
            )));
        }
        phi.validate()?;
        Ok(Self {
            dim,
            map,
            metric,
            phi,
            value_range,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> ComponentMetric {
        self.metric
    }

    pub fn phi(&self) -> &ComparisonFunction {
        &self.phi
    }

    pub fn value_range(&self) -> (f64, f64) {
        self.value_range
    }

    /// Evaluates `F(x, y, z)`, checking argument and result shapes and that
    /// the result is finite.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        for (name, arg) in [("x", x), ("y", y), ("z", z)] {
            if arg.len() != self.dim {
                return Err(Error::ProfileMismatch(format!(
                    "argument {name} has {} entries, map expects {}",
                    arg.len(),
                    self.dim
                )));
            }
        }
        let out = (self.map)(x, y, z);
        if out.len() != self.dim {
            return Err(Error::ProfileMismatch(format!(
                "map returned {} entries, expected {}",
                out.len(),
                self.dim
            )));
        }
        if let Some(k) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "map produced a non-finite value in entry {k}"
            )));
        }
        Ok(out)
    }

    /// Sampled check that `F` is nondecreasing in its first and third
    /// arguments and nonincreasing in the second, on the value range.
    ///
    /// Inequalities are compared with [`FLAT_DIRECTION_SLACK`] so that maps
    /// which ignore an argument still pass. A counterexample beyond the slack
    /// refutes the declaration; passing is evidence on the sampled range only.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        if samples == 0 {
            return Err(Error::InvalidConfig(
                "direction validation needs at least one sample".into(),
            ));
        }
        let total = 3 * samples;
        let outcomes = exec::map_indices(total, |idx| self.validate_one(idx, samples, seed));
        outcomes
            .into_iter()
            .find_map(|o| o.err())
            .map_or(Ok(()), Err)
    }

    fn validate_one(&self, idx: usize, samples: usize, seed: u64) -> Result<()> {
        let sample = idx % samples;
        let slot = idx / samples;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64 + 1);
        let (lo, hi) = self.value_range;
        let mut args: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..self.dim).map(|_| rng.gen_range(lo..=hi)).collect())
            .collect();
        let base = self.eval(&args[0], &args[1], &args[2])?;
        let exponent = rng.gen_range(MIN_RELATIVE_PERTURBATION.log10()..=0.0);
        let scale = 10f64.powf(exponent);
        for v in args[slot].iter_mut() {
            *v += scale * (hi - lo);
        }
        let moved = self.eval(&args[0], &args[1], &args[2])?;
        let direction = match slot {
            1 => Monotonicity::Decreasing,
            _ => Monotonicity::Increasing,
        };
        let ok = match direction {
            Monotonicity::Increasing => base
                .iter()
                .zip(&moved)
                .all(|(a, b)| *a <= b + FLAT_DIRECTION_SLACK),
            Monotonicity::Decreasing => base
                .iter()
                .zip(&moved)
                .all(|(a, b)| a + FLAT_DIRECTION_SLACK >= *b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::MonotonicityViolation {
                operator: 0,
                variable: slot,
                detail: format!(
                    "map declared {direction:?} in argument {slot}, sample {sample} moved against it (seed {seed})"
                ),
            })
        }
    }
}

/// The signature every tripled system has: each row is increasing in the
/// component playing the first and third argument and decreasing in the one
/// playing the second.
pub fn tripled_signature() -> MonotoneSignature {
    use Monotonicity::{Decreasing as D, Increasing as I};
    MonotoneSignature::from_rows(vec![vec![I, D, I], vec![D, I, I], vec![I, D, I]])
        .expect("rows are square of order 3")
}

/// Builds the order-3 system generated by a tripled problem.
pub fn tripled_to_system(problem: &TripledProblem) -> Result<PartiallyMonotoneSystem> {
    let m = problem.dim;
    let permutations: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 1, 0]];
    let operators: Vec<ComponentOperator> = permutations
        .iter()
        .map(|&[a, b, c]| {
            let map = problem.map.clone();
            let op: ComponentOperator = Arc::new(move |p: &ProductPoint| {
                let pick = |i: usize| p.component(i).expect("system checks point shape");
                map(pick(a), pick(b), pick(c))
            });
            op
        })
        .collect();
    let dims = vec![m; 3];
    let (lo, hi) = problem.value_range;
    PartiallyMonotoneSystem::new(
        tripled_signature(),
        operators,
        dims.clone(),
        MetricProfile::uniform(problem.metric, 3)?,
        SampleRegion::uniform(&dims, lo, hi)?,
    )
}

/// One sampled pair on which a contraction inequality failed.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferViolation {
    pub sample: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of [`verify_transfer`]: the generating map and the three derived
/// components checked against the same comparison function on the same
/// sampled pairs.
#[derive(Debug, Clone)]
pub struct TransferReport {
    pub samples: usize,
    pub seed: u64,
    /// Failures of `d(F(x,y,z), F(u,v,w)) <= phi(max distance)` on directed
    /// argument triples.
    pub coupling_violations: Vec<TransferViolation>,
    /// Failures of the analogous component inequalities, indexed by
    /// component.
    pub component_violations: [Vec<TransferViolation>; 3],
    pub certified: bool,
}

struct TransferOutcome {
    coupling: Option<TransferViolation>,
    components: [Option<TransferViolation>; 3],
}

/// Checks, sample for sample, that the contraction inequality of the
/// generating map carries over to all three system components.
///
/// Each sample draws a directed pair `(p, q)` with `x <= u`, `y >= v`,
/// `z <= w` entrywise and bounds every left-hand side by `phi` of the same
/// product distance. Components 1 and 3 compare images at `(p, q)` directly;
/// component 2 compares them at the swapped pair `((u, v, z), (x, y, w))`,
/// which has the same component distances.
pub fn verify_transfer(
    problem: &TripledProblem,
    samples: usize,
    seed: u64,
) -> Result<TransferReport> {
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "transfer verification needs at least one sample".into(),
        ));
    }
    let system = tripled_to_system(problem)?;
    let row = system.signature().row(0)?.to_vec();
    let outcomes = exec::map_indices(samples, |idx| {
        transfer_one(problem, &system, &row, idx, seed)
    });
    let mut coupling_violations = Vec::new();
    let mut component_violations: [Vec<TransferViolation>; 3] =
        [Vec::new(), Vec::new(), Vec::new()];
    for outcome in outcomes {
        let outcome = outcome?;
        if let Some(v) = outcome.coupling {
            coupling_violations.push(v);
        }
        for (i, v) in outcome.components.into_iter().enumerate() {
            if let Some(v) = v {
                component_violations[i].push(v);
            }
        }
    }
    let certified =
        coupling_violations.is_empty() && component_violations.iter().all(|v| v.is_empty());
    Ok(TransferReport {
        samples,
        seed,
        coupling_violations,
        component_violations,
        certified,
    })
}

fn transfer_one(
    problem: &TripledProblem,
    system: &PartiallyMonotoneSystem,
    row: &[Monotonicity],
    idx: usize,
    seed: u64,
) -> Result<TransferOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64 + 1);
    let (p, q) = system.region().sample_directed_pair(row, &mut rng)?;
    let rhs = problem
        .phi
        .eval(product_metric(system.metrics(), &p, &q)?)?;
    let metric = problem.metric;
    let record = |lhs: f64| {
        if lhs <= rhs {
            None
        } else {
            Some(TransferViolation {
                sample: idx,
                lhs,
                rhs,
            })
        }
    };
    let coupling_lhs = metric.distance(
        &problem.eval(p.component(0)?, p.component(1)?, p.component(2)?)?,
        &problem.eval(q.component(0)?, q.component(1)?, q.component(2)?)?,
    );
    let coupling = record(coupling_lhs);
    let first = record(metric.distance(
        &system.apply_component(0, &p)?,
        &system.apply_component(0, &q)?,
    ));
    let swapped_p = ProductPoint::new(vec![
        q.component(0)?.to_vec(),
        q.component(1)?.to_vec(),
        p.component(2)?.to_vec(),
    ])?;
    let swapped_q = ProductPoint::new(vec![
        p.component(0)?.to_vec(),
        p.component(1)?.to_vec(),
        q.component(2)?.to_vec(),
    ])?;
    let second = record(metric.distance(
        &system.apply_component(1, &swapped_p)?,
        &system.apply_component(1, &swapped_q)?,
    ));
    let third = record(metric.distance(
        &system.apply_component(2, &p)?,
        &system.apply_component(2, &q)?,
    ));
    Ok(TransferOutcome {
        coupling,
        components: [first, second, third],
    })
}
