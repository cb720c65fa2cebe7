//! Periodic boundary-value systems.
//!
//! The problem is three mutually coupled scalar equations on a period `T`:
//!
//! ```text
//! x'(t) = f(t, x(t), y(t), z(t))
//! y'(t) = f(t, y(t), x(t), z(t))
//! z'(t) = f(t, z(t), y(t), x(t))
//! x(0) = x(T),  y(0) = y(T),  z(0) = z(T)
//! ```
//!
//! where `f(t, a, b, c) + lambda * a` is nondecreasing in `a`, `f` is
//! nonincreasing in `b` and nondecreasing in `c`. Adding `lambda * a` to both
//! sides and inverting `a' + lambda * a` with the periodic kernel
//! [`green_kernel`] turns each equation into an integral fixed-point equation.
//! Discretizing the integral on a uniform grid ([`kernel_quadrature`]) yields
//! a tripled problem ([`pbvs_operator`]) that the coupled solver handles.

use std::fmt;
use std::sync::Arc;

use crate::applications::tripled::{tripled_to_system, TripledMap, TripledProblem};
use crate::error::{Error, Result};
use crate::exec;
use crate::metric::ComponentMetric;
use crate::phi::ComparisonFunction;
use crate::point::ProductPoint;
use crate::solver::{solve, FixedPointResult, SolveConfig};
use crate::verify::{verify_contraction, ContractionReport};

/// Right-hand side of one scalar equation: `(t, a, b, c) -> f(t, a, b, c)`.
pub type PeriodicRhs = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// Default absolute slack for [`verify_lower_upper`].
pub const DEFAULT_BOUNDS_SLACK: f64 = 1e-10;

/// A periodic boundary-value system posed on a uniform time grid.
pub struct PbvsProblem {
    period: f64,
    lambda: f64,
    rhs: PeriodicRhs,
    phi: ComparisonFunction,
    grid_size: usize,
    value_range: (f64, f64),
}

impl fmt::Debug for PbvsProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PbvsProblem")
            .field("period", &self.period)
            .field("lambda", &self.lambda)
            .field("phi", &self.phi)
            .field("grid_size", &self.grid_size)
            .field("value_range", &self.value_range)
            .finish_non_exhaustive()
    }
}

impl PbvsProblem {
    pub fn new(
        period: f64,
        lambda: f64,
        rhs: PeriodicRhs,
        phi: ComparisonFunction,
        grid_size: usize,
        value_range: (f64, f64),
    ) -> Result<Self> {
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "period must be finite and positive, got {period}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "decay rate lambda must be finite and positive, got {lambda}"
            )));
        }
        if grid_size < 3 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 3 nodes, got {grid_size}"
            )));
        }
        let (lo, hi) = value_range;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidConfig(format!(
                "value range must be a finite interval with lo < hi, got ({lo}, {hi})"
            )));
        }
        phi.validate()?;
        Ok(Self {
            period,
            lambda,
            rhs,
            phi,
            grid_size,
            value_range,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn phi(&self) -> &ComparisonFunction {
        &self.phi
    }

    pub fn value_range(&self) -> (f64, f64) {
        self.value_range
    }

    pub fn rhs(&self) -> PeriodicRhs {
        self.rhs.clone()
    }

    /// The grid nodes `t_k = k * period / (grid_size - 1)`.
    pub fn times(&self) -> Vec<f64> {
        time_grid(self.period, self.grid_size).expect("validated at construction")
    }
}

/// The uniform grid on `[0, period]` with the last node pinned to `period`
/// exactly.
pub fn time_grid(period: f64, grid_size: usize) -> Result<Vec<f64>> {
    if !period.is_finite() || period <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "period must be finite and positive, got {period}"
        )));
    }
    if grid_size < 3 {
        return Err(Error::InvalidConfig(format!(
            "grid needs at least 3 nodes, got {grid_size}"
        )));
    }
    let m = grid_size - 1;
    Ok((0..grid_size)
        .map(|k| {
            if k == m {
                period
            } else {
                period * k as f64 / m as f64
            }
        })
        .collect())
}

/// The periodic kernel of `a' + lambda * a` on `[0, period]`:
///
/// ```text
/// G(t, s) = exp(lambda * (period + s - t)) / (exp(lambda * period) - 1)   s <= t
///           exp(lambda * (s - t))          / (exp(lambda * period) - 1)   s >  t
/// ```
///
/// On the diagonal `s == t` the first branch applies. For every `t` the
/// kernel integrates to `1 / lambda` in `s`.
pub fn green_kernel(lambda: f64, period: f64, t: f64, s: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "kernel decay rate must be finite and nonzero, got {lambda}"
        )));
    }
    if !period.is_finite() || period <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "period must be finite and positive, got {period}"
        )));
    }
    if !(0.0..=period).contains(&t) || !(0.0..=period).contains(&s) {
        return Err(Error::InvalidConfig(format!(
            "kernel arguments must lie in [0, {period}], got t = {t}, s = {s}"
        )));
    }
    let denom = (lambda * period).exp_m1();
    if s <= t {
        Ok((lambda * ((period - t) + s)).exp() / denom)
    } else {
        Ok((lambda * (s - t)).exp() / denom)
    }
}

/// Trapezoid weights for integrating `s -> G(t_k, s) * g(s)` on the uniform
/// grid, one row per node `t_k`.
///
/// The rule is split at `s = t_k`, where the kernel jumps, and each side of
/// the junction uses its own one-sided kernel value. Row `0` and row
/// `grid_size - 1` come out identical, so an integrand sampled on the grid
/// produces exactly periodic values.
pub fn kernel_quadrature(lambda: f64, period: f64, grid_size: usize) -> Result<Vec<Vec<f64>>> {
    if !lambda.is_finite() || lambda == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "kernel decay rate must be finite and nonzero, got {lambda}"
        )));
    }
    let times = time_grid(period, grid_size)?;
    let m = grid_size - 1;
    let h = period / m as f64;
    let denom = (lambda * period).exp_m1();
    let rows = exec::map_indices(grid_size, |k| {
        let t = times[k];
        let tail = period - t;
        let mut row = vec![0.0; grid_size];
        if k > 0 {
            for j in 0..=k {
                let c = if j == 0 || j == k { 0.5 * h } else { h };
                row[j] += c * (lambda * (tail + times[j])).exp() / denom;
            }
        }
        if k < m {
            for j in k..=m {
                let c = if j == k || j == m { 0.5 * h } else { h };
                row[j] += c * (lambda * (times[j] - t)).exp() / denom;
            }
        }
        row
    });
    Ok(rows)
}

/// Builds the tripled problem whose fixed points are the discretized
/// periodic solutions: component `k` of the map is the quadrature of
/// `G(t_k, s) * (f(s, x(s), y(s), z(s)) + lambda * x(s))`.
pub fn pbvs_operator(problem: &PbvsProblem) -> Result<TripledProblem> {
    let grid_size = problem.grid_size;
    let weights = Arc::new(kernel_quadrature(
        problem.lambda,
        problem.period,
        grid_size,
    )?);
    let times = Arc::new(problem.times());
    let rhs = problem.rhs.clone();
    let lambda = problem.lambda;
    let map: TripledMap = Arc::new(move |x: &[f64], y: &[f64], z: &[f64]| {
        let integrand: Vec<f64> = (0..x.len())
            .map(|j| rhs(times[j], x[j], y[j], z[j]) + lambda * x[j])
            .collect();
        weights
            .iter()
            .map(|row| row.iter().zip(&integrand).map(|(w, g)| w * g).sum())
            .collect()
    });
    TripledProblem::new(
        grid_size,
        map,
        ComponentMetric::Sup,
        problem.phi.clone(),
        problem.value_range,
    )
}

/// A candidate lower/upper sextuple on the grid: `(x, y, z)` is the lower
/// triple (with `y` playing the upper role in the second argument) and
/// `(u, v, w)` the upper one.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledLowerUpperSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl CoupledLowerUpperSolution {
    pub fn new(
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
    ) -> Result<Self> {
        let len = x.len();
        let slots = [&x, &y, &z, &u, &v, &w];
        if slots.iter().any(|s| s.len() != len) || len == 0 {
            return Err(Error::ProfileMismatch(
                "all six candidate curves must share one nonzero length".into(),
            ));
        }
        if slots.iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidPoint(
                "candidate curves must be finite".into(),
            ));
        }
        Ok(Self { x, y, z, u, v, w })
    }

    /// Crosswise constant candidate: the lower-role slots `x`, `z`, `v` take
    /// `lo` and the upper-role slots `y`, `u`, `w` take `hi`.
    pub fn constant(grid_size: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(
            vec![lo; grid_size],
            vec![hi; grid_size],
            vec![lo; grid_size],
            vec![hi; grid_size],
            vec![lo; grid_size],
            vec![hi; grid_size],
        )
    }
}

/// Which of the six candidate curves an inequality belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSlot {
    X,
    Y,
    Z,
    U,
    V,
    W,
}

/// One failed lower/upper inequality. `node` is the grid index, or `None`
/// for the periodic endpoint comparison of that curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerUpperViolation {
    pub slot: CandidateSlot,
    pub node: Option<usize>,
    pub value: f64,
    pub bound: f64,
}

/// Outcome of [`verify_lower_upper`].
#[derive(Debug, Clone, PartialEq)]
pub struct LowerUpperReport {
    pub satisfied: bool,
    pub first_failure: Option<LowerUpperViolation>,
    pub failures: usize,
}

/// One inequality family: the checked curve (which doubles as the first
/// integrand argument), the other two argument curves, and whether the
/// curve must sit below its integral.
type BoundFamily<'a> = (CandidateSlot, &'a [f64], &'a [f64], &'a [f64], bool);

/// Checks the twelve integral-form lower/upper inequalities of a candidate
/// sextuple, node by node, with an absolute slack.
///
/// Each curve must sit on the correct side of its own kernel integral:
///
/// ```text
/// x_k <= I(x, v, z)_k    y_k >= I(y, u, z)_k    z_k <= I(z, v, x)_k
/// u_k >= I(u, y, w)_k    v_k <= I(v, x, w)_k    w_k >= I(w, y, u)_k
/// ```
///
/// where `I(a, b, c)_k` is the row-`k` quadrature of
/// `f(s, a, b, c) + lambda * a`, plus the endpoint comparisons
/// `x_0 <= x_last`, `y_0 >= y_last`, and so on with matching directions.
/// The slack absorbs quadrature error when a candidate is known only up to
/// the grid resolution.
pub fn verify_lower_upper(
    problem: &PbvsProblem,
    candidate: &CoupledLowerUpperSolution,
    slack: f64,
) -> Result<LowerUpperReport> {
    if !slack.is_finite() || slack < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "slack must be finite and nonnegative, got {slack}"
        )));
    }
    let grid_size = problem.grid_size;
    if candidate.x.len() != grid_size {
        return Err(Error::ProfileMismatch(format!(
            "candidate has {} nodes, problem grid has {grid_size}",
            candidate.x.len()
        )));
    }
    let weights = kernel_quadrature(problem.lambda, problem.period, grid_size)?;
    let times = problem.times();
    let rhs = &problem.rhs;
    let lambda = problem.lambda;
    let families: [BoundFamily; 6] = [
        (
            CandidateSlot::X,
            &candidate.x,
            &candidate.v,
            &candidate.z,
            true,
        ),
        (
            CandidateSlot::Y,
            &candidate.y,
            &candidate.u,
            &candidate.z,
            false,
        ),
        (
            CandidateSlot::Z,
            &candidate.z,
            &candidate.v,
            &candidate.x,
            true,
        ),
        (
            CandidateSlot::U,
            &candidate.u,
            &candidate.y,
            &candidate.w,
            false,
        ),
        (
            CandidateSlot::V,
            &candidate.v,
            &candidate.x,
            &candidate.w,
            true,
        ),
        (
            CandidateSlot::W,
            &candidate.w,
            &candidate.y,
            &candidate.u,
            false,
        ),
    ];
    let mut first_failure = None;
    let mut failures = 0usize;
    let mut record = |slot, node, value: f64, bound: f64, lower: bool| {
        let ok = if lower {
            value <= bound + slack
        } else {
            value + slack >= bound
        };
        if !ok {
            failures += 1;
            if first_failure.is_none() {
                first_failure = Some(LowerUpperViolation {
                    slot,
                    node,
                    value,
                    bound,
                });
            }
        }
    };
    for (slot, main, second, third, lower) in families {
        let integrand: Vec<f64> = (0..grid_size)
            .map(|j| rhs(times[j], main[j], second[j], third[j]) + lambda * main[j])
            .collect();
        if let Some(j) = integrand.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "right-hand side produced a non-finite value at node {j}"
            )));
        }
        for k in 0..grid_size {
            let bound: f64 = weights[k].iter().zip(&integrand).map(|(w, g)| w * g).sum();
            record(slot, Some(k), main[k], bound, lower);
        }
        record(slot, None, main[0], main[grid_size - 1], lower);
    }
    Ok(LowerUpperReport {
        satisfied: failures == 0,
        first_failure,
        failures,
    })
}

/// Knobs of [`solve_pbvs`] that are not part of the solver config proper.
#[derive(Debug, Clone)]
pub struct PbvsOptions {
    /// Slack passed to [`verify_lower_upper`] when starting bounds are given.
    pub bounds_slack: f64,
    /// Sample count for the monotonicity and contraction checks.
    pub verification_samples: usize,
    /// Seed for those checks.
    pub seed: u64,
}

impl Default for PbvsOptions {
    fn default() -> Self {
        Self {
            bounds_slack: DEFAULT_BOUNDS_SLACK,
            verification_samples: 200,
            seed: 1,
        }
    }
}

/// A solved periodic system: the three curves on the grid, the raw solver
/// result, the periodic defect of the curves, and the contraction
/// certificate the solve was gated on.
#[derive(Debug, Clone)]
pub struct PbvsSolution {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub result: FixedPointResult,
    pub defect: f64,
    pub certification: ContractionReport,
}

/// Discretizes the problem, certifies its hypotheses, and runs the coupled
/// iteration.
///
/// The declared argument directions are validated on samples, then the
/// contraction inequality is certified against the problem's comparison
/// function; an uncertified problem is refused. When `bounds` are given they
/// are checked with [`verify_lower_upper`] and used as the starting pair
/// (lower triple as `u^0`, upper triple as `v^0`); otherwise both iterates
/// start from the center of the value range.
pub fn solve_pbvs(
    problem: &PbvsProblem,
    bounds: Option<&CoupledLowerUpperSolution>,
    options: &PbvsOptions,
    config: &SolveConfig,
) -> Result<PbvsSolution> {
    let tripled = pbvs_operator(problem)?;
    tripled.validate(options.verification_samples, options.seed)?;
    let system = Arc::new(tripled_to_system(&tripled)?);
    let certification = verify_contraction(
        &system,
        problem.phi(),
        options.verification_samples,
        options.seed,
    )?;
    if !certification.certified {
        return Err(Error::ContractionUncertified {
            violations: certification.violations.len(),
            samples: certification.samples,
            max_ratio: certification.max_ratio,
        });
    }
    let (start_u, start_v) = match bounds {
        Some(b) => {
            let report = verify_lower_upper(problem, b, options.bounds_slack)?;
            if !report.satisfied {
                return Err(Error::BoundsNotSatisfied(format!(
                    "{} lower/upper inequalities failed, first: {:?}",
                    report.failures, report.first_failure
                )));
            }
            (
                ProductPoint::new(vec![b.x.clone(), b.y.clone(), b.z.clone()])?,
                ProductPoint::new(vec![b.u.clone(), b.v.clone(), b.w.clone()])?,
            )
        }
        None => {
            let center = system.region().center();
            (center.clone(), center)
        }
    };
    let result = solve(system, start_u, start_v, config)?;
    let comps = result.solution.components();
    let x = comps[0].clone();
    let y = comps[1].clone();
    let z = comps[2].clone();
    let defect = periodic_defect(problem, &x, &y, &z)?;
    Ok(PbvsSolution {
        times: problem.times(),
        x,
        y,
        z,
        result,
        defect,
        certification,
    })
}

/// Largest residual of the differential equations over the grid, using
/// periodic central differences for the derivatives.
///
/// Node `grid_size - 1` duplicates node `0`, so the sweep runs over the
/// first `grid_size - 1` nodes and wraps through the end of the grid.
pub fn periodic_defect(problem: &PbvsProblem, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    let grid_size = problem.grid_size;
    for (name, curve) in [("x", x), ("y", y), ("z", z)] {
        if curve.len() != grid_size {
            return Err(Error::ProfileMismatch(format!(
                "curve {name} has {} nodes, problem grid has {grid_size}",
                curve.len()
            )));
        }
    }
    let m = grid_size - 1;
    let h = problem.period / m as f64;
    let times = problem.times();
    let rhs = &problem.rhs;
    let mut worst = 0.0f64;
    for k in 0..m {
        let prev = if k == 0 { m - 1 } else { k - 1 };
        let next = k + 1;
        for (a, b, c) in [(x, y, z), (y, x, z), (z, y, x)] {
            let derivative = (a[next] - a[prev]) / (2.0 * h);
            let value = rhs(times[k], a[k], b[k], c[k]);
            if !value.is_finite() {
                return Err(Error::InvalidPoint(format!(
                    "right-hand side produced a non-finite value at node {k}"
                )));
            }
            worst = worst.max((derivative - value).abs());
        }
    }
    Ok(worst)
}

/// Right-hand side `f(t, a, b, c) = lambda * (target - a)`: every component
/// relaxes to the constant independently of the others.
pub fn relaxation_to_constant(lambda: f64, target: f64) -> PeriodicRhs {
    Arc::new(move |_t, a, _b, _c| lambda * (target - a))
}

/// Right-hand side `f(t, a, b, c) = -a + epsilon * sin((atan c - atan b) / 2)
/// + forcing * cos(2 pi t / period)`.
///
/// The halved phase difference keeps the sine argument inside
/// `(-pi/2, pi/2)`, so `f` is nonincreasing in `b` and nondecreasing in `c`
/// on the whole line, and `f + lambda * a` is nondecreasing in `a` for any
/// `lambda >= 1`.
pub fn damped_phase_coupling(epsilon: f64, forcing: f64, period: f64) -> PeriodicRhs {
    Arc::new(move |t, a, b, c| {
        let phase = 0.5 * (c.atan() - b.atan());
        -a + epsilon * phase.sin() + forcing * (std::f64::consts::TAU * t / period).cos()
    })
}
