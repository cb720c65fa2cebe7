//! The coupled successive-approximation solver.
//!
//! Starting from a pair `(u^0, v^0)`, each step applies the companion
//! operator symmetrically:
//!
//! ```text
//! u^(n+1) = A(u^n, v^n)      componentwise  T_i(sigma_i(u^n, v^n))
//! v^(n+1) = A(v^n, u^n)
//! ```
//!
//! Under the contraction hypothesis both sequences converge to the unique
//! fixed point of the system from arbitrary starts. When the starts satisfy
//! the coupled-bounds inequalities the pair additionally brackets the fixed
//! point: `u^n` climbs, `v^n` descends, `u^n <= v^n` throughout. Starts
//! violating those inequalities are still accepted; only the bracketing
//! diagnostics lapse.
//!
//! The solver is sequential and allocation-light by design: one pair
//! evaluation per step, fixed evaluation order, no data races. Runs are
//! reproducible bit for bit.
//!
//! Stopping: a run converges at state `n` once the pair gap
//! `d(u^n, v^n)` and the movement of one more probe step both fall within
//! the tolerance. The reported iteration count excludes that probe, so a
//! fixed-point start reports zero iterations. After convergence the
//! solution's own image is measured once more: the defect `d(T(x*), x*)`
//! must come in below twice the tolerance, which is exactly what the
//! triangle inequality grants through the probe and the gap.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::product_metric;
use crate::phi::ComparisonFunction;
use crate::point::{product_leq, ProductPoint};
use crate::sigma::MixedMonotoneOperator;
use crate::system::PartiallyMonotoneSystem;

/// Growth factor of the residual over [`DIVERGENCE_WINDOW`] steps that
/// aborts a run early.
pub const DIVERGENCE_GROWTH_FACTOR: f64 = 1e6;
/// Number of steps across which residual growth is measured.
pub const DIVERGENCE_WINDOW: usize = 50;

/// Tuning knobs for a solve run.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Convergence threshold for both the step residual and the pair gap.
    pub tolerance: f64,
    /// Hard cap on iterations before the run is declared non-convergent.
    pub max_iterations: usize,
    /// Comparison function of the contraction hypothesis. Only consulted
    /// for diagnostics: a linear one yields an a-priori iteration estimate.
    pub phi: ComparisonFunction,
    /// Whether to compute the entrywise bracket flag each step.
    pub track_bracket: bool,
}

impl SolveConfig {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !tolerance.is_finite() || tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(Self {
            tolerance,
            max_iterations,
            phi: ComparisonFunction::Rational,
            track_bracket: true,
        })
    }

    pub fn with_phi(mut self, phi: ComparisonFunction) -> Result<Self> {
        phi.validate()?;
        self.phi = phi;
        Ok(self)
    }

    pub fn with_bracket_tracking(mut self, on: bool) -> Self {
        self.track_bracket = on;
        self
    }

    /// A-priori bound on the iterations needed to push a geometric residual
    /// below tolerance, available when the comparison function is linear
    /// with positive slope: `ceil(ln(tol / d0) / ln(alpha)) + 1` for an
    /// initial distance `d0`.
    pub fn estimate_iterations(&self, initial_distance: f64) -> Option<usize> {
        match self.phi {
            ComparisonFunction::Linear(alpha) if alpha > 0.0 => {
                if initial_distance <= self.tolerance {
                    Some(1)
                } else {
                    let bound = (self.tolerance / initial_distance).ln() / alpha.ln();
                    Some(bound.ceil() as usize + 1)
                }
            }
            _ => None,
        }
    }
}

/// Snapshot of the coupled pair after some number of steps.
#[derive(Debug, Clone)]
pub struct CoupledIterationState {
    pub u: ProductPoint,
    pub v: ProductPoint,
    /// Steps taken so far; 0 for a freshly initialised state.
    pub iteration: usize,
    /// Movement `max(d(u', u), d(v', v))` of the step that produced this
    /// state; infinite before the first step.
    pub residual: f64,
    /// Pair gap `d(u, v)`.
    pub gap: f64,
    /// Whether `u <= v` entrywise has held at every state so far. Stays
    /// `false` for the whole run when bracket tracking is off.
    pub bracket_valid: bool,
}

impl CoupledIterationState {
    /// Initial state of a run; computes the gap and (optionally) the
    /// bracket flag for the starting pair.
    pub fn initial(
        system: &PartiallyMonotoneSystem,
        u: ProductPoint,
        v: ProductPoint,
        track_bracket: bool,
    ) -> Result<Self> {
        system.check_point(&u)?;
        system.check_point(&v)?;
        let gap = product_metric(system.metrics(), &u, &v)?;
        let bracket_valid = track_bracket && product_leq(&u, &v)?;
        Ok(Self {
            u,
            v,
            iteration: 0,
            residual: f64::INFINITY,
            gap,
            bracket_valid,
        })
    }
}

/// One record of the iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub residual: f64,
    pub gap: f64,
    pub bracket_valid: bool,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Residual, gap and a-posteriori defect all within bounds.
    Converged,
    /// The iteration cap was reached first.
    MaxIterationsReached,
    /// The residual grew by [`DIVERGENCE_GROWTH_FACTOR`] across the window.
    Diverged,
}

/// Outcome of a solve run.
#[derive(Debug, Clone)]
pub struct FixedPointResult {
    /// The approximate fixed point: the `u`-iterate at the accepted state.
    pub solution: ProductPoint,
    pub status: SolveStatus,
    /// Accepted steps (the convergence probe is not counted).
    pub iterations: usize,
    /// Final step residual.
    pub residual: f64,
    /// Final pair gap `d(u, v)`.
    pub gap: f64,
    /// A-posteriori defect `d(T(x*), x*)`; at most twice the tolerance on a
    /// converged run.
    pub defect: f64,
    /// Whether the bracket `u^n <= v^n` held at every visited state.
    pub bracket_valid: bool,
    /// One record per pair evaluation, including the final probe.
    pub history: Vec<TraceRecord>,
}

impl FixedPointResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Advances the coupled pair by one step.
///
/// A state whose pair is a diagonal fixed point `(x*, x*)` reproduces
/// itself with zero residual.
pub fn coupled_step(
    a: &MixedMonotoneOperator,
    state: &CoupledIterationState,
    track_bracket: bool,
) -> Result<CoupledIterationState> {
    let system = a.system();
    let next_u = a.eval(&state.u, &state.v)?;
    let next_v = a.eval(&state.v, &state.u)?;
    let moved_u = product_metric(system.metrics(), &next_u, &state.u)?;
    let moved_v = product_metric(system.metrics(), &next_v, &state.v)?;
    let gap = product_metric(system.metrics(), &next_u, &next_v)?;
    let bracket_valid = track_bracket && state.bracket_valid && product_leq(&next_u, &next_v)?;
    Ok(CoupledIterationState {
        u: next_u,
        v: next_v,
        iteration: state.iteration + 1,
        residual: moved_u.max(moved_v),
        gap,
        bracket_valid,
    })
}

/// Runs the coupled iteration from the pair `(start_u, start_v)`.
///
/// The system is assumed validated (see
/// [`crate::sigma::build_mixed_operator`]); this routine performs no
/// sampling of its own and is fully deterministic.
pub fn solve(
    system: Arc<PartiallyMonotoneSystem>,
    start_u: ProductPoint,
    start_v: ProductPoint,
    config: &SolveConfig,
) -> Result<FixedPointResult> {
    if !config.tolerance.is_finite() || config.tolerance <= 0.0 || config.max_iterations == 0 {
        return Err(Error::InvalidConfig(
            "solve needs a positive tolerance and at least one iteration".into(),
        ));
    }
    let a = MixedMonotoneOperator::new(system);
    let mut state =
        CoupledIterationState::initial(a.system(), start_u, start_v, config.track_bracket)?;
    let mut history: Vec<TraceRecord> = Vec::new();

    loop {
        let probe = coupled_step(&a, &state, config.track_bracket)?;
        history.push(TraceRecord {
            iteration: probe.iteration,
            residual: probe.residual,
            gap: probe.gap,
            bracket_valid: probe.bracket_valid,
        });

        if probe.residual <= config.tolerance && state.gap <= config.tolerance {
            // The pair barely moved and was already tight: accept the
            // pre-probe state.
            let image = a.system().apply(&state.u)?;
            let defect = product_metric(a.system().metrics(), &image, &state.u)?;
            let status = if defect <= 2.0 * config.tolerance {
                SolveStatus::Converged
            } else {
                SolveStatus::MaxIterationsReached
            };
            return Ok(FixedPointResult {
                solution: state.u,
                status,
                iterations: state.iteration,
                residual: probe.residual,
                gap: state.gap,
                defect,
                bracket_valid: state.bracket_valid,
                history,
            });
        }

        state = probe;

        if history.len() > DIVERGENCE_WINDOW {
            let recent = history[history.len() - 1].residual;
            let earlier = history[history.len() - 1 - DIVERGENCE_WINDOW].residual;
            if earlier.is_finite() && recent > earlier * DIVERGENCE_GROWTH_FACTOR {
                return finish_unconverged(a, state, history, SolveStatus::Diverged);
            }
        }
        if state.iteration >= config.max_iterations {
            return finish_unconverged(a, state, history, SolveStatus::MaxIterationsReached);
        }
    }
}

fn finish_unconverged(
    a: MixedMonotoneOperator,
    state: CoupledIterationState,
    history: Vec<TraceRecord>,
    status: SolveStatus,
) -> Result<FixedPointResult> {
    let image = a.system().apply(&state.u)?;
    let defect = product_metric(a.system().metrics(), &image, &state.u)?;
    Ok(FixedPointResult {
        solution: state.u,
        status,
        iterations: state.iteration,
        residual: state.residual,
        gap: state.gap,
        defect,
        bracket_valid: state.bracket_valid,
        history,
    })
}

/// Runs the coupled iteration with both sequences started at the same
/// point, which makes them coincide with plain successive approximation of
/// the system.
pub fn solve_from_single_start(
    system: Arc<PartiallyMonotoneSystem>,
    start: ProductPoint,
    config: &SolveConfig,
) -> Result<FixedPointResult> {
    let u = start.clone();
    solve(system, u, start, config)
}
