//! Comparison functions.
//!
//! A comparison function is a nondecreasing `phi: [0, inf) -> [0, inf)` whose
//! iterates vanish pointwise: `phi^n(t) -> 0` for every `t >= 0`. Such a
//! function necessarily satisfies `phi(t) < t` for `t > 0` and `phi(0) = 0`.
//!
//! The three built-ins are comparison functions by elementary arguments
//! (`alpha^n t`, and both `ln(1+t)` and `t/(1+t)` decay like `O(1/n)`), so
//! their construction succeeds without any sampling. User-supplied functions
//! are only ever accepted after the sampled checks in [`ComparisonFunction::validate`]
//! pass; a failing candidate is rejected when the owning problem is built.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default iterate count for the numeric decay check.
///
/// `Log` and `Rational` decay like `c/n`, so establishing `phi^K(t) < eps`
/// needs `K` of order `1/eps`. The pair below is consistent: both built-ins
/// pass it from any starting `t` up to `1e6`.
pub const DECAY_CHECK_ITERATIONS: usize = 1_000_000;
/// Default threshold for the numeric decay check.
pub const DECAY_CHECK_THRESHOLD: f64 = 1e-5;

const DECAY_CHECK_STARTS: [f64; 5] = [1e-6, 1e-2, 1.0, 1e3, 1e6];

/// A comparison function controlling the contraction condition.
#[derive(Clone)]
pub enum ComparisonFunction {
    /// `t -> alpha * t` with `0 <= alpha < 1`.
    Linear(f64),
    /// `t -> ln(1 + t)`.
    Log,
    /// `t -> t / (1 + t)`.
    Rational,
    /// A user-supplied candidate, admitted only via the sampled checks.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ComparisonFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComparisonFunction::Linear(a) => write!(f, "Linear({a})"),
            ComparisonFunction::Log => f.write_str("Log"),
            ComparisonFunction::Rational => f.write_str("Rational"),
            ComparisonFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl ComparisonFunction {
    /// Linear comparison function, checking the slope range.
    pub fn linear(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
            return Err(Error::ComparisonFunctionRejected(format!(
                "linear slope must satisfy 0 <= alpha < 1, got {alpha}"
            )));
        }
        Ok(ComparisonFunction::Linear(alpha))
    }

    /// Wraps a user-supplied function and runs the sampled admissibility
    /// checks on it immediately.
    pub fn custom<F>(f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let phi = ComparisonFunction::Custom(Arc::new(f));
        phi.validate()?;
        Ok(phi)
    }

    /// Evaluates `phi(t)`. Negative arguments are outside the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::ComparisonFunctionRejected(format!(
                "argument must be finite and nonnegative, got {t}"
            )));
        }
        let value = match self {
            ComparisonFunction::Linear(alpha) => alpha * t,
            ComparisonFunction::Log => t.ln_1p(),
            ComparisonFunction::Rational => t / (t + 1.0),
            ComparisonFunction::Custom(f) => f(t),
        };
        if !value.is_finite() {
            return Err(Error::ComparisonFunctionRejected(format!(
                "non-finite value at t = {t}"
            )));
        }
        Ok(value)
    }

    /// `phi^n(t)`: the n-fold iterate.
    pub fn iterate(&self, t: f64, n: usize) -> Result<f64> {
        let mut value = if t.is_finite() && t >= 0.0 {
            t
        } else {
            return Err(Error::ComparisonFunctionRejected(format!(
                "argument must be finite and nonnegative, got {t}"
            )));
        };
        for _ in 0..n {
            value = self.eval(value)?;
            if value == 0.0 {
                break;
            }
        }
        Ok(value)
    }

    /// Numeric decay check: `phi^iterations(t) < threshold` for a spread of
    /// starting points. The built-ins pass this with the default pair; it is
    /// mandatory for `Custom`.
    pub fn check_iterate_decay(&self, iterations: usize, threshold: f64) -> Result<()> {
        for &t in &DECAY_CHECK_STARTS {
            let tail = self.iterate(t, iterations)?;
            if tail >= threshold {
                return Err(Error::ComparisonFunctionRejected(format!(
                    "iterates fail to vanish: phi^{iterations}({t}) = {tail} >= {threshold}"
                )));
            }
        }
        Ok(())
    }

    /// Admissibility: structural for built-ins, sampled for `Custom`.
    ///
    /// For `Custom` the checks are `phi(0) = 0`, monotonicity on a log-spaced
    /// grid of ordered pairs, and the numeric decay check with the default
    /// parameters. Sampling cannot prove admissibility, only refute it; a
    /// function passing here is accepted at face value.
    pub fn validate(&self) -> Result<()> {
        match self {
            ComparisonFunction::Linear(alpha) => Self::linear(*alpha).map(|_| ()),
            ComparisonFunction::Log | ComparisonFunction::Rational => Ok(()),
            ComparisonFunction::Custom(_) => {
                let at_zero = self.eval(0.0)?;
                if at_zero != 0.0 {
                    return Err(Error::ComparisonFunctionRejected(format!(
                        "phi(0) = {at_zero}, expected 0"
                    )));
                }
                let grid: Vec<f64> = (0..=240)
                    .map(|k| 10f64.powf(-6.0 + k as f64 * 0.05))
                    .collect();
                let mut prev_t = 0.0;
                let mut prev_v = at_zero;
                for &t in &grid {
                    let v = self.eval(t)?;
                    if v < prev_v {
                        return Err(Error::ComparisonFunctionRejected(format!(
                            "not nondecreasing: phi({prev_t}) = {prev_v} > phi({t}) = {v}"
                        )));
                    }
                    prev_t = t;
                    prev_v = v;
                }
                self.check_iterate_decay(DECAY_CHECK_ITERATIONS, DECAY_CHECK_THRESHOLD)
            }
        }
    }
}

/// Free-function spelling of [`ComparisonFunction::iterate`].
pub fn phi_iterate(phi: &ComparisonFunction, t: f64, n: usize) -> Result<f64> {
    phi.iterate(t, n)
}
