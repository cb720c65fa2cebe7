//! Fixed points of systems of coordinate-wise monotone operators.
//!
//! The central object is a [`system::PartiallyMonotoneSystem`]: `N` operators
//! on a product of finite-dimensional components, each nondecreasing or
//! nonincreasing in every component separately, with the directions recorded
//! in a [`signature::MonotoneSignature`]. The sign pattern induces one
//! selector per operator ([`sigma`]) that rearranges a pair of points so the
//! operator sees its increasing arguments from the first point and its
//! decreasing ones from the second. Composing each operator with its selector
//! yields a mixed monotone companion whose diagonal reproduces the system,
//! and the coupled iteration in [`solver`] drives a symmetric pair of
//! iterates to a common limit, which is a fixed point of every operator at
//! once.
//!
//! [`verify`] certifies the hypotheses behind that construction on sampled
//! data: contraction against a comparison function ([`phi`]), admissibility
//! of coupled starting bounds, and reducibility of sign patterns.
//! [`applications`] instantiates the machinery for three-way coupled maps and
//! periodic boundary-value systems; [`exec`] switches the data-parallel
//! loops between rayon and a sequential fallback.

pub mod applications;
pub mod error;
pub mod exec;
pub mod metric;
pub mod phi;
pub mod point;
pub mod region;
pub mod sigma;
pub mod signature;
pub mod solver;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use metric::{product_metric, ComponentMetric, MetricProfile};
pub use phi::ComparisonFunction;
pub use point::{product_leq, ProductPoint};
pub use region::SampleRegion;
pub use sigma::{
    build_mixed_operator, preceq, preceq_via_sigma, s_compose, s_power, sigma_apply, BivariateMap,
    MixedMonotoneOperator,
};
pub use signature::{MonotoneSignature, Monotonicity};
pub use solver::{
    coupled_step, solve, solve_from_single_start, CoupledIterationState, FixedPointResult,
    SolveConfig, SolveStatus,
};
pub use system::{
    affine_operators, signature_from_affine_blocks, ComponentOperator, PartiallyMonotoneSystem,
};
pub use verify::{
    classify_reducibility, count_reducible, verify_contraction, verify_coupled_bounds,
    ContractionReport, CoupledBoundsReport, ReducibilityVerdict,
};
