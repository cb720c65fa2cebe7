//! Compiled-in problem builders.
//!
//! Config files pick a builder by name and the builders translate the file's
//! tables into core objects. The affine builder assembles operators from the
//! coefficient matrix; `tanh-arctan` is a fixed nonlinear demonstration
//! system shipped with the binary.

use std::sync::Arc;

use mfix_core::applications::pbvs::{damped_phase_coupling, relaxation_to_constant, PbvsProblem};
use mfix_core::{
    affine_operators, signature_from_affine_blocks, ComparisonFunction, ComponentMetric,
    ComponentOperator, MetricProfile, MonotoneSignature, PartiallyMonotoneSystem, SampleRegion,
};

use crate::config::{PbvsSection, PhiSection, SystemSection};
use crate::Failure;

pub fn build_phi(section: Option<&PhiSection>) -> Result<ComparisonFunction, Failure> {
    let Some(section) = section else {
        return Ok(ComparisonFunction::Rational);
    };
    match section.kind.as_str() {
        "linear" => {
            let alpha = section
                .alpha
                .ok_or_else(|| Failure::config("phi kind \"linear\" needs an alpha"))?;
            ComparisonFunction::linear(alpha).map_err(Failure::from_core)
        }
        "log" => Ok(ComparisonFunction::Log),
        "rational" => Ok(ComparisonFunction::Rational),
        other => Err(Failure::config(format!("unknown phi kind {other:?}"))),
    }
}

pub fn phi_label(phi: &ComparisonFunction) -> String {
    match phi {
        ComparisonFunction::Linear(alpha) => format!("linear {}", crate::report::fmt(*alpha)),
        ComparisonFunction::Log => "log".into(),
        ComparisonFunction::Rational => "rational".into(),
        ComparisonFunction::Custom(_) => "custom".into(),
    }
}

pub fn build_system(section: &SystemSection) -> Result<Arc<PartiallyMonotoneSystem>, Failure> {
    match section.kind.as_str() {
        "affine" => build_affine(section),
        "tanh-arctan" => build_tanh_arctan(section),
        other => Err(Failure::config(format!("unknown system kind {other:?}"))),
    }
}

fn build_metrics(section: &SystemSection, order: usize) -> Result<MetricProfile, Failure> {
    let metric = match section.metric.as_deref() {
        None | Some("sup") => ComponentMetric::Sup,
        Some("euclidean") => ComponentMetric::Euclidean,
        Some(other) => return Err(Failure::config(format!("unknown metric {other:?}"))),
    };
    MetricProfile::uniform(metric, order).map_err(Failure::from_core)
}

fn build_region(
    section: &SystemSection,
    dims: &[usize],
    default: (f64, f64),
) -> Result<SampleRegion, Failure> {
    let (lo, hi) = section.region.as_ref().map_or(default, |r| (r.lo, r.hi));
    SampleRegion::uniform(dims, lo, hi).map_err(Failure::from_core)
}

fn build_affine(section: &SystemSection) -> Result<Arc<PartiallyMonotoneSystem>, Failure> {
    let dims = section
        .dims
        .clone()
        .ok_or_else(|| Failure::config("an affine system needs dims"))?;
    let matrix = section
        .matrix
        .clone()
        .ok_or_else(|| Failure::config("an affine system needs a matrix"))?;
    let offset = section
        .offset
        .clone()
        .ok_or_else(|| Failure::config("an affine system needs an offset"))?;
    let signature = match &section.signature {
        Some(text) => text
            .parse::<MonotoneSignature>()
            .map_err(Failure::from_core)?,
        None => signature_from_affine_blocks(&dims, &matrix).map_err(Failure::from_core)?,
    };
    let operators = affine_operators(&dims, &matrix, &offset).map_err(Failure::from_core)?;
    let metrics = build_metrics(section, dims.len())?;
    let region = build_region(section, &dims, (-5.0, 5.0))?;
    PartiallyMonotoneSystem::new(signature, operators, dims, metrics, region)
        .map(Arc::new)
        .map_err(Failure::from_core)
}

/// A two-component smooth demo: saturating self-couplings with opposing
/// cross terms. Slopes stay below 0.4 + 0.3 in either row, so a linear
/// comparison function with alpha 0.75 certifies it on any box.
fn build_tanh_arctan(section: &SystemSection) -> Result<Arc<PartiallyMonotoneSystem>, Failure> {
    for (key, given) in [
        ("dims", section.dims.is_some()),
        ("matrix", section.matrix.is_some()),
        ("offset", section.offset.is_some()),
        ("signature", section.signature.is_some()),
    ] {
        if given {
            return Err(Failure::config(format!(
                "system kind \"tanh-arctan\" is fixed and takes no {key}"
            )));
        }
    }
    let dims = vec![1, 1];
    let signature = "+-/-+"
        .parse::<MonotoneSignature>()
        .map_err(Failure::from_core)?;
    let first: ComponentOperator = Arc::new(|x| {
        let a = x.components()[0][0];
        let b = x.components()[1][0];
        vec![0.5 + 0.4 * a.tanh() - 0.3 * b.atan()]
    });
    let second: ComponentOperator = Arc::new(|x| {
        let a = x.components()[0][0];
        let b = x.components()[1][0];
        vec![-0.25 - 0.25 * a.tanh() + 0.3 * b.atan()]
    });
    let metrics = build_metrics(section, dims.len())?;
    let region = build_region(section, &dims, (-3.0, 3.0))?;
    PartiallyMonotoneSystem::new(signature, vec![first, second], dims, metrics, region)
        .map(Arc::new)
        .map_err(Failure::from_core)
}

pub fn build_pbvs(section: &PbvsSection, phi: ComparisonFunction) -> Result<PbvsProblem, Failure> {
    let lambda = section
        .lambda
        .ok_or_else(|| Failure::config("the [pbvs] section needs a lambda"))?;
    let period = section.period.unwrap_or(1.0);
    let grid_size = section.grid_size.unwrap_or(65);
    let [lo, hi] = section.value_range.unwrap_or([-1.0, 1.0]);
    let rhs = match section.rhs.as_str() {
        "relaxation" => {
            let target = section
                .target
                .ok_or_else(|| Failure::config("rhs \"relaxation\" needs a target"))?;
            relaxation_to_constant(lambda, target)
        }
        "phase-coupling" => {
            let epsilon = section
                .epsilon
                .ok_or_else(|| Failure::config("rhs \"phase-coupling\" needs an epsilon"))?;
            let forcing = section
                .forcing
                .ok_or_else(|| Failure::config("rhs \"phase-coupling\" needs a forcing"))?;
            damped_phase_coupling(epsilon, forcing, period)
        }
        other => return Err(Failure::config(format!("unknown pbvs rhs {other:?}"))),
    };
    PbvsProblem::new(period, lambda, rhs, phi, grid_size, (lo, hi)).map_err(Failure::from_core)
}
