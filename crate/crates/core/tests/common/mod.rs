//! Shared fixtures for the integration suites: random sign-consistent
//! affine systems with a known contraction factor, and a dense linear
//! reference solution for their fixed points.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use mfix_core::applications::pbvs::PeriodicRhs;
use mfix_core::applications::tripled::TripledProblem;
use mfix_core::{
    affine_operators, signature_from_affine_blocks, ComparisonFunction, ComponentMetric,
    MetricProfile, PartiallyMonotoneSystem, ProductPoint, SampleRegion,
};

pub struct AffineInstance {
    pub system: Arc<PartiallyMonotoneSystem>,
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub dims: Vec<usize>,
    /// Largest absolute row sum; a contraction factor for the sup metric.
    pub alpha: f64,
}

pub fn block_of(k: usize, dims: &[usize]) -> usize {
    let mut acc = 0;
    for (idx, &m) in dims.iter().enumerate() {
        acc += m;
        if k < acc {
            return idx;
        }
    }
    unreachable!("flat index inside the partition")
}

/// Builds a random affine system with sign-uniform blocks, entry magnitudes
/// bounded away from zero, and every absolute row sum in `[0.3, 0.8)`.
pub fn random_affine<R: Rng>(rng: &mut R) -> AffineInstance {
    let n = rng.gen_range(2..=4);
    random_affine_with_order(rng, n)
}

/// Same construction with the number of operators fixed by the caller.
pub fn random_affine_with_order<R: Rng>(rng: &mut R, n: usize) -> AffineInstance {
    let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let flat: usize = dims.iter().sum();
    let block_signs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();
    let mut matrix = vec![vec![0.0; flat]; flat];
    let mut alpha = 0.0f64;
    for r in 0..flat {
        let magnitudes: Vec<f64> = (0..flat).map(|_| rng.gen_range(0.5..1.0)).collect();
        let target = rng.gen_range(0.3..0.8);
        let scale = target / magnitudes.iter().sum::<f64>();
        for c in 0..flat {
            let sign = block_signs[block_of(r, &dims)][block_of(c, &dims)];
            matrix[r][c] = sign * magnitudes[c] * scale;
        }
        alpha = alpha.max(matrix[r].iter().map(|v| v.abs()).sum());
    }
    let offset: Vec<f64> = (0..flat).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let signature = signature_from_affine_blocks(&dims, &matrix).unwrap();
    let operators = affine_operators(&dims, &matrix, &offset).unwrap();
    let system = PartiallyMonotoneSystem::new(
        signature,
        operators,
        dims.clone(),
        MetricProfile::uniform(ComponentMetric::Sup, n).unwrap(),
        SampleRegion::uniform(&dims, -5.0, 5.0).unwrap(),
    )
    .unwrap();
    AffineInstance {
        system: Arc::new(system),
        matrix,
        offset,
        dims,
        alpha,
    }
}

/// Reference fixed point of `x = M x + c` by dense LU on `I - M`.
pub fn dense_fixed_point(matrix: &[Vec<f64>], offset: &[f64]) -> Vec<f64> {
    let flat = offset.len();
    let m = DMatrix::from_fn(flat, flat, |r, c| matrix[r][c]);
    let rhs = DVector::from_column_slice(offset);
    let solution = (DMatrix::identity(flat, flat) - m)
        .lu()
        .solve(&rhs)
        .expect("row sums below one make I - M invertible");
    solution.iter().copied().collect()
}

pub fn to_point(dims: &[usize], flat: &[f64]) -> ProductPoint {
    let mut comps = Vec::with_capacity(dims.len());
    let mut start = 0;
    for &m in dims {
        comps.push(flat[start..start + m].to_vec());
        start += m;
    }
    ProductPoint::new(comps).unwrap()
}

pub fn sup_error(point: &ProductPoint, reference: &[f64]) -> f64 {
    point
        .components()
        .iter()
        .flatten()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn shifted(reference: &[f64], dims: &[usize], delta: f64) -> ProductPoint {
    let moved: Vec<f64> = reference.iter().map(|v| v + delta).collect();
    to_point(dims, &moved)
}

/// A random coupling that is nondecreasing in the first and third argument
/// blocks, nonincreasing in the second, and contracts with total slope
/// below 0.8: every term is a signed nonnegative multiple of `tanh` of one
/// input entry.
pub fn random_monotone_tripled<R: Rng>(rng: &mut R) -> TripledProblem {
    let dim = rng.gen_range(1..=3);
    let mut gains = vec![[vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]]; dim];
    let mut offsets = vec![0.0; dim];
    for k in 0..dim {
        let magnitudes: Vec<f64> = (0..3 * dim).map(|_| rng.gen_range(0.1..1.0)).collect();
        let target = rng.gen_range(0.3..0.8);
        let scale = target / magnitudes.iter().sum::<f64>();
        for slot in 0..3 {
            for j in 0..dim {
                gains[k][slot][j] = magnitudes[slot * dim + j] * scale;
            }
        }
        offsets[k] = rng.gen_range(-0.5..0.5);
    }
    let map = Arc::new(move |x: &[f64], y: &[f64], z: &[f64]| {
        (0..offsets.len())
            .map(|k| {
                let mut acc = offsets[k];
                for j in 0..x.len() {
                    acc += gains[k][0][j] * x[j].tanh();
                    acc -= gains[k][1][j] * y[j].tanh();
                    acc += gains[k][2][j] * z[j].tanh();
                }
                acc
            })
            .collect()
    });
    TripledProblem::new(
        dim,
        map,
        ComponentMetric::Sup,
        ComparisonFunction::linear(0.85).unwrap(),
        (-2.0, 2.0),
    )
    .unwrap()
}

/// One fourth-order step of the diagonal equation `x' = f(t, x, x, x)`.
pub fn rk4_step(rhs: &PeriodicRhs, t: f64, x: f64, h: f64) -> f64 {
    let f = |t: f64, x: f64| rhs(t, x, x, x);
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    let k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    let k4 = f(t + h, x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates one period from `start` with `substeps` stages per grid
/// interval, returning the state at every grid node.
pub fn integrate_period(
    rhs: &PeriodicRhs,
    period: f64,
    grid_size: usize,
    substeps: usize,
    start: f64,
) -> Vec<f64> {
    let total = (grid_size - 1) * substeps;
    let h = period / total as f64;
    let mut values = Vec::with_capacity(grid_size);
    let mut x = start;
    values.push(x);
    for step in 0..total {
        let t = period * step as f64 / total as f64;
        x = rk4_step(rhs, t, x, h);
        if (step + 1) % substeps == 0 {
            values.push(x);
        }
    }
    values
}

/// The periodic initial value of the diagonal equation, found by Picard
/// iteration of the period map computed with `substeps * (grid_size - 1)`
/// fourth-order stages.
pub fn shooting_start(rhs: &PeriodicRhs, period: f64, grid_size: usize, substeps: usize) -> f64 {
    let mut start = 0.0f64;
    for _ in 0..80 {
        let end = *integrate_period(rhs, period, grid_size, substeps, start)
            .last()
            .unwrap();
        let done = (end - start).abs() <= 1e-14;
        start = end;
        if done {
            break;
        }
    }
    start
}
