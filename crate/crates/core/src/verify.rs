//! Sampled verification of the solver's hypotheses, and the sign-matrix
//! reducibility classifier.
//!
//! Contraction certification is Monte Carlo: it draws ordered pairs in each
//! operator's induced quasi-order and tests the contraction inequality on
//! every draw. A failure is a hard counterexample; a pass certifies nothing
//! beyond the sampled evidence, and every report says so. Reports embed the
//! seed and sample count, and aggregation is keyed by sample index, so a
//! report is reproducible regardless of how many threads ran the sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::metric::product_metric;
use crate::phi::ComparisonFunction;
use crate::point::ProductPoint;
use crate::sigma::sigma_apply;
use crate::signature::MonotoneSignature;
use crate::system::PartiallyMonotoneSystem;

/// Wording attached to every certification report.
pub const SAMPLING_CAVEAT: &str =
    "sampled evidence only: a pass does not prove the contraction condition";

/// A sampled counterexample to the contraction inequality.
#[derive(Debug, Clone)]
pub struct ContractionViolation {
    /// Index of the sample that produced the pair.
    pub sample: usize,
    /// Operator whose inequality failed.
    pub operator: usize,
    pub x: ProductPoint,
    pub y: ProductPoint,
    /// `d_i(T_i(x), T_i(y))`
    pub lhs: f64,
    /// `phi(d(x, y))`
    pub rhs: f64,
}

/// Outcome of sampled contraction certification.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub seed: u64,
    pub samples: usize,
    /// Counterexamples in canonical order (sample index, then operator).
    pub violations: Vec<ContractionViolation>,
    /// Largest observed `d_i(T_i(x), T_i(y)) / d(x, y)`.
    pub max_ratio: f64,
    /// True when no sampled pair violated the inequality.
    pub certified: bool,
    pub caveat: &'static str,
}

/// Draws `samples` ordered pairs per operator and checks
/// `d_i(T_i(x), T_i(y)) <= phi(d(x, y))` on each.
///
/// Pair `k` for operator `i` is generated from an RNG stream derived from
/// `(seed, i, k)`, so outcomes are independent of thread count and
/// iteration order.
pub fn verify_contraction(
    system: &PartiallyMonotoneSystem,
    phi: &ComparisonFunction,
    samples: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "contraction verification needs at least one sample".into(),
        ));
    }
    phi.validate()?;
    system.region().require_nondegenerate()?;
    let n = system.order();

    struct Outcome {
        ratio: f64,
        violation: Option<ContractionViolation>,
    }

    let run_one = |idx: usize| -> Result<Outcome> {
        let sample = idx / n;
        let i = idx % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64 + 1);
        let row = system.signature().row(i)?;
        let (x, y) = system.region().sample_directed_pair(row, &mut rng)?;
        let tx = system.apply_component(i, &x)?;
        let ty = system.apply_component(i, &y)?;
        let lhs = system.metrics().component(i)?.distance(&tx, &ty);
        let dist = product_metric(system.metrics(), &x, &y)?;
        let rhs = phi.eval(dist)?;
        let ratio = if dist > 0.0 { lhs / dist } else { 0.0 };
        let violation = (lhs > rhs).then_some(ContractionViolation {
            sample,
            operator: i,
            x,
            y,
            lhs,
            rhs,
        });
        Ok(Outcome { ratio, violation })
    };

    let outcomes = exec::map_indices(samples * n, run_one);
    let mut max_ratio = 0.0f64;
    let mut violations = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        max_ratio = max_ratio.max(outcome.ratio);
        if let Some(v) = outcome.violation {
            violations.push(v);
        }
    }
    violations.sort_by_key(|v| (v.sample, v.operator));
    Ok(ContractionReport {
        seed,
        samples,
        certified: violations.is_empty(),
        violations,
        max_ratio,
        caveat: SAMPLING_CAVEAT,
    })
}

/// Which of the two coupled-bounds inequality families failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    /// `x0_i <= T_i(sigma_i(x0, y0))` failed.
    Lower,
    /// `y0_i >= T_i(sigma_i(y0, x0))` failed.
    Upper,
}

/// First entrywise failure of the coupled-bounds check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsFailure {
    pub component: usize,
    pub entry: usize,
    pub side: BoundSide,
    /// Value of the starting point at the failing entry.
    pub start: f64,
    /// Value of the operator image at the failing entry.
    pub image: f64,
}

/// Verdict of the coupled-bounds check.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledBoundsReport {
    pub satisfied: bool,
    /// First failing entry in scan order (side, then component, then entry).
    pub first_failure: Option<BoundsFailure>,
    /// Total number of failing entries across both families.
    pub failures: usize,
}

/// Checks the admissibility of a starting pair for bracketing:
/// `x0_i <= T_i(sigma_i(x0, y0))` and `y0_i >= T_i(sigma_i(y0, x0))`
/// entrywise for every `i`. Comparisons are exact.
pub fn verify_coupled_bounds(
    system: &PartiallyMonotoneSystem,
    x0: &ProductPoint,
    y0: &ProductPoint,
) -> Result<CoupledBoundsReport> {
    system.check_point(x0)?;
    system.check_point(y0)?;
    let mut first_failure = None;
    let mut failures = 0usize;
    for (side, start, other) in [(BoundSide::Lower, x0, y0), (BoundSide::Upper, y0, x0)] {
        for i in 0..system.order() {
            let selected = sigma_apply(system.signature(), i, start, other)?;
            let image = system.apply_component(i, &selected)?;
            let here = start.component(i)?;
            for (entry, (&s, &t)) in here.iter().zip(&image).enumerate() {
                let ok = match side {
                    BoundSide::Lower => s <= t,
                    BoundSide::Upper => s >= t,
                };
                if !ok {
                    failures += 1;
                    first_failure.get_or_insert(BoundsFailure {
                        component: i,
                        entry,
                        side,
                        start: s,
                        image: t,
                    });
                }
            }
        }
    }
    Ok(CoupledBoundsReport {
        satisfied: failures == 0,
        first_failure,
        failures,
    })
}

/// Verdict of the reducibility classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibilityVerdict {
    pub reducible: bool,
    /// Sign vector `e` with `S_ij = e_i * e_j` when reducible. Normalised
    /// so that `e_1 = +1`; the global flip `-e` is the only other witness.
    pub witness: Option<Vec<i8>>,
}

/// Decides whether a signature's sign matrix factors as a rank-one product
/// of coordinate signs `S_ij = e_i * e_j`.
///
/// Such signatures are exactly the ones removable by flipping coordinate
/// orders: reorienting component `j` by `e_j` turns every operator into a
/// plainly nondecreasing one. The candidate is forced: fix `e_1 = +1`, read
/// `e_j = S_1j` off the first row, then check every entry.
pub fn classify_reducibility(signature: &MonotoneSignature) -> ReducibilityVerdict {
    let n = signature.order();
    let sign = |i: usize, j: usize| -> i8 {
        signature
            .entry(i, j)
            .expect("indices bounded by the order")
            .sign()
    };
    let eps: Vec<i8> = (0..n)
        .map(|j| if j == 0 { 1 } else { sign(0, j) })
        .collect();
    for i in 0..n {
        for j in 0..n {
            if sign(i, j) != eps[i] * eps[j] {
                return ReducibilityVerdict {
                    reducible: false,
                    witness: None,
                };
            }
        }
    }
    ReducibilityVerdict {
        reducible: true,
        witness: Some(eps),
    }
}

/// Largest order accepted by [`count_reducible`]; the census walks all
/// `2^(n^2)` sign matrices, which at order 5 is already 33 million.
pub const MAX_CENSUS_ORDER: usize = 5;

/// Counts, among all `2^(n^2)` sign matrices of order `n`, how many factor
/// as rank-one sign products. Returns `(total, reducible)`.
pub fn count_reducible(n: usize) -> Result<(u64, u64)> {
    if !(2..=MAX_CENSUS_ORDER).contains(&n) {
        return Err(Error::InvalidConfig(format!(
            "census order must be between 2 and {MAX_CENSUS_ORDER}, got {n}"
        )));
    }
    let bits = n * n;
    let total = 1u64 << bits;
    // Bit b of a mask encodes entry (b / n, b % n): set = decreasing.
    let reducible = exec::sum_indices(total, |mask| {
        let entry = |i: usize, j: usize| -> i8 {
            if mask >> (i * n + j) & 1 == 1 {
                -1
            } else {
                1
            }
        };
        let mut eps = [0i8; MAX_CENSUS_ORDER];
        eps[0] = 1;
        for (j, e) in eps.iter_mut().enumerate().take(n).skip(1) {
            *e = entry(0, j);
        }
        for i in 0..n {
            for j in 0..n {
                if entry(i, j) != eps[i] * eps[j] {
                    return 0;
                }
            }
        }
        1
    });
    Ok((total, reducible))
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::metric::{ComponentMetric, MetricProfile};
    use crate::region::SampleRegion;
    use crate::system::{affine_operators, signature_from_affine_blocks};

    fn scalar_affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> PartiallyMonotoneSystem {
        let n = matrix.len();
        let dims = vec![1usize; n];
        PartiallyMonotoneSystem::new(
            signature_from_affine_blocks(&dims, &matrix).unwrap(),
            affine_operators(&dims, &matrix, &offset).unwrap(),
            dims.clone(),
            MetricProfile::uniform(ComponentMetric::Sup, n).unwrap(),
            SampleRegion::uniform(&dims, -1.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn pt(values: &[f64]) -> ProductPoint {
        ProductPoint::new(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn constant_system_certifies_under_any_phi() {
        let system = scalar_affine(vec![vec![0.0, 0.0]; 2], vec![0.3, -0.7]);
        let phi = ComparisonFunction::linear(0.01).unwrap();
        let report = verify_contraction(&system, &phi, 500, 9).unwrap();
        assert!(report.certified);
        assert!(report.violations.is_empty());
        assert_eq!(report.max_ratio, 0.0);
        assert_eq!(report.samples, 500);
    }

    #[test]
    fn affine_system_certifies_just_above_its_row_sum_slope() {
        let system = scalar_affine(vec![vec![0.25, -0.25], vec![0.25, 0.25]], vec![0.1, -0.1]);
        let phi = ComparisonFunction::linear(0.52).unwrap();
        let report = verify_contraction(&system, &phi, 800, 23).unwrap();
        assert!(report.certified);
        assert!(report.max_ratio <= 0.5 + 1e-9);
        assert!(report.max_ratio > 0.2);
    }

    #[test]
    fn expanding_row_is_caught_with_a_counterexample() {
        let system = scalar_affine(vec![vec![2.0, 0.0], vec![0.0, 0.5]], vec![0.0, 0.0]);
        let phi = ComparisonFunction::linear(0.9).unwrap();
        let report = verify_contraction(&system, &phi, 200, 5).unwrap();
        assert!(!report.certified);
        let v = &report.violations[0];
        assert_eq!(v.operator, 0);
        assert!(v.lhs > v.rhs);
        assert!(report.max_ratio >= 2.0 - 1e-9);
    }

    #[test]
    fn same_seed_reproduces_the_report_with_either_execution_path() {
        let system = scalar_affine(vec![vec![1.4, 0.0], vec![0.0, 0.5]], vec![0.0, 0.0]);
        let phi = ComparisonFunction::linear(0.9).unwrap();
        let first = verify_contraction(&system, &phi, 300, 77).unwrap();
        crate::exec::set_parallel_enabled(false);
        let second = verify_contraction(&system, &phi, 300, 77).unwrap();
        crate::exec::set_parallel_enabled(true);
        assert_eq!(first.certified, second.certified);
        assert_eq!(first.max_ratio, second.max_ratio);
        assert_eq!(first.violations.len(), second.violations.len());
        for (a, b) in first.violations.iter().zip(&second.violations) {
            assert_eq!(a.sample, b.sample);
            assert_eq!(a.operator, b.operator);
            assert_eq!(a.lhs, b.lhs);
            assert_eq!(a.rhs, b.rhs);
            assert_eq!(a.x, b.x);
        }
    }

    #[test]
    fn degenerate_region_is_a_configuration_error() {
        let n = 2;
        let dims = vec![1usize; n];
        let matrix = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let system = PartiallyMonotoneSystem::new(
            signature_from_affine_blocks(&dims, &matrix).unwrap(),
            affine_operators(&dims, &matrix, &[0.0, 0.0]).unwrap(),
            dims,
            MetricProfile::uniform(ComponentMetric::Sup, n).unwrap(),
            SampleRegion::new(vec![vec![(0.0, 0.0)], vec![(0.0, 1.0)]]).unwrap(),
        )
        .unwrap();
        let phi = ComparisonFunction::Rational;
        assert!(matches!(
            verify_contraction(&system, &phi, 10, 1),
            Err(Error::DegenerateRegion { .. })
        ));
    }

    #[test]
    fn exact_fixed_point_satisfies_the_bounds_with_equality() {
        // T(x) = 0.5 x + 1, fixed point exactly 2.
        let system = scalar_affine(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![1.0, 1.0]);
        let star = pt(&[2.0, 2.0]);
        let report = verify_coupled_bounds(&system, &star, &star).unwrap();
        assert!(report.satisfied);
        assert_eq!(report.first_failure, None);
    }

    #[test]
    fn symmetric_margin_around_the_fixed_point_is_admissible() {
        let system = scalar_affine(vec![vec![0.25, -0.25], vec![-0.25, 0.25]], vec![1.0, 1.0]);
        // Fixed point of x = 0.25x - 0.25y + 1, y = -0.25x + 0.25y + 1 is
        // (1, 1); the admissibility margin survives |M| row sums 0.5 < 1.
        let x0 = pt(&[0.5, 0.5]);
        let y0 = pt(&[1.5, 1.5]);
        let report = verify_coupled_bounds(&system, &x0, &y0).unwrap();
        assert!(report.satisfied, "{report:?}");
    }

    #[test]
    fn violated_bound_reports_the_failing_entry() {
        let system = scalar_affine(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![1.0, 1.0]);
        // Starting above the fixed point breaks the lower family in
        // component 0: 3 > 0.5 * 3 + 1 = 2.5.
        let x0 = pt(&[3.0, 2.0]);
        let y0 = pt(&[3.0, 2.0]);
        let report = verify_coupled_bounds(&system, &x0, &y0).unwrap();
        assert!(!report.satisfied);
        let failure = report.first_failure.unwrap();
        assert_eq!(failure.component, 0);
        assert_eq!(failure.side, BoundSide::Lower);
        assert_eq!(failure.start, 3.0);
        assert_eq!(failure.image, 2.5);
    }

    #[test]
    fn all_increasing_signature_is_reducible_with_trivial_witness() {
        let sig = MonotoneSignature::all_increasing(3).unwrap();
        let verdict = classify_reducibility(&sig);
        assert!(verdict.reducible);
        assert_eq!(verdict.witness.unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn checkerboard_signature_is_reducible() {
        let sig: MonotoneSignature = "+-/-+".parse().unwrap();
        let verdict = classify_reducibility(&sig);
        assert!(verdict.reducible);
        assert_eq!(verdict.witness.unwrap(), vec![1, -1]);
    }

    #[test]
    fn demo_three_operator_signature_is_not_reducible() {
        let sig: MonotoneSignature = "++-/-++/---".parse().unwrap();
        let verdict = classify_reducibility(&sig);
        assert!(!verdict.reducible);
        assert_eq!(verdict.witness, None);
    }

    #[test]
    fn census_matches_the_closed_form_counts() {
        assert_eq!(count_reducible(2).unwrap(), (16, 2));
        assert_eq!(count_reducible(3).unwrap(), (512, 4));
        assert_eq!(count_reducible(4).unwrap(), (65_536, 8));
    }

    #[test]
    fn census_order_is_bounded() {
        assert!(count_reducible(1).is_err());
        assert!(count_reducible(6).is_err());
    }
}
