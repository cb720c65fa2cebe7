//! Selectors, the pair-composition algebra and the companion operator.
//!
//! For each operator row the selector `sigma_i` interleaves two points: it
//! copies `x_j` where `T_i` is declared increasing in variable `j` and `y_j`
//! where it is declared decreasing. Everything downstream rests on three
//! facts about these selectors:
//!
//! * `sigma_i` turns the product order on pairs into the row's induced
//!   quasi-order, under which `T_i` becomes plainly nondecreasing;
//! * `sigma_i` is an involution under pair composition (`sigma_i * sigma_i`
//!   is the first-argument projection);
//! * composing `T_i` with `sigma_i` yields the mixed monotone companion
//!   `A_i(x, y) = T_i(sigma_i(x, y))`, whose diagonal recovers `T_i`.
//!
//! Selection is table-driven: a row is just `N` copy decisions, so applying
//! a selector never inspects operator behaviour.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{product_leq, ProductPoint};
use crate::signature::{MonotoneSignature, Monotonicity};
use crate::system::PartiallyMonotoneSystem;

/// Applies the row-`i` selector: component `j` of the result is `x_j` where
/// row `i` declares increasing, `y_j` where it declares decreasing.
pub fn sigma_apply(
    signature: &MonotoneSignature,
    i: usize,
    x: &ProductPoint,
    y: &ProductPoint,
) -> Result<ProductPoint> {
    let row = signature.row(i)?;
    check_shapes(signature, x, y, "sigma_apply")?;
    let comps = row
        .iter()
        .enumerate()
        .map(|(j, direction)| match direction {
            Monotonicity::Increasing => x.components()[j].clone(),
            Monotonicity::Decreasing => y.components()[j].clone(),
        })
        .collect();
    ProductPoint::new(comps)
}

/// The quasi-order induced by row `i`: coordinates of increasing variables
/// compare upward, coordinates of decreasing variables compare downward.
///
/// Agrees with `sigma_i(x, y) <= sigma_i(y, x)` in the product order.
pub fn preceq(
    signature: &MonotoneSignature,
    i: usize,
    x: &ProductPoint,
    y: &ProductPoint,
) -> Result<bool> {
    let row = signature.row(i)?;
    check_shapes(signature, x, y, "preceq")?;
    Ok(row
        .iter()
        .zip(x.components().iter().zip(y.components()))
        .all(|(direction, (a, b))| match direction {
            Monotonicity::Increasing => a.iter().zip(b).all(|(p, q)| p <= q),
            Monotonicity::Decreasing => a.iter().zip(b).all(|(p, q)| p >= q),
        }))
}

fn check_shapes(
    signature: &MonotoneSignature,
    x: &ProductPoint,
    y: &ProductPoint,
    what: &str,
) -> Result<()> {
    if x.order() != signature.order() {
        return Err(Error::ProfileMismatch(format!(
            "{what}: point has {} components, signature order is {}",
            x.order(),
            signature.order()
        )));
    }
    if !x.same_profile(y) {
        return Err(x.profile_mismatch(y, what));
    }
    Ok(())
}

type PairMap = Arc<dyn Fn(&ProductPoint, &ProductPoint) -> Result<ProductPoint> + Send + Sync>;

/// A map of two product-space arguments, closed under pair composition.
#[derive(Clone)]
pub struct BivariateMap {
    f: PairMap,
}

impl BivariateMap {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&ProductPoint, &ProductPoint) -> Result<ProductPoint> + Send + Sync + 'static,
    {
        Self { f: Arc::new(f) }
    }

    /// First-argument projection `(x, y) -> x`, the identity of pair
    /// composition.
    pub fn projection() -> Self {
        Self::new(|x, _y| Ok(x.clone()))
    }

    /// The row-`i` selector as a bivariate map.
    pub fn selector(signature: MonotoneSignature, i: usize) -> Result<Self> {
        signature.row(i)?;
        Ok(Self::new(move |x, y| sigma_apply(&signature, i, x, y)))
    }

    pub fn eval(&self, x: &ProductPoint, y: &ProductPoint) -> Result<ProductPoint> {
        (self.f)(x, y)
    }

    /// Evaluates the map on the pair and on the swapped pair.
    pub fn eval_pair(
        &self,
        x: &ProductPoint,
        y: &ProductPoint,
    ) -> Result<(ProductPoint, ProductPoint)> {
        Ok((self.eval(x, y)?, self.eval(y, x)?))
    }
}

/// Pair composition: `(b * a)(x, y) = b(a(x, y), a(y, x))`.
///
/// Associative, with the first-argument projection as two-sided identity.
pub fn s_compose(b: &BivariateMap, a: &BivariateMap) -> BivariateMap {
    let b = b.clone();
    let a = a.clone();
    BivariateMap::new(move |x, y| {
        let (axy, ayx) = a.eval_pair(x, y)?;
        b.eval(&axy, &ayx)
    })
}

/// Pair-composition power of a self-map; the zeroth power is the projection.
///
/// Evaluation iterates the symmetric pair `(u, v) -> (a(u, v), a(v, u))`
/// `n` times and keeps the first slot, which agrees with the literal nested
/// composition at linear instead of exponential cost.
pub fn s_power(a: &BivariateMap, n: usize) -> BivariateMap {
    let a = a.clone();
    BivariateMap::new(move |x, y| {
        let mut u = x.clone();
        let mut v = y.clone();
        for _ in 0..n {
            let (nu, nv) = a.eval_pair(&u, &v)?;
            u = nu;
            v = nv;
        }
        Ok(u)
    })
}

/// The mixed monotone companion `A` of a system:
/// `A_i(x, y) = T_i(sigma_i(x, y))`.
///
/// `A` is nondecreasing in its first argument and nonincreasing in its
/// second, its diagonal is the original system, and its coupled fixed
/// points on the diagonal are exactly the fixed points of the system.
pub struct MixedMonotoneOperator {
    system: Arc<PartiallyMonotoneSystem>,
}

impl MixedMonotoneOperator {
    /// Wraps a system without re-running the sampled signature checks; use
    /// [`build_mixed_operator`] to validate first.
    pub fn new(system: Arc<PartiallyMonotoneSystem>) -> Self {
        Self { system }
    }

    pub fn system(&self) -> &PartiallyMonotoneSystem {
        &self.system
    }

    /// Component `A_i(x, y)`.
    pub fn component(&self, i: usize, x: &ProductPoint, y: &ProductPoint) -> Result<Vec<f64>> {
        let selected = sigma_apply(self.system.signature(), i, x, y)?;
        self.system.apply_component(i, &selected)
    }

    /// Full evaluation `A(x, y)`.
    pub fn eval(&self, x: &ProductPoint, y: &ProductPoint) -> Result<ProductPoint> {
        let comps = (0..self.system.order())
            .map(|i| self.component(i, x, y))
            .collect::<Result<Vec<_>>>()?;
        ProductPoint::new(comps)
    }

    /// The companion as a bivariate map, for use with the composition
    /// algebra.
    pub fn as_bivariate(&self) -> BivariateMap {
        let system = Arc::clone(&self.system);
        BivariateMap::new(move |x, y| {
            let comps = (0..system.order())
                .map(|i| {
                    let selected = sigma_apply(system.signature(), i, x, y)?;
                    system.apply_component(i, &selected)
                })
                .collect::<Result<Vec<_>>>()?;
            ProductPoint::new(comps)
        })
    }
}

/// Validates a system's declared signature by sampling, then wraps it in its
/// mixed monotone companion.
pub fn build_mixed_operator(
    system: Arc<PartiallyMonotoneSystem>,
    validation_samples: usize,
    seed: u64,
) -> Result<MixedMonotoneOperator> {
    system.validate(validation_samples, seed)?;
    Ok(MixedMonotoneOperator::new(system))
}

/// `x` and `y` compare both ways under `preceq` exactly when the selected
/// interleavings compare in the product order.
pub fn preceq_via_sigma(
    signature: &MonotoneSignature,
    i: usize,
    x: &ProductPoint,
    y: &ProductPoint,
) -> Result<bool> {
    let forward = sigma_apply(signature, i, x, y)?;
    let backward = sigma_apply(signature, i, y, x)?;
    product_leq(&forward, &backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{ComponentMetric, MetricProfile};
    use crate::region::SampleRegion;
    use crate::system::ComponentOperator;

    fn point3(a: f64, b: f64, c: f64) -> ProductPoint {
        ProductPoint::new(vec![vec![a], vec![b], vec![c]]).unwrap()
    }

    // The worked three-operator signature used throughout the module docs:
    // T_1 increasing in x_1, x_2 and decreasing in x_3; T_2 decreasing in
    // x_1, increasing in x_2, x_3; T_3 decreasing in everything.
    fn demo_signature() -> MonotoneSignature {
        "++-/-++/---".parse().unwrap()
    }

    #[test]
    fn selectors_interleave_as_declared() {
        let sig = demo_signature();
        let x = point3(1.0, 2.0, 3.0);
        let y = point3(-1.0, -2.0, -3.0);
        assert_eq!(
            sigma_apply(&sig, 0, &x, &y).unwrap(),
            point3(1.0, 2.0, -3.0)
        );
        assert_eq!(
            sigma_apply(&sig, 1, &x, &y).unwrap(),
            point3(-1.0, 2.0, 3.0)
        );
        assert_eq!(
            sigma_apply(&sig, 2, &x, &y).unwrap(),
            point3(-1.0, -2.0, -3.0)
        );
    }

    #[test]
    fn selector_on_the_diagonal_is_the_identity() {
        let sig = demo_signature();
        let x = point3(0.5, -0.25, 8.0);
        for i in 0..3 {
            assert_eq!(sigma_apply(&sig, i, &x, &x).unwrap(), x);
        }
    }

    #[test]
    fn companion_components_route_through_the_selectors() {
        let sig = demo_signature();
        let dims = vec![1usize, 1, 1];
        let operators: Vec<ComponentOperator> = vec![
            Arc::new(|p: &ProductPoint| {
                let c = p.components();
                vec![c[0][0] + 2.0 * c[1][0] - c[2][0]]
            }),
            Arc::new(|p: &ProductPoint| {
                let c = p.components();
                vec![-c[0][0] + c[1][0] + c[2][0]]
            }),
            Arc::new(|p: &ProductPoint| {
                let c = p.components();
                vec![-c[0][0] - c[1][0] - c[2][0]]
            }),
        ];
        let system = Arc::new(
            PartiallyMonotoneSystem::new(
                sig,
                operators,
                dims.clone(),
                MetricProfile::uniform(ComponentMetric::Sup, 3).unwrap(),
                SampleRegion::uniform(&dims, -4.0, 4.0).unwrap(),
            )
            .unwrap(),
        );
        let a = MixedMonotoneOperator::new(Arc::clone(&system));
        let x = point3(1.0, 2.0, 3.0);
        let y = point3(4.0, 5.0, 6.0);
        // A_1 = T_1(x_1, x_2, y_3), A_2 = T_2(y_1, x_2, x_3),
        // A_3 = T_3(y_1, y_2, y_3).
        let axy = a.eval(&x, &y).unwrap();
        assert_eq!(axy.component(0).unwrap(), &[1.0 + 4.0 - 6.0]);
        assert_eq!(axy.component(1).unwrap(), &[-4.0 + 2.0 + 3.0]);
        assert_eq!(axy.component(2).unwrap(), &[-4.0 - 5.0 - 6.0]);
        // Diagonal evaluation recovers the system itself.
        let diag = a.eval(&x, &x).unwrap();
        assert_eq!(diag, system.apply(&x).unwrap());
    }

    #[test]
    fn quasi_order_flips_decreasing_coordinates() {
        let sig = demo_signature();
        let x = point3(0.0, 0.0, 1.0);
        let y = point3(1.0, 1.0, 0.0);
        assert!(preceq(&sig, 0, &x, &y).unwrap());
        assert!(!preceq(&sig, 0, &y, &x).unwrap());
        assert!(!preceq(&sig, 1, &x, &y).unwrap());
    }

    #[test]
    fn quasi_order_matches_the_selector_formulation() {
        let sig = demo_signature();
        let pts = [
            point3(0.0, 0.0, 1.0),
            point3(1.0, 1.0, 0.0),
            point3(0.5, -1.0, 0.5),
        ];
        for i in 0..3 {
            for x in &pts {
                for y in &pts {
                    assert_eq!(
                        preceq(&sig, i, x, y).unwrap(),
                        preceq_via_sigma(&sig, i, x, y).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn all_increasing_rows_reduce_to_the_product_order() {
        let sig = MonotoneSignature::all_increasing(3).unwrap();
        let x = point3(0.0, 1.0, 2.0);
        let y = point3(0.5, 1.0, 3.0);
        for i in 0..3 {
            assert_eq!(
                preceq(&sig, i, &x, &y).unwrap(),
                product_leq(&x, &y).unwrap()
            );
        }
    }

    #[test]
    fn projection_is_a_two_sided_identity() {
        let sig = demo_signature();
        let s1 = BivariateMap::selector(sig, 0).unwrap();
        let p = BivariateMap::projection();
        let left = s_compose(&p, &s1);
        let right = s_compose(&s1, &p);
        let x = point3(1.0, -2.0, 3.0);
        let y = point3(-4.0, 5.0, -6.0);
        let direct = s1.eval(&x, &y).unwrap();
        assert_eq!(left.eval(&x, &y).unwrap(), direct);
        assert_eq!(right.eval(&x, &y).unwrap(), direct);
    }

    #[test]
    fn selectors_are_involutions() {
        let sig = demo_signature();
        let x = point3(1.0, -2.0, 3.0);
        let y = point3(-4.0, 5.0, -6.0);
        for i in 0..3 {
            let s = BivariateMap::selector(sig.clone(), i).unwrap();
            let squared = s_compose(&s, &s);
            assert_eq!(squared.eval(&x, &y).unwrap(), x);
            let power2 = s_power(&s, 2);
            assert_eq!(power2.eval(&x, &y).unwrap(), x);
        }
    }

    #[test]
    fn zeroth_power_projects_and_first_power_is_the_map() {
        let sig = demo_signature();
        let s = BivariateMap::selector(sig, 1).unwrap();
        let x = point3(1.0, 2.0, 3.0);
        let y = point3(4.0, 5.0, 6.0);
        assert_eq!(s_power(&s, 0).eval(&x, &y).unwrap(), x);
        assert_eq!(
            s_power(&s, 1).eval(&x, &y).unwrap(),
            s.eval(&x, &y).unwrap()
        );
    }

    #[test]
    fn selector_index_is_checked() {
        let sig = demo_signature();
        let x = point3(0.0, 0.0, 0.0);
        assert!(sigma_apply(&sig, 3, &x, &x).is_err());
        assert!(preceq(&sig, 5, &x, &x).is_err());
        assert!(BivariateMap::selector(sig, 7).is_err());
    }

    #[test]
    fn shape_mismatch_is_checked() {
        let sig = demo_signature();
        let x = point3(0.0, 0.0, 0.0);
        let bad = ProductPoint::new(vec![vec![0.0], vec![0.0]]).unwrap();
        assert!(sigma_apply(&sig, 0, &x, &bad).is_err());
        assert!(sigma_apply(&sig, 0, &bad, &bad).is_err());
    }
}
