//! Component metrics and the product metric.

use crate::error::{Error, Result};
use crate::point::ProductPoint;

/// Metric on a single component space `R^(m_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMetric {
    /// `max_k |a_k - b_k|`
    Sup,
    /// `sqrt(sum_k (a_k - b_k)^2)`
    Euclidean,
}

impl ComponentMetric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ComponentMetric::Sup => a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max),
            ComponentMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// One metric per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricProfile {
    metrics: Vec<ComponentMetric>,
}

impl MetricProfile {
    pub fn new(metrics: Vec<ComponentMetric>) -> Result<Self> {
        if metrics.is_empty() {
            return Err(Error::InvalidConfig(
                "a metric profile needs at least one component".into(),
            ));
        }
        Ok(Self { metrics })
    }

    /// The same metric on every component.
    pub fn uniform(metric: ComponentMetric, order: usize) -> Result<Self> {
        Self::new(vec![metric; order])
    }

    pub fn order(&self) -> usize {
        self.metrics.len()
    }

    pub fn component(&self, i: usize) -> Result<ComponentMetric> {
        self.metrics.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            order: self.order(),
        })
    }

    pub fn metrics(&self) -> &[ComponentMetric] {
        &self.metrics
    }
}

/// Product metric `d(x, y) = max_j d_j(x_j, y_j)`.
pub fn product_metric(profile: &MetricProfile, x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
    if !x.same_profile(y) {
        return Err(x.profile_mismatch(y, "product_metric"));
    }
    if x.order() != profile.order() {
        return Err(Error::ProfileMismatch(format!(
            "product_metric: point has {} components, profile has {}",
            x.order(),
            profile.order()
        )));
    }
    let mut worst = 0.0f64;
    for (j, (a, b)) in x.components().iter().zip(y.components()).enumerate() {
        worst = worst.max(self::ComponentMetric::distance(&profile.metrics[j], a, b));
    }
    Ok(worst)
}
