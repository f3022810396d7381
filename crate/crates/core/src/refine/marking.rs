use crate::error::{Error, Result};

/// Bulk parameter used for the adaptive L-shape runs.
pub const DEFAULT_THETA: f64 = 0.25;

/// Non-negative per-element error indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField(Vec<f64>);

impl IndicatorField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "indicator value {bad} is not >= 0"
            )));
        }
        Ok(IndicatorField(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Smallest set `M` with `sum_M mu >= theta * sum mu`, found as the shortest
/// prefix of the indicators sorted in decreasing order (ties by index).
/// Returns sorted element indices; empty if all indicators vanish.
pub fn dorfler_mark(indicators: &IndicatorField, theta: f64) -> Result<Vec<usize>> {
    if indicators.is_empty() {
        return Err(Error::InvalidConfig("empty indicator field".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "theta = {theta} not in (0, 1]"
        )));
    }
    let mu = indicators.values();
    let total = indicators.total();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]).then(a.cmp(&b)));
    let goal = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for t in order {
        marked.push(t);
        acc += mu[t];
        if acc >= goal {
            break;
        }
    }
    marked.sort_unstable();
    Ok(marked)
}
