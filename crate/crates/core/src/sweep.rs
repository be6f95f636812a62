//! Shared plumbing for ε-sweeps over independent seeds.

use crate::error::{param, Error, Result};
use crate::geometry::DomainSpec;
use crate::process::{sample_marked, MarkedSample, ProcessParams};

/// Default cap on the expected number of sampled points per trial.
pub const DEFAULT_POINT_CAP: f64 = 5e7;

/// ε lists must be non-empty, positive and strictly decreasing.
pub fn validate_eps_list(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(param("eps list is empty"));
    }
    if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(param(format!("eps values must be finite and positive, got {e}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(param(format!("eps list must be strictly decreasing, got {eps:?}")));
    }
    Ok(())
}

/// One realization of the process on `domain / eps_min`; coarser scales of
/// the same sweep reuse it through the filter, as a single ω would.
pub fn sweep_sample(
    params: &ProcessParams,
    domain: &DomainSpec,
    eps_min: f64,
    trial: u64,
    point_cap: f64,
) -> Result<MarkedSample> {
    let region = domain.scaled(1.0 / eps_min);
    let expected = params.intensity * region.bounding_box_volume();
    if expected > point_cap {
        return Err(Error::Resource(format!(
            "expected {expected:.3e} sampled points at eps = {eps_min} exceeds the cap {point_cap:.3e}"
        )));
    }
    sample_marked(params, &region, trial)
}

/// Mean and standard error of the mean (zero for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
