//! Log-log least-squares power-law fits.

use crate::error::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    /// Fitted exponent `p` in `y ~ C eps^p`.
    pub slope: f64,
    /// Fitted `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub target_exponent: Option<f64>,
    pub pass: Option<bool>,
}

/// Ordinary least squares on `(ln eps, ln y)`.
///
/// With a target, `pass = |slope - target| <= tol`.
pub fn fit_rate(pairs: &[(f64, f64)], target: Option<f64>, tol: f64) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(param(format!("need at least 3 points for a rate fit, got {}", pairs.len())));
    }
    for &(e, y) in pairs {
        if !(e > 0.0 && y > 0.0 && e.is_finite() && y.is_finite()) {
            return Err(param(format!("rate fit needs finite positive data, got ({e}, {y})")));
        }
    }
    let mut eps: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    eps.sort_by(f64::total_cmp);
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(param("duplicate eps values in rate fit"));
    }

    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    // Order-independent means: sum sorted values.
    let mean = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s.iter().sum::<f64>() / n
    };
    let mx = mean(&xs);
    let my = mean(&ys);
    let mut terms: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let dx = x - mx;
            let dy = y - my;
            (dx * dx, dx * dy, dy * dy)
        })
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let sxx: f64 = terms.iter().map(|t| t.0).sum();
    let sxy: f64 = terms.iter().map(|t| t.1).sum();
    let syy: f64 = terms.iter().map(|t| t.2).sum();

    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        n_points: pairs.len(),
        target_exponent: target,
        pass: target.map(|t| (slope - t).abs() <= tol),
    })
}
