//! Empirical strong-law checks for scaled counts and radius moments.

use crate::error::{param, Result};
use crate::geometry::{scale, DomainSpec};
use crate::par::{self, CompensatedSum};
use crate::process::{passes_phi_eps, ProcessParams};
use crate::sweep::{mean_and_se, sweep_sample, validate_eps_list};

#[derive(Clone, Debug, PartialEq)]
pub struct SllnRow {
    pub eps: f64,
    /// Seed mean of `eps³ N`.
    pub mean_scaled_count: f64,
    pub se_count: f64,
    /// `λ|S|`.
    pub target_count: f64,
    /// Seed mean of `eps³ Σ r^m`.
    pub mean_scaled_moment: f64,
    pub se_moment: f64,
    /// `λ E(r^m) |S|`; infinite when the moment does not exist.
    pub target_moment: f64,
    /// Seed mean of `|eps³ N - target| / target`.
    pub rel_err_count: f64,
    /// Seed mean of the relative moment error (infinite with an infinite target).
    pub rel_err_moment: f64,
    /// Sample variance of the scaled moment across seeds.
    pub var_moment: f64,
}

impl SllnRow {
    pub const CSV_HEADER: [&'static str; 7] = [
        "eps",
        "mean_scaled_count",
        "se_count",
        "target_count",
        "mean_scaled_moment",
        "se_moment",
        "target_moment",
    ];

    pub fn csv_record(&self) -> [String; 7] {
        [
            self.eps,
            self.mean_scaled_count,
            self.se_count,
            self.target_count,
            self.mean_scaled_moment,
            self.se_moment,
            self.target_moment,
        ]
        .map(|v| v.to_string())
    }

    /// Scaled count within `k` standard errors of its target.
    pub fn count_within(&self, k: f64) -> bool {
        (self.mean_scaled_count - self.target_count).abs() <= k * self.se_count
    }

    pub fn moment_within(&self, k: f64) -> bool {
        (self.mean_scaled_moment - self.target_moment).abs() <= k * self.se_moment
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SllnSettings {
    /// Moment exponent `m` (0 gives the count again).
    pub moment: f64,
    pub n_seeds: usize,
    /// Count over the boundary-layer filtered set instead of `S/eps`.
    pub filtered: bool,
    pub point_cap: f64,
}

/// Seed-averaged scaled counts and moments for each `eps`.
pub fn slln_sweep(
    params: &ProcessParams,
    set: &DomainSpec,
    eps_list: &[f64],
    settings: &SllnSettings,
) -> Result<Vec<SllnRow>> {
    params.validate()?;
    set.validate()?;
    validate_eps_list(eps_list)?;
    if settings.n_seeds == 0 {
        return Err(param("n_seeds must be at least 1"));
    }
    if !(settings.moment.is_finite() && settings.moment >= 0.0) {
        return Err(param(format!("moment exponent must be >= 0, got {}", settings.moment)));
    }
    let m = settings.moment;
    let eps_min = *eps_list.last().expect("validated non-empty");

    let per_seed = par::map_range(settings.n_seeds, |trial| -> Result<Vec<(f64, f64)>> {
        let sample = sweep_sample(params, set, eps_min, trial as u64, settings.point_cap)?;
        Ok(eps_list
            .iter()
            .map(|&eps| {
                let mut count = 0u64;
                let mut moment = CompensatedSum::default();
                for mark in &sample.points {
                    let keep = if settings.filtered {
                        passes_phi_eps(set, eps, mark.z)
                    } else {
                        set.contains(scale(mark.z, eps))
                    };
                    if keep {
                        count += 1;
                        moment.add(mark.r.powf(m));
                    }
                }
                let e3 = eps.powi(3);
                (e3 * count as f64, e3 * moment.value())
            })
            .collect())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let target_count = params.intensity * set.volume();
    let target_moment = if m == 0.0 { target_count } else { target_count * params.radius_law.moment(m) };
    let rel = |v: f64, t: f64| if t > 0.0 { (v - t).abs() / t } else { v.abs() };

    Ok(eps_list
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let counts: Vec<f64> = per_seed.iter().map(|s| s[k].0).collect();
            let moments: Vec<f64> = per_seed.iter().map(|s| s[k].1).collect();
            let (mean_c, se_c) = mean_and_se(&counts);
            let (mean_m, se_m) = mean_and_se(&moments);
            let n = counts.len() as f64;
            SllnRow {
                eps,
                mean_scaled_count: mean_c,
                se_count: se_c,
                target_count,
                mean_scaled_moment: mean_m,
                se_moment: se_m,
                target_moment,
                rel_err_count: counts.iter().map(|&c| rel(c, target_count)).sum::<f64>() / n,
                rel_err_moment: if target_moment.is_finite() {
                    moments.iter().map(|&v| rel(v, target_moment)).sum::<f64>() / n
                } else {
                    f64::INFINITY
                },
                var_moment: se_m * se_m * n,
            }
        })
        .collect())
}
