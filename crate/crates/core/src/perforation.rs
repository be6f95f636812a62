//! Perforated domains: hole construction, separation checks and hole measures.

use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::geometry::{dist, norm_sq, scale, sub, DomainSpec, Point3};
use crate::par::{self, CompensatedSum};
use crate::process::{check_eps, filter_phi_eps, MarkedSample, ProcessParams};
use crate::spatial::SpatialHash;
use crate::sweep::{sweep_sample, validate_eps_list};

/// Closed ball removed from the ambient domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hole {
    pub center: Point3,
    pub radius: f64,
}

/// `D` minus the holes `B(eps*z_i, eps^alpha * r_i)` over the filtered marks.
#[derive(Clone, Debug)]
pub struct PerforatedDomain {
    domain: DomainSpec,
    eps: f64,
    alpha: f64,
    holes: Vec<Hole>,
    max_radius: f64,
    index: SpatialHash,
}

impl PerforatedDomain {
    /// Builds directly from a hole list. Used for replaying serialized domains
    /// and hand-made fixtures; no filter is applied.
    pub fn from_holes(domain: DomainSpec, eps: f64, alpha: f64, holes: Vec<Hole>) -> Result<Self> {
        domain.validate()?;
        check_eps(eps)?;
        check_alpha(alpha)?;
        if let Some(h) = holes.iter().find(|h| !(h.radius.is_finite() && h.radius >= 0.0)) {
            return Err(param(format!("hole radius must be finite and >= 0, got {}", h.radius)));
        }
        let max_radius = holes.iter().map(|h| h.radius).fold(0.0, f64::max);
        // O(1) expected holes per cell at the natural spacing eps.
        let cell = (4.0 * max_radius).max(eps);
        let index = SpatialHash::from_points(cell, holes.iter().map(|h| &h.center));
        Ok(PerforatedDomain { domain, eps, alpha, holes, max_radius, index })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// The main homogenization result needs `alpha > 3`; between 2 and 3 the
    /// construction is still defined but outside that regime.
    pub fn below_subcritical_regime(&self) -> bool {
        self.alpha <= 3.0
    }

    /// Indices of holes that may intersect the closed ball `B(x, radius)`.
    pub fn holes_near(&self, x: Point3, radius: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .index
            .candidates(x, radius + self.max_radius)
            .into_iter()
            .map(|i| i as usize)
            .collect();
        out.sort_unstable();
        out
    }

    /// Hole containing `x` (closed ball), if any.
    pub fn hole_containing(&self, x: Point3) -> Option<usize> {
        let mut found = None;
        self.index.for_each_candidate(x, self.max_radius, |i| {
            let h = &self.holes[i as usize];
            if found.is_none() && norm_sq(sub(x, h.center)) <= h.radius * h.radius {
                found = Some(i as usize);
            }
        });
        found
    }

    /// `x` lies in `D` and outside every closed hole.
    pub fn contains(&self, x: Point3) -> bool {
        self.domain.contains(x) && self.hole_containing(x).is_none()
    }

    /// Linear-scan reference for [`contains`](Self::contains).
    pub fn contains_exhaustive(&self, x: Point3) -> bool {
        self.domain.contains(x)
            && self
                .holes
                .iter()
                .all(|h| norm_sq(sub(x, h.center)) > h.radius * h.radius)
    }

    /// Copy of the same domain and scales without any holes.
    pub fn without_holes(&self) -> PerforatedDomain {
        PerforatedDomain::from_holes(self.domain, self.eps, self.alpha, Vec::new())
            .expect("parameters already validated")
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 2.0 {
        Ok(())
    } else {
        Err(param(format!("alpha must exceed 2, got {alpha}")))
    }
}

/// Applies the boundary-layer filter and scales centers by `eps` and radii by `eps^alpha`.
pub fn build_perforated(
    domain: &DomainSpec,
    sample: &MarkedSample,
    eps: f64,
    alpha: f64,
) -> Result<PerforatedDomain> {
    check_alpha(alpha)?;
    let filtered = filter_phi_eps(sample, domain, eps)?;
    let radius_scale = eps.powf(alpha);
    let holes = filtered
        .points
        .iter()
        .map(|m| Hole { center: scale(m.z, eps), radius: radius_scale * m.r })
        .collect();
    PerforatedDomain::from_holes(*domain, eps, alpha, holes)
}

/// Admissible open interval for the separation exponent `kappa`.
///
/// With a finite moment exponent `m_r` the upper end is `alpha - 1 - 3/m_r`;
/// `None` (or infinite `m_r`) gives the envelope `(1, alpha - 1)`.
pub fn admissible_kappa(alpha: f64, moment_exponent: Option<f64>) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let upper = match moment_exponent {
        Some(m) if m.is_finite() => {
            if m <= 0.0 {
                return Err(param(format!("moment exponent must be positive, got {m}")));
            }
            if m <= 3.0 / (alpha - 2.0) {
                return Err(param(format!(
                    "moment exponent {m} does not exceed 3/(alpha-2) = {}",
                    3.0 / (alpha - 2.0)
                )));
            }
            alpha - 1.0 - 3.0 / m
        }
        _ => alpha - 1.0,
    };
    if upper <= 1.0 {
        return Err(param(format!(
            "empty kappa interval: need alpha - 1 - 3/m_r > 1, got {upper} (alpha = {alpha}, m_r = {moment_exponent:?})"
        )));
    }
    Ok((1.0, upper))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    /// `max_i tau * eps^alpha * r_i`.
    pub max_scaled_radius: f64,
    /// `eps^(1+kappa)`.
    pub threshold: f64,
    pub radius_ok: bool,
    /// Pairs whose safety balls `B(eps*z, tau*eps^(1+kappa))` touch or overlap.
    pub pair_violations: usize,
    /// Up to [`MAX_REPORTED_PAIRS`] violating pairs, `(i, j)` with `i < j`, sorted.
    pub violating_pairs: Vec<(usize, usize)>,
    pub pass: bool,
}

pub const MAX_REPORTED_PAIRS: usize = 16;

struct SeparationSetup {
    max_scaled_radius: f64,
    threshold: f64,
    /// Centers closer than or equal to this distance violate separation.
    min_distance: f64,
}

fn separation_setup(
    pd: &PerforatedDomain,
    tau: f64,
    kappa: f64,
    moment_exponent: Option<f64>,
) -> Result<SeparationSetup> {
    if !(tau.is_finite() && tau >= 1.0) {
        return Err(param(format!("tau must be >= 1, got {tau}")));
    }
    let (lo, hi) = admissible_kappa(pd.alpha, moment_exponent)?;
    if !(kappa > lo && kappa < hi) {
        return Err(param(format!("kappa = {kappa} outside the admissible interval ({lo}, {hi})")));
    }
    let threshold = pd.eps.powf(1.0 + kappa);
    let max_scaled_radius = tau * pd.max_radius;
    Ok(SeparationSetup { max_scaled_radius, threshold, min_distance: 2.0 * tau * threshold })
}

fn finish(setup: SeparationSetup, mut pairs: Vec<(usize, usize)>, count: usize) -> SeparationReport {
    pairs.sort_unstable();
    pairs.truncate(MAX_REPORTED_PAIRS);
    let radius_ok = setup.max_scaled_radius <= setup.threshold;
    SeparationReport {
        max_scaled_radius: setup.max_scaled_radius,
        threshold: setup.threshold,
        radius_ok,
        pair_violations: count,
        violating_pairs: pairs,
        pass: radius_ok && count == 0,
    }
}

/// Checks the separation properties with a spatial hash (expected `O(n)`).
pub fn check_separation(
    pd: &PerforatedDomain,
    tau: f64,
    kappa: f64,
    moment_exponent: Option<f64>,
) -> Result<SeparationReport> {
    let setup = separation_setup(pd, tau, kappa, moment_exponent)?;
    let d = setup.min_distance;
    let centers: Vec<Point3> = pd.holes.iter().map(|h| h.center).collect();
    let grid = SpatialHash::from_points(d, &centers);
    let mut count = 0;
    let mut pairs = Vec::new();
    for (i, &c) in centers.iter().enumerate() {
        grid.for_each_candidate(c, d, |j| {
            let j = j as usize;
            if j > i && dist(c, centers[j]) <= d {
                count += 1;
                pairs.push((i, j));
                if pairs.len() > 4 * MAX_REPORTED_PAIRS {
                    pairs.sort_unstable();
                    pairs.truncate(MAX_REPORTED_PAIRS);
                }
            }
        });
    }
    Ok(finish(setup, pairs, count))
}

/// All-pairs reference for [`check_separation`].
pub fn check_separation_exhaustive(
    pd: &PerforatedDomain,
    tau: f64,
    kappa: f64,
    moment_exponent: Option<f64>,
) -> Result<SeparationReport> {
    let setup = separation_setup(pd, tau, kappa, moment_exponent)?;
    let d = setup.min_distance;
    let mut count = 0;
    let mut pairs = Vec::new();
    for i in 0..pd.holes.len() {
        for j in i + 1..pd.holes.len() {
            if dist(pd.holes[i].center, pd.holes[j].center) <= d {
                count += 1;
                if pairs.len() < MAX_REPORTED_PAIRS {
                    pairs.push((i, j));
                }
            }
        }
    }
    Ok(finish(setup, pairs, count))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoleMeasures {
    pub total_volume: f64,
    pub total_surface: f64,
    /// Some holes overlap, so the sums over-count the removed set.
    pub upper_bound_only: bool,
}

/// Index pair of two holes with positive radii that intersect, if any.
pub fn find_hole_overlap(pd: &PerforatedDomain) -> Option<(usize, usize)> {
    find_overlap_scaled(pd, 1.0)
}

/// Like [`find_hole_overlap`] for the dilated balls `B(c_i, factor * a_i)`.
pub(crate) fn find_overlap_scaled(pd: &PerforatedDomain, factor: f64) -> Option<(usize, usize)> {
    for (i, h) in pd.holes.iter().enumerate() {
        if h.radius == 0.0 {
            continue;
        }
        let reach = factor * (h.radius + pd.max_radius);
        let hit = pd.index.candidates(h.center, reach).into_iter().find(|&j| {
            let j = j as usize;
            let o = &pd.holes[j];
            j != i && o.radius > 0.0 && dist(h.center, o.center) <= factor * (h.radius + o.radius)
        });
        if let Some(j) = hit {
            let j = j as usize;
            return Some((i.min(j), i.max(j)));
        }
    }
    None
}

/// Total volume and surface of the holes as sums of sphere formulas.
pub fn hole_measures(pd: &PerforatedDomain) -> HoleMeasures {
    let mut vol = CompensatedSum::default();
    let mut surf = CompensatedSum::default();
    for h in &pd.holes {
        let a2 = h.radius * h.radius;
        vol.add(4.0 / 3.0 * PI * a2 * h.radius);
        surf.add(4.0 * PI * a2);
    }
    HoleMeasures {
        total_volume: vol.value(),
        total_surface: surf.value(),
        upper_bound_only: find_hole_overlap(pd).is_some(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationRow {
    pub eps: f64,
    pub pass_fraction: f64,
    pub radius_ok_fraction: f64,
    pub mean_pair_violations: f64,
    /// Instances where the hash and the all-pairs check were both run.
    pub oracle_checked: usize,
    /// Instances where they disagreed.
    pub oracle_mismatches: usize,
}

impl SeparationRow {
    pub const CSV_HEADER: [&'static str; 4] =
        ["eps", "pass_fraction", "radius_ok_fraction", "mean_pair_violations"];

    pub fn csv_record(&self) -> [String; 4] {
        [self.eps, self.pass_fraction, self.radius_ok_fraction, self.mean_pair_violations].map(|v| v.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationSettings {
    pub tau: f64,
    pub kappa: f64,
    pub moment_exponent: Option<f64>,
    /// Cross-check with the all-pairs oracle on instances up to this many holes.
    pub oracle_max_holes: usize,
    pub point_cap: f64,
}

/// Fraction of seeds passing the separation check at each eps.
pub fn separation_sweep(
    params: &ProcessParams,
    domain: &DomainSpec,
    alpha: f64,
    eps_list: &[f64],
    n_seeds: usize,
    settings: &SeparationSettings,
) -> Result<Vec<SeparationRow>> {
    validate_eps_list(eps_list)?;
    if n_seeds == 0 {
        return Err(param("n_seeds must be at least 1"));
    }
    admissible_kappa(alpha, settings.moment_exponent)?;
    let eps_min = *eps_list.last().expect("non-empty");
    let per_seed = par::map_range(n_seeds, |trial| -> Result<Vec<(SeparationReport, Option<bool>)>> {
        let sample = sweep_sample(params, domain, eps_min, trial as u64, settings.point_cap)?;
        eps_list
            .iter()
            .map(|&eps| {
                let pd = build_perforated(domain, &sample, eps, alpha)?;
                let rep = check_separation(&pd, settings.tau, settings.kappa, settings.moment_exponent)?;
                let agree = if pd.holes().len() <= settings.oracle_max_holes {
                    let oracle =
                        check_separation_exhaustive(&pd, settings.tau, settings.kappa, settings.moment_exponent)?;
                    Some(oracle == rep)
                } else {
                    None
                };
                Ok((rep, agree))
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n = n_seeds as f64;
    Ok(eps_list
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let reps: Vec<&(SeparationReport, Option<bool>)> = per_seed.iter().map(|s| &s[k]).collect();
            SeparationRow {
                eps,
                pass_fraction: reps.iter().filter(|r| r.0.pass).count() as f64 / n,
                radius_ok_fraction: reps.iter().filter(|r| r.0.radius_ok).count() as f64 / n,
                mean_pair_violations: reps.iter().map(|r| r.0.pair_violations as f64).sum::<f64>() / n,
                oracle_checked: reps.iter().filter(|r| r.1.is_some()).count(),
                oracle_mismatches: reps.iter().filter(|r| r.1 == Some(false)).count(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureRow {
    pub eps: f64,
    pub mean_holes: f64,
    pub mean_total_volume: f64,
    pub mean_total_surface: f64,
    /// Instances whose holes overlapped, making the sums upper bounds.
    pub overlapping_instances: usize,
}

impl MeasureRow {
    pub const CSV_HEADER: [&'static str; 5] =
        ["eps", "mean_holes", "mean_total_volume", "mean_total_surface", "overlapping_instances"];

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.eps.to_string(),
            self.mean_holes.to_string(),
            self.mean_total_volume.to_string(),
            self.mean_total_surface.to_string(),
            self.overlapping_instances.to_string(),
        ]
    }
}

/// Seed-averaged hole counts and measures over an eps-sweep.
pub fn measure_sweep(
    params: &ProcessParams,
    domain: &DomainSpec,
    alpha: f64,
    eps_list: &[f64],
    n_seeds: usize,
    point_cap: f64,
) -> Result<Vec<MeasureRow>> {
    validate_eps_list(eps_list)?;
    if n_seeds == 0 {
        return Err(param("n_seeds must be at least 1"));
    }
    let eps_min = *eps_list.last().expect("non-empty");
    let per_seed = par::map_range(n_seeds, |trial| -> Result<Vec<(usize, HoleMeasures)>> {
        let sample = sweep_sample(params, domain, eps_min, trial as u64, point_cap)?;
        eps_list
            .iter()
            .map(|&eps| {
                let pd = build_perforated(domain, &sample, eps, alpha)?;
                Ok((pd.holes().len(), hole_measures(&pd)))
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let n = n_seeds as f64;
    Ok(eps_list
        .iter()
        .enumerate()
        .map(|(k, &eps)| MeasureRow {
            eps,
            mean_holes: per_seed.iter().map(|s| s[k].0 as f64).sum::<f64>() / n,
            mean_total_volume: per_seed.iter().map(|s| s[k].1.total_volume).sum::<f64>() / n,
            mean_total_surface: per_seed.iter().map(|s| s[k].1.total_surface).sum::<f64>() / n,
            overlapping_instances: per_seed.iter().filter(|s| s[k].1.upper_bound_only).count(),
        })
        .collect())
}
