//! Explicit cutoff functions vanishing on the holes and their Sobolev norms.
//!
//! Around a hole of radius `a` the cutoff is `s((|x - c| - a) / a)` on the annulus
//! `a <= |x - c| <= 2a`, zero inside and one outside, where `s(t) = 3t² - 2t³`.
//! Radial integration gives, per hole,
//!
//! ```text
//! ∫ (1 - g)^q  = (4π/3) a³ + 4π a³ K₀(q),   K₀(q) = ∫₀¹ (1 - s)^q (1 + t)² dt
//! ∫ |∇g|^q     = 4π a^(3-q) K₁(q),          K₁(q) = ∫₀¹ s'(t)^q (1 + t)² dt
//! ```

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{param, Error, Result};
use crate::geometry::{norm, sub, DomainSpec, Point3};
use crate::par::{self, CompensatedSum};
use crate::perforation::{build_perforated, find_overlap_scaled, PerforatedDomain};
use crate::process::{trial_rng, ProcessParams};
use crate::quadrature::adaptive_simpson;
use crate::rates::{fit_rate, RateFit};
use crate::sweep::{sweep_sample, validate_eps_list, DEFAULT_POINT_CAP};

#[inline]
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

#[inline]
pub fn smoothstep_derivative(t: f64) -> f64 {
    if (0.0..=1.0).contains(&t) {
        6.0 * t * (1.0 - t)
    } else {
        0.0
    }
}

/// Exponent `((3 - q) α - 3) / q`.
pub fn target_sigma(alpha: f64, q: f64) -> f64 {
    ((3.0 - q) * alpha - 3.0) / q
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffProfile {
    pub q: f64,
    pub k0: f64,
    pub k1: f64,
}

impl CutoffProfile {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 1.0 && q < 3.0) {
            return Err(param(format!("integrability exponent q must lie in (1, 3), got {q}")));
        }
        let tol = 1e-15;
        let k0 = adaptive_simpson(|t| (1.0 - smoothstep(t)).powf(q) * (1.0 + t).powi(2), 0.0, 1.0, tol);
        let k1 = adaptive_simpson(|t| smoothstep_derivative(t).powf(q) * (1.0 + t).powi(2), 0.0, 1.0, tol);
        Ok(CutoffProfile { q, k0, k1 })
    }
}

/// Pointwise evaluation of the cutoff for a perforated domain whose doubled
/// holes are pairwise disjoint.
#[derive(Clone, Copy, Debug)]
pub struct CutoffField<'a> {
    pd: &'a PerforatedDomain,
}

impl<'a> CutoffField<'a> {
    pub fn new(pd: &'a PerforatedDomain) -> Result<Self> {
        if let Some((i, j)) = find_overlap_scaled(pd, 2.0) {
            return Err(Error::Domain(format!(
                "annuli of holes {i} and {j} overlap; the cutoff construction needs disjoint doubled holes"
            )));
        }
        Ok(CutoffField { pd })
    }

    /// The hole whose doubled ball contains `x`, with `|x - c|`.
    fn owner(&self, x: Point3) -> Option<(usize, f64)> {
        let reach = self.pd.max_radius();
        self.pd
            .holes_near(x, reach)
            .into_iter()
            .map(|i| (i, norm(sub(x, self.pd.holes()[i].center))))
            .find(|&(i, rho)| rho < 2.0 * self.pd.holes()[i].radius || rho == 0.0)
    }

    pub fn value(&self, x: Point3) -> f64 {
        match self.owner(x) {
            None => 1.0,
            Some((i, rho)) => {
                let a = self.pd.holes()[i].radius;
                if rho <= a {
                    0.0
                } else {
                    smoothstep((rho - a) / a)
                }
            }
        }
    }

    pub fn gradient(&self, x: Point3) -> Point3 {
        match self.owner(x) {
            Some((i, rho)) => {
                let h = self.pd.holes()[i];
                if rho <= h.radius {
                    return [0.0; 3];
                }
                let g = smoothstep_derivative((rho - h.radius) / h.radius) / (h.radius * rho);
                let d = sub(x, h.center);
                [g * d[0], g * d[1], g * d[2]]
            }
            None => [0.0; 3],
        }
    }
}

/// Cutoff value at `x`; 0 inside holes, 1 away from the doubled holes.
pub fn cutoff_value(pd: &PerforatedDomain, x: Point3) -> Result<f64> {
    Ok(CutoffField::new(pd)?.value(x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffNorms {
    /// `‖1 - g‖_{L^q(D)}`.
    pub lq_part: f64,
    /// `‖∇g‖_{L^q(D)}`.
    pub grad_part: f64,
    /// Sum of both parts.
    pub w1q_norm: f64,
    pub target_sigma: f64,
    /// `(3 - q) α - 3 > 0`.
    pub rate_defined: bool,
}

/// Exact norms from the per-hole closed forms.
pub fn cutoff_norms(pd: &PerforatedDomain, profile: &CutoffProfile) -> Result<CutoffNorms> {
    CutoffField::new(pd)?;
    let q = profile.q;
    let mut lq = CompensatedSum::default();
    let mut grad = CompensatedSum::default();
    for h in pd.holes() {
        let a = h.radius;
        if a == 0.0 {
            continue;
        }
        let a3 = a * a * a;
        lq.add(4.0 / 3.0 * PI * a3 + 4.0 * PI * a3 * profile.k0);
        grad.add(4.0 * PI * a.powf(3.0 - q) * profile.k1);
    }
    let lq_part = lq.value().powf(1.0 / q);
    let grad_part = grad.value().powf(1.0 / q);
    let sigma = target_sigma(pd.alpha(), q);
    Ok(CutoffNorms {
        lq_part,
        grad_part,
        w1q_norm: lq_part + grad_part,
        target_sigma: sigma,
        rate_defined: sigma > 0.0,
    })
}

/// Monte Carlo estimate of `∫_D |∇g|^q`, stratified by hole: each hole gets
/// its own uniform samples on the cube of side `4a` around it.
pub fn stratified_gradient_integral(
    pd: &PerforatedDomain,
    q: f64,
    total_samples: usize,
    seed: u64,
) -> Result<f64> {
    let field = CutoffField::new(pd)?;
    let holes: Vec<usize> = (0..pd.holes().len()).filter(|&i| pd.holes()[i].radius > 0.0).collect();
    if holes.is_empty() {
        return Ok(0.0);
    }
    let per_hole = (total_samples / holes.len()).max(64);
    let domain: &DomainSpec = pd.domain();
    let parts = par::map_range(holes.len(), |k| {
        let h = pd.holes()[holes[k]];
        let mut rng = trial_rng(seed, k as u64);
        let side = 4.0 * h.radius;
        let mut acc = CompensatedSum::default();
        for _ in 0..per_hole {
            let x = [
                h.center[0] + side * (rng.gen::<f64>() - 0.5),
                h.center[1] + side * (rng.gen::<f64>() - 0.5),
                h.center[2] + side * (rng.gen::<f64>() - 0.5),
            ];
            if domain.contains(x) {
                acc.add(norm(field.gradient(x)).powf(q));
            }
        }
        side.powi(3) * acc.value() / per_hole as f64
    });
    Ok(parts.into_iter().collect::<CompensatedSum>().value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffRow {
    pub eps: f64,
    pub lq_part: f64,
    pub grad_part: f64,
    pub w1q_norm: f64,
    pub target_sigma: f64,
    /// Seeds whose doubled holes were disjoint and entered the mean.
    pub instances: usize,
}

impl CutoffRow {
    pub const CSV_HEADER: [&'static str; 5] = ["eps", "lq_part", "grad_part", "w1q_norm", "target_sigma"];

    pub fn csv_record(&self) -> [String; 5] {
        [self.eps, self.lq_part, self.grad_part, self.w1q_norm, self.target_sigma].map(|v| v.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct CutoffRateReport {
    pub rows: Vec<CutoffRow>,
    pub fit: RateFit,
    pub target_sigma: f64,
    /// Instances dropped because their doubled holes overlapped.
    pub skipped_instances: usize,
    pub warnings: Vec<String>,
}

/// Seed-averaged `‖g - 1‖_{W^{1,q}}` over an ε-sweep and its fitted exponent.
pub fn verify_cutoff_rate(
    params: &ProcessParams,
    domain: &DomainSpec,
    alpha: f64,
    q: f64,
    eps_list: &[f64],
    n_seeds: usize,
    tol: f64,
) -> Result<CutoffRateReport> {
    if eps_list.len() < 3 {
        return Err(param(format!("need at least 3 eps values, got {}", eps_list.len())));
    }
    validate_eps_list(eps_list)?;
    if n_seeds == 0 {
        return Err(param("n_seeds must be at least 1"));
    }
    let profile = CutoffProfile::new(q)?;
    let sigma = target_sigma(alpha, q);
    let mut warnings = Vec::new();
    if sigma <= 0.0 {
        warnings.push(format!("(3 - q) alpha - 3 = {} <= 0: no decay rate is asserted", q * sigma));
    }
    let m_sup = params.radius_law.moment_supremum();
    let m_needed = (3.0 / (alpha - 2.0)).max(3.0);
    if m_sup <= m_needed {
        warnings.push(format!(
            "radius law has finite moments only below {m_sup}; the rate needs m_r > {m_needed}"
        ));
    }
    let eps_min = *eps_list.last().expect("non-empty");

    let per_seed = par::map_range(n_seeds, |trial| -> Result<Vec<Option<CutoffNorms>>> {
        let sample = sweep_sample(params, domain, eps_min, trial as u64, DEFAULT_POINT_CAP)?;
        eps_list
            .iter()
            .map(|&eps| {
                let pd = build_perforated(domain, &sample, eps, alpha)?;
                match cutoff_norms(&pd, &profile) {
                    Ok(n) => Ok(Some(n)),
                    Err(Error::Domain(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(eps_list.len());
    let mut skipped = 0;
    for (k, &eps) in eps_list.iter().enumerate() {
        let ok: Vec<CutoffNorms> = per_seed.iter().filter_map(|s| s[k]).collect();
        skipped += n_seeds - ok.len();
        if ok.is_empty() {
            return Err(Error::Domain(format!("every instance at eps = {eps} has overlapping annuli")));
        }
        let n = ok.len() as f64;
        let mean = |f: fn(&CutoffNorms) -> f64| ok.iter().map(f).sum::<f64>() / n;
        rows.push(CutoffRow {
            eps,
            lq_part: mean(|c| c.lq_part),
            grad_part: mean(|c| c.grad_part),
            w1q_norm: mean(|c| c.w1q_norm),
            target_sigma: sigma,
            instances: ok.len(),
        });
    }
    if skipped > 0 {
        warnings.push(format!("{skipped} instance(s) skipped: overlapping annuli"));
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.w1q_norm)).collect();
    let fit = fit_rate(&pairs, (sigma > 0.0).then_some(sigma), tol)?;
    Ok(CutoffRateReport { rows, fit, target_sigma: sigma, skipped_instances: skipped, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perforation::Hole;
    use approx::assert_relative_eq;

    fn single(a: f64) -> PerforatedDomain {
        PerforatedDomain::from_holes(
            DomainSpec::Ball { radius: 10.0 },
            0.1,
            4.0,
            vec![Hole { center: [0.5, 0.0, 0.0], radius: a }],
        )
        .unwrap()
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
        assert_eq!(smoothstep_derivative(0.0), 0.0);
        assert_eq!(smoothstep_derivative(1.0), 0.0);
        assert_eq!(smoothstep_derivative(0.5), 1.5);
    }

    #[test]
    fn profile_constants_match_exact_integrals() {
        let p = CutoffProfile::new(2.0).unwrap();
        // exact: 12 - 72/5 + 36/7 and 361/630
        assert!((p.k1 - 96.0 / 35.0).abs() < 1e-10);
        assert!((p.k0 - 361.0 / 630.0).abs() < 1e-10);
        // high-precision quadrature reference
        let p = CutoffProfile::new(1.5).unwrap();
        assert!((p.k0 - 0.683_877_927_382_989_7).abs() < 1e-10);
        assert!((p.k1 - 2.479_930_335_664_542).abs() < 1e-10);
        let p = CutoffProfile::new(2.5).unwrap();
        assert!((p.k0 - 0.498_076_887_449_961_5).abs() < 1e-10);
        assert!((p.k1 - 3.085_822_406_309_856).abs() < 1e-10);
        assert!(CutoffProfile::new(1.0).is_err());
        assert!(CutoffProfile::new(3.0).is_err());
    }

    #[test]
    fn values_at_reference_points() {
        let pd = single(0.01);
        let f = CutoffField::new(&pd).unwrap();
        assert_eq!(f.value([0.5, 0.0, 0.0]), 0.0);
        assert_relative_eq!(f.value([0.515, 0.0, 0.0]), 0.5, epsilon = 1e-12);
        assert_eq!(f.value([0.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let pd = single(0.01);
        let f = CutoffField::new(&pd).unwrap();
        let x = [0.512, 0.004, -0.003];
        let g = f.gradient(x);
        let h = 1e-7;
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
            assert_relative_eq!(g[k], fd, epsilon = 1e-5, max_relative = 1e-6);
        }
    }

    #[test]
    fn single_hole_closed_form() {
        let pd = single(1.0);
        let p = CutoffProfile::new(2.0).unwrap();
        let n = cutoff_norms(&pd, &p).unwrap();
        assert_relative_eq!(n.grad_part.powi(2), 384.0 * PI / 35.0, max_relative = 1e-10);
    }

    #[test]
    fn no_holes_zero_norms() {
        let pd = PerforatedDomain::from_holes(DomainSpec::unit_ball(), 0.1, 4.0, vec![]).unwrap();
        let n = cutoff_norms(&pd, &CutoffProfile::new(2.0).unwrap()).unwrap();
        assert_eq!((n.lq_part, n.grad_part, n.w1q_norm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn overlapping_annuli_rejected() {
        let holes = vec![
            Hole { center: [0.0; 3], radius: 0.01 },
            Hole { center: [0.035, 0.0, 0.0], radius: 0.01 },
        ];
        let pd = PerforatedDomain::from_holes(DomainSpec::unit_ball(), 0.1, 4.0, holes).unwrap();
        assert!(matches!(cutoff_value(&pd, [0.0; 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(target_sigma(4.0, 2.0), 0.5);
        assert_eq!(target_sigma(5.0, 2.0), 1.0);
        assert!(target_sigma(4.0, 2.9) < 0.0);
    }

    #[test]
    fn rate_needs_three_points() {
        let p = ProcessParams::new(1.0, crate::process::RadiusLaw::Constant(1.0), 0).unwrap();
        let r = verify_cutoff_rate(&p, &DomainSpec::unit_ball(), 4.0, 2.0, &[0.2, 0.1], 1, 0.1);
        assert!(r.is_err());
    }
}
