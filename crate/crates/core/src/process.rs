//! Marked Poisson point processes and the boundary-layer filter.
//!
//! Every trial draws from its own ChaCha8 stream keyed on `(seed, trial)`, so a
//! sample depends only on its parameters and never on scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto, Poisson};

use crate::error::{param, Result};
use crate::geometry::{scale, DomainSpec, Point3};

/// Law of the i.i.d. radius marks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusLaw {
    Constant(f64),
    Uniform { low: f64, high: f64 },
    /// Pareto with unit scale: `P(r > t) = t^{-shape}` for `t >= 1`.
    Pareto { shape: f64 },
}

impl RadiusLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadiusLaw::Constant(c) if !(c.is_finite() && c >= 0.0) => {
                Err(param(format!("constant radius must be finite and >= 0, got {c}")))
            }
            RadiusLaw::Uniform { low, high }
                if !(low.is_finite() && high.is_finite() && 0.0 <= low && low < high) =>
            {
                Err(param(format!("uniform radius law needs 0 <= low < high, got [{low}, {high})")))
            }
            RadiusLaw::Pareto { shape } if !(shape.is_finite() && shape > 0.0) => {
                Err(param(format!("pareto shape must be positive, got {shape}")))
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusLaw::Constant(c) => c,
            RadiusLaw::Uniform { low, high } => rng.gen_range(low..high),
            RadiusLaw::Pareto { shape } => Pareto::new(1.0, shape)
                .expect("validated pareto shape")
                .sample(rng),
        }
    }

    /// `E(r^m)`, possibly `+inf`.
    pub fn moment(&self, m: f64) -> f64 {
        match *self {
            RadiusLaw::Constant(c) => c.powf(m),
            RadiusLaw::Uniform { low, high } => {
                (high.powf(m + 1.0) - low.powf(m + 1.0)) / ((m + 1.0) * (high - low))
            }
            RadiusLaw::Pareto { shape } => {
                if m < shape {
                    shape / (shape - m)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Supremum of the exponents `m` with `E(r^m) < inf`.
    pub fn moment_supremum(&self) -> f64 {
        match *self {
            RadiusLaw::Pareto { shape } => shape,
            _ => f64::INFINITY,
        }
    }
}

/// Closed-form `E(r^m)`; `m` must be positive.
pub fn analytic_moment(law: &RadiusLaw, m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(param(format!("moment exponent must be positive, got {m}")));
    }
    Ok(law.moment(m))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessParams {
    /// Points per unit volume. Zero is allowed and produces empty samples.
    pub intensity: f64,
    pub radius_law: RadiusLaw,
    pub seed: u64,
}

impl ProcessParams {
    pub fn new(intensity: f64, radius_law: RadiusLaw, seed: u64) -> Result<Self> {
        let p = ProcessParams { intensity, radius_law, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity.is_finite() && self.intensity >= 0.0) {
            return Err(param(format!("intensity must be finite and >= 0, got {}", self.intensity)));
        }
        self.radius_law.validate()
    }
}

/// A single marked point: center `z` (unscaled) and radius mark `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mark {
    pub z: Point3,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkedSample {
    pub points: Vec<Mark>,
    /// The set the sample was drawn on.
    pub region: DomainSpec,
    pub seed: u64,
    pub trial: u64,
}

impl MarkedSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Independent random stream for one trial of a sweep.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws from `Poisson(mean)`.
pub fn sample_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(param(format!("poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| param(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Samples the marked process restricted to `region`.
///
/// Points are drawn uniformly on the bounding box of `region` and thinned to the
/// region itself, which is an exact Poisson sample on the region.
pub fn sample_marked(params: &ProcessParams, region: &DomainSpec, trial: u64) -> Result<MarkedSample> {
    params.validate()?;
    region
        .validate()
        .map_err(|e| param(format!("sampling region must be bounded: {e}")))?;
    let mut rng = trial_rng(params.seed, trial);
    let half = region.half_extents();
    let count = sample_count(params.intensity * region.bounding_box_volume(), &mut rng)?;
    let mut points = Vec::with_capacity((count as f64 * region.volume() / region.bounding_box_volume()) as usize + 16);
    for _ in 0..count {
        let z = [
            half[0] * (2.0 * rng.gen::<f64>() - 1.0),
            half[1] * (2.0 * rng.gen::<f64>() - 1.0),
            half[2] * (2.0 * rng.gen::<f64>() - 1.0),
        ];
        let r = params.radius_law.sample(&mut rng);
        if region.contains(z) {
            points.push(Mark { z, r });
        }
    }
    Ok(MarkedSample { points, region: *region, seed: params.seed, trial })
}

/// `z` survives iff `eps*z` lies in `domain` farther than `eps` from its boundary.
#[inline]
pub fn passes_phi_eps(domain: &DomainSpec, eps: f64, z: Point3) -> bool {
    domain.signed_distance(scale(z, eps)) < -eps
}

/// Keeps the marks with `z in D/eps` and `dist(eps*z, boundary of D) > eps`.
pub fn filter_phi_eps(sample: &MarkedSample, domain: &DomainSpec, eps: f64) -> Result<MarkedSample> {
    check_eps(eps)?;
    domain.validate()?;
    let points = sample
        .points
        .iter()
        .copied()
        .filter(|m| passes_phi_eps(domain, eps, m.z))
        .collect();
    Ok(MarkedSample { points, ..sample.clone_header() })
}

impl MarkedSample {
    fn clone_header(&self) -> MarkedSample {
        MarkedSample { points: Vec::new(), region: self.region, seed: self.seed, trial: self.trial }
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(param(format!("eps must be finite and positive, got {eps}")))
    }
}
