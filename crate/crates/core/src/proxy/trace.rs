use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::perforation::PerforatedDomain;
use crate::quadrature::lebedev26;

use super::solver::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceReport {
    /// `(Σ_i ∮_{∂B_i} |θ|^p dS)^{1/p}` over the holes that were used.
    pub norm: f64,
    pub holes_used: usize,
    /// Holes with fewer than the required cells per radius, or with part of
    /// their sphere buried inside an overlapping hole.
    pub holes_excluded: usize,
}

/// Discrete `L^p` norm of `field` over the union of hole boundaries.
pub fn discrete_trace_norm(
    field: &ScalarField,
    pd: &PerforatedDomain,
    p: f64,
    min_cells_per_radius: f64,
) -> Result<TraceReport> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(param(format!("trace exponent must be >= 1, got {p}")));
    }
    let h = field.lattice.spacing;
    let rule = lebedev26();
    let mut total = 0.0;
    let mut used = 0;
    let mut excluded = 0;
    // Spacings are often derived as `radius / cells`; don't lose those holes to rounding.
    let min_radius = min_cells_per_radius * h * (1.0 - 1e-9);
    'holes: for hole in pd.holes() {
        if hole.radius < min_radius {
            excluded += 1;
            continue;
        }
        let area = 4.0 * PI * hole.radius * hole.radius;
        let mut acc = 0.0;
        for (dir, w) in &rule {
            let x = [0, 1, 2].map(|k| hole.center[k] + hole.radius * dir[k]);
            match field.interpolate(x) {
                Some(v) => acc += w * v.abs().powf(p),
                None => {
                    excluded += 1;
                    continue 'holes;
                }
            }
        }
        total += area * acc;
        used += 1;
    }
    Ok(TraceReport { norm: total.powf(1.0 / p), holes_used: used, holes_excluded: excluded })
}
