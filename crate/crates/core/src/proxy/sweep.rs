use crate::error::{param, Error, Result};
use crate::geometry::DomainSpec;
use crate::par;
use crate::perforation::{build_perforated, PerforatedDomain};
use crate::process::ProcessParams;
use crate::sweep::{sweep_sample, validate_eps_list, DEFAULT_POINT_CAP};

use super::mask::{build_mask_on, CellKind, Lattice, MaskedGrid};
use super::solver::{solve_robin, solve_robin_from, ProxyProblem, ScalarField, Solution, Source};
use super::trace::discrete_trace_norm;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomogenizationSettings {
    /// Grid spacing is at most `min hole radius / cells_per_radius`.
    pub cells_per_radius: f64,
    /// Coarsest spacing, used as-is when there are no holes.
    pub base_spacing: f64,
    /// Largest admissible lattice (cells of the bounding box).
    pub max_cells: usize,
    /// Exponent `p` of the hole-boundary trace norm, if it is wanted.
    pub trace_exponent: Option<f64>,
    pub trace_cells_per_radius: f64,
    pub point_cap: f64,
}

impl Default for HomogenizationSettings {
    fn default() -> Self {
        HomogenizationSettings {
            cells_per_radius: 2.0,
            base_spacing: 1.0 / 16.0,
            max_cells: 20_000_000,
            trace_exponent: None,
            trace_cells_per_radius: 4.0,
            point_cap: DEFAULT_POINT_CAP,
        }
    }
}

impl HomogenizationSettings {
    fn validate(&self) -> Result<()> {
        if !(self.cells_per_radius >= 2.0) {
            return Err(param(format!("cells_per_radius must be >= 2, got {}", self.cells_per_radius)));
        }
        if !(self.base_spacing.is_finite() && self.base_spacing > 0.0) {
            return Err(param(format!("base spacing must be positive, got {}", self.base_spacing)));
        }
        Ok(())
    }

    /// Spacing resolving every hole of `pd` with the configured cells per radius.
    pub fn spacing_for(&self, pd: &PerforatedDomain) -> f64 {
        let a_min = pd
            .holes()
            .iter()
            .map(|h| h.radius)
            .filter(|&a| a > 0.0)
            .fold(f64::INFINITY, f64::min);
        self.base_spacing.min(a_min / self.cells_per_radius)
    }
}

/// Relative L² distance `‖a - b‖ / ‖b‖` over cells interior to both fields.
pub fn relative_l2_distance(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    if a.lattice != b.lattice {
        return Err(param("fields live on different lattices"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..a.values.len() {
        if a.kinds[i] == CellKind::Interior && b.kinds[i] == CellKind::Interior {
            num += (a.values[i] - b.values[i]).powi(2);
            den += b.values[i].powi(2);
        }
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { 0.0 })
}

#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub mask: MaskedGrid,
    pub perforated: Solution,
    pub reference: Solution,
    pub rel_l2_distance: f64,
    pub trace_norm: Option<f64>,
    pub trace_excluded: usize,
}

/// Solves on `pd` and on the same lattice without holes.
pub fn solve_instance(
    pd: &PerforatedDomain,
    problem: &ProxyProblem,
    settings: &HomogenizationSettings,
) -> Result<InstanceResult> {
    settings.validate()?;
    let h = settings.spacing_for(pd);
    let lattice = Lattice::covering(pd.domain(), h)?;
    if lattice.len() > settings.max_cells {
        return Err(Error::Resource(format!(
            "lattice of {} cells at spacing {h:.3e} exceeds the cap {}",
            lattice.len(),
            settings.max_cells
        )));
    }
    let reference_mask = build_mask_on(&pd.without_holes(), lattice)?;
    let mask = build_mask_on(pd, lattice)?;
    let reference = solve_robin(problem, &reference_mask)?;
    let perforated = solve_robin_from(problem, &mask, Some(&reference.field))?;
    let rel = relative_l2_distance(&perforated.field, &reference.field)?;
    let (trace_norm, trace_excluded) = match settings.trace_exponent {
        Some(p) => {
            let rep = discrete_trace_norm(&perforated.field, pd, p, settings.trace_cells_per_radius)?;
            (Some(rep.norm), rep.holes_excluded)
        }
        None => (None, 0),
    };
    Ok(InstanceResult { mask, perforated, reference, rel_l2_distance: rel, trace_norm, trace_excluded })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogenizationRow {
    pub eps: f64,
    /// Seed means from here on.
    pub holes: f64,
    pub dropped_holes: f64,
    pub spacing: f64,
    pub interior_cells: f64,
    pub rel_l2_distance: f64,
    pub trace_norm: Option<f64>,
    pub trace_excluded: f64,
    pub iterations: f64,
}

impl HomogenizationRow {
    pub const CSV_HEADER: [&'static str; 8] = [
        "eps",
        "rel_l2_distance",
        "holes",
        "dropped_holes",
        "spacing",
        "interior_cells",
        "trace_norm",
        "iterations",
    ];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.eps.to_string(),
            self.rel_l2_distance.to_string(),
            self.holes.to_string(),
            self.dropped_holes.to_string(),
            self.spacing.to_string(),
            self.interior_cells.to_string(),
            self.trace_norm.map(|t| t.to_string()).unwrap_or_default(),
            self.iterations.to_string(),
        ]
    }
}

/// Relative distance between perforated and unperforated proxy solutions over an ε-sweep.
pub fn homogenization_sweep(
    params: &ProcessParams,
    domain: &DomainSpec,
    alpha: f64,
    problem: &ProxyProblem,
    eps_list: &[f64],
    n_seeds: usize,
    settings: &HomogenizationSettings,
) -> Result<Vec<HomogenizationRow>> {
    validate_eps_list(eps_list)?;
    settings.validate()?;
    problem.validate()?;
    if !(alpha > 3.0) {
        return Err(param(format!("the homogenization sweep needs alpha > 3, got {alpha}")));
    }
    if n_seeds == 0 {
        return Err(param("n_seeds must be at least 1"));
    }
    if matches!(problem.source, Source::Lattice(_)) {
        return Err(param("sweeps change the lattice per eps; use a uniform source"));
    }
    let eps_min = *eps_list.last().expect("non-empty");
    let samples = (0..n_seeds)
        .map(|t| sweep_sample(params, domain, eps_min, t as u64, settings.point_cap))
        .collect::<Result<Vec<_>>>()?;
    let mut domains = Vec::with_capacity(n_seeds * eps_list.len());
    for sample in &samples {
        for &eps in eps_list {
            domains.push(build_perforated(domain, sample, eps, alpha)?);
        }
    }

    // Refuse up front rather than after hours of solves.
    let fits = |pd: &PerforatedDomain| Lattice::covering_len(domain, settings.spacing_for(pd)) <= settings.max_cells as f64;
    let feasible: Vec<bool> = (0..eps_list.len())
        .map(|k| (0..n_seeds).all(|s| fits(&domains[s * eps_list.len() + k])))
        .collect();
    if let Some(k) = feasible.iter().position(|ok| !ok) {
        let finest = feasible.iter().rposition(|&ok| ok).map(|j| eps_list[j]);
        return Err(Error::Resource(match finest {
            Some(e) => format!(
                "eps = {} needs more than {} cells; the finest feasible eps in the list is {e}",
                eps_list[k], settings.max_cells
            ),
            None => format!("no eps in the list fits within {} cells", settings.max_cells),
        }));
    }

    let results = par::map_range(domains.len(), |i| solve_instance(&domains[i], problem, settings))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let n = n_seeds as f64;
    Ok(eps_list
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let idx: Vec<usize> = (0..n_seeds).map(|s| s * eps_list.len() + k).collect();
            let mean = |f: &dyn Fn(usize) -> f64| idx.iter().map(|&i| f(i)).sum::<f64>() / n;
            HomogenizationRow {
                eps,
                holes: mean(&|i| domains[i].holes().len() as f64),
                dropped_holes: mean(&|i| results[i].mask.dropped_holes as f64),
                spacing: mean(&|i| results[i].mask.lattice.spacing),
                interior_cells: mean(&|i| results[i].mask.interior_cells as f64),
                rel_l2_distance: mean(&|i| results[i].rel_l2_distance),
                trace_norm: settings.trace_exponent.map(|_| mean(&|i| results[i].trace_norm.unwrap_or(0.0))),
                trace_excluded: mean(&|i| results[i].trace_excluded as f64),
                iterations: mean(&|i| results[i].perforated.iterations as f64),
            }
        })
        .collect())
}
