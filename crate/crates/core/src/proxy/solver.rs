//! Cell-centered finite volumes for `-κ Δθ = f` with Robin faces
//! `-κ ∂θ/∂n = L (θ - θ₀)`, solved by Jacobi-preconditioned conjugate gradients.
//!
//! A Robin face at half a cell from the center carries the series conductance
//! `h² / (h / (2κ) + 1 / L)`; faces between interior cells carry `κ h`.

use crate::error::{param, Error, Result};
use crate::geometry::Point3;
use crate::par;

use super::mask::{CellKind, FaceKind, Lattice, MaskedGrid};

/// Boundary datum `θ₀(x) = constant + gradient · x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineDatum {
    pub constant: f64,
    pub gradient: Point3,
}

impl AffineDatum {
    pub fn constant(c: f64) -> Self {
        AffineDatum { constant: c, gradient: [0.0; 3] }
    }

    #[inline]
    pub fn eval(&self, x: Point3) -> f64 {
        self.constant + self.gradient[0] * x[0] + self.gradient[1] * x[1] + self.gradient[2] * x[2]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Uniform(f64),
    /// One value per lattice cell of the mask being solved on.
    Lattice(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProxyProblem {
    /// Constant conductivity κ_c.
    pub conductivity: f64,
    /// Robin coefficient L.
    pub robin: f64,
    pub datum: AffineDatum,
    /// Lower bound T₀ the datum must respect on every Robin face, when set.
    pub min_temperature: Option<f64>,
    pub source: Source,
    /// Robin (true) or zero-flux (false) condition on outer faces normal to each axis.
    /// Hole faces are always Robin.
    pub outer_robin_axes: [bool; 3],
    /// Integrability exponent `m_θ` of the nonlinear model; only used for trace checks.
    pub m_theta: f64,
    pub tolerance: f64,
    pub max_iterations: Option<usize>,
}

impl Default for ProxyProblem {
    fn default() -> Self {
        ProxyProblem {
            conductivity: 1.0,
            robin: 1.0,
            datum: AffineDatum::constant(1.0),
            min_temperature: Some(0.5),
            source: Source::Uniform(1.0),
            outer_robin_axes: [true; 3],
            m_theta: 3.0,
            tolerance: 1e-8,
            max_iterations: None,
        }
    }
}

impl ProxyProblem {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.conductivity) {
            return Err(param(format!("conductivity must be positive, got {}", self.conductivity)));
        }
        if !pos(self.robin) {
            return Err(param(format!("Robin coefficient must be positive, got {}", self.robin)));
        }
        if let Some(t0) = self.min_temperature {
            if !pos(t0) {
                return Err(param(format!("minimum temperature must be positive, got {t0}")));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(param(format!("solver tolerance must lie in (0, 1), got {}", self.tolerance)));
        }
        if !(self.m_theta > 0.0) {
            return Err(param(format!("m_theta must be positive, got {}", self.m_theta)));
        }
        if let Source::Uniform(f) = self.source {
            if !f.is_finite() {
                return Err(param("source must be finite"));
            }
        }
        Ok(())
    }

    fn face_conductance(&self, h: f64) -> f64 {
        h * h / (h / (2.0 * self.conductivity) + 1.0 / self.robin)
    }

    fn is_robin(&self, kind: FaceKind, axis: u8) -> bool {
        kind == FaceKind::Hole || self.outer_robin_axes[axis as usize]
    }
}

/// Cell values on a lattice; non-interior cells hold zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub lattice: Lattice,
    pub kinds: Vec<CellKind>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn constant(mask: &MaskedGrid, c: f64) -> Self {
        let values = mask
            .kinds
            .iter()
            .map(|&k| if k == CellKind::Interior { c } else { 0.0 })
            .collect();
        ScalarField { lattice: mask.lattice, kinds: mask.kinds.clone(), values }
    }

    pub fn interior(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.kinds
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (k, _))| **k == CellKind::Interior)
            .map(|(i, (_, v))| (i, *v))
    }

    /// Trilinear interpolation over interior cells only, renormalizing the
    /// weights; falls back to the nearest interior cell in the surrounding
    /// 4x4x4 block.
    pub fn interpolate(&self, x: Point3) -> Option<f64> {
        let l = &self.lattice;
        let mut base = [0i64; 3];
        let mut t = [0.0; 3];
        for k in 0..3 {
            let u = (x[k] - l.origin[k]) / l.spacing - 0.5;
            base[k] = u.floor() as i64;
            t[k] = u - u.floor();
        }
        let cell = |c: [i64; 3]| -> Option<usize> {
            if (0..3).all(|k| c[k] >= 0 && (c[k] as usize) < l.dims[k]) {
                let idx = l.index([c[0] as usize, c[1] as usize, c[2] as usize]);
                (self.kinds[idx] == CellKind::Interior).then_some(idx)
            } else {
                None
            }
        };
        let mut wsum = 0.0;
        let mut vsum = 0.0;
        for corner in 0..8 {
            let off = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let c = [0, 1, 2].map(|k| base[k] + off[k] as i64);
            if let Some(idx) = cell(c) {
                let w: f64 = (0..3).map(|k| if off[k] == 1 { t[k] } else { 1.0 - t[k] }).product();
                wsum += w;
                vsum += w * self.values[idx];
            }
        }
        if wsum > 1e-9 {
            return Some(vsum / wsum);
        }
        let mut best: Option<(f64, usize)> = None;
        for dk in -1..=2 {
            for dj in -1..=2 {
                for di in -1..=2 {
                    if let Some(idx) = cell([base[0] + di, base[1] + dj, base[2] + dk]) {
                        let c = l.center(idx);
                        let d2 = (0..3).map(|k| (c[k] - x[k]).powi(2)).sum::<f64>();
                        if best.is_none_or(|(b, _)| d2 < b) {
                            best = Some((d2, idx));
                        }
                    }
                }
            }
        }
        best.map(|(_, idx)| self.values[idx])
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub field: ScalarField,
    pub iterations: usize,
    /// Relative residual `‖b - A x‖ / ‖b‖` after each iteration.
    pub residual_history: Vec<f64>,
    /// Total outward Robin flux `Σ L (θ_face - θ₀) |face|`.
    pub robin_flux: f64,
    /// `Σ f |cell|` over interior cells.
    pub source_total: f64,
}

impl Solution {
    pub fn relative_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

const NONE: u32 = u32::MAX;

struct System {
    cells: Vec<usize>,
    nbrs: Vec<[u32; 6]>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
    offdiag: f64,
}

impl System {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        par::fill(y, |i| {
            let mut s = self.diag[i] * x[i];
            for &n in &self.nbrs[i] {
                if n != NONE {
                    s -= self.offdiag * x[n as usize];
                }
            }
            s
        });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    par::sum_range(a.len(), |i| a[i] * b[i])
}

fn assemble(problem: &ProxyProblem, mask: &MaskedGrid) -> Result<System> {
    let lattice = &mask.lattice;
    let h = lattice.spacing;
    let mut compact = vec![NONE; lattice.len()];
    let cells: Vec<usize> = mask
        .kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == CellKind::Interior)
        .map(|(i, _)| i)
        .collect();
    for (c, &li) in cells.iter().enumerate() {
        compact[li] = c as u32;
    }
    let source_at = |li: usize| match &problem.source {
        Source::Uniform(f) => *f,
        Source::Lattice(v) => v[li],
    };
    if let Source::Lattice(v) = &problem.source {
        if v.len() != lattice.len() {
            return Err(param(format!("source has {} values for {} cells", v.len(), lattice.len())));
        }
    }
    let kappa_h = problem.conductivity * h;
    let cell_volume = h * h * h;

    let mut nbrs = Vec::with_capacity(cells.len());
    let mut diag = Vec::with_capacity(cells.len());
    let mut rhs = Vec::with_capacity(cells.len());
    for &li in &cells {
        let c = lattice.coords(li);
        let mut nb = [NONE; 6];
        let mut count = 0.0;
        for axis in 0..3 {
            for (s, side) in [-1i8, 1].into_iter().enumerate() {
                if let Some(n) = lattice.neighbor(c, axis, side) {
                    let ci = compact[lattice.index(n)];
                    if ci != NONE {
                        nb[2 * axis + s] = ci;
                        count += 1.0;
                    }
                }
            }
        }
        nbrs.push(nb);
        diag.push(kappa_h * count);
        rhs.push(source_at(li) * cell_volume);
    }

    let tb = problem.face_conductance(h);
    let mut robin_faces = 0usize;
    for face in &mask.faces {
        if !problem.is_robin(face.kind, face.axis) {
            continue;
        }
        let theta0 = problem.datum.eval(face.center(lattice));
        if let Some(t0) = problem.min_temperature {
            if theta0 < t0 {
                return Err(param(format!(
                    "boundary datum {theta0} below the minimum temperature {t0} at {:?}",
                    face.center(lattice)
                )));
            }
        }
        let ci = compact[face.cell] as usize;
        diag[ci] += tb;
        rhs[ci] += tb * theta0;
        robin_faces += 1;
    }
    if robin_faces == 0 {
        return Err(Error::Domain("no Robin faces: the pure Neumann problem is singular".into()));
    }
    Ok(System { cells, nbrs, diag, rhs, offdiag: kappa_h })
}

pub fn solve_robin(problem: &ProxyProblem, mask: &MaskedGrid) -> Result<Solution> {
    solve_robin_from(problem, mask, None)
}

/// As [`solve_robin`], starting CG from `initial` on cells it marks interior.
pub fn solve_robin_from(
    problem: &ProxyProblem,
    mask: &MaskedGrid,
    initial: Option<&ScalarField>,
) -> Result<Solution> {
    problem.validate()?;
    if let Some(init) = initial {
        if init.lattice != mask.lattice {
            return Err(param("initial guess lives on a different lattice"));
        }
    }
    let sys = assemble(problem, mask)?;
    let n = sys.cells.len();
    let max_iter = problem
        .max_iterations
        .unwrap_or(500 + 50 * mask.lattice.dims.iter().copied().max().unwrap_or(1));

    let mut x: Vec<f64> = match initial {
        Some(init) => sys
            .cells
            .iter()
            .map(|&li| if init.kinds[li] == CellKind::Interior { init.values[li] } else { 0.0 })
            .collect(),
        None => vec![0.0; n],
    };
    let b_norm = dot(&sys.rhs, &sys.rhs).sqrt();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    sys.apply(&x, &mut ap);
    par::fill(&mut r, |i| sys.rhs[i] - ap[i]);

    let mut history = Vec::new();
    let mut iterations = 0;
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let mut z = vec![0.0; n];
        par::fill(&mut z, |i| r[i] / sys.diag[i]);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut rel = dot(&r, &r).sqrt() / b_norm;
        while rel > problem.tolerance {
            if iterations >= max_iter {
                return Err(Error::Solver { iterations, residual: rel, history });
            }
            sys.apply(&p, &mut ap);
            let step = rz / dot(&p, &ap);
            par::update(&mut x, |i, v| *v += step * p[i]);
            par::update(&mut r, |i, v| *v -= step * ap[i]);
            par::fill(&mut z, |i| r[i] / sys.diag[i]);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            par::update(&mut p, |i, v| *v = z[i] + beta * *v);
            rel = dot(&r, &r).sqrt() / b_norm;
            iterations += 1;
            history.push(rel);
        }
        if history.is_empty() {
            history.push(rel);
        }
    }

    let mut values = vec![0.0; mask.lattice.len()];
    for (c, &li) in sys.cells.iter().enumerate() {
        values[li] = x[c];
    }
    let field = ScalarField { lattice: mask.lattice, kinds: mask.kinds.clone(), values };

    let h = mask.lattice.spacing;
    let tb = problem.face_conductance(h);
    let robin_flux = mask
        .faces
        .iter()
        .filter(|f| problem.is_robin(f.kind, f.axis))
        .map(|f| tb * (field.values[f.cell] - problem.datum.eval(f.center(&mask.lattice))))
        .sum();
    let source_total = sys.cells.iter().map(|&li| match &problem.source {
        Source::Uniform(f) => *f,
        Source::Lattice(v) => v[li],
    } * h * h * h).sum();

    Ok(Solution { field, iterations, residual_history: history, robin_flux, source_total })
}
