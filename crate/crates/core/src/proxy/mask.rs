use crate::error::{param, Error, Result};
use crate::geometry::{norm_sq, sub, DomainSpec, Point3};
use crate::perforation::PerforatedDomain;

/// Classification of a lattice cell by its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CellKind {
    Interior = 0,
    Hole = 1,
    Exterior = 2,
}

impl CellKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(CellKind::Interior),
            1 => Some(CellKind::Hole),
            2 => Some(CellKind::Exterior),
            _ => None,
        }
    }
}

/// Uniform cell-centered lattice; cell `(i, j, k)` is centered at
/// `origin + (i + 1/2, j + 1/2, k + 1/2) * spacing`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub dims: [usize; 3],
    pub spacing: f64,
    pub origin: Point3,
}

impl Lattice {
    /// Smallest centered lattice of the given spacing covering the bounding box.
    pub fn covering(domain: &DomainSpec, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(param(format!("grid spacing must be positive, got {spacing}")));
        }
        let half = domain.half_extents();
        let dims = half.map(|hk| ((2.0 * hk / spacing) - 1e-9).ceil().max(1.0) as usize);
        let origin = [0, 1, 2].map(|k| -(dims[k] as f64) * spacing / 2.0);
        Ok(Lattice { dims, spacing, origin })
    }

    /// Cell count of [`covering`](Self::covering) without building it.
    pub fn covering_len(domain: &DomainSpec, spacing: f64) -> f64 {
        domain
            .half_extents()
            .iter()
            .map(|&hk| ((2.0 * hk / spacing) - 1e-9).ceil().max(1.0))
            .product()
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    #[inline]
    pub fn center(&self, idx: usize) -> Point3 {
        let c = self.coords(idx);
        [0, 1, 2].map(|k| self.origin[k] + (c[k] as f64 + 0.5) * self.spacing)
    }

    /// Neighbor across face `(axis, side)` with `side` in {-1, +1}.
    #[inline]
    pub fn neighbor(&self, c: [usize; 3], axis: usize, side: i8) -> Option<[usize; 3]> {
        let mut n = c;
        if side < 0 {
            n[axis] = c[axis].checked_sub(1)?;
        } else {
            n[axis] += 1;
            if n[axis] >= self.dims[axis] {
                return None;
            }
        }
        Some(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    /// Face toward the exterior of `D` (or the lattice edge).
    Outer,
    /// Face toward a hole cell.
    Hole,
}

/// Face between an interior cell and a non-interior neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RobinFace {
    /// Lattice index of the interior cell.
    pub cell: usize,
    pub axis: u8,
    pub side: i8,
    pub kind: FaceKind,
}

impl RobinFace {
    pub fn center(&self, lattice: &Lattice) -> Point3 {
        let mut c = lattice.center(self.cell);
        c[self.axis as usize] += 0.5 * self.side as f64 * lattice.spacing;
        c
    }
}

#[derive(Clone, Debug)]
pub struct MaskedGrid {
    pub lattice: Lattice,
    pub kinds: Vec<CellKind>,
    pub faces: Vec<RobinFace>,
    /// Holes digitized into the mask.
    pub resolved_holes: Vec<usize>,
    /// Holes with radius below half a cell, left out of the mask.
    pub dropped_holes: usize,
    /// Resolved holes with fewer than two cells per radius.
    pub coarse_holes: usize,
    pub interior_cells: usize,
}

impl MaskedGrid {
    pub fn faces_of_kind(&self, kind: FaceKind) -> usize {
        self.faces.iter().filter(|f| f.kind == kind).count()
    }

    pub fn hole_cells(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == CellKind::Hole).count()
    }
}

const MAX_LATTICE_CELLS: f64 = 2.0e9;

/// Classifies the lattice of spacing `h` covering `D` for the perforated domain.
pub fn build_mask(pd: &PerforatedDomain, h: f64) -> Result<MaskedGrid> {
    if !(h.is_finite() && h > 0.0) {
        return Err(param(format!("grid spacing must be positive, got {h}")));
    }
    if Lattice::covering_len(pd.domain(), h) > MAX_LATTICE_CELLS {
        return Err(Error::Resource(format!("lattice with spacing {h} is too large")));
    }
    build_mask_on(pd, Lattice::covering(pd.domain(), h)?)
}

pub fn build_mask_on(pd: &PerforatedDomain, lattice: Lattice) -> Result<MaskedGrid> {
    let h = lattice.spacing;
    let domain = pd.domain();
    let mut kinds: Vec<CellKind> = (0..lattice.len())
        .map(|i| {
            if domain.contains(lattice.center(i)) {
                CellKind::Interior
            } else {
                CellKind::Exterior
            }
        })
        .collect();

    let mut resolved_holes = Vec::new();
    let mut dropped = 0;
    let mut coarse = 0;
    for (idx, hole) in pd.holes().iter().enumerate() {
        if hole.radius < 0.5 * h {
            dropped += 1;
            continue;
        }
        if hole.radius < 2.0 * h {
            coarse += 1;
        }
        resolved_holes.push(idx);
        let a2 = hole.radius * hole.radius;
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for k in 0..3 {
            let l = ((hole.center[k] - hole.radius - lattice.origin[k]) / h - 0.5).floor();
            let u = ((hole.center[k] + hole.radius - lattice.origin[k]) / h - 0.5).ceil();
            lo[k] = l.max(0.0) as usize;
            hi[k] = (u.max(0.0) as usize).min(lattice.dims[k] - 1);
        }
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let li = lattice.index([i, j, k]);
                    if kinds[li] == CellKind::Interior && norm_sq(sub(lattice.center(li), hole.center)) <= a2 {
                        kinds[li] = CellKind::Hole;
                    }
                }
            }
        }
    }

    let mut faces = Vec::new();
    let mut interior = 0;
    for (li, &kind) in kinds.iter().enumerate() {
        if kind != CellKind::Interior {
            continue;
        }
        interior += 1;
        let c = lattice.coords(li);
        for axis in 0..3 {
            for side in [-1i8, 1] {
                let face_kind = match lattice.neighbor(c, axis, side) {
                    None => Some(FaceKind::Outer),
                    Some(n) => match kinds[lattice.index(n)] {
                        CellKind::Interior => None,
                        CellKind::Hole => Some(FaceKind::Hole),
                        CellKind::Exterior => Some(FaceKind::Outer),
                    },
                };
                if let Some(kind) = face_kind {
                    faces.push(RobinFace { cell: li, axis: axis as u8, side, kind });
                }
            }
        }
    }
    if interior == 0 {
        return Err(Error::Domain("mask has no interior cells".into()));
    }
    Ok(MaskedGrid {
        lattice,
        kinds,
        faces,
        resolved_holes,
        dropped_holes: dropped,
        coarse_holes: coarse,
        interior_cells: interior,
    })
}
