//! Uniform-cell spatial hash over points in R³.

use std::collections::HashMap;

use crate::geometry::Point3;

type CellKey = [i64; 3];

#[derive(Clone, Debug)]
pub struct SpatialHash {
    cell_size: f64,
    inv_cell_size: f64,
    cells: HashMap<CellKey, Vec<u32>>,
}

impl SpatialHash {
    pub fn new(cell_size: f64) -> Self {
        assert!(cell_size.is_finite() && cell_size > 0.0, "cell size must be positive");
        SpatialHash { cell_size, inv_cell_size: 1.0 / cell_size, cells: HashMap::new() }
    }

    pub fn from_points<'a, I>(cell_size: f64, points: I) -> Self
    where
        I: IntoIterator<Item = &'a Point3>,
    {
        let mut h = SpatialHash::new(cell_size);
        for (i, p) in points.into_iter().enumerate() {
            h.insert(i as u32, *p);
        }
        h
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    fn key(&self, p: Point3) -> CellKey {
        [
            (p[0] * self.inv_cell_size).floor() as i64,
            (p[1] * self.inv_cell_size).floor() as i64,
            (p[2] * self.inv_cell_size).floor() as i64,
        ]
    }

    pub fn insert(&mut self, id: u32, p: Point3) {
        let k = self.key(p);
        self.cells.entry(k).or_default().push(id);
    }

    /// Calls `f` for every stored id whose point lies in the cells overlapping
    /// the cube of half-side `radius` around `center`. This is a superset of
    /// the points within `radius` of `center`.
    pub fn for_each_candidate<F: FnMut(u32)>(&self, center: Point3, radius: f64, mut f: F) {
        let lo = self.key([center[0] - radius, center[1] - radius, center[2] - radius]);
        let hi = self.key([center[0] + radius, center[1] + radius, center[2] + radius]);
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    if let Some(ids) = self.cells.get(&[i, j, k]) {
                        ids.iter().copied().for_each(&mut f);
                    }
                }
            }
        }
    }

    pub fn candidates(&self, center: Point3, radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_candidate(center, radius, |id| out.push(id));
        out
    }
}
