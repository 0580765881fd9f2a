//! Covers of the unit cube by finite unions of open boxes, with a
//! membership grid for coverage checks and witness points.

use serde::{Deserialize, Serialize};

use crate::cube::Boxn;
use crate::error::{Error, Result};

/// Default membership-grid resolution per dimension.
pub fn default_grid_res(n: usize) -> usize {
    match n {
        1 => 4096,
        2 => 512,
        _ => 64,
    }
}

/// A cover of `[0,1]^n` by sets, each a finite union of open boxes.
/// Coverage is verified on a uniform grid of cell centers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeCover {
    pub n: usize,
    pub sets: Vec<Vec<Boxn>>,
    pub grid_res: usize,
}

impl CubeCover {
    /// Validate dimensions, nonemptiness, and grid coverage.
    pub fn new(n: usize, sets: Vec<Vec<Boxn>>, grid_res: usize) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::parameter(format!(
                "cube dimension must be 1..=3, got {n}"
            )));
        }
        if grid_res < 2 {
            return Err(Error::parameter("grid resolution must be at least 2"));
        }
        if sets.is_empty() {
            return Err(Error::parameter("cover needs at least one set"));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() || !set.iter().any(|b| b.is_nonempty()) {
                return Err(Error::parameter(format!("set {i} is empty")));
            }
            if set.iter().any(|b| b.dim() != n) {
                return Err(Error::Shape(format!("set {i} has a box of wrong dimension")));
            }
        }
        let cover = CubeCover { n, sets, grid_res };
        let counts = cover.grid_cover_counts();
        if let Some(cell) = counts.iter().position(|&c| c == 0) {
            let p = cover.cell_center(cell);
            return Err(Error::Invariant(format!(
                "grid point {p:?} is not covered by any set"
            )));
        }
        Ok(cover)
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn cell_count(&self) -> usize {
        self.grid_res.pow(self.n as u32)
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let mut idx = cell;
        let mut p = vec![0.0; self.n];
        for k in 0..self.n {
            p[k] = (idx % self.grid_res) as f64;
            idx /= self.grid_res;
        }
        p.iter_mut()
            .for_each(|x| *x = (*x + 0.5) / self.grid_res as f64);
        p
    }

    /// Rasterize one box: the grid cells whose centers it contains,
    /// visited through `f(cell_index)`.
    fn rasterize(&self, b: &Boxn, f: &mut impl FnMut(usize)) {
        let res = self.grid_res;
        let resf = res as f64;
        // center c_i = (i + 0.5)/res lies in (min, max) iff
        // i > min*res - 0.5 and i < max*res - 0.5
        let mut lo = vec![0usize; self.n];
        let mut hi = vec![0usize; self.n];
        for k in 0..self.n {
            let l = (b.min[k] * resf - 0.5).floor() as i64 + 1;
            let h = (b.max[k] * resf - 0.5).ceil() as i64 - 1;
            let l = l.max(0);
            let h = h.min(res as i64 - 1);
            if l > h {
                return;
            }
            lo[k] = l as usize;
            hi[k] = h as usize;
        }
        let mut idx = lo.clone();
        loop {
            let mut cell = 0usize;
            for k in (0..self.n).rev() {
                cell = cell * res + idx[k];
            }
            f(cell);
            // increment odometer
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] <= hi[k] {
                    break;
                }
                idx[k] = lo[k];
                k += 1;
                if k == self.n {
                    return;
                }
            }
        }
    }

    /// Number of covering sets per grid cell.
    pub fn grid_cover_counts(&self) -> Vec<u16> {
        let mut counts = vec![0u16; self.cell_count()];
        for set in &self.sets {
            let mut marked = vec![false; 0];
            if set.len() > 1 {
                // avoid double counting cells covered by several boxes of
                // the same set
                marked = vec![false; self.cell_count()];
            }
            for b in set {
                self.rasterize(b, &mut |cell| {
                    if set.len() > 1 {
                        if marked[cell] {
                            return;
                        }
                        marked[cell] = true;
                    }
                    counts[cell] = counts[cell].saturating_add(1);
                });
            }
        }
        counts
    }

    /// Per-cell owner when covered by exactly one set.
    pub fn grid_unique_owner(&self) -> Vec<Option<u16>> {
        let counts = self.grid_cover_counts();
        let mut owner: Vec<Option<u16>> = vec![None; self.cell_count()];
        for (s, set) in self.sets.iter().enumerate() {
            for b in set {
                self.rasterize(b, &mut |cell| {
                    if counts[cell] == 1 {
                        owner[cell] = Some(s as u16);
                    }
                });
            }
        }
        owner
    }

    /// Exact set-set open intersection (any box pair intersects).
    pub fn sets_intersect(&self, a: usize, b: usize) -> bool {
        self.sets[a]
            .iter()
            .any(|ba| self.sets[b].iter().any(|bb| ba.intersects(bb)))
    }

    /// Does a set meet the face `{x_axis = side}`?
    pub fn set_meets_face(&self, s: usize, axis: usize, side: f64) -> bool {
        self.sets[s].iter().any(|b| b.meets_face(axis, side))
    }

    /// Nerve adjacency lists (exact box intersections).
    pub fn nerve(&self) -> Vec<Vec<u32>> {
        let n = self.set_count();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in (a + 1)..n {
                if self.sets_intersect(a, b) {
                    adj[a].push(b as u32);
                    adj[b].push(a as u32);
                }
            }
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_cube_single_set() {
        let b = Boxn::new(vec![-0.1, -0.1], vec![1.1, 1.1]);
        let c = CubeCover::new(2, vec![vec![b]], 64).unwrap();
        assert_eq!(c.set_count(), 1);
        assert!(c.set_meets_face(0, 0, 0.0) && c.set_meets_face(0, 0, 1.0));
    }

    #[test]
    fn uncovered_grid_rejected() {
        let b = Boxn::new(vec![-0.1, -0.1], vec![0.5, 1.1]);
        let r = CubeCover::new(2, vec![vec![b]], 64);
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn rasterize_counts_match_direct_membership() {
        let b = Boxn::new(vec![0.21, 0.4], vec![0.55, 0.91]);
        let big = Boxn::new(vec![-0.1, -0.1], vec![1.1, 1.1]);
        let c = CubeCover::new(2, vec![vec![big], vec![b.clone()]], 37).unwrap();
        let counts = c.grid_cover_counts();
        for cell in 0..c.cell_count() {
            let p = c.cell_center(cell);
            let expect = 1 + b.contains(&p) as u16;
            assert_eq!(counts[cell], expect, "cell {cell} at {p:?}");
        }
    }
}
