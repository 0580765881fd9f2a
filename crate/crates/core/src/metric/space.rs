//! The universal input object: an indexed point set with a symmetric
//! distance matrix, optionally carrying ambient coordinates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the triangle-inequality check, scaled by the
/// diameter to absorb float noise in generated snowflakes.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// How thoroughly to validate the triangle inequality on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    /// Every triple; O(n^3).
    Full,
    /// A seeded sample of this many triples.
    Sampled(usize),
    /// Skip the triangle check (symmetry and positivity are always checked).
    Off,
    /// `Full` up to 600 points, `Sampled(200_000)` beyond.
    Auto,
}

/// Finite metric space over indexed points.
///
/// Distances are stored as given by the caller (pre-scale before
/// construction if desired); the diameter, minimum positive distance and
/// mesh (the largest nearest-neighbour distance) are cached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    label: String,
    n: usize,
    dist: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
    diam: f64,
    min_dist: f64,
    mesh: f64,
}

impl FiniteMetricSpace {
    /// Build from a row-major `n x n` distance matrix.
    pub fn new(
        label: impl Into<String>,
        n: usize,
        dist: Vec<f64>,
        coords: Option<Vec<Vec<f64>>>,
        validation: Validation,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::parameter("metric space needs at least one point"));
        }
        if dist.len() != n * n {
            return Err(Error::Shape(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::Shape(format!(
                    "{} coordinate rows for {} points",
                    c.len(),
                    n
                )));
            }
        }

        let mut diam = 0.0f64;
        let mut min_dist = f64::INFINITY;
        let mut mesh = 0.0f64;
        for i in 0..n {
            let dii = dist[i * n + i];
            if dii != 0.0 {
                return Err(Error::Metric(format!("dist[{i}][{i}] = {dii}, expected 0")));
            }
            let mut nearest = f64::INFINITY;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = dist[i * n + j];
                if !d.is_finite() || d <= 0.0 {
                    return Err(Error::Metric(format!(
                        "dist[{i}][{j}] = {d}, expected finite > 0"
                    )));
                }
                if d != dist[j * n + i] {
                    return Err(Error::Metric(format!("dist[{i}][{j}] != dist[{j}][{i}]")));
                }
                diam = diam.max(d);
                min_dist = min_dist.min(d);
                nearest = nearest.min(d);
            }
            if nearest.is_finite() {
                mesh = mesh.max(nearest);
            }
        }
        if n == 1 {
            min_dist = 0.0;
        }

        let space = FiniteMetricSpace {
            label: label.into(),
            n,
            dist,
            coords,
            diam,
            min_dist,
            mesh,
        };
        space.check_triangles(validation)?;
        Ok(space)
    }

    /// Build directly from ambient coordinates with the Euclidean metric.
    pub fn from_points(
        label: impl Into<String>,
        coords: Vec<Vec<f64>>,
        validation: Validation,
    ) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::parameter("metric space needs at least one point"));
        }
        let dim = coords[0].len();
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::Shape("ragged coordinate rows".into()));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&coords[i], &coords[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::new(label, n, dist, Some(coords), validation)
    }

    fn check_triangles(&self, validation: Validation) -> Result<()> {
        let n = self.n;
        let tol = TRIANGLE_TOL * self.diam;
        let mode = match validation {
            Validation::Auto => {
                if n <= 600 {
                    Validation::Full
                } else {
                    Validation::Sampled(200_000)
                }
            }
            other => other,
        };
        let check = |i: usize, j: usize, k: usize| -> Result<()> {
            let dij = self.dist(i, j);
            let djk = self.dist(j, k);
            let dik = self.dist(i, k);
            if dik > dij + djk + tol {
                return Err(Error::Metric(format!(
                    "triangle inequality fails: d({i},{k}) = {dik} > d({i},{j}) + d({j},{k}) = {}",
                    dij + djk
                )));
            }
            Ok(())
        };
        match mode {
            Validation::Off => {}
            Validation::Full => {
                for i in 0..n {
                    for j in 0..n {
                        if j == i {
                            continue;
                        }
                        for k in 0..n {
                            if k == i || k == j {
                                continue;
                            }
                            check(i, j, k)?;
                        }
                    }
                }
            }
            Validation::Sampled(budget) => {
                if n >= 3 {
                    let mut rng = ChaCha8Rng::seed_from_u64(0);
                    for _ in 0..budget {
                        let i = rng.gen_range(0..n);
                        let j = rng.gen_range(0..n);
                        let k = rng.gen_range(0..n);
                        if i != j && j != k && i != k {
                            check(i, j, k)?;
                        }
                    }
                }
            }
            Validation::Auto => unreachable!(),
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Minimum positive pairwise distance (0 for a single point).
    pub fn min_dist(&self) -> f64 {
        self.min_dist
    }

    /// Max over points of the distance to the nearest other point.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn raw_dist(&self) -> &[f64] {
        &self.dist
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Four pairwise-distinct point indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple(pub [usize; 4]);

impl Quadruple {
    pub fn new(i1: usize, i2: usize, i3: usize, i4: usize) -> Result<Self> {
        let q = [i1, i2, i3, i4];
        for a in 0..4 {
            for b in (a + 1)..4 {
                if q[a] == q[b] {
                    return Err(Error::InvalidQuadruple(q));
                }
            }
        }
        Ok(Quadruple(q))
    }

    /// Swap the first two entries; inverts the cross-ratio.
    pub fn swap_first_two(self) -> Self {
        let [a, b, c, d] = self.0;
        Quadruple([b, a, c, d])
    }
}

/// Metric cross-ratio `d(x1,x3) d(x2,x4) / (d(x1,x4) d(x2,x3))`.
pub fn cross_ratio(space: &FiniteMetricSpace, q: Quadruple) -> Result<f64> {
    let [i1, i2, i3, i4] = q.0;
    let n = space.len();
    if i1 >= n || i2 >= n || i3 >= n || i4 >= n {
        return Err(Error::parameter(format!(
            "quadruple index out of range for {n} points: {:?}",
            q.0
        )));
    }
    Ok(space.dist(i1, i3) * space.dist(i2, i4) / (space.dist(i1, i4) * space.dist(i2, i3)))
}

/// Snowflake transform: replace every distance `d` by `d^eps`, `0 < eps <= 1`.
///
/// De-snowflaking by exponents above 1 is rejected here; inverting a
/// snowflake is the job of the chain-metric machinery.
pub fn snowflake(space: &FiniteMetricSpace, eps: f64) -> Result<FiniteMetricSpace> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::parameter(format!(
            "snowflake exponent must lie in (0, 1], got {eps}"
        )));
    }
    let n = space.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i * n + j] = space.dist(i, j).powf(eps);
            }
        }
    }
    FiniteMetricSpace::new(
        format!("{}^{eps}", space.label()),
        n,
        dist,
        space.coords().map(|c| c.to_vec()),
        Validation::Auto,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line_space(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_points(
            "line",
            xs.iter().map(|&x| vec![x]).collect(),
            Validation::Full,
        )
        .unwrap()
    }

    #[test]
    fn line_cross_ratio() {
        let s = line_space(&[0.0, 1.0, 2.0, 3.0]);
        let q = Quadruple::new(0, 1, 2, 3).unwrap();
        let cr = cross_ratio(&s, q).unwrap();
        assert!((cr - 4.0 / 3.0).abs() < 1e-15, "got {cr}");
    }

    #[test]
    fn unit_square_cross_ratio() {
        // corners in cyclic order
        let s = FiniteMetricSpace::from_points(
            "square",
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
            Validation::Full,
        )
        .unwrap();
        let cr = cross_ratio(&s, Quadruple::new(0, 1, 2, 3).unwrap()).unwrap();
        assert!((cr - 2.0).abs() < 1e-12, "got {cr}");
    }

    #[test]
    fn swap_inverts() {
        let s = line_space(&[0.0, 0.7, 1.9, 5.3, 9.2]);
        for q in [
            Quadruple::new(0, 1, 2, 3).unwrap(),
            Quadruple::new(4, 2, 0, 1).unwrap(),
            Quadruple::new(3, 0, 4, 2).unwrap(),
        ] {
            let a = cross_ratio(&s, q).unwrap();
            let b = cross_ratio(&s, q.swap_first_two()).unwrap();
            assert!((a * b - 1.0).abs() < 1e-12, "product {}", a * b);
        }
    }

    #[test]
    fn duplicate_indices_rejected() {
        assert!(matches!(
            Quadruple::new(0, 1, 1, 3),
            Err(Error::InvalidQuadruple(_))
        ));
    }

    #[test]
    fn snowflake_identity_and_sqrt() {
        let s = line_space(&[0.0, 9.0]);
        let id = snowflake(&s, 1.0).unwrap();
        assert_eq!(id.dist(0, 1), 9.0);
        let half = snowflake(&s, 0.5).unwrap();
        assert!((half.dist(0, 1) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn snowflake_rejects_bad_eps() {
        let s = line_space(&[0.0, 1.0]);
        for eps in [0.0, -0.5, 1.5, 2.0] {
            assert!(snowflake(&s, eps).is_err(), "eps {eps} should be rejected");
        }
    }

    #[test]
    fn snowflake_cross_ratio_power_law() {
        let s = line_space(&[0.0, 0.4, 1.1, 2.8, 4.5]);
        let eps = 0.37;
        let t = snowflake(&s, eps).unwrap();
        for q in [
            Quadruple::new(0, 1, 2, 3).unwrap(),
            Quadruple::new(4, 1, 3, 0).unwrap(),
        ] {
            let a = cross_ratio(&s, q).unwrap();
            let b = cross_ratio(&t, q).unwrap();
            assert!((b - a.powf(eps)).abs() < 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn triangle_validation_catches_violation() {
        // d(0,2) = 5 > 1 + 1
        let dist = vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0];
        let r = FiniteMetricSpace::new("bad", 3, dist, None, Validation::Full);
        assert!(matches!(r, Err(Error::Metric(_))));
    }

    #[test]
    fn caches_diam_min_mesh() {
        let s = line_space(&[0.0, 0.25, 1.0, 4.0]);
        assert_eq!(s.diam(), 4.0);
        assert_eq!(s.min_dist(), 0.25);
        // nearest-neighbour distances: 0.25, 0.25, 0.75, 3.0
        assert_eq!(s.mesh(), 3.0);
    }
}

#[cfg(test)]
pub(crate) use tests::line_space;
