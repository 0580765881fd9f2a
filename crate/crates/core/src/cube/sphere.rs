//! Stereographic projection and topological cubes spanning two caps on
//! the sphere while avoiding a small obstacle.

use serde::Serialize;

use crate::error::{Error, Result};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn chordal(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Stereographic projection from the north pole:
/// `(x_1, ..., x_{n+1}) -> (x_1, ..., x_n) / (1 - x_{n+1})`.
/// Points within 1e-9 of the pole are a domain error.
pub fn stereographic(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    points
        .iter()
        .map(|x| {
            let dim = x.len();
            if dim < 2 {
                return Err(Error::parameter("points must lie on S^n, n >= 1"));
            }
            let r = norm(x);
            if (r - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "point off the unit sphere by {:.3e}",
                    (r - 1.0).abs()
                )));
            }
            let mut pole = vec![0.0; dim];
            pole[dim - 1] = 1.0;
            let dist_to_pole = chordal(x, &pole);
            if dist_to_pole < 1e-9 {
                return Err(Error::Domain(format!(
                    "point at distance {dist_to_pole:.3e} from the projection pole"
                )));
            }
            let s = 1.0 / (1.0 - x[dim - 1]);
            Ok(x[..dim - 1].iter().map(|&c| c * s).collect())
        })
        .collect()
}

/// Inverse stereographic projection: `y -> (2y, |y|^2 - 1) / (|y|^2 + 1)`.
pub fn inverse_stereographic(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|y| {
            let n2: f64 = y.iter().map(|c| c * c).sum();
            let s = 1.0 / (n2 + 1.0);
            let mut out: Vec<f64> = y.iter().map(|&c| 2.0 * c * s).collect();
            out.push((n2 - 1.0) * s);
            out
        })
        .collect()
}

/// A chordal cap on the sphere.
#[derive(Debug, Clone, Serialize)]
pub struct Cap {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Two caps and a small obstacle set, all pairwise `delta`-separated.
#[derive(Debug, Clone, Serialize)]
pub struct SphereConfig {
    /// Boundary dimension of the cube to build (the sphere is S^n).
    pub n: usize,
    pub b0: Cap,
    pub b1: Cap,
    pub obstacle: Vec<Vec<f64>>,
    pub delta: f64,
}

impl SphereConfig {
    pub fn validate(&self) -> Result<()> {
        let d = self.delta;
        if !(d > 0.0) {
            return Err(Error::Config("delta must be positive".into()));
        }
        let dim = self.n + 1;
        for (label, v) in [("b0", &self.b0.center), ("b1", &self.b1.center)] {
            if v.len() != dim || (norm(v) - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("{label} center must be a unit {dim}-vector")));
            }
        }
        if (self.b0.radius - d).abs() > 1e-12 || (self.b1.radius - d).abs() > 1e-12 {
            return Err(Error::Config("cap radii must equal delta".into()));
        }
        if self.obstacle.is_empty() {
            return Err(Error::Config("obstacle set must be non-empty".into()));
        }
        for e in &self.obstacle {
            if e.len() != dim || (norm(e) - 1.0).abs() > 1e-9 {
                return Err(Error::Config("obstacle points must be unit vectors".into()));
            }
        }
        // diam E < delta
        let mut diam_e = 0.0f64;
        for (i, a) in self.obstacle.iter().enumerate() {
            for b in &self.obstacle[i + 1..] {
                diam_e = diam_e.max(chordal(a, b));
            }
        }
        if diam_e >= d {
            return Err(Error::Config(format!("diam(E) = {diam_e} must be < delta = {d}")));
        }
        // dist(B0, B1) >= delta and dist(Bi, E) >= delta
        if chordal(&self.b0.center, &self.b1.center) - 2.0 * d < d {
            return Err(Error::Config("caps closer than delta".into()));
        }
        for e in &self.obstacle {
            if chordal(&self.b0.center, e) - d < d || chordal(&self.b1.center, e) - d < d {
                return Err(Error::Config("obstacle closer than delta to a cap".into()));
            }
        }
        Ok(())
    }
}

/// A topological cube on the sphere: the pull-back of an axis-aligned
/// Euclidean box under `rotation` followed by stereographic projection.
#[derive(Debug, Clone, Serialize)]
pub struct SphericalCube {
    pub n: usize,
    /// Orthogonal matrix applied to sphere points before projecting.
    pub rotation: Vec<Vec<f64>>,
    pub box_min: Vec<f64>,
    pub box_max: Vec<f64>,
    /// Min chordal distance between opposite-face samples.
    pub min_face_dist: f64,
    /// `min_face_dist / delta^3`.
    pub c_fit: f64,
    pub faces_in_caps: bool,
    pub disjoint_from_obstacle_cap: bool,
}

impl SphericalCube {
    /// Map a parameter point of `[0,1]^n` to the sphere.
    pub fn map(&self, t: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(k, &tk)| self.box_min[k] + tk * (self.box_max[k] - self.box_min[k]))
            .collect();
        let on_sphere = &inverse_stereographic(std::slice::from_ref(&y))[0];
        // apply rotation transpose (the inverse)
        let dim = self.n + 1;
        let mut out = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i] += self.rotation[j][i] * on_sphere[j];
            }
        }
        out
    }
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Rotation taking unit vector `u` to unit vector `e` (in their plane).
fn rotation_taking(u: &[f64], e: &[f64]) -> Vec<Vec<f64>> {
    let dim = u.len();
    let dot: f64 = u.iter().zip(e).map(|(a, b)| a * b).sum();
    let mut m: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    if dot < -1.0 + 1e-12 {
        // u ~ -e: rotate by pi in a plane containing u
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        // keep it orthogonal with determinant irrelevant for our use
        return m;
    }
    let mut w: Vec<f64> = u.iter().zip(e).map(|(a, b)| a + b).collect();
    let wn2: f64 = w.iter().map(|x| x * x).sum();
    for x in w.iter_mut() {
        *x /= wn2.sqrt();
    }
    // R = I - (u+e)(u+e)^T / (1 + u.e) + 2 e u^T
    for i in 0..dim {
        for j in 0..dim {
            m[i][j] -= w[i] * w[j] * wn2 / (1.0 + dot);
            m[i][j] += 2.0 * e[i] * u[j];
        }
    }
    m
}

/// Build a topological cube with opposite faces inside the two caps,
/// avoiding the obstacle cap: rotate the obstacle to the pole, project
/// stereographically, place an axis-aligned box between the cap images,
/// and pull back. Face properties are verified on a face sample.
pub fn cube_in_sphere(config: &SphereConfig, _seed: u64) -> Result<SphericalCube> {
    config.validate()?;
    let n = config.n;
    let dim = n + 1;
    let delta = config.delta;

    // obstacle centroid to the north pole
    let mut centroid = vec![0.0; dim];
    for e in &config.obstacle {
        for (c, x) in centroid.iter_mut().zip(e) {
            *c += x;
        }
    }
    let cn = norm(&centroid);
    if cn < 1e-12 {
        return Err(Error::Config("obstacle centroid degenerate".into()));
    }
    for c in centroid.iter_mut() {
        *c /= cn;
    }
    let mut pole = vec![0.0; dim];
    pole[dim - 1] = 1.0;
    let rot1 = rotation_taking(&centroid, &pole);

    let c0 = mat_vec(&rot1, &config.b0.center);
    let c1 = mat_vec(&rot1, &config.b1.center);
    let q0 = &stereographic(std::slice::from_ref(&c0))?[0];
    let q1 = &stereographic(std::slice::from_ref(&c1))?[0];

    // inner Euclidean radius of a projected cap: the minimum distance from
    // the projected center to the projected cap boundary, computed in the
    // plane through the pole and the cap center
    let inner_radius = |c: &[f64], q: &[f64]| -> f64 {
        // boundary points of the cap in the great circle through c and the
        // pole direction: c cos(t) +/- v sin(t) with chordal radius delta
        // => t = 2 asin(delta/2)
        let t = 2.0 * (delta / 2.0).asin();
        // v: unit vector in the plane (c, pole) orthogonal to c
        let cz = c[dim - 1];
        let mut v: Vec<f64> = (0..dim)
            .map(|i| if i == dim - 1 { 1.0 } else { 0.0 } - cz * c[i])
            .collect();
        let vn = norm(&v);
        if vn < 1e-9 {
            return f64::INFINITY; // cap centered at the pole: excluded by validate
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        let mut best = f64::INFINITY;
        for sign in [-1.0, 1.0] {
            let b: Vec<f64> = (0..dim)
                .map(|i| c[i] * t.cos() + sign * v[i] * t.sin())
                .collect();
            if let Ok(pb) = stereographic(std::slice::from_ref(&b)) {
                best = best.min(chordal(&pb[0], q));
            }
        }
        best
    };
    let r0 = inner_radius(&c0, q0);
    let r1 = inner_radius(&c1, q1);

    // rotate about the pole so q1 - q0 points along e_1
    let dir: Vec<f64> = q1.iter().zip(q0).map(|(a, b)| a - b).collect();
    let dn = norm(&dir);
    if dn < 1e-12 {
        return Err(Error::Config("projected cap centers coincide".into()));
    }
    let e1: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    let dir_unit: Vec<f64> = dir.iter().map(|x| x / dn).collect();
    let rot2n = rotation_taking(&dir_unit, &e1);
    // embed rot2n into dim x dim (fixing the last coordinate)
    let mut rot2: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for i in 0..n {
        for j in 0..n {
            rot2[i][j] = rot2n[i][j];
        }
    }
    // total rotation
    let rotation: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| rot2[i][k] * rot1[k][j]).sum())
                .collect()
        })
        .collect();

    let q0r = mat_vec(&rot2n, q0);
    let q1r = mat_vec(&rot2n, q1);

    // axis-aligned box: x_1 spans [q0r_1, q1r_1]; transverse half-width
    // from the smaller inner radius
    let w = r0.min(r1) / (2.0 * ((n.max(2) - 1) as f64).sqrt());
    let mut box_min = vec![0.0; n];
    let mut box_max = vec![0.0; n];
    box_min[0] = q0r[0];
    box_max[0] = q1r[0];
    if box_min[0] > box_max[0] {
        std::mem::swap(&mut box_min[0], &mut box_max[0]);
    }
    for k in 1..n {
        let center = 0.5 * (q0r[k] + q1r[k]); // equal transverse coords
        box_min[k] = center - w;
        box_max[k] = center + w;
    }

    // verify on face samples
    let face_grid = 9usize;
    let sample_face = |axis: usize, side: f64| -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let mut t = vec![0.0; n];
            for k in 0..n {
                t[k] = if k == axis {
                    side
                } else {
                    idx[k] as f64 / (face_grid - 1) as f64
                };
            }
            pts.push(t);
            let mut k = 0;
            loop {
                if k == axis {
                    k += 1;
                    if k == n {
                        return pts;
                    }
                    continue;
                }
                idx[k] += 1;
                if idx[k] < face_grid {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == n {
                    return pts;
                }
            }
        }
    };

    let cube = SphericalCube {
        n,
        rotation,
        box_min,
        box_max,
        min_face_dist: 0.0,
        c_fit: 0.0,
        faces_in_caps: false,
        disjoint_from_obstacle_cap: false,
    };

    let mut min_face_dist = f64::INFINITY;
    for axis in 0..n {
        let fa: Vec<Vec<f64>> = sample_face(axis, 0.0).iter().map(|t| cube.map(t)).collect();
        let fb: Vec<Vec<f64>> = sample_face(axis, 1.0).iter().map(|t| cube.map(t)).collect();
        for a in &fa {
            for b in &fb {
                min_face_dist = min_face_dist.min(chordal(a, b));
            }
        }
    }

    // face 0 of axis 0 must land in b0, face 1 in b1 (or swapped)
    let f0: Vec<Vec<f64>> = sample_face(0, 0.0).iter().map(|t| cube.map(t)).collect();
    let f1: Vec<Vec<f64>> = sample_face(0, 1.0).iter().map(|t| cube.map(t)).collect();
    let within = |pts: &[Vec<f64>], cap: &Cap| {
        pts.iter()
            .all(|p| chordal(p, &cap.center) <= cap.radius + 1e-9)
    };
    let faces_in_caps = (within(&f0, &config.b0) && within(&f1, &config.b1))
        || (within(&f0, &config.b1) && within(&f1, &config.b0));

    // whole cube sample disjoint from the delta-cap around the obstacle
    let mut disjoint = true;
    'outer: for axis in 0..n {
        for side in [0.0, 1.0] {
            for t in sample_face(axis, side) {
                let p = cube.map(&t);
                for e in &config.obstacle {
                    if chordal(&p, e) <= delta {
                        disjoint = false;
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(SphericalCube {
        min_face_dist,
        c_fit: min_face_dist / delta.powi(3),
        faces_in_caps,
        disjoint_from_obstacle_cap: disjoint,
        ..cube
    })
}
