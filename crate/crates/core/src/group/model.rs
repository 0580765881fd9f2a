//! Hyperbolic plane / 3-space models with exact matrix isometries and
//! their boundary circles/spheres in the chordal metric.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::MobiusIsometry;

/// Which exact model the matrices act on: real matrices on the upper
/// half-plane (boundary S^1), complex matrices on upper half-space
/// (boundary S^2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    H2,
    H3,
}

/// Interior point of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    /// z with Im z > 0.
    H2(Complex64),
    /// (z, t) with t > 0.
    H3(Complex64, f64),
}

/// Boundary point: a unit vector on S^1 (as a unit-modulus complex number,
/// the Cayley image of the real line) or on S^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Circle(Complex64),
    Sphere([f64; 3]),
}

impl BoundaryPoint {
    /// Chordal metric: the Euclidean distance between unit vectors.
    pub fn chordal(&self, other: &BoundaryPoint) -> f64 {
        match (self, other) {
            (BoundaryPoint::Circle(a), BoundaryPoint::Circle(b)) => (a - b).norm(),
            (BoundaryPoint::Sphere(a), BoundaryPoint::Sphere(b)) => {
                let dx = a[0] - b[0];
                let dy = a[1] - b[1];
                let dz = a[2] - b[2];
                (dx * dx + dy * dy + dz * dz).sqrt()
            }
            _ => f64::NAN,
        }
    }

    pub fn unit_defect(&self) -> f64 {
        match self {
            BoundaryPoint::Circle(a) => (a.norm() - 1.0).abs(),
            BoundaryPoint::Sphere(a) => {
                ((a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt() - 1.0).abs()
            }
        }
    }

    /// Quantized key for tolerance-based dedup.
    pub fn key(&self, quantum: f64) -> [i64; 3] {
        let q = |x: f64| (x / quantum).round() as i64;
        match self {
            BoundaryPoint::Circle(a) => [q(a.re), q(a.im), 0],
            BoundaryPoint::Sphere(a) => [q(a[0]), q(a[1]), q(a[2])],
        }
    }

    /// Point on S^1 at the given angle.
    pub fn circle(theta: f64) -> BoundaryPoint {
        BoundaryPoint::Circle(Complex64::new(theta.cos(), theta.sin()))
    }
}

/// Cayley transform sending the extended real line to the unit circle,
/// `x -> (x - i)/(x + i)`, handled projectively so infinity maps to 1.
pub fn cayley_to_circle(num: Complex64, den: Complex64) -> Complex64 {
    // [x : 1] -> [x - i : x + i]
    let p = num - Complex64::i() * den;
    let q = num + Complex64::i() * den;
    let u = p / q;
    u / u.norm()
}

/// Stereographic chart pair for a point of the Riemann sphere; returns a
/// homogeneous pair [p : q] with z = p/q.
pub fn sphere_to_chart(u: &[f64; 3]) -> (Complex64, Complex64) {
    if u[2] <= 0.0 {
        (Complex64::new(u[0], u[1]), Complex64::new(1.0 - u[2], 0.0))
    } else {
        (Complex64::new(1.0 + u[2], 0.0), Complex64::new(u[0], -u[1]))
    }
}

/// Inverse of `sphere_to_chart` for any homogeneous pair.
pub fn chart_to_sphere(p: Complex64, q: Complex64) -> [f64; 3] {
    let np = p.norm_sqr();
    let nq = q.norm_sqr();
    let denom = np + nq;
    let pqc = p * q.conj();
    let mut u = [2.0 * pqc.re / denom, 2.0 * pqc.im / denom, (np - nq) / denom];
    let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    for c in u.iter_mut() {
        *c /= norm;
    }
    u
}

/// A generating set of Mobius isometries with a base point. The generator
/// list is closed under inverses; `inverse_of(i)` locates the inverse of
/// generator `i` in the list.
#[derive(Debug, Clone)]
pub struct GroupActionModel {
    pub kind: ModelKind,
    gens: Vec<MobiusIsometry>,
    inv_of: Vec<usize>,
    base: Point,
    label: String,
}

impl GroupActionModel {
    /// Build a model; inverses are appended when missing, identities rejected.
    pub fn new(
        kind: ModelKind,
        generators: Vec<MobiusIsometry>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::parameter("need at least one generator"));
        }
        let mut gens: Vec<MobiusIsometry> = Vec::new();
        for g in generators {
            if g.is_identity(1e-9) {
                return Err(Error::parameter("identity is not a valid generator"));
            }
            if kind == ModelKind::H2 && !g.is_real(1e-9) {
                return Err(Error::Domain(
                    "H2 generators must be real matrices".into(),
                ));
            }
            if !gens.iter().any(|h| h.key(1e-9) == g.key(1e-9)) {
                gens.push(g);
            }
        }
        // close under inverses
        let mut i = 0;
        while i < gens.len() {
            let inv = gens[i].inverse();
            if !gens.iter().any(|h| h.key(1e-9) == inv.key(1e-9)) {
                gens.push(inv);
            }
            i += 1;
        }
        let inv_of: Vec<usize> = gens
            .iter()
            .map(|g| {
                let key = g.inverse().key(1e-9);
                gens.iter().position(|h| h.key(1e-9) == key).unwrap()
            })
            .collect();
        let base = match kind {
            ModelKind::H2 => Point::H2(Complex64::i()),
            ModelKind::H3 => Point::H3(Complex64::new(0.0, 0.0), 1.0),
        };
        Ok(GroupActionModel {
            kind,
            gens,
            inv_of,
            base,
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Generators, closed under inverses.
    pub fn generators(&self) -> &[MobiusIsometry] {
        &self.gens
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inv_of[i]
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn set_base(&mut self, p: Point) -> Result<()> {
        match (self.kind, &p) {
            (ModelKind::H2, Point::H2(z)) if z.im > 0.0 => {}
            (ModelKind::H3, Point::H3(_, t)) if *t > 0.0 => {}
            _ => {
                return Err(Error::Domain(
                    "base point must be interior to the model".into(),
                ))
            }
        }
        self.base = p;
        Ok(())
    }

    /// Boundary dimension: 1 for S^1, 2 for S^2.
    pub fn boundary_dim(&self) -> usize {
        match self.kind {
            ModelKind::H2 => 1,
            ModelKind::H3 => 2,
        }
    }

    /// Exact hyperbolic distance.
    pub fn dist(&self, p: &Point, q: &Point) -> f64 {
        match (p, q) {
            (Point::H2(z), Point::H2(w)) => {
                let arg = 1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im);
                arg.max(1.0).acosh()
            }
            (Point::H3(z, t), Point::H3(w, s)) => {
                let arg = 1.0 + ((z - w).norm_sqr() + (t - s) * (t - s)) / (2.0 * t * s);
                arg.max(1.0).acosh()
            }
            _ => f64::NAN,
        }
    }

    /// Apply an isometry to an interior point.
    pub fn apply(&self, g: &MobiusIsometry, p: &Point) -> Point {
        let [[a, b], [c, d]] = g.m;
        match p {
            Point::H2(z) => Point::H2((a * z + b) / (c * z + d)),
            Point::H3(z, t) => {
                let cz_d = c * z + d;
                let denom = cz_d.norm_sqr() + c.norm_sqr() * t * t;
                let num = (a * z + b) * cz_d.conj() + a * c.conj() * t * t;
                Point::H3(num / denom, t / denom)
            }
        }
    }

    /// Disk-model matrix of a half-plane isometry (conjugation by the
    /// Cayley transform); acts directly on the unit circle.
    pub fn disk_matrix(&self, g: &MobiusIsometry) -> MobiusIsometry {
        // K = [[1, -i], [1, i]], K^{-1} = [[1/2, 1/2], [i/2, -i/2]]
        let i = Complex64::i();
        let [[a, b], [c, d]] = g.m;
        let half = Complex64::new(0.5, 0.0);
        // K g:
        let r0 = [a - i * c, b - i * d];
        let r1 = [a + i * c, b + i * d];
        // (K g) K^{-1}:
        let m = [
            [
                half * (r0[0] + i * r0[1]),
                half * (r0[0] - i * r0[1]),
            ],
            [
                half * (r1[0] + i * r1[1]),
                half * (r1[0] - i * r1[1]),
            ],
        ];
        MobiusIsometry::new(m).expect("conjugate of an invertible matrix")
    }

    /// Matrix acting directly on boundary points: the Cayley conjugate for
    /// the half-plane model, the matrix itself for upper half-space.
    /// Composition of boundary matrices matches composition of isometries,
    /// so word enumerations can stay in boundary coordinates.
    pub fn boundary_matrix(&self, g: &MobiusIsometry) -> MobiusIsometry {
        match self.kind {
            ModelKind::H2 => self.disk_matrix(g),
            ModelKind::H3 => *g,
        }
    }

    /// Apply a pre-converted boundary matrix (see `boundary_matrix`).
    pub fn boundary_matrix_apply(&self, m: &MobiusIsometry, u: &BoundaryPoint) -> BoundaryPoint {
        match u {
            BoundaryPoint::Circle(z) => {
                let [[a, b], [c, d]] = m.m;
                let v = (a * z + b) / (c * z + d);
                BoundaryPoint::Circle(v / v.norm())
            }
            BoundaryPoint::Sphere(u3) => {
                let (p, q) = sphere_to_chart(u3);
                let [[a, b], [c, d]] = m.m;
                BoundaryPoint::Sphere(chart_to_sphere(a * p + b * q, c * p + d * q))
            }
        }
    }

    /// Boundary action in the chordal model.
    pub fn boundary_apply(&self, g: &MobiusIsometry, u: &BoundaryPoint) -> BoundaryPoint {
        self.boundary_matrix_apply(&self.boundary_matrix(g), u)
    }

    /// Boundary point of the model matching its kind, from an angle
    /// (H2: position on S^1) or chart point (H3).
    pub fn validate_boundary(&self, u: &BoundaryPoint) -> Result<()> {
        let ok = matches!(
            (self.kind, u),
            (ModelKind::H2, BoundaryPoint::Circle(_)) | (ModelKind::H3, BoundaryPoint::Sphere(_))
        );
        if !ok {
            return Err(Error::Domain(
                "boundary point does not match the model kind".into(),
            ));
        }
        let defect = u.unit_defect();
        if defect > 1e-12 {
            return Err(Error::Domain(format!(
                "boundary point off the unit sphere by {defect:.3e}"
            )));
        }
        Ok(())
    }

    /// The boundary image of an extended-real fixed point (H2 models).
    pub fn circle_from_projective(&self, num: Complex64, den: Complex64) -> BoundaryPoint {
        BoundaryPoint::Circle(cayley_to_circle(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::psl2z;

    #[test]
    fn h2_distance_along_axis() {
        let m = psl2z().unwrap();
        let p = Point::H2(Complex64::i());
        let q = Point::H2(Complex64::new(0.0, std::f64::consts::E));
        assert!((m.dist(&p, &q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generators_closed_under_inverses() {
        let m = psl2z().unwrap();
        for (i, g) in m.generators().iter().enumerate() {
            let j = m.inverse_of(i);
            assert!(g.compose(&m.generators()[j]).is_identity(1e-9));
        }
    }

    #[test]
    fn isometry_invariance_of_distance() {
        let m = psl2z().unwrap();
        let p = Point::H2(Complex64::new(0.3, 1.7));
        let q = Point::H2(Complex64::new(-1.2, 0.4));
        for g in m.generators() {
            let gp = m.apply(g, &p);
            let gq = m.apply(g, &q);
            assert!((m.dist(&gp, &gq) - m.dist(&p, &q)).abs() < 1e-9);
        }
    }

    #[test]
    fn cayley_endpoints() {
        // 0 -> -i... the Cayley map sends 0 to (0-i)/(0+i) = -1... check: -i/i = -1
        let u = cayley_to_circle(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((u - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        // infinity -> 1
        let u = cayley_to_circle(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((u - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sphere_chart_round_trip() {
        let pts = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [0.6, 0.48, 0.64],
        ];
        for u in pts {
            let (p, q) = sphere_to_chart(&u);
            let v = chart_to_sphere(p, q);
            for k in 0..3 {
                assert!((u[k] - v[k]).abs() < 1e-12, "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn boundary_action_stays_on_circle() {
        let m = psl2z().unwrap();
        for g in m.generators() {
            for t in [0.1f64, 1.0, 2.5, 4.4] {
                let u = BoundaryPoint::circle(t);
                let v = m.boundary_apply(g, &u);
                assert!(v.unit_defect() < 1e-12);
            }
        }
    }
}
