//! 2x2 determinant-one matrices as Mobius maps, sign-canonicalized so a
//! matrix and its negative compare equal.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A Mobius isometry: real entries act on the upper half-plane (and on its
/// circle boundary through the Cayley transform), complex entries act on
/// upper half-space with boundary the Riemann sphere.
#[derive(Debug, Clone, Copy)]
pub struct MobiusIsometry {
    /// Row-major `[[a, b], [c, d]]`, `ad - bc = 1`.
    pub m: [[Complex64; 2]; 2],
}

impl MobiusIsometry {
    /// Normalize the determinant to 1 and canonicalize the sign.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-14 {
            return Err(Error::Domain("matrix is singular".into()));
        }
        let s = det.sqrt();
        let mut out = [
            [m[0][0] / s, m[0][1] / s],
            [m[1][0] / s, m[1][1] / s],
        ];
        canonicalize_sign(&mut out);
        let g = MobiusIsometry { m: out };
        // det residue is cancellation-limited: scales with entry^2
        debug_assert!(
            (g.det() - Complex64::new(1.0, 0.0)).norm()
                <= 1e-12 * (1.0 + g.entry_norm().powi(2))
        );
        Ok(g)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if a * d - b * c <= 0.0 {
            return Err(Error::Domain(
                "real Mobius matrix needs positive determinant to preserve the half-plane".into(),
            ));
        }
        Self::new([
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub fn identity() -> Self {
        MobiusIsometry {
            m: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let mut m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        canonicalize_sign(&mut m);
        MobiusIsometry { m }
    }

    /// Inverse; exact for determinant-one matrices.
    pub fn inverse(&self) -> Self {
        let mut m = [
            [self.m[1][1], -self.m[0][1]],
            [-self.m[1][0], self.m[0][0]],
        ];
        canonicalize_sign(&mut m);
        MobiusIsometry { m }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.m[0][0] - 1.0).norm() <= tol
            && self.m[0][1].norm() <= tol
            && self.m[1][0].norm() <= tol
            && (self.m[1][1] - 1.0).norm() <= tol
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.im.abs() <= tol * (1.0 + z.re.abs()))
    }

    /// Largest entry modulus; grows like the square root of the maximal
    /// boundary derivative.
    pub fn entry_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Hyperbolic translation length `2 arccosh(|tr|/2)` of a real matrix;
    /// `None` for elliptic/parabolic elements.
    pub fn translation_length(&self) -> Option<f64> {
        let t = self.trace().norm() / 2.0;
        if t > 1.0 {
            Some(2.0 * t.acosh())
        } else {
            None
        }
    }

    /// Loxodromic (includes hyperbolic) test: `tr^2` outside `[0, 4]` on
    /// the real line.
    pub fn is_loxodromic(&self, tol: f64) -> bool {
        let t2 = self.trace() * self.trace();
        t2.im.abs() > tol || t2.re < -tol || t2.re > 4.0 + tol
    }

    /// Quantized dedup key; entries are exact for integer matrices.
    pub fn key(&self, quantum: f64) -> [i64; 8] {
        let q = |x: f64| (x / quantum).round() as i64;
        let f = self.m;
        [
            q(f[0][0].re),
            q(f[0][0].im),
            q(f[0][1].re),
            q(f[0][1].im),
            q(f[1][0].re),
            q(f[1][0].im),
            q(f[1][1].re),
            q(f[1][1].im),
        ]
    }
}

/// Flip the global sign so the largest-modulus entry has positive real part
/// (or positive imaginary part when its real part vanishes).
fn canonicalize_sign(m: &mut [[Complex64; 2]; 2]) {
    let mut best = (0usize, 0usize);
    let mut best_norm = -1.0;
    for (i, row) in m.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let n = z.norm();
            if n > best_norm {
                best_norm = n;
                best = (i, j);
            }
        }
    }
    let z = m[best.0][best.1];
    let flip = if z.re.abs() > 1e-12 * best_norm {
        z.re < 0.0
    } else {
        z.im < 0.0
    };
    if flip {
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e = -*e;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_normalized() {
        let g = MobiusIsometry::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        assert!((g.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn negative_det_real_rejected() {
        assert!(MobiusIsometry::from_real(1.0, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = MobiusIsometry::from_real(3.0, 1.0, 2.0, 1.0).unwrap();
        assert!(g.compose(&g.inverse()).is_identity(1e-12));
        assert!(g.inverse().compose(&g).is_identity(1e-12));
    }

    #[test]
    fn sign_canonical() {
        let g = MobiusIsometry::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let mut neg = g.m;
        for row in neg.iter_mut() {
            for e in row.iter_mut() {
                *e = -*e;
            }
        }
        let h = MobiusIsometry::new(neg).unwrap();
        assert_eq!(g.key(1e-9), h.key(1e-9));
    }

    #[test]
    fn translation_length_of_diagonal() {
        let l = 2.5f64;
        let g =
            MobiusIsometry::from_real((l / 2.0).exp(), 0.0, 0.0, (-l / 2.0).exp()).unwrap();
        let t = g.translation_length().unwrap();
        assert!((t - l).abs() < 1e-12);
    }
}
