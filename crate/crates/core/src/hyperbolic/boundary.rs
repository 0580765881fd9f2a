//! Boundary samples carrying pairwise Gromov products, and visual
//! (quasi-)metrics built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::BoundaryPoint;

/// How a boundary sample's Gromov products were produced.
#[derive(Debug, Clone, Serialize)]
pub enum BoundarySource {
    /// Closed-form products (exact hyperbolic models, tree boundaries).
    Analytic,
    /// Deep finite orbits; carries the two-sided slack of the product
    /// estimate (2 delta in a delta-hyperbolic space).
    DeepOrbit { slack: f64 },
}

/// Finite set of boundary points with pairwise Gromov products; diagonal
/// entries are infinite.
#[derive(Debug, Clone, Serialize)]
pub struct BoundarySample {
    pub labels: Vec<String>,
    pub n: usize,
    /// Row-major n x n; diagonal +inf, off-diagonal finite and >= 0.
    pub gromov: Vec<f64>,
    pub source: BoundarySource,
}

impl BoundarySample {
    pub fn new(
        labels: Vec<String>,
        gromov: Vec<f64>,
        source: BoundarySource,
    ) -> Result<Self> {
        let n = labels.len();
        if gromov.len() != n * n {
            return Err(Error::Shape(format!(
                "gromov matrix has {} entries for {n} points",
                gromov.len()
            )));
        }
        for i in 0..n {
            if gromov[i * n + i].is_finite() {
                return Err(Error::Shape(format!(
                    "diagonal entry ({i},{i}) must be infinite for a boundary point"
                )));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let g = gromov[i * n + j];
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::Shape(format!(
                        "off-diagonal product ({i},{j}) = {g} must be finite and >= 0"
                    )));
                }
                if g != gromov[j * n + i] {
                    return Err(Error::Shape(format!("product matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(BoundarySample {
            labels,
            n,
            gromov,
            source,
        })
    }

    /// Boundary products of points on the boundary circle/sphere of the
    /// exact hyperbolic models, based at the model's canonical base point:
    /// `(xi, eta)_p = ln(2 / chordal(xi, eta))`, exact in these models.
    pub fn from_boundary_points(points: &[BoundaryPoint]) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::parameter("need at least two boundary points"));
        }
        let mut gromov = vec![f64::INFINITY; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let q = points[i].chordal(&points[j]);
                if q == 0.0 {
                    return Err(Error::parameter(format!(
                        "boundary points {i} and {j} coincide"
                    )));
                }
                let g = (2.0 / q).ln();
                gromov[i * n + j] = g;
                gromov[j * n + i] = g;
            }
        }
        Self::new(
            (0..n).map(|i| format!("b{i}")).collect(),
            gromov,
            BoundarySource::Analytic,
        )
    }

    /// Ultrametric tree-boundary sample: leaves of a binary tree of the
    /// given depth, with products equal to the split depth of the pair.
    pub fn dyadic_ultrametric(depth: u32) -> Result<Self> {
        let n = 1usize << depth;
        let mut gromov = vec![f64::INFINITY; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let split = depth - (32 - ((i ^ j) as u32).leading_zeros());
                    gromov[i * n + j] = split as f64;
                }
            }
        }
        Self::new(
            (0..n).map(|i| format!("leaf{i}")).collect(),
            gromov,
            BoundarySource::Analytic,
        )
    }

    #[inline]
    pub fn product(&self, i: usize, j: usize) -> f64 {
        self.gromov[i * self.n + j]
    }

    /// Scale all products by a factor (models snowflaking the visual
    /// metric: `rho^s` corresponds to products `s * (xi,eta)_p`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::parameter("scale factor must be positive"));
        }
        let gromov = self
            .gromov
            .iter()
            .map(|&g| if g.is_finite() { g * factor } else { g })
            .collect();
        Self::new(self.labels.clone(), gromov, self.source.clone())
    }
}

/// Visual quasi-metric report at a parameter eps.
#[derive(Debug, Clone, Serialize)]
pub struct VisualMetricReport {
    pub eps: f64,
    pub n: usize,
    /// `rho = exp(-eps (xi,eta)_p)`, zero on the diagonal.
    pub rho: Vec<f64>,
    /// Chain-sum shortest-path metric over rho.
    pub d_eps: Vec<f64>,
    /// Fitted quasi-metric constant: max over triples of
    /// `rho(x,y) / max(rho(x,z), rho(z,y))`.
    pub k_fitted: f64,
    /// Whether the chain construction is guaranteed two-sided: `K <= sqrt 2`.
    pub applicable: bool,
    /// `rho/4 <= d_eps` held entrywise (checked when applicable).
    pub lower_bound_ok: bool,
}

impl VisualMetricReport {
    #[inline]
    pub fn rho_at(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.n + j]
    }

    #[inline]
    pub fn d_at(&self, i: usize, j: usize) -> f64 {
        self.d_eps[i * self.n + j]
    }
}

/// Build `rho = e^{-eps (.,.)_p}`, fit the quasi-metric constant K, and
/// metrize by the chain construction (exact all-pairs shortest paths with
/// chain cost the sum of consecutive rho values).
///
/// When `K <= sqrt 2` the chain metric is guaranteed to satisfy
/// `rho/4 <= d_eps <= rho`; the report asserts it.
pub fn visual_metric(boundary: &BoundarySample, eps: f64) -> Result<VisualMetricReport> {
    if !(eps > 0.0) {
        return Err(Error::parameter(format!("eps must be > 0, got {eps}")));
    }
    let n = boundary.n;
    let mut rho = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rho[i * n + j] = (-eps * boundary.product(i, j)).exp();
            }
        }
    }

    // quasi-metric constant over ordered triples
    let mut k_fitted = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let rxy = rho[x * n + y];
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let m = rho[x * n + z].max(rho[z * n + y]);
                if m > 0.0 {
                    k_fitted = k_fitted.max(rxy / m);
                }
            }
        }
    }

    // Floyd-Warshall on the complete graph with edge weights rho
    let mut d = rho.clone();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let alt = dik + d[k * n + j];
                if alt < d[i * n + j] {
                    d[i * n + j] = alt;
                }
            }
        }
    }

    let applicable = k_fitted <= 2f64.sqrt() + 1e-12;
    let mut lower_bound_ok = true;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = rho[i * n + j];
            let dv = d[i * n + j];
            if dv > r * (1.0 + 1e-12) {
                return Err(Error::Invariant(format!(
                    "chain metric exceeds rho at ({i},{j}): {dv} > {r}"
                )));
            }
            if applicable && dv < r / 4.0 * (1.0 - 1e-12) {
                lower_bound_ok = false;
            }
        }
    }
    if applicable && !lower_bound_ok {
        return Err(Error::Invariant(
            "K <= sqrt(2) but the chain metric dropped below rho/4".into(),
        ));
    }

    Ok(VisualMetricReport {
        eps,
        n,
        rho,
        d_eps: d,
        k_fitted,
        applicable,
        lower_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_direct_chain() {
        let b = BoundarySample::new(
            vec!["a".into(), "b".into()],
            vec![f64::INFINITY, 1.5, 1.5, f64::INFINITY],
            BoundarySource::Analytic,
        )
        .unwrap();
        let rep = visual_metric(&b, 0.7).unwrap();
        assert_eq!(rep.d_at(0, 1), rep.rho_at(0, 1));
    }

    #[test]
    fn ultrametric_admits_no_shortcut() {
        let b = BoundarySample::dyadic_ultrametric(5).unwrap();
        for eps in [0.3, 1.0, 2.0] {
            let rep = visual_metric(&b, eps).unwrap();
            assert!(rep.k_fitted <= 1.0 + 1e-12, "ultrametric K = {}", rep.k_fitted);
            for i in 0..rep.n {
                for j in 0..rep.n {
                    if i != j {
                        assert_eq!(
                            rep.d_at(i, j),
                            rep.rho_at(i, j),
                            "d_eps must equal rho entrywise at ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn circle_boundary_products_are_visual_parameter_one() {
        // e^{-(xi,eta)} = chordal/2 exactly
        let pts: Vec<BoundaryPoint> = (0..32)
            .map(|i| BoundaryPoint::circle(i as f64 * std::f64::consts::TAU / 32.0))
            .collect();
        let b = BoundarySample::from_boundary_points(&pts).unwrap();
        let rep = visual_metric(&b, 1.0).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                if i != j {
                    let expect = pts[i].chordal(&pts[j]) / 2.0;
                    assert!((rep.rho_at(i, j) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn small_eps_is_applicable_with_two_sided_bound() {
        let pts: Vec<BoundaryPoint> = (0..48)
            .map(|i| BoundaryPoint::circle(0.1 + i as f64 * 0.11))
            .collect();
        let b = BoundarySample::from_boundary_points(&pts).unwrap();
        let rep = visual_metric(&b, 0.3).unwrap();
        assert!(rep.applicable, "K = {}", rep.k_fitted);
        assert!(rep.lower_bound_ok);
    }

    #[test]
    fn eps_sweep_brackets_the_visual_interval() {
        // products scaled so the visual interval ends strictly inside the
        // sweep: K crosses sqrt(2) at some eps
        let pts: Vec<BoundaryPoint> = (0..40)
            .map(|i| BoundaryPoint::circle(i as f64 * std::f64::consts::TAU / 40.0))
            .collect();
        let b = BoundarySample::from_boundary_points(&pts).unwrap();
        let mut first_inapplicable = None;
        let mut last_applicable = None;
        for step in 1..=12 {
            let eps = step as f64 * 0.25;
            let rep = visual_metric(&b, eps).unwrap();
            if rep.applicable {
                last_applicable = Some(eps);
            } else if first_inapplicable.is_none() {
                first_inapplicable = Some(eps);
            }
        }
        let lo = last_applicable.expect("some eps must be applicable");
        let hi = first_inapplicable.expect("large eps must fail");
        assert!(lo < hi, "bracket [{lo}, {hi}] inverted");
    }

    #[test]
    fn diagonal_must_be_infinite() {
        let r = BoundarySample::new(
            vec!["a".into(), "b".into()],
            vec![0.0, 1.0, 1.0, 0.0],
            BoundarySource::Analytic,
        );
        assert!(r.is_err());
    }
}
