//! Rough-isometry defect estimation for sampled correspondences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Fitted multiplicative and additive defects of a correspondence
/// `Phi: source -> target`:
/// `(1/lambda) d - k <= d' <= lambda d + k` over all sampled pairs.
#[derive(Debug, Clone, Serialize)]
pub struct RoughIsometryReport {
    /// Slope fitted on well-separated pairs (top half of the distance
    /// range), the multiplicative constant of the embedding.
    pub lambda: f64,
    /// Additive defect at the fitted lambda.
    pub k: f64,
    /// Additive defect when lambda is forced to 1 (rough-isometry defect).
    pub k_at_lambda_one: f64,
}

/// Fit `(lambda, k)` for the correspondence `i -> correspondence[i]`.
pub fn rough_isometry_defect(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    correspondence: &[usize],
) -> Result<RoughIsometryReport> {
    let n = source.len();
    if correspondence.len() != n {
        return Err(Error::Shape(format!(
            "correspondence has {} entries for {} points",
            correspondence.len(),
            n
        )));
    }
    if correspondence.iter().any(|&t| t >= target.len()) {
        return Err(Error::Shape("correspondence index out of range".into()));
    }
    if n < 2 {
        return Err(Error::parameter("need at least two points"));
    }

    // lambda from pairs in the top half of the source distance range,
    // where the multiplicative behaviour dominates the additive slack
    let dmax = source.diam();
    let mut lambda: f64 = 1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = source.dist(i, j);
            if d < 0.5 * dmax {
                continue;
            }
            let dt = target.dist(correspondence[i], correspondence[j]);
            if dt > 0.0 {
                lambda = lambda.max(dt / d).max(d / dt);
            }
        }
    }

    let mut k = 0.0f64;
    let mut k1 = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = source.dist(i, j);
            let dt = target.dist(correspondence[i], correspondence[j]);
            k = k.max(dt - lambda * d).max(d / lambda - dt);
            k1 = k1.max((dt - d).abs());
        }
    }
    Ok(RoughIsometryReport {
        lambda,
        k,
        k_at_lambda_one: k1,
    })
}

/// Rough-equivariance defect `max d(Phi(g x), g Phi(x))` in the target
/// metric, over generators and sample points where both sides stay inside
/// the samples. Actions are given as partial index maps (one per
/// generator): `None` where the action leaves the sample.
pub fn rough_equivariance_defect(
    target: &FiniteMetricSpace,
    correspondence: &[usize],
    source_action: &[Vec<Option<usize>>],
    target_action: &[Vec<Option<usize>>],
) -> Result<f64> {
    if source_action.len() != target_action.len() {
        return Err(Error::Shape(
            "source and target actions list different generator counts".into(),
        ));
    }
    let n = correspondence.len();
    let mut defect = 0.0f64;
    let mut compared = 0usize;
    for (smap, tmap) in source_action.iter().zip(target_action) {
        if smap.len() != n {
            return Err(Error::Shape("action map length mismatch".into()));
        }
        for x in 0..n {
            let (Some(gx), Some(g_phix)) = (smap[x], tmap[correspondence[x]]) else {
                continue;
            };
            if gx >= n {
                return Err(Error::Shape("action map index out of range".into()));
            }
            defect = defect.max(target.dist(correspondence[gx], g_phix));
            compared += 1;
        }
    }
    if compared == 0 {
        return Err(Error::parameter(
            "no sample point has both actions defined".to_string(),
        ));
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic;
    use crate::metric::{FiniteMetricSpace, Validation};

    #[test]
    fn identity_correspondence() {
        let s = FiniteMetricSpace::from_points(
            "pts",
            vec![vec![0.0], vec![1.0], vec![3.0]],
            Validation::Full,
        )
        .unwrap();
        let rep = rough_isometry_defect(&s, &s, &[0, 1, 2]).unwrap();
        assert_eq!(rep.lambda, 1.0);
        assert_eq!(rep.k, 0.0);
        assert_eq!(rep.k_at_lambda_one, 0.0);
    }

    #[test]
    fn uniform_scaling() {
        let s = FiniteMetricSpace::from_points(
            "pts",
            vec![vec![0.0], vec![1.0], vec![3.0]],
            Validation::Full,
        )
        .unwrap();
        let scaled: Vec<f64> = s.raw_dist().iter().map(|d| 2.0 * d).collect();
        let t = FiniteMetricSpace::new("x2", 3, scaled, None, Validation::Full).unwrap();
        let rep = rough_isometry_defect(&s, &t, &[0, 1, 2]).unwrap();
        assert!((rep.lambda - 2.0).abs() < 1e-12);
        assert!(rep.k.abs() < 1e-12);
    }

    #[test]
    fn orbit_versus_scaled_integers() {
        // orbit n -> g^n p for hyperbolic g with p on the axis, against the
        // integer line scaled by the translation length: exact isometry
        let l = 1.7f64;
        let model = cyclic(l).unwrap();
        let g = model.generators()[0];
        let base = model.base();
        let m = 9usize;
        let mut pts = Vec::new();
        let mut w = crate::group::MobiusIsometry::identity();
        for _ in 0..m {
            pts.push(model.apply(&w, &base));
            w = w.compose(&g);
        }
        let n = pts.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dist[i * n + j] = model.dist(&pts[i], &pts[j]);
                }
            }
        }
        let orbit_space =
            FiniteMetricSpace::new("orbit", n, dist, None, Validation::Full).unwrap();
        let line = FiniteMetricSpace::from_points(
            "line",
            (0..n).map(|i| vec![i as f64 * l]).collect(),
            Validation::Full,
        )
        .unwrap();
        let corr: Vec<usize> = (0..n).collect();
        let rep = rough_isometry_defect(&line, &orbit_space, &corr).unwrap();
        assert!((rep.lambda - 1.0).abs() < 1e-9, "lambda = {}", rep.lambda);
        assert!(rep.k < 1e-9, "k = {}", rep.k);

        // equivariance of the shift action is exact
        let shift: Vec<Option<usize>> = (0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect();
        let defect = rough_equivariance_defect(
            &orbit_space,
            &corr,
            &[shift.clone()],
            &[shift],
        )
        .unwrap();
        assert!(defect < 1e-9);
    }
}
