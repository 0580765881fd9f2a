//! Synthetic-data generators: snowflaked circles and spheres, Koch-curve
//! vertex samples, Euclidean clouds, tree metrics, and Mobius group presets.
//!
//! Every generator is deterministic given its seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{parse_group_spec, GroupActionModel};
use crate::metric::{FiniteMetricSpace, Validation};

/// What to generate. Group kinds produce a `GroupActionModel`, the rest a
/// `FiniteMetricSpace`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    CircleSnowflake { n: usize, eps: f64 },
    SphereSnowflake { n: usize, eps: f64, seed: u64 },
    KochCurve { level: u32 },
    EuclideanCloud { n: usize, dim: usize, seed: u64 },
    TreeMetric { n: usize, seed: u64 },
    Schottky { radius: f64 },
    Psl2z,
    Cyclic { length: f64 },
}

#[derive(Debug, Clone)]
pub enum Generated {
    Space(FiniteMetricSpace),
    Model(GroupActionModel),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    match spec {
        GeneratorSpec::CircleSnowflake { n, eps } => {
            circle_snowflake(*n, *eps).map(Generated::Space)
        }
        GeneratorSpec::SphereSnowflake { n, eps, seed } => {
            sphere_snowflake(*n, *eps, *seed).map(Generated::Space)
        }
        GeneratorSpec::KochCurve { level } => koch_curve(*level).map(Generated::Space),
        GeneratorSpec::EuclideanCloud { n, dim, seed } => {
            euclidean_cloud(*n, *dim, *seed).map(Generated::Space)
        }
        GeneratorSpec::TreeMetric { n, seed } => tree_metric(*n, *seed).map(Generated::Space),
        GeneratorSpec::Schottky { radius } => {
            parse_group_spec(&format!("schottky:{radius}")).map(Generated::Model)
        }
        GeneratorSpec::Psl2z => parse_group_spec("psl2z").map(Generated::Model),
        GeneratorSpec::Cyclic { length } => {
            parse_group_spec(&format!("cyclic:{length}")).map(Generated::Model)
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::parameter(format!(
            "field eps: must lie in (0, 1], got {eps}"
        )));
    }
    Ok(())
}

/// `n` equispaced points on the unit circle, metric `chordal^eps`.
pub fn circle_snowflake(n: usize, eps: f64) -> Result<FiniteMetricSpace> {
    check_eps(eps)?;
    if n < 2 {
        return Err(Error::parameter("field n: need at least 2 points"));
    }
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let d = (dx * dx + dy * dy).sqrt().powf(eps);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::new(
        format!("circle_snowflake(n={n},eps={eps})"),
        n,
        dist,
        Some(coords),
        Validation::Off, // chordal^eps is a metric by construction
    )
}

/// `n` spiral-lattice points on the unit 2-sphere, metric `chordal^eps`.
/// The seed rotates the longitude offset.
pub fn sphere_snowflake(n: usize, eps: f64, seed: u64) -> Result<FiniteMetricSpace> {
    check_eps(eps)?;
    if n < 2 {
        return Err(Error::parameter("field n: need at least 2 points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64 + offset;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                .powf(eps);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::new(
        format!("sphere_snowflake(n={n},eps={eps})"),
        n,
        dist,
        Some(coords),
        Validation::Off,
    )
}

/// Vertices of the level-`level` von Koch polyline over the unit segment,
/// in arc-length order, with the ambient planar Euclidean metric.
pub fn koch_curve(level: u32) -> Result<FiniteMetricSpace> {
    if level > 8 {
        return Err(Error::parameter("field level: capped at 8 (4^8 + 1 points)"));
    }
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 0.0)];
    for _ in 0..level {
        let mut next = Vec::with_capacity((pts.len() - 1) * 4 + 1);
        for w in pts.windows(2) {
            let (ax, ay) = w[0];
            let (bx, by) = w[1];
            let (dx, dy) = ((bx - ax) / 3.0, (by - ay) / 3.0);
            let p1 = (ax + dx, ay + dy);
            let p3 = (ax + 2.0 * dx, ay + 2.0 * dy);
            // apex: the middle third rotated by +60 degrees
            let (c, s) = (0.5, 3f64.sqrt() / 2.0);
            let p2 = (p1.0 + dx * c - dy * s, p1.1 + dx * s + dy * c);
            next.push(w[0]);
            next.push(p1);
            next.push(p2);
            next.push(p3);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    FiniteMetricSpace::from_points(
        format!("koch_curve(level={level})"),
        pts.into_iter().map(|(x, y)| vec![x, y]).collect(),
        Validation::Off,
    )
}

/// `n` uniform points in the unit cube of the given dimension.
pub fn euclidean_cloud(n: usize, dim: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if n < 2 || dim == 0 {
        return Err(Error::parameter("field n/dim: need n >= 2 and dim >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    FiniteMetricSpace::from_points(
        format!("euclidean_cloud(n={n},dim={dim})"),
        coords,
        Validation::Off,
    )
}

/// Random attachment tree on `n` nodes with integer edge weights in 1..=10
/// and the path metric. Integer weights keep Gromov products exact in f64,
/// so tree samples are 0-hyperbolic to the last bit.
pub fn tree_metric(n: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if n < 2 {
        return Err(Error::parameter("field n: need at least 2 nodes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![0usize; n];
    let mut weight = vec![0.0f64; n];
    let mut depth_edges = vec![0usize; n];
    for i in 1..n {
        parent[i] = rng.gen_range(0..i);
        weight[i] = rng.gen_range(1..=10) as f64;
        depth_edges[i] = depth_edges[parent[i]] + 1;
    }
    let lca_dist = |mut u: usize, mut v: usize| -> f64 {
        let mut d = 0.0;
        while depth_edges[u] > depth_edges[v] {
            d += weight[u];
            u = parent[u];
        }
        while depth_edges[v] > depth_edges[u] {
            d += weight[v];
            v = parent[v];
        }
        while u != v {
            d += weight[u] + weight[v];
            u = parent[u];
            v = parent[v];
        }
        d
    };
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = lca_dist(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    FiniteMetricSpace::new(
        format!("tree_metric(n={n},seed={seed})"),
        n,
        dist,
        None,
        Validation::Off, // path metrics satisfy the triangle inequality exactly
    )
}

/// Explicit star tree: center (index 0) plus leaves at given leg lengths.
pub fn star_tree(legs: &[f64]) -> Result<FiniteMetricSpace> {
    let n = legs.len() + 1;
    let mut dist = vec![0.0; n * n];
    for (i, &li) in legs.iter().enumerate() {
        dist[i + 1] = li;
        dist[(i + 1) * n] = li;
        for (j, &lj) in legs.iter().enumerate().skip(i + 1) {
            dist[(i + 1) * n + (j + 1)] = li + lj;
            dist[(j + 1) * n + (i + 1)] = li + lj;
        }
    }
    FiniteMetricSpace::new("star_tree", n, dist, None, Validation::Off)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_vertices() {
        let s = circle_snowflake(8, 1.0).unwrap();
        assert_eq!(s.len(), 8);
        let side = 2.0 * (std::f64::consts::PI / 8.0).sin();
        assert!((s.dist(0, 1) - side).abs() < 1e-12);
        assert!((s.diam() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn koch_level_one() {
        let s = koch_curve(1).unwrap();
        assert_eq!(s.len(), 5);
        assert!((s.dist(0, 4) - 1.0).abs() < 1e-15, "endpoint distance");
        let polyline: f64 = (0..4).map(|i| s.dist(i, i + 1)).sum();
        assert!(
            (polyline - 4.0 / 3.0).abs() < 1e-12,
            "polyline length {polyline}"
        );
    }

    #[test]
    fn koch_counts() {
        assert_eq!(koch_curve(3).unwrap().len(), 4usize.pow(3) + 1);
    }

    #[test]
    fn tree_is_deterministic() {
        let a = tree_metric(50, 9).unwrap();
        let b = tree_metric(50, 9).unwrap();
        assert_eq!(a.raw_dist(), b.raw_dist());
        let c = tree_metric(50, 10).unwrap();
        assert_ne!(a.raw_dist(), c.raw_dist());
    }

    #[test]
    fn cloud_deterministic_per_seed() {
        let a = euclidean_cloud(20, 3, 4).unwrap();
        let b = euclidean_cloud(20, 3, 4).unwrap();
        assert_eq!(a.raw_dist(), b.raw_dist());
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        let err = circle_snowflake(10, 1.5).unwrap_err();
        assert!(err.to_string().contains("eps"));
        let err = euclidean_cloud(1, 2, 0).unwrap_err();
        assert!(err.to_string().contains("n"));
    }
}
