//! Shortest discrete delta-paths: BFS in the graph whose edges join
//! points at distance at most `step`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Length of a shortest discrete path, or an explicit unreachable marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathLength {
    /// Number of steps (one less than the number of chain points).
    Length(usize),
    Unreachable,
}

impl PathLength {
    pub fn as_option(self) -> Option<usize> {
        match self {
            PathLength::Length(l) => Some(l),
            PathLength::Unreachable => None,
        }
    }
}

/// Shortest `step`-path length from `i` to `j`; 0 iff `i == j`.
pub fn min_delta_path(
    space: &FiniteMetricSpace,
    i: usize,
    j: usize,
    step: f64,
) -> Result<PathLength> {
    let lengths = min_delta_paths_from(space, i, step)?;
    if j >= space.len() {
        return Err(Error::parameter(format!("index {j} out of range")));
    }
    Ok(match lengths[j] {
        Some(l) => PathLength::Length(l),
        None => PathLength::Unreachable,
    })
}

/// BFS from `i`: shortest `step`-path lengths to every point.
pub fn min_delta_paths_from(
    space: &FiniteMetricSpace,
    i: usize,
    step: f64,
) -> Result<Vec<Option<usize>>> {
    if !(step > 0.0) {
        return Err(Error::parameter(format!("step must be > 0, got {step}")));
    }
    let n = space.len();
    if i >= n {
        return Err(Error::parameter(format!("index {i} out of range")));
    }
    let mut dist: Vec<Option<usize>> = vec![None; n];
    dist[i] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(i);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for v in 0..n {
            if dist[v].is_none() && space.dist(u, v) <= step {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::line_space;
    use crate::metric::snowflake;

    #[test]
    fn adjacent_pair_is_one_step() {
        let s = line_space(&[0.0, 0.4, 2.0]);
        assert_eq!(
            min_delta_path(&s, 0, 1, 0.5).unwrap(),
            PathLength::Length(1)
        );
        assert_eq!(
            min_delta_path(&s, 0, 0, 0.5).unwrap(),
            PathLength::Length(0)
        );
    }

    #[test]
    fn equispaced_interval() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let s = line_space(&xs);
        assert_eq!(
            min_delta_path(&s, 0, 10, 0.100000001).unwrap(),
            PathLength::Length(10)
        );
    }

    #[test]
    fn unreachable_is_explicit() {
        let s = line_space(&[0.0, 10.0]);
        assert_eq!(
            min_delta_path(&s, 0, 1, 0.5).unwrap(),
            PathLength::Unreachable
        );
    }

    #[test]
    fn monotone_in_step() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
        let s = line_space(&xs);
        let mut prev = usize::MAX;
        for step in [0.051, 0.11, 0.21, 0.5, 2.0] {
            let l = min_delta_path(&s, 0, 39, step)
                .unwrap()
                .as_option()
                .unwrap();
            assert!(l <= prev, "step {step}: {l} > {prev}");
            prev = l;
        }
    }

    #[test]
    fn snowflaked_interval_quadratic_lower_bound() {
        // Dense sample of [0,1] with metric |x-y|^{1/2}: a delta-path needs
        // at least ~(d/delta)^2 steps. Checks the discrete length condition
        // with exponent 1/eps = 2.
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        let s = snowflake(&line_space(&xs), 0.5).unwrap();
        let (i, j) = (0, 400);
        let d = s.dist(i, j); // = 1
        for step in [0.06, 0.1, 0.2] {
            let l = min_delta_path(&s, i, j, step)
                .unwrap()
                .as_option()
                .unwrap() as f64;
            let predicted = (d / step).powi(2);
            assert!(
                l >= 0.5 * predicted,
                "step {step}: length {l} below 0.5 * {predicted}"
            );
        }
    }
}
