//! Open axis-aligned boxes.

use serde::{Deserialize, Serialize};

/// An open axis-aligned box, possibly sticking out of the unit cube (open
/// covers of the closed cube must overflow its boundary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boxn {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Boxn {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Self {
        debug_assert_eq!(min.len(), max.len());
        Boxn { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn is_nonempty(&self) -> bool {
        self.min.iter().zip(&self.max).all(|(a, b)| a < b)
    }

    /// Open-box membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (a, b))| a < x && x < b)
    }

    /// Exact open-intersection test.
    pub fn intersects(&self, other: &Boxn) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .zip(other.min.iter().zip(&other.max))
            .all(|((a1, b1), (a2, b2))| a1 < b2 && a2 < b1)
    }

    /// Does the open box meet the face `{x_axis = side}` of the unit cube?
    /// Requires a face point interior to the box with the remaining
    /// coordinates inside `[0, 1]`.
    pub fn meets_face(&self, axis: usize, side: f64) -> bool {
        if !(self.min[axis] < side && side < self.max[axis]) {
            return false;
        }
        (0..self.dim()).all(|k| k == axis || (self.min[k] < 1.0 && self.max[k] > 0.0))
    }
}
