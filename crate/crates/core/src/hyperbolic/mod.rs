//! Gromov products, hyperbolicity defects, asymptotic upper curvature
//! chain inequalities, and visual quasi-metrics on boundary samples.

mod acu;
mod boundary;
mod converge;
mod gromov;

pub use acu::{acu_check, AcuInput, AcuReport};
pub use boundary::{visual_metric, BoundarySample, BoundarySource, VisualMetricReport};
pub use converge::{convergence_at_infinity, ConvergenceReport};
pub use gromov::{four_point_delta, four_point_delta_sampled, gromov_products, BasedSpace, GromovTable};
