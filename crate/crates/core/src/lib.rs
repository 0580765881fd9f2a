//! Desk-scale computational metric geometry.
//!
//! The crate provides finite-sample machinery for a cluster of related
//! constructions: metric cross-ratios and quasi-Mobius distortion, snowflake
//! transforms and their inversion through chain metrics on ball covers,
//! a discrete length-volume inequality for covers of cubes, Gromov products
//! and hyperbolicity defects, visual quasi-metrics on boundary samples, and
//! exact Mobius isometry models of the hyperbolic plane and 3-space with
//! orbit growth, limit sets, and conformal-elevator certificates.
//!
//! Everything operates on finite samples with explicit seeds; every
//! stochastic operation is deterministic given its seed.

pub mod campaign;
pub mod chain;
pub mod cube;
pub mod error;
pub mod gen;
pub mod group;
pub mod hyperbolic;
pub mod io;
pub mod metric;
pub mod plot;

pub use error::{Error, Result};
