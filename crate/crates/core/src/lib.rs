//! Numerical laboratory for the Dirichlet space of the unit disk.

pub mod carleson;
pub mod error;
pub mod geometry;
pub mod hankel;
pub mod interpolation;
pub mod kernels;
pub mod linalg;
pub mod numeric;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod verify;
pub mod weak_product;

pub use error::{Error, Result};
pub use geometry::DiskPoint;
pub use series::AnalyticPoly;
