//! Phase portraits of `z' = z (z^k + eps1 z + eps0)` on the Riemann sphere:
//! singular points and their periods, separatrix structure, periodic domains
//! and periodgons, and scans of the parameter sphere.

pub mod bifscan;
pub mod cli;
pub mod error;
pub mod field;
pub mod flow;
pub mod periodgon;
pub mod render;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use field::{FieldSpec, SphereCoords};
pub use roots::SingularPoint;

/// Double precision field, the one used by integration and scanning.
pub type Field = FieldSpec<f64>;
/// Single precision field.
pub type Field32 = FieldSpec<f32>;
/// Double precision sphere coordinates.
pub type Sphere = SphereCoords<f64>;
/// Double precision singular point.
pub type Point = SingularPoint<f64>;
