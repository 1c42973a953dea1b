//! Truncated Puiseux series over `F_{p^m}`: a finite model of the tilted
//! integer ring, with Newton polygons and solvers for the coefficient
//! relations of the normal forms.

mod newton;
mod series;
mod solvers;

pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use series::{pth_root, PuiseuxSeries, DEFAULT_TRUNC};
pub use solvers::*;
