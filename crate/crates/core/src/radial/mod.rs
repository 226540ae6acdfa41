//! Radial geometry: grids, fields, quadrature and the Laplacian.

pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod tail;

pub use field::{ComplexField, RealField};
pub use grid::{make_grid, GridSpec, RadialGrid, Stretch};
pub use ops::{
    apply_laplacian, derivative, inner, laplacian_operator, lp_norm, lp_norm_with_tail, quad, quad_with_tail,
    AffineOperator, Closure,
};
pub use tail::Tail;
