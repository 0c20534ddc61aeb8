//! Brute-force convolution oracle.
//!
//! Everything here is computed from the explicit change of variables
//! (y, y′) ↦ (y + y′, ψ(y) + ψ(y′)) and adaptive quadrature, independently
//! of the moment formulas in [`crate::bounds`].

mod alpha;
mod bilinear;
mod density;
mod fourfold;
mod measure;
mod norm;

pub use alpha::{solve_alpha, AlphaSolve, FOLD_TOLERANCE};
pub use bilinear::bilinear_decay;
pub use density::{
    boundary_limit, boundary_value, in_triple_support, natural_measure, triple_density,
    triple_slice, twofold_density, BoundaryLimit, DensityPoint, DENSITY_REL_TOL,
};
pub use fourfold::{
    fourfold_by_quadrature, fourfold_row, odd_expansion_terms, FourfoldRow, OddTerms,
    DEFAULT_GRID_SIZE, MAX_GRID_SIZE,
};
pub use measure::CurveMeasure;
pub use norm::{triple_norm_ratio, NormRatio, NORM_REL_LIMIT};
