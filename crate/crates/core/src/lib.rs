//! Lower bounds for sharp Fourier extension constants on the curves
//! s = |y|^p and s = y|y|^{p−1}, with a brute-force convolution oracle.

pub mod bounds;
pub mod curve;
pub mod error;
pub mod grid;
pub mod odd;
pub mod oracle;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod sum;
pub mod trial;

pub use bounds::{
    critical_exponent, gamma_ratio_bound, legendre_coefficients, moment, profile, series_bound,
    BoundReport, CriticalReport, MomentVector,
};
pub use curve::{threshold, CurveFamily, Parity};
pub use error::{Error, Result};
pub use grid::{DensityGrid, Sample, Slice};
pub use odd::{conjecture_scan, odd_bound, BestMargin, OddBoundReport, ScanRow, ScanTable};
pub use oracle::{
    bilinear_decay, boundary_limit, boundary_value, fourfold_row, natural_measure, odd_expansion_terms,
    solve_alpha, triple_density, triple_norm_ratio, twofold_density, AlphaSolve, BoundaryLimit,
    CurveMeasure, DensityPoint, FourfoldRow, NormRatio, OddTerms,
};
pub use specfun::{
    gamma, generalized_binomial, legendre_eval, log_gamma, LegendreBasis, SignedLogValue,
};
pub use trial::{exp_trial_bound, phi_lambda, PerturbativeReport, Support, TrialFunction};
