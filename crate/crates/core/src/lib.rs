//! Cell-average calculus on the unit square.
//!
//! Exact stencil constants for self-similar mean value properties of
//! harmonic functions, cell averages on the dyadic decomposition, the
//! resulting discrete energy and Laplacian, and numerical checks of the
//! mean value defect.

pub mod error;
pub mod expr;
pub mod fit;
pub mod forms;
pub mod grid;
pub mod mvp;
pub mod quadrature;
pub mod rational;
pub mod real;
pub mod solver;
pub mod stencil;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{eval_jet2, harmonic_basis, parse, BasisKind, Expr, HarmonicBasisSpec, Jet2};
pub use forms::{discrete_laplacian, energy, gradient_norm_estimate, LaplacianField};
pub use grid::{grid_averages, word_to_cell, CellAddress, CellAverages, InteriorMask, LevelGrid};
pub use mvp::{defect, defect_bound, exactness_sweep, fit_order, DefectOptions, DefectSample};
pub use quadrature::{cell_average, GaussLegendre};
pub use rational::Rational;
pub use real::{Extended, Precision, Real};
pub use solver::{max_level, solve_level, SolutionKind, SolutionSet};
pub use stencil::{
    c_value, mean_value_level, renorm_constant, t_pk, MeanValueLevel, StencilFamily, StencilPair,
};
