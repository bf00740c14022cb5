//! Discrete exterior calculus for variable-exponent p(x)-harmonic systems.
//!
//! The crate discretizes vector-valued differential forms on simplicial
//! meshes in R^n (n ≤ 3), minimizes the convex energy
//! ∫ [ (a(x)/p(x)) (μ² + |du|²)^{p(x)/2} − ⟨F, du⟩ ] dV
//! over Dirichlet or natural-Neumann classes, reconstructs Coulomb-gauge
//! potentials through div–curl solves, and measures regularity statistics
//! (higher integrability, Morrey decay, Campanato/Hölder exponents,
//! sup-bound constants) of the computed fields.
//!
//! Parallelism is provided by the default `parallel` feature (rayon) with a
//! sequential fallback; all reductions run in a fixed order, so results are
//! bit-identical across thread counts.

pub mod cochain;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod exterior;
pub mod io;
pub mod mesh;
pub mod meshgen;
pub mod model;
pub mod solver;
pub mod sparse;
pub mod whitney;

pub use cochain::{coboundary, coboundary_transpose, tangential_zero, Cochain};
pub use error::{Error, Result};
pub use exterior::{hodge_star, inner, interior, wedge_covector, FormValue, MetricTensor};
pub use mesh::{dyadic_radii, BallSample, MetricMode, MetricSpec, SimplicialComplex};
pub use model::{
    energy_density, exponent_moduli, flux, BoundaryMode, EnergyModel, ExponentField,
    ExponentModuli, WeightField,
};
pub use solver::{
    coulomb_potential, div_curl_solve, linear_hodge_solve, minimize, CoulombPotential,
    DivCurlSolution, Precond, Solution, SolverConfig, TraceMode,
};
pub use whitney::{barycentric_value, codifferential, modular, CellBasis, MassOperator};

/// Crate version string recorded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
