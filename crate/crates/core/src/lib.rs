//! Finite-dimensional thermofield dynamics.
//!
//! Bipartite pure states and their Schmidt decompositions, reduced density
//! matrices and purification, canonical Gibbs ensembles, and the thermal
//! vacuum `|O(beta)> = sum_n sqrt(p_n) |n, n~>` whose system marginal is the
//! Gibbs state. The central check, [`thermal::verify_equivalence`], evaluates
//! a thermal average both as `Tr(rho F)` and as a pure-state expectation on
//! the doubled space.
//!
//! Joint indices everywhere follow `k = i * d_b + mu` (factor A is the most
//! significant).

pub mod bipartite;
pub mod error;
pub mod linalg;
pub mod models;
pub mod rng;
pub mod thermal;

pub use bipartite::{
    entanglement_entropy, expectation, joint_density, purify, reduced_density, reduced_density_b,
    schmidt_decompose, BipartitePureState, DensityDiagnostics, DensityMatrix, SchmidtResult,
};
pub use error::{Error, Result};
pub use linalg::{
    hermitian_eig, kronecker_product, svd, trace, ComplexMatrix, EigResult, Operator, Svd,
};
pub use models::ModelSpec;
pub use num_complex::Complex64;
pub use thermal::{
    decohere_tfd, gibbs_density, gibbs_grand, thermal_average, thermal_spectrum,
    thermofield_double, verify_equivalence, Beta, ThermalReport, ThermalSpectrum,
};
