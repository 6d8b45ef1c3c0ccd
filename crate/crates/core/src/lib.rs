//! Truncated Fock-space laboratory for the quantum harmonic oscillator.

mod dd;
pub mod error;
pub mod expm;
pub mod fock;
pub mod hermite;
pub mod states;
pub mod analytics;
pub mod verify;
pub mod experiments;
pub mod report;

pub use error::{FockError, Result};
pub use expm::matrix_exponential;
pub use fock::{
    apply, build_annihilation, build_creation, build_momentum, build_number, build_position,
    build_quadrature_x, build_quadrature_y, fidelity, inner_product, interior_deviation, norm, normalize,
    FockDim, FockOperator, StateVector, Tolerances,
};
