//! Second-order, positivity-preserving and asymptotic-preserving UGKS for
//! gray radiative transfer with a filtered spherical-harmonics (FP_N) angular
//! discretization.
//!
//! Layout follows the data flow of one time step: [`angular`] tables and
//! [`coeffs`] kernels feed [`fluxes`], [`recon_limit`] supplies slopes and
//! positivity limiters, and [`solver`] runs the source iteration and the
//! micro update on a [`mesh::Grid2D`]. [`bench`] holds the benchmark scenarios.

pub mod angular;
pub mod bench;
pub mod coeffs;
pub mod error;
pub mod fluxes;
pub mod io;
pub mod mesh;
pub mod recon_limit;
pub mod solver;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
