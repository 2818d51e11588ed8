//! Deterministic structured-grid simulator for inhomogeneous
//! finitely-strained thermoplasticity with isotropic hardening, posed in
//! the Eulerian frame on a fixed domain.
//!
//! The state per cell is (v, xi, Fp, w): velocity, reference mapping,
//! plastic distortion, and enthalpy; temperature and every kinematic
//! quantity (F, Fe, J, density) are derived. One step runs
//! transport -> momentum -> plastic flow rule -> heat equation, and the
//! audit module checks the energy-dissipation and total-energy balances
//! behind the scheme at every step.

pub mod audit;
pub mod config;
pub mod constitutive;
pub mod driver;
pub mod error;
pub mod fields;
pub mod mechanics;
pub mod scenario;
pub mod snapshot;
pub mod solver;
pub mod tensorkin;
pub mod thermal;
pub mod transport;

pub use config::SolverConfig;
pub use driver::{run_scenario, Simulation};
pub use error::{Result, SimError};
