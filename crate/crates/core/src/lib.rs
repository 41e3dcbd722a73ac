//! Lattice Boltzmann solver for the volume averaged Navier-Stokes equations
//! (VANSE) on periodic grids, validated with the method of manufactured
//! solutions.
//!
//! The crate is organized along the data flow of a simulation:
//!
//! - [`lattice`]: immutable D1Q3/D2Q9/D3Q27 velocity sets and the quadrature
//!   stencils used to integrate the void fraction over a cell.
//! - [`fields`]: periodic Cartesian grid storage (populations, scalar and
//!   vector fields) and the finite-difference stencil operators.
//! - [`kernel`]: equilibrium, moments, Guo forcing with pressure correction,
//!   BGK collision and streaming.
//! - [`mms`]: the manufactured-solution cases, their forcing terms and
//!   mass-conservation self-checks.
//! - [`analysis`]: error norms, steady-state detection, convergence orders
//!   and unit conversion.
//! - [`sim`] and [`app`]: the run loop, snapshot/report output and the
//!   convergence-study orchestrator.

pub mod analysis;
pub mod app;
pub mod error;
pub mod fields;
pub mod kernel;
pub mod lattice;
pub mod mms;
pub mod sim;
pub mod snapshot;

pub use error::Error;

/// Speed of sound squared in lattice units, shared by all velocity sets.
pub const CS2: f64 = 1.0 / 3.0;
