//! Numerical toolkit for multi-soliton trains of nonlinear Schrödinger equations
//! `i u_t + Δu + f(u) = 0` with double-power nonlinearities in dimensions one to three.

pub mod cli;
pub mod config;
pub mod error;
pub mod estimates;
pub mod evolution;
pub mod grid;
pub mod io;
pub mod nonlinearity;
pub mod serde_ext;
pub mod solitons;
pub mod train;

pub use error::{Error, Result};
pub use grid::{Field, Grid, C64};
pub use nonlinearity::Nonlinearity;
