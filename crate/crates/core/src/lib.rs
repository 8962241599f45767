//! Stochastic predator-prey model with Lévy jumps: regime analysis and Monte Carlo.
//!
//! The [`model`] module describes the system, [`regime`] computes the net-growth
//! functionals and the regime they imply, [`sim`] integrates single paths and
//! [`ensemble`] aggregates many of them. [`config`] and [`workflow`] tie these
//! together for the command-line tool.

pub mod model;
pub mod quadrature;
pub mod regime;
pub mod sim;
pub mod ensemble;
pub mod config;
pub mod workflow;

pub use model::{Species, TimeFunction, ModelSpec, JumpChannel, ValidatedModel};
pub use regime::{classify, AnalysisParams, Regime, RegimeReport};
