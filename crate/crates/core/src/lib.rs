//! Finite-particle laboratory for interacting Brownian motions with
//! logarithmic interactions.
//!
//! The crate covers the four classical families from random matrix theory
//! (Dyson/sine, Airy, Bessel and Ginibre):
//!
//! * [`ensembles`] samples finite-N eigenvalue ensembles used as equilibrium
//!   starting points,
//! * [`kernels`] evaluates correlation kernels (including the space-time
//!   extended Airy kernel) and Fredholm determinants built from them,
//! * [`dynamics`] integrates the labeled SDE systems with truncated
//!   long-range drifts and an ordering-preserving adaptive Euler scheme,
//! * [`ifc`] re-solves head particles against frozen tail paths and checks
//!   pathwise consistency with the reference solution,
//! * [`measures`] checks the logarithmic-derivative integration by parts
//!   identity and a finite-volume quasi-Gibbs diagnostic,
//! * [`stats`] holds the estimators and hypothesis tests,
//! * [`cli`] wires everything into reproducible runs with CSV/JSON output.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod ensembles;
pub mod ifc;
pub mod kernels;
pub mod measures;
pub mod rng;
pub mod special;
pub mod stats;

pub use config::Configuration;
