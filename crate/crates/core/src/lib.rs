//! Design, certification and simulation of distributed suboptimal
//! linear-quadratic tracking controllers for leader-follower networks.
//!
//! Pipeline: [`graph`] spectra of `Γ = L + G` → [`riccati`] solve →
//! [`design`] gain and certificate → [`costsim`] exact costs and trajectories.

pub mod costsim;
pub mod design;
pub mod error;
pub mod example;
pub mod graph;
pub mod linalg;
pub mod riccati;

pub use error::{Error, Result};
pub use linalg::Matrix;
