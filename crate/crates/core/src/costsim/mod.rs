//! Closed-loop assembly, exact costs and trajectory simulation.

mod closed_loop;
mod simulate;

pub use closed_loop::{build_closed_loop, exact_cost, mode_decompose, ClosedLoop};
pub use simulate::{consensus_reached, Rk4, Simulation, Trajectory};

use rand::Rng;
use rand_distr::StandardNormal;

/// Stacked tracking error `x₀ − 1_N ⊗ x_r0`.
pub fn initial_error(x0: &[f64], xr0: &[f64]) -> Vec<f64> {
    x0.iter().zip(xr0.iter().cycle()).map(|(x, r)| x - r).collect()
}

/// Uniform sample on the sphere of the given radius in `dim` dimensions.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = crate::linalg::norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x * radius / len).collect();
        }
    }
}
