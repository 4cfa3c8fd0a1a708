//! Archimedean and p-adic densities, the polytope volume `alpha`, and the
//! assembled leading constant.

mod archimedean;
mod euler;
mod peyre;
mod polytope;
pub mod quadrature;
mod theta;

pub use archimedean::{
    g1, g2, g2_estimate, h, omega_infinity, omega_infinity_monte_carlo, omega_infinity_quadrature,
    t_max, Estimate, OmegaInfinity, OMEGA_AGREEMENT, QMC_SHIFTS,
};
pub use euler::{
    euler_product_omega_h, omega_p, upsilon, EulerProduct, OMEGA_H_TAIL_CONSTANT,
    UPSILON_TAIL_CONSTANT,
};
pub use peyre::{peyre_constant, PeyreBreakdown, PeyreFixture};
pub use polytope::{alpha_volume, simplex_volume, Halfspace, Polytope};
pub use theta::{
    big_theta, local_factor_closed, local_factor_theta, local_factor_theta_exact,
    local_factor_theta_literal, psi_weighted_sum_check, theta1, theta2, PsiSumReport,
    TabulatedFunction, LOCAL_FACTOR_TAIL, UPSILON,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and sampling parameters for the real-density computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Absolute tolerance for bisected breakpoints.
    pub root_tol: f64,
    /// Target absolute error of each adaptive integral.
    pub quad_tol: f64,
    pub mc_samples: u64,
    pub rng_seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { root_tol: 1e-12, quad_tol: 1e-9, mc_samples: 4_000_000, rng_seed: 0 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.quad_tol > 0.0) {
            return Err(Error::OutOfRange("tolerances must be positive".into()));
        }
        if self.mc_samples < 10_000 {
            return Err(Error::OutOfRange(format!(
                "at least 10^4 Monte Carlo samples are needed, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }
}
