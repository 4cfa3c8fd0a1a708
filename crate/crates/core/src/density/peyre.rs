use serde::{Deserialize, Serialize};

use super::{alpha_volume, euler_product_omega_h, omega_infinity, EulerProduct, OmegaInfinity, Polytope, QuadratureConfig};
use crate::arith::{to_f64, Rational};
use crate::error::Result;

/// The factors of the predicted leading constant and their product.
#[derive(Clone, Debug, PartialEq)]
pub struct PeyreBreakdown {
    pub alpha: Rational,
    /// The surface is split, so the cohomological factor is 1.
    pub beta: Rational,
    pub omega_inf: OmegaInfinity,
    pub euler: EulerProduct,
    pub c_vh: f64,
    pub c_vh_err: f64,
}

pub fn peyre_constant(cfg: &QuadratureConfig, cutoff: u64) -> Result<PeyreBreakdown> {
    let alpha = alpha_volume(&Polytope::alpha())?;
    let beta = Rational::from_integer(1.into());
    let omega_inf = omega_infinity(cfg)?;
    let euler = euler_product_omega_h(cutoff)?;
    let omega = omega_inf.estimate();
    let c_vh = to_f64(&(&alpha * &beta)) * omega.value * euler.value;
    let c_vh_err = c_vh * (omega.relative_error() + euler.tail / euler.value);
    Ok(PeyreBreakdown { alpha, beta, omega_inf, euler, c_vh, c_vh_err })
}

/// The checked-in record of a Peyre constant computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeyreFixture {
    pub alpha: String,
    pub omega_inf: f64,
    pub omega_inf_err: f64,
    pub euler_p: u64,
    pub euler_value: f64,
    pub euler_tail: f64,
    pub c_vh: f64,
    pub c_vh_err: f64,
}

impl PeyreFixture {
    pub fn from_breakdown(b: &PeyreBreakdown) -> Self {
        let omega = b.omega_inf.estimate();
        PeyreFixture {
            alpha: b.alpha.to_string(),
            omega_inf: omega.value,
            omega_inf_err: omega.error,
            euler_p: b.euler.cutoff,
            euler_value: b.euler.value,
            euler_tail: b.euler.tail,
            c_vh: b.c_vh,
            c_vh_err: b.c_vh_err,
        }
    }

    /// The fixture shipped with the crate.
    pub fn checked_in() -> Self {
        serde_json::from_str(include_str!("../../fixtures/peyre.json")).expect("valid peyre fixture")
    }
}
