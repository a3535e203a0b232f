//! Real-order special functions: Gamma, modified Bessel I and Bessel J.

mod bessel_i;
mod bessel_j;
mod gamma;

pub use bessel_i::{bessel_i, bessel_i_integral, bessel_i_scaled, ln_bessel_i};
pub use bessel_j::bessel_j;
pub use gamma::{gamma_fn, ln_gamma};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Nonnegative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return domain(format!("Bessel order must be finite and >= 0, got {nu}"));
        }
        Ok(Self { nu })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    ExpMinusZ,
}

/// `value` is `I_nu(z)` or `exp(-z) I_nu(z)` depending on `scaling`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledBesselValue {
    pub value: f64,
    pub scaling: Scaling,
}
