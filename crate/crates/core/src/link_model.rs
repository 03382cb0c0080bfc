//! Geometry, path-loss and power-normalization primitives.
//!
//! Channels are deterministic average gains `d^-alpha`; there is no fading.
//! Distances are meters, powers watts and noise W/Hz at this boundary; every
//! other module works on the dimensionless quantities produced here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path-loss exponent `alpha` of the distance-power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathLoss(f64);

impl PathLoss {
    pub const DEFAULT_EXPONENT: f64 = 4.0;

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(PathLoss(alpha))
        } else {
            Err(Error::domain(format!(
                "path-loss exponent must be > 0, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl Default for PathLoss {
    fn default() -> Self {
        PathLoss(Self::DEFAULT_EXPONENT)
    }
}

/// A user terminal: where it is and, for uplink, how much it transmits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub id: u32,
    pub distance_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_w: Option<f64>,
}

impl UserTerminal {
    pub fn new(id: u32, distance_m: f64) -> Result<Self> {
        check_positive("distance_m", distance_m)?;
        Ok(UserTerminal {
            id,
            distance_m,
            tx_power_w: None,
        })
    }

    pub fn with_tx_power(id: u32, distance_m: f64, tx_power_w: f64) -> Result<Self> {
        check_positive("tx_power_w", tx_power_w)?;
        let mut user = Self::new(id, distance_m)?;
        user.tx_power_w = Some(tx_power_w);
        Ok(user)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_positive("distance_m", self.distance_m)?;
        if let Some(p) = self.tx_power_w {
            check_positive("tx_power_w", p)?;
        }
        Ok(())
    }
}

/// Downlink transmit power and receiver noise density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub total_power_w: f64,
    pub noise_psd_w_per_hz: f64,
}

impl PowerBudget {
    pub fn new(total_power_w: f64, noise_psd_w_per_hz: f64) -> Result<Self> {
        let budget = PowerBudget {
            total_power_w,
            noise_psd_w_per_hz,
        };
        normalized_power(&budget)?;
        Ok(budget)
    }
}

/// Average channel gain `d^-alpha` at `distance_m` from the base station.
pub fn avg_channel_gain(distance_m: f64, pl: PathLoss) -> Result<f64> {
    check_positive("distance_m", distance_m)?;
    Ok(distance_m.powf(-pl.alpha()))
}

/// Transmit power normalized by the noise density, `P = P_t / N_0`.
pub fn normalized_power(budget: &PowerBudget) -> Result<f64> {
    check_positive("total_power_w", budget.total_power_w)?;
    check_positive("noise_psd_w_per_hz", budget.noise_psd_w_per_hz)?;
    Ok(budget.total_power_w / budget.noise_psd_w_per_hz)
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be finite and > 0, got {value}"
        )))
    }
}
