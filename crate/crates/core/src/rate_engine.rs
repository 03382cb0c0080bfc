//! Spectral efficiency of NOMA clusters under successive interference
//! cancellation, and of the equal-time-share TDMA baseline.
//!
//! Rates are Shannon spectral efficiencies `log2(1 + SINR)` in bits/s/Hz over
//! a unit-length frame.
//!
//! Downlink: user `i` (sorted strongest channel first) decodes and removes the
//! signals of all weaker users, which carry more power, and treats the
//! stronger users' allocations as noise. Uplink: the base station decodes in
//! descending received power; each decoded signal is subtracted before the
//! next one. In both directions an imperfect canceller leaves a fraction
//! `beta` of every canceled signal behind as residual interference.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_model::{avg_channel_gain, normalized_power, PathLoss, PowerBudget, UserTerminal};

/// Tolerance on `sum(a_i) = 1`.
pub const POWER_SUM_TOLERANCE: f64 = 1e-12;

/// `log2(1 + x)`.
pub fn spectral_efficiency(sinr: f64) -> f64 {
    sinr.ln_1p() / LN_2
}

/// Residual-interference model of the SIC receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SicModel {
    residual_fraction: f64,
}

impl SicModel {
    pub const PERFECT: SicModel = SicModel {
        residual_fraction: 0.0,
    };

    /// `beta` in `[0, 1]`: share of a canceled signal's power that survives
    /// cancellation. `0` is perfect SIC, `1` is no cancellation at all.
    pub fn new(beta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&beta) {
            Ok(SicModel {
                residual_fraction: beta,
            })
        } else {
            Err(Error::domain(format!(
                "SIC residual fraction must lie in [0, 1], got {beta}"
            )))
        }
    }

    pub fn residual_fraction(self) -> f64 {
        self.residual_fraction
    }
}

impl Default for SicModel {
    fn default() -> Self {
        Self::PERFECT
    }
}

/// A downlink cluster: users sorted nearest first, with the fraction of the
/// base station power each one receives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlCluster {
    users: Vec<UserTerminal>,
    power_fractions: Vec<f64>,
    budget: PowerBudget,
    pl: PathLoss,
}

impl DlCluster {
    pub fn new(
        users: Vec<UserTerminal>,
        power_fractions: Vec<f64>,
        budget: PowerBudget,
        pl: PathLoss,
    ) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::domain("cluster has no users"));
        }
        if users.len() != power_fractions.len() {
            return Err(Error::domain(format!(
                "{} users but {} power fractions",
                users.len(),
                power_fractions.len()
            )));
        }
        for user in &users {
            user.validate()?;
        }
        check_strictly_sorted(&users)?;
        for &a in &power_fractions {
            // A single user takes the whole budget.
            let valid = if power_fractions.len() == 1 {
                a > 0.0 && a <= 1.0
            } else {
                a > 0.0 && a < 1.0
            };
            if !valid {
                return Err(Error::domain(format!("power fraction {a} outside (0, 1)")));
            }
        }
        let total: f64 = power_fractions.iter().sum();
        if (total - 1.0).abs() > POWER_SUM_TOLERANCE {
            return Err(Error::domain(format!(
                "power fractions sum to {total}, expected 1"
            )));
        }
        normalized_power(&budget)?;
        Ok(DlCluster {
            users,
            power_fractions,
            budget,
            pl,
        })
    }

    /// The two-user cluster of the downlink analysis: `a1` to the near user,
    /// `1 - a1` to the far one.
    pub fn two_user(
        strong: UserTerminal,
        weak: UserTerminal,
        a1: f64,
        budget: PowerBudget,
        pl: PathLoss,
    ) -> Result<Self> {
        Self::new(vec![strong, weak], vec![a1, 1.0 - a1], budget, pl)
    }

    pub fn users(&self) -> &[UserTerminal] {
        &self.users
    }

    pub fn power_fractions(&self) -> &[f64] {
        &self.power_fractions
    }

    pub fn budget(&self) -> PowerBudget {
        self.budget
    }

    pub fn path_loss(&self) -> PathLoss {
        self.pl
    }
}

/// An uplink cluster: users sorted nearest first, each carrying its own
/// transmit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlCluster {
    users: Vec<UserTerminal>,
    noise_psd_w_per_hz: f64,
    pl: PathLoss,
}

impl UlCluster {
    pub fn new(users: Vec<UserTerminal>, noise_psd_w_per_hz: f64, pl: PathLoss) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::domain("cluster has no users"));
        }
        for user in &users {
            user.validate()?;
            if user.tx_power_w.is_none() {
                return Err(Error::domain(format!(
                    "uplink user {} has no transmit power",
                    user.id
                )));
            }
        }
        check_strictly_sorted(&users)?;
        if !(noise_psd_w_per_hz.is_finite() && noise_psd_w_per_hz > 0.0) {
            return Err(Error::domain(format!(
                "noise_psd_w_per_hz must be > 0, got {noise_psd_w_per_hz}"
            )));
        }
        Ok(UlCluster {
            users,
            noise_psd_w_per_hz,
            pl,
        })
    }

    pub fn users(&self) -> &[UserTerminal] {
        &self.users
    }

    pub fn noise_psd_w_per_hz(&self) -> f64 {
        self.noise_psd_w_per_hz
    }

    pub fn path_loss(&self) -> PathLoss {
        self.pl
    }

    /// Per-user transmit power normalized by the noise density.
    pub fn normalized_powers(&self) -> Vec<f64> {
        self.users
            .iter()
            .map(|u| u.tx_power_w.unwrap_or_default() / self.noise_psd_w_per_hz)
            .collect()
    }
}

fn check_strictly_sorted(users: &[UserTerminal]) -> Result<()> {
    for pair in users.windows(2) {
        if !(pair[0].distance_m < pair[1].distance_m) {
            return Err(Error::domain(format!(
                "users must be strictly sorted by distance: user {} at {} m precedes user {} at {} m",
                pair[0].id, pair[0].distance_m, pair[1].id, pair[1].distance_m
            )));
        }
    }
    Ok(())
}

/// Downlink NOMA rate of every user, in cluster order.
pub fn dl_noma_rates(cluster: &DlCluster, sic: SicModel) -> Result<Vec<f64>> {
    let p = normalized_power(&cluster.budget)?;
    let beta = sic.residual_fraction();
    let fractions = &cluster.power_fractions;
    let mut rates = Vec::with_capacity(cluster.users.len());
    for (i, user) in cluster.users.iter().enumerate() {
        let received = p * avg_channel_gain(user.distance_m, cluster.pl)?;
        let stronger: f64 = fractions[..i].iter().sum();
        let weaker: f64 = fractions[i + 1..].iter().sum();
        let interference = received * (stronger + beta * weaker);
        let signal = fractions[i] * received;
        rates.push(spectral_efficiency(signal / (interference + 1.0)));
    }
    Ok(rates)
}

/// Order in which the base station decodes uplink users: descending received
/// power, ties broken by user id.
pub fn ul_decode_order(cluster: &UlCluster) -> Result<Vec<usize>> {
    let received = ul_received_powers(cluster)?;
    let mut order: Vec<usize> = (0..cluster.users.len()).collect();
    order.sort_by(|&a, &b| {
        received[b]
            .partial_cmp(&received[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| cluster.users[a].id.cmp(&cluster.users[b].id))
    });
    Ok(order)
}

fn ul_received_powers(cluster: &UlCluster) -> Result<Vec<f64>> {
    cluster
        .users
        .iter()
        .zip(cluster.normalized_powers())
        .map(|(u, p)| Ok(p * avg_channel_gain(u.distance_m, cluster.pl)?))
        .collect()
}

/// Uplink NOMA rate of every user, in cluster order.
pub fn ul_noma_rates(cluster: &UlCluster, sic: SicModel) -> Result<Vec<f64>> {
    let received = ul_received_powers(cluster)?;
    let order = ul_decode_order(cluster)?;
    let beta = sic.residual_fraction();
    let mut rates = vec![0.0; cluster.users.len()];
    for (k, &user) in order.iter().enumerate() {
        let pending: f64 = order[k + 1..].iter().map(|&j| received[j]).sum();
        let canceled: f64 = order[..k].iter().map(|&j| received[j]).sum();
        let sinr = received[user] / (pending + beta * canceled + 1.0);
        rates[user] = spectral_efficiency(sinr);
    }
    Ok(rates)
}

/// TDMA rates with equal time shares: each of the `U` users gets `1/U` of the
/// frame at its full normalized power `powers[j]`.
pub fn oma_rates(users: &[UserTerminal], powers: &[f64], pl: PathLoss) -> Result<Vec<f64>> {
    if users.is_empty() {
        return Err(Error::domain("no users to schedule"));
    }
    if users.len() != powers.len() {
        return Err(Error::domain(format!(
            "{} users but {} powers",
            users.len(),
            powers.len()
        )));
    }
    let share = 1.0 / users.len() as f64;
    users
        .iter()
        .zip(powers)
        .map(|(u, &p)| {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::domain(format!(
                    "normalized power must be > 0, got {p}"
                )));
            }
            Ok(share * spectral_efficiency(p * avg_channel_gain(u.distance_m, pl)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum Cluster {
    Downlink(DlCluster),
    Uplink(UlCluster),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRates {
    pub id: u32,
    pub distance_m: f64,
    pub noma_rate: f64,
    pub oma_rate: f64,
    /// NOMA rate strictly above the OMA rate.
    pub noma_dominant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub users: Vec<UserRates>,
    pub noma_sum_rate: f64,
    pub oma_sum_rate: f64,
}

pub fn rate_report(cluster: &Cluster, sic: SicModel) -> Result<RateReport> {
    let (users, noma, oma) = match cluster {
        Cluster::Downlink(c) => {
            let p = normalized_power(&c.budget)?;
            let noma = dl_noma_rates(c, sic)?;
            let oma = oma_rates(&c.users, &vec![p; c.users.len()], c.pl)?;
            (&c.users, noma, oma)
        }
        Cluster::Uplink(c) => {
            let noma = ul_noma_rates(c, sic)?;
            let oma = oma_rates(&c.users, &c.normalized_powers(), c.pl)?;
            (&c.users, noma, oma)
        }
    };
    let users: Vec<UserRates> = users
        .iter()
        .zip(noma.iter().zip(&oma))
        .map(|(u, (&noma_rate, &oma_rate))| UserRates {
            id: u.id,
            distance_m: u.distance_m,
            noma_rate,
            oma_rate,
            noma_dominant: noma_rate > oma_rate,
        })
        .collect();
    Ok(RateReport {
        users,
        noma_sum_rate: noma.iter().sum(),
        oma_sum_rate: oma.iter().sum(),
    })
}
