//! NOMA-dominance thresholds and two-user pair selection.
//!
//! For a two-user cluster with the near user `U1` at `d1` and the far user
//! `U2` at `d2`:
//!
//! * downlink, both users beat TDMA iff `d1 < R_dl < d2` where
//!   `R_dl = (P a1^2 / (1 - 2 a1))^(1/alpha)`;
//! * uplink, `U2` always beats TDMA and `U1` does iff `d2 > R_ul` where
//!   `P2 R_ul^-alpha = sqrt(1 + P1 d1^-alpha)`.
//!
//! A distance exactly on the threshold gives equal NOMA and OMA rates and is
//! reported as not dominant.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_model::{avg_channel_gain, check_positive, PathLoss, PowerBudget, UserTerminal};
use crate::rate_engine::{dl_noma_rates, oma_rates, ul_noma_rates, DlCluster, SicModel, UlCluster};

/// Default absolute tolerance of [`threshold_oracle`], in meters.
pub const ORACLE_TOLERANCE_M: f64 = 1e-6;

/// Downlink power split and normalized power of a two-user cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlThresholdInput {
    /// Fraction of the base station power given to the near user.
    pub a1: f64,
    /// Normalized transmit power `P_t / N_0`.
    pub p: f64,
    pub pl: PathLoss,
}

impl DlThresholdInput {
    pub fn new(a1: f64, p: f64, pl: PathLoss) -> Result<Self> {
        let input = DlThresholdInput { a1, p, pl };
        input.validate()?;
        Ok(input)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a1.is_finite() && self.a1 > 0.0) {
            return Err(Error::domain(format!("a1 must be > 0, got {}", self.a1)));
        }
        if self.a1 >= 0.5 {
            return Err(Error::InfeasiblePowerFraction(self.a1));
        }
        check_positive("normalized power", self.p)
    }
}

/// Per-user outcome of a dominance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dominance {
    pub strong_ok: bool,
    pub weak_ok: bool,
}

impl Dominance {
    pub fn both(self) -> bool {
        self.strong_ok && self.weak_ok
    }
}

/// Downlink threshold radius `R_dl` in meters.
pub fn dl_threshold(input: &DlThresholdInput) -> Result<f64> {
    input.validate()?;
    let DlThresholdInput { a1, p, pl } = *input;
    Ok((p * a1 * a1 / (1.0 - 2.0 * a1)).powf(1.0 / pl.alpha()))
}

/// Uplink threshold radius `R_ul` in meters: the distance beyond which the far
/// user must sit for the near user at `d1` to gain from NOMA. `p1` and `p2`
/// are normalized transmit powers.
pub fn ul_threshold(d1: f64, p1: f64, p2: f64, pl: PathLoss) -> Result<f64> {
    check_positive("d1", d1)?;
    check_positive("p1", p1)?;
    check_positive("p2", p2)?;
    let strong_rx = p1 * avg_channel_gain(d1, pl)?;
    Ok((p2 / (1.0 + strong_rx).sqrt()).powf(1.0 / pl.alpha()))
}

fn check_order(d1: f64, d2: f64) -> Result<()> {
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    if d1 < d2 {
        Ok(())
    } else {
        Err(Error::Ordering(format!(
            "expected d1 < d2, got d1 = {d1}, d2 = {d2}"
        )))
    }
}

/// Downlink dominance of the near user at `d1` and the far user at `d2`.
pub fn dl_dominant(d1: f64, d2: f64, input: &DlThresholdInput) -> Result<Dominance> {
    check_order(d1, d2)?;
    let r = dl_threshold(input)?;
    Ok(Dominance {
        strong_ok: d1 < r,
        weak_ok: d2 > r,
    })
}

/// Uplink dominance of the near user at `d1` and the far user at `d2` with
/// normalized powers `p1`, `p2`.
///
/// The user decoded last never sees intra-cluster interference and always
/// gains. Normally that is the far user; if the far user's received power
/// exceeds the near user's, the decoding order and the roles swap. Equal
/// received powers decode the near user first.
pub fn ul_dominant(d1: f64, d2: f64, p1: f64, p2: f64, pl: PathLoss) -> Result<Dominance> {
    check_order(d1, d2)?;
    let rx1 = p1 * avg_channel_gain(d1, pl)?;
    let rx2 = p2 * avg_channel_gain(d2, pl)?;
    if rx1 >= rx2 {
        Ok(Dominance {
            strong_ok: d2 > ul_threshold(d1, p1, p2, pl)?,
            weak_ok: true,
        })
    } else {
        Ok(Dominance {
            strong_ok: true,
            weak_ok: d1 > ul_threshold(d2, p2, p1, pl)?,
        })
    }
}

/// Root of a rate-gap function found by [`threshold_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRoot {
    pub distance_m: f64,
    pub iterations: u32,
}

/// Bisection on `rate_gap` over `[lo, hi]` to absolute tolerance `tol`.
///
/// Independent of the closed-form thresholds: it only needs the sign of the
/// NOMA-minus-OMA rate difference.
pub fn threshold_oracle<F>(rate_gap: F, lo: f64, hi: f64, tol: f64) -> Result<OracleRoot>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    check_positive("tolerance", tol)?;
    let eval = |d: f64| {
        let v = rate_gap(d);
        if v.is_nan() {
            Err(Error::domain(format!("rate gap undefined at {d} m")))
        } else {
            Ok(v)
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    if f_lo == 0.0 {
        return Ok(OracleRoot {
            distance_m: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(OracleRoot {
            distance_m: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            return Ok(OracleRoot {
                distance_m: mid,
                iterations,
            });
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(OracleRoot {
        distance_m: 0.5 * (lo + hi),
        iterations,
    })
}

/// Default bisection bracket `[1, 10 R]` around a closed-form radius `R`,
/// widened downwards when `R` is below 2 m.
pub fn default_bracket(closed_form_m: f64) -> (f64, f64) {
    ((0.5 * closed_form_m).min(1.0), 10.0 * closed_form_m)
}

fn unit_noise_budget(p: f64) -> PowerBudget {
    PowerBudget {
        total_power_w: p,
        noise_psd_w_per_hz: 1.0,
    }
}

fn dl_gap_at(input: DlThresholdInput, d1: f64, d2: f64, user: usize) -> f64 {
    let users = match (UserTerminal::new(1, d1), UserTerminal::new(2, d2)) {
        (Ok(a), Ok(b)) => [a, b],
        _ => return f64::NAN,
    };
    let budget = unit_noise_budget(input.p);
    let Ok(cluster) = DlCluster::two_user(
        users[0].clone(),
        users[1].clone(),
        input.a1,
        budget,
        input.pl,
    ) else {
        return f64::NAN;
    };
    match (
        dl_noma_rates(&cluster, SicModel::PERFECT),
        oma_rates(&users, &[input.p, input.p], input.pl),
    ) {
        (Ok(noma), Ok(oma)) => noma[user] - oma[user],
        _ => f64::NAN,
    }
}

/// NOMA minus OMA rate of the near user as a function of its distance.
/// Positive inside `R_dl`.
pub fn dl_strong_gap(input: DlThresholdInput) -> impl Fn(f64) -> f64 {
    move |d| dl_gap_at(input, d, 2.0 * d, 0)
}

/// NOMA minus OMA rate of the far user as a function of its distance.
/// Positive beyond `R_dl`.
pub fn dl_weak_gap(input: DlThresholdInput) -> impl Fn(f64) -> f64 {
    move |d| dl_gap_at(input, 0.5 * d, d, 1)
}

/// NOMA minus OMA rate of the uplink near user at `d1` as a function of the
/// far user's distance `d2`. Undefined (NaN) for `d2 <= d1`.
pub fn ul_strong_gap(d1: f64, p1: f64, p2: f64, pl: PathLoss) -> impl Fn(f64) -> f64 {
    move |d2| {
        let users = match (
            UserTerminal::with_tx_power(1, d1, p1),
            UserTerminal::with_tx_power(2, d2, p2),
        ) {
            (Ok(a), Ok(b)) => vec![a, b],
            _ => return f64::NAN,
        };
        let Ok(cluster) = UlCluster::new(users.clone(), 1.0, pl) else {
            return f64::NAN;
        };
        match (
            ul_noma_rates(&cluster, SicModel::PERFECT),
            oma_rates(&users, &[p1, p2], pl),
        ) {
            (Ok(noma), Ok(oma)) => noma[0] - oma[0],
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingMode {
    Proposed,
    Random,
}

/// Link parameters a candidate pair is judged under. Uplink candidates carry
/// their own transmit powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum PairingConfig {
    Downlink(DlThresholdInput),
    Uplink {
        noise_psd_w_per_hz: f64,
        pl: PathLoss,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDecision {
    pub strong: UserTerminal,
    pub weak: UserTerminal,
    pub threshold_m: f64,
    /// Both users strictly gain from NOMA over TDMA.
    pub feasible: bool,
    pub mode: PairingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingOutcome {
    pub mode: PairingMode,
    pub pairs: Vec<PairDecision>,
    pub singletons: Vec<UserTerminal>,
}

fn uplink_power(user: &UserTerminal, noise: f64) -> Result<f64> {
    let p = user
        .tx_power_w
        .ok_or_else(|| Error::domain(format!("uplink user {} has no transmit power", user.id)))?;
    check_positive("tx_power_w", p)?;
    check_positive("noise_psd_w_per_hz", noise)?;
    Ok(p / noise)
}

/// Threshold radius and dominance of a labeled pair. Pairs at equal distance
/// are never dominant.
pub fn evaluate_pair(
    strong: &UserTerminal,
    weak: &UserTerminal,
    config: &PairingConfig,
) -> Result<(f64, Dominance)> {
    let tie = strong.distance_m == weak.distance_m;
    let none = Dominance {
        strong_ok: false,
        weak_ok: false,
    };
    match config {
        PairingConfig::Downlink(input) => {
            let r = dl_threshold(input)?;
            if tie {
                return Ok((r, none));
            }
            Ok((r, dl_dominant(strong.distance_m, weak.distance_m, input)?))
        }
        PairingConfig::Uplink {
            noise_psd_w_per_hz,
            pl,
        } => {
            let p1 = uplink_power(strong, *noise_psd_w_per_hz)?;
            let p2 = uplink_power(weak, *noise_psd_w_per_hz)?;
            let r = ul_threshold(strong.distance_m, p1, p2, *pl)?;
            if tie {
                return Ok((r, none));
            }
            Ok((
                r,
                ul_dominant(strong.distance_m, weak.distance_m, p1, p2, *pl)?,
            ))
        }
    }
}

fn by_distance(a: &UserTerminal, b: &UserTerminal) -> std::cmp::Ordering {
    a.distance_m
        .total_cmp(&b.distance_m)
        .then_with(|| a.id.cmp(&b.id))
}

/// Groups candidates into two-user clusters.
///
/// `Proposed` walks the candidates sorted by distance from both ends, matching
/// the nearest unpaired user with the farthest one and keeping the pair only
/// if both users gain from NOMA; otherwise the near user is left single. This
/// greedy order is a heuristic, not an optimal matching. Only feasible pairs
/// are emitted.
///
/// `Random` shuffles the candidates with a generator seeded by `seed` and
/// pairs them consecutively, labeling the nearer user strong. Every pair is
/// emitted with its feasibility flag.
pub fn select_pairs(
    candidates: &[UserTerminal],
    config: &PairingConfig,
    mode: PairingMode,
    seed: u64,
) -> Result<PairingOutcome> {
    if candidates.len() < 2 {
        return Err(Error::domain(format!(
            "need at least 2 candidates, got {}",
            candidates.len()
        )));
    }
    for c in candidates {
        c.validate()?;
    }
    let mut pairs = Vec::new();
    let mut singletons = Vec::new();
    match mode {
        PairingMode::Proposed => {
            let mut sorted = candidates.to_vec();
            sorted.sort_by(by_distance);
            let (mut i, mut j) = (0, sorted.len() - 1);
            while i < j {
                let (r, dom) = evaluate_pair(&sorted[i], &sorted[j], config)?;
                if dom.both() {
                    pairs.push(PairDecision {
                        strong: sorted[i].clone(),
                        weak: sorted[j].clone(),
                        threshold_m: r,
                        feasible: true,
                        mode,
                    });
                    j -= 1;
                } else {
                    singletons.push(sorted[i].clone());
                }
                i += 1;
            }
            if i == j {
                singletons.push(sorted[i].clone());
            }
            singletons.sort_by(by_distance);
        }
        PairingMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = candidates.to_vec();
            shuffled.shuffle(&mut rng);
            let mut chunks = shuffled.chunks_exact(2);
            for chunk in &mut chunks {
                let (strong, weak) = if by_distance(&chunk[0], &chunk[1]).is_le() {
                    (&chunk[0], &chunk[1])
                } else {
                    (&chunk[1], &chunk[0])
                };
                let (r, dom) = evaluate_pair(strong, weak, config)?;
                pairs.push(PairDecision {
                    strong: strong.clone(),
                    weak: weak.clone(),
                    threshold_m: r,
                    feasible: dom.both(),
                    mode,
                });
            }
            singletons.extend(chunks.remainder().iter().cloned());
        }
    }
    Ok(PairingOutcome {
        mode,
        pairs,
        singletons,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::rate_engine::{rate_report, Cluster};

    // mpmath, 50 digits.
    const R_DL_FIG2: f64 = 188.03015465431967841;
    const R_UL_FIG3: f64 = 97.399388508666614242;

    fn fig2() -> DlThresholdInput {
        DlThresholdInput::new(0.1, 1e11, PathLoss::default()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn dl_threshold_matches_reported_radius() {
        let r = dl_threshold(&fig2()).unwrap();
        assert!((r - 188.0).abs() < 0.1);
        assert!(rel(r, R_DL_FIG2) < 1e-14);
    }

    #[test]
    fn dl_threshold_feasibility_boundary() {
        let pl = PathLoss::default();
        let r = dl_threshold(&DlThresholdInput {
            a1: 0.49,
            p: 1e3,
            pl,
        })
        .unwrap();
        assert!(r.is_finite() && r > 0.0);
        assert!(matches!(
            DlThresholdInput::new(0.5, 1e3, pl),
            Err(Error::InfeasiblePowerFraction(_))
        ));
        assert!(matches!(
            dl_threshold(&DlThresholdInput {
                a1: 0.7,
                p: 1e3,
                pl
            }),
            Err(Error::InfeasiblePowerFraction(_))
        ));
        assert!(matches!(
            dl_threshold(&DlThresholdInput {
                a1: 0.0,
                p: 1e3,
                pl
            }),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dl_threshold_agrees_with_bisection() {
        let input = fig2();
        let closed = dl_threshold(&input).unwrap();
        let root = threshold_oracle(dl_strong_gap(input), 1.0, 1000.0, ORACLE_TOLERANCE_M).unwrap();
        assert!(rel(root.distance_m, closed) < 1e-6);
        assert!((root.distance_m - R_DL_FIG2).abs() <= ORACLE_TOLERANCE_M);
        let root = threshold_oracle(dl_weak_gap(input), 1.0, 1000.0, ORACLE_TOLERANCE_M).unwrap();
        assert!(rel(root.distance_m, closed) < 1e-6);
    }

    #[test]
    fn ul_threshold_fig3() {
        let r = ul_threshold(30.0, 1e10, 1e10, PathLoss::default()).unwrap();
        assert!(rel(r, R_UL_FIG3) < 1e-14);
        let lo = 30.0 * (1.0 + 1e-12);
        let root = threshold_oracle(
            ul_strong_gap(30.0, 1e10, 1e10, PathLoss::default()),
            lo,
            1000.0,
            ORACLE_TOLERANCE_M,
        )
        .unwrap();
        assert!(rel(root.distance_m, r) < 1e-6);
    }

    #[test]
    fn ul_threshold_identity_and_monotonicity() {
        let pl = PathLoss::default();
        let (p1, p2) = (1e10, 1e10);
        let r = ul_threshold(30.0, p1, p2, pl).unwrap();
        // With S the near user's received power: 1 + S / (sqrt(1 + S) + 1) = sqrt(1 + S).
        let s = p1 * 30f64.powi(-4);
        let noma = (1.0 + s / (p2 * r.powi(-4) + 1.0)).log2();
        let oma = 0.5 * (1.0 + s).log2();
        assert!(rel(noma, oma) < 1e-9);

        let mut prev = 0.0;
        for k in 1..=200 {
            let r = ul_threshold(k as f64, p1, p2, pl).unwrap();
            assert!(r > prev);
            prev = r;
        }
        assert!(ul_threshold(0.0, p1, p2, pl).is_err());
        assert!(ul_threshold(30.0, -1.0, p2, pl).is_err());
    }

    #[test]
    fn dl_dominant_examples() {
        let input = fig2();
        let both = Dominance {
            strong_ok: true,
            weak_ok: true,
        };
        assert_eq!(dl_dominant(30.0, 230.0, &input).unwrap(), both);
        let d = dl_dominant(30.0, 150.0, &input).unwrap();
        assert_eq!(
            d,
            Dominance {
                strong_ok: true,
                weak_ok: false
            }
        );

        let cluster = DlCluster::two_user(
            UserTerminal::new(1, 30.0).unwrap(),
            UserTerminal::new(2, 150.0).unwrap(),
            0.1,
            PowerBudget::new(10.0, 1e-10).unwrap(),
            PathLoss::default(),
        )
        .unwrap();
        let report = rate_report(&Cluster::Downlink(cluster), SicModel::PERFECT).unwrap();
        assert!(report.users[1].noma_rate < report.users[1].oma_rate);

        assert!(matches!(
            dl_dominant(230.0, 30.0, &input),
            Err(Error::Ordering(_))
        ));
        assert!(matches!(
            dl_dominant(30.0, 30.0, &input),
            Err(Error::Ordering(_))
        ));
    }

    #[test]
    fn dl_boundary_rates_equal() {
        let input = fig2();
        let r = dl_threshold(&input).unwrap();
        let eps = 1e-9;
        let d = dl_dominant(r - eps, r + eps, &input).unwrap();
        assert!(d.strong_ok && d.weak_ok);
        assert!(dl_strong_gap(input)(r).abs() < 1e-9);
        assert!(dl_weak_gap(input)(r).abs() < 1e-9);
        // On the threshold itself neither side counts as dominant.
        let on = dl_dominant(r, r + 1.0, &input).unwrap();
        assert!(!on.strong_ok);
        let on = dl_dominant(r - 1.0, r, &input).unwrap();
        assert!(!on.weak_ok);
    }

    #[test]
    fn ul_dominant_examples() {
        let pl = PathLoss::default();
        let d = ul_dominant(30.0, 120.0, 1e10, 1e10, pl).unwrap();
        assert_eq!(
            d,
            Dominance {
                strong_ok: true,
                weak_ok: true
            }
        );
        let d = ul_dominant(30.0, 80.0, 1e10, 1e10, pl).unwrap();
        assert_eq!(
            d,
            Dominance {
                strong_ok: false,
                weak_ok: true
            }
        );
        assert!(ul_strong_gap(30.0, 1e10, 1e10, pl)(80.0) < 0.0);
        assert!(matches!(
            ul_dominant(80.0, 30.0, 1e10, 1e10, pl),
            Err(Error::Ordering(_))
        ));
    }

    #[test]
    fn ul_dominant_with_reversed_decoding() {
        // Far user received louder: it is decoded first and the near user gains.
        let pl = PathLoss::default();
        let (d1, d2, p1, p2) = (30.0, 60.0, 1e6, 1e10);
        let d = ul_dominant(d1, d2, p1, p2, pl).unwrap();
        assert!(d.strong_ok);
        let cluster = UlCluster::new(
            vec![
                UserTerminal::with_tx_power(1, d1, p1).unwrap(),
                UserTerminal::with_tx_power(2, d2, p2).unwrap(),
            ],
            1.0,
            pl,
        )
        .unwrap();
        let report = rate_report(&Cluster::Uplink(cluster), SicModel::PERFECT).unwrap();
        assert_eq!(report.users[0].noma_dominant, d.strong_ok);
        assert_eq!(report.users[1].noma_dominant, d.weak_ok);
    }

    #[test]
    fn oracle_errors_and_iteration_bound() {
        let err = threshold_oracle(|d| d + 1.0, 1.0, 10.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
        assert!(threshold_oracle(|d| d - 5.0, 10.0, 1.0, 1e-6).is_err());
        assert!(threshold_oracle(|_| f64::NAN, 1.0, 10.0, 1e-6).is_err());

        let (lo, hi, tol) = (1.0, 1000.0, 1e-6);
        let root = threshold_oracle(dl_strong_gap(fig2()), lo, hi, tol).unwrap();
        let bound = ((hi - lo) / tol).log2().ceil() as u32;
        assert!(root.iterations <= bound);

        let root = threshold_oracle(|d| d - 4.0, 0.0, 8.0, 1e-3).unwrap();
        assert_eq!(root.distance_m, 4.0);
    }

    #[test]
    fn default_bracket_contains_root() {
        assert_eq!(default_bracket(188.0), (1.0, 1880.0));
        let (lo, hi) = default_bracket(0.5);
        assert!(lo < 0.5 && hi > 0.5);
    }

    fn users(ds: &[f64]) -> Vec<UserTerminal> {
        ds.iter()
            .enumerate()
            .map(|(i, &d)| UserTerminal::new(i as u32, d).unwrap())
            .collect()
    }

    #[test]
    fn proposed_pairs_fig2_candidates() {
        let config = PairingConfig::Downlink(fig2());
        let out = select_pairs(&users(&[230.0, 30.0]), &config, PairingMode::Proposed, 0).unwrap();
        assert_eq!(out.pairs.len(), 1);
        let pair = &out.pairs[0];
        assert_eq!(
            (pair.strong.distance_m, pair.weak.distance_m),
            (30.0, 230.0)
        );
        assert!(pair.feasible);
        assert!(out.singletons.is_empty());
    }

    #[test]
    fn proposed_mode_with_everyone_inside() {
        let config = PairingConfig::Downlink(fig2());
        let out = select_pairs(
            &users(&[20.0, 50.0, 100.0, 150.0]),
            &config,
            PairingMode::Proposed,
            0,
        )
        .unwrap();
        assert!(out.pairs.is_empty());
        assert_eq!(out.singletons.len(), 4);
    }

    #[test]
    fn proposed_mode_greedy_order() {
        let config = PairingConfig::Downlink(fig2());
        let out = select_pairs(
            &users(&[10.0, 20.0, 190.0, 300.0, 400.0, 100.0]),
            &config,
            PairingMode::Proposed,
            0,
        )
        .unwrap();
        let got: Vec<(f64, f64)> = out
            .pairs
            .iter()
            .map(|p| (p.strong.distance_m, p.weak.distance_m))
            .collect();
        assert_eq!(got, vec![(10.0, 400.0), (20.0, 300.0), (100.0, 190.0)]);
        assert!(out.singletons.is_empty());
    }

    #[test]
    fn random_mode_is_reproducible() {
        let config = PairingConfig::Downlink(fig2());
        let cands = users(&[10.0, 20.0, 190.0, 300.0, 400.0, 100.0, 250.0]);
        let a = select_pairs(&cands, &config, PairingMode::Random, 42).unwrap();
        let b = select_pairs(&cands, &config, PairingMode::Random, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs.len(), 3);
        assert_eq!(a.singletons.len(), 1);
        for p in &a.pairs {
            assert!(p.strong.distance_m < p.weak.distance_m);
        }
    }

    #[test]
    fn select_pairs_rejects_small_input() {
        let config = PairingConfig::Downlink(fig2());
        assert!(select_pairs(&users(&[30.0]), &config, PairingMode::Proposed, 0).is_err());
    }

    #[test]
    fn uplink_pairing_needs_power() {
        let config = PairingConfig::Uplink {
            noise_psd_w_per_hz: 1e-10,
            pl: PathLoss::default(),
        };
        assert!(select_pairs(&users(&[30.0, 120.0]), &config, PairingMode::Proposed, 0).is_err());
        let cands = vec![
            UserTerminal::with_tx_power(1, 30.0, 1.0).unwrap(),
            UserTerminal::with_tx_power(2, 120.0, 1.0).unwrap(),
            UserTerminal::with_tx_power(3, 80.0, 1.0).unwrap(),
        ];
        let out = select_pairs(&cands, &config, PairingMode::Proposed, 0).unwrap();
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].weak.id, 2);
        assert!(rel(out.pairs[0].threshold_m, R_UL_FIG3) < 1e-12);
        assert_eq!(out.singletons.len(), 1);
    }
}
