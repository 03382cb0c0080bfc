//! Distance sweeps and Monte-Carlo pairing experiments.
//!
//! Grid points and trials are evaluated in parallel; outputs are assembled in
//! grid/trial order and every trial draws from its own seed-derived stream,
//! so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_model::{check_positive, normalized_power, PathLoss, PowerBudget, UserTerminal};
use crate::pairing::{dl_threshold, evaluate_pair, ul_threshold, DlThresholdInput, PairingConfig};
use crate::rate_engine::{rate_report, Cluster, DlCluster, RateReport, SicModel, UlCluster};

/// Description of the user placement written into experiment metadata.
pub const PLACEMENT_MODEL: &str = "two users drawn i.i.d. uniform over the area of an annulus";
/// How the random-selection baseline is formed.
pub const RANDOM_SELECTION_MODEL: &str =
    "random pairing of the drawn positions, nearer user labeled strong";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Downlink,
    Uplink,
}

/// Link parameters of a two-user cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum LinkParams {
    Downlink {
        a1: f64,
        budget: PowerBudget,
        pl: PathLoss,
    },
    Uplink {
        /// Transmit power of the near user.
        p1_w: f64,
        /// Transmit power of the far user.
        p2_w: f64,
        noise_psd_w_per_hz: f64,
        pl: PathLoss,
    },
}

impl LinkParams {
    pub fn direction(&self) -> Direction {
        match self {
            LinkParams::Downlink { .. } => Direction::Downlink,
            LinkParams::Uplink { .. } => Direction::Uplink,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LinkParams::Downlink { a1, budget, pl } => {
                DlThresholdInput::new(a1, normalized_power(&budget)?, pl)?;
            }
            LinkParams::Uplink {
                p1_w,
                p2_w,
                noise_psd_w_per_hz,
                ..
            } => {
                check_positive("p1_w", p1_w)?;
                check_positive("p2_w", p2_w)?;
                check_positive("noise_psd_w_per_hz", noise_psd_w_per_hz)?;
            }
        }
        Ok(())
    }

    /// Two-user cluster with the near user (id 1) at `d1` and the far user
    /// (id 2) at `d2`.
    pub fn cluster(&self, d1: f64, d2: f64) -> Result<Cluster> {
        match *self {
            LinkParams::Downlink { a1, budget, pl } => Ok(Cluster::Downlink(DlCluster::two_user(
                UserTerminal::new(1, d1)?,
                UserTerminal::new(2, d2)?,
                a1,
                budget,
                pl,
            )?)),
            LinkParams::Uplink {
                p1_w,
                p2_w,
                noise_psd_w_per_hz,
                pl,
            } => Ok(Cluster::Uplink(UlCluster::new(
                vec![
                    UserTerminal::with_tx_power(1, d1, p1_w)?,
                    UserTerminal::with_tx_power(2, d2, p2_w)?,
                ],
                noise_psd_w_per_hz,
                pl,
            )?)),
        }
    }

    /// Dominance radius for a cluster whose near user is at `d1` (the
    /// downlink radius does not depend on it).
    pub fn threshold_m(&self, d1: f64) -> Result<f64> {
        match *self {
            LinkParams::Downlink { a1, budget, pl } => {
                dl_threshold(&DlThresholdInput::new(a1, normalized_power(&budget)?, pl)?)
            }
            LinkParams::Uplink {
                p1_w,
                p2_w,
                noise_psd_w_per_hz,
                pl,
            } => ul_threshold(d1, p1_w / noise_psd_w_per_hz, p2_w / noise_psd_w_per_hz, pl),
        }
    }

    pub fn pairing_config(&self) -> Result<PairingConfig> {
        match *self {
            LinkParams::Downlink { a1, budget, pl } => Ok(PairingConfig::Downlink(
                DlThresholdInput::new(a1, normalized_power(&budget)?, pl)?,
            )),
            LinkParams::Uplink {
                noise_psd_w_per_hz,
                pl,
                ..
            } => Ok(PairingConfig::Uplink {
                noise_psd_w_per_hz,
                pl,
            }),
        }
    }

    fn users(&self, d1: f64, d2: f64) -> Result<(UserTerminal, UserTerminal)> {
        match *self {
            LinkParams::Downlink { .. } => {
                Ok((UserTerminal::new(1, d1)?, UserTerminal::new(2, d2)?))
            }
            LinkParams::Uplink { p1_w, p2_w, .. } => Ok((
                UserTerminal::with_tx_power(1, d1, p1_w)?,
                UserTerminal::with_tx_power(2, d2, p2_w)?,
            )),
        }
    }
}

/// Which user stays put while the other one moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedUser {
    D1,
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub fixed: FixedUser,
    pub fixed_distance_m: f64,
    pub lo_m: f64,
    pub hi_m: f64,
    pub step_m: f64,
    pub link: LinkParams,
    pub sic: SicModel,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        check_positive("fixed_distance_m", self.fixed_distance_m)?;
        check_positive("step_m", self.step_m)?;
        check_positive("lo_m", self.lo_m)?;
        if !(self.lo_m < self.hi_m) || !self.hi_m.is_finite() {
            return Err(Error::domain(format!(
                "sweep range must satisfy lo < hi, got [{}, {}]",
                self.lo_m, self.hi_m
            )));
        }
        self.link.validate()
    }

    /// Swept distances `lo + k * step` up to and including `hi`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.hi_m - self.lo_m) / self.step_m + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.lo_m + k as f64 * self.step_m).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub swept_distance_m: f64,
    pub noma_rate_u1: f64,
    pub oma_rate_u1: f64,
    pub noma_rate_u2: f64,
    pub oma_rate_u2: f64,
    pub dominant_u1: bool,
    pub dominant_u2: bool,
    pub threshold_m: f64,
}

impl SweepRecord {
    fn from_report(swept_distance_m: f64, report: &RateReport, threshold_m: f64) -> Self {
        let (u1, u2) = (&report.users[0], &report.users[1]);
        SweepRecord {
            swept_distance_m,
            noma_rate_u1: u1.noma_rate,
            oma_rate_u1: u1.oma_rate,
            noma_rate_u2: u2.noma_rate,
            oma_rate_u2: u2.oma_rate,
            dominant_u1: u1.noma_dominant,
            dominant_u2: u2.noma_dominant,
            threshold_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Grid points dropped because they would put the near user at or beyond
    /// the far one.
    pub skipped_rows: usize,
    /// First swept distance where U1's dominance flag differs from the row
    /// before it.
    pub crossover_u1_m: Option<f64>,
    pub crossover_u2_m: Option<f64>,
}

/// One record per valid grid point, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let grid = spec.grid();
    let rows: Vec<Option<SweepRecord>> = grid
        .par_iter()
        .map(|&x| {
            let (d1, d2) = match spec.fixed {
                FixedUser::D1 => (spec.fixed_distance_m, x),
                FixedUser::D2 => (x, spec.fixed_distance_m),
            };
            if !(d1 < d2) {
                return Ok(None);
            }
            let report = rate_report(&spec.link.cluster(d1, d2)?, spec.sic)?;
            let threshold = spec.link.threshold_m(d1)?;
            Ok(Some(SweepRecord::from_report(x, &report, threshold)))
        })
        .collect::<Result<_>>()?;
    let skipped_rows = rows.iter().filter(|r| r.is_none()).count();
    let records: Vec<SweepRecord> = rows.into_iter().flatten().collect();
    if records.is_empty() {
        return Err(Error::domain("sweep grid has no valid rows (need d1 < d2)"));
    }
    Ok(SweepOutput {
        crossover_u1_m: first_flip(&records, |r| r.dominant_u1),
        crossover_u2_m: first_flip(&records, |r| r.dominant_u2),
        records,
        skipped_rows,
    })
}

fn first_flip(records: &[SweepRecord], flag: impl Fn(&SweepRecord) -> bool) -> Option<f64> {
    records
        .windows(2)
        .find(|w| flag(&w[0]) != flag(&w[1]))
        .map(|w| w[1].swept_distance_m)
}

/// Placement region: distances drawn uniformly over the annulus area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r_min_m: f64,
    pub r_max_m: f64,
}

impl Annulus {
    fn validate(&self) -> Result<()> {
        check_positive("r_min_m", self.r_min_m)?;
        if !(self.r_min_m < self.r_max_m) || !self.r_max_m.is_finite() {
            return Err(Error::domain(format!(
                "degenerate annulus [{}, {}]",
                self.r_min_m, self.r_max_m
            )));
        }
        Ok(())
    }

    /// Inverse-CDF draw: `P(r <= x) = (x^2 - r_min^2) / (r_max^2 - r_min^2)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.r_min_m * self.r_min_m, self.r_max_m * self.r_max_m);
        let u: f64 = rng.gen();
        (a + u * (b - a)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSpec {
    pub trials: u64,
    pub placement: Annulus,
    pub link: LinkParams,
    pub seed: u64,
}

/// Statistics of one selection mode over the trials it produced a cluster in.
/// Fractions and means are NaN when that count is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub clusters: u64,
    pub dominance_fraction_u1: f64,
    pub dominance_fraction_u2: f64,
    pub mean_noma_rate_u1: f64,
    pub mean_oma_rate_u1: f64,
    pub mean_noma_rate_u2: f64,
    pub mean_oma_rate_u2: f64,
    pub mean_noma_sum_rate: f64,
    pub mean_oma_sum_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub seed: u64,
    /// Fraction of draws admitting a pair that satisfies the selection
    /// criterion.
    pub feasibility_rate: f64,
    pub proposed: ModeSummary,
    pub random: ModeSummary,
    pub placement_model: String,
    pub random_selection_model: String,
}

struct TrialOutcome {
    random: RateReport,
    feasible: bool,
}

/// Generator for trial `trial`: stream `trial` of the ChaCha keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(spec: &MonteCarloSpec, config: &PairingConfig, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(spec.seed, trial);
    let mut a = spec.placement.sample(&mut rng);
    let mut b = spec.placement.sample(&mut rng);
    // Coincident draws have measure zero; nudge to keep the cluster ordered.
    while a == b {
        b = spec.placement.sample(&mut rng);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let random = rate_report(&spec.link.cluster(a, b)?, SicModel::PERFECT)?;
    let (strong, weak) = spec.link.users(a, b)?;
    let (_, dominance) = evaluate_pair(&strong, &weak, config)?;
    Ok(TrialOutcome {
        random,
        feasible: dominance.both(),
    })
}

#[derive(Default)]
struct Accumulator {
    clusters: u64,
    dominant: [u64; 2],
    noma: [f64; 2],
    oma: [f64; 2],
}

impl Accumulator {
    fn add(&mut self, report: &RateReport) {
        self.clusters += 1;
        for (k, user) in report.users.iter().enumerate() {
            self.dominant[k] += user.noma_dominant as u64;
            self.noma[k] += user.noma_rate;
            self.oma[k] += user.oma_rate;
        }
    }

    fn summary(&self) -> ModeSummary {
        let n = self.clusters as f64;
        let mean = |x: f64| if self.clusters == 0 { f64::NAN } else { x / n };
        ModeSummary {
            clusters: self.clusters,
            dominance_fraction_u1: mean(self.dominant[0] as f64),
            dominance_fraction_u2: mean(self.dominant[1] as f64),
            mean_noma_rate_u1: mean(self.noma[0]),
            mean_oma_rate_u1: mean(self.oma[0]),
            mean_noma_rate_u2: mean(self.noma[1]),
            mean_oma_rate_u2: mean(self.oma[1]),
            mean_noma_sum_rate: mean(self.noma[0] + self.noma[1]),
            mean_oma_sum_rate: mean(self.oma[0] + self.oma[1]),
        }
    }
}

/// Proposed-criterion versus random selection over random two-user drops.
///
/// Each trial draws two distances. The random baseline clusters them as they
/// come; the proposed criterion clusters them only when both users gain from
/// NOMA. Rates use perfect SIC.
pub fn run_monte_carlo(spec: &MonteCarloSpec) -> Result<MonteCarloSummary> {
    if spec.trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    spec.placement.validate()?;
    spec.link.validate()?;
    let config = spec.link.pairing_config()?;
    let outcomes: Vec<TrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, &config, t))
        .collect::<Result<_>>()?;

    let mut proposed = Accumulator::default();
    let mut random = Accumulator::default();
    for outcome in &outcomes {
        random.add(&outcome.random);
        if outcome.feasible {
            proposed.add(&outcome.random);
        }
    }
    Ok(MonteCarloSummary {
        trials: spec.trials,
        seed: spec.seed,
        feasibility_rate: proposed.clusters as f64 / spec.trials as f64,
        proposed: proposed.summary(),
        random: random.summary(),
        placement_model: PLACEMENT_MODEL.to_string(),
        random_selection_model: RANDOM_SELECTION_MODEL.to_string(),
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn fig2_link() -> LinkParams {
        LinkParams::Downlink {
            a1: 0.1,
            budget: PowerBudget::new(10.0, 1e-10).unwrap(),
            pl: PathLoss::default(),
        }
    }

    fn fig3_link() -> LinkParams {
        LinkParams::Uplink {
            p1_w: 1.0,
            p2_w: 1.0,
            noise_psd_w_per_hz: 1e-10,
            pl: PathLoss::default(),
        }
    }

    fn sweep(fixed: FixedUser, at: f64, lo: f64, hi: f64, link: LinkParams) -> SweepSpec {
        SweepSpec {
            fixed,
            fixed_distance_m: at,
            lo_m: lo,
            hi_m: hi,
            step_m: 1.0,
            link,
            sic: SicModel::PERFECT,
        }
    }

    #[test]
    fn grid_includes_both_ends() {
        let s = sweep(FixedUser::D1, 30.0, 40.0, 400.0, fig2_link());
        let g = s.grid();
        assert_eq!(g.len(), 361);
        assert_eq!(g[0], 40.0);
        assert_eq!(*g.last().unwrap(), 400.0);
        let s = SweepSpec {
            step_m: 0.1,
            lo_m: 1.0,
            hi_m: 2.0,
            ..s
        };
        assert_eq!(s.grid().len(), 11);
    }

    #[test]
    fn fig2a_far_user_flips_at_threshold() {
        let out = run_sweep(&sweep(FixedUser::D1, 30.0, 40.0, 400.0, fig2_link())).unwrap();
        assert_eq!(out.records.len(), 361);
        assert_eq!(out.skipped_rows, 0);
        let r = out.records[0].threshold_m;
        assert!(out.records.iter().all(|rec| rec.threshold_m == r));
        let x = out.crossover_u2_m.unwrap();
        assert!((x - 188.0).abs() <= 1.0 && (x - r).abs() <= 1.0);
        assert_eq!(out.crossover_u1_m, None);
        let first = &out.records[0];
        assert!(out.records.iter().all(|rec| rec.dominant_u1
            && rec.noma_rate_u1 == first.noma_rate_u1
            && rec.oma_rate_u1 == first.oma_rate_u1));
        let at_230 = out
            .records
            .iter()
            .find(|rec| rec.swept_distance_m == 230.0)
            .unwrap();
        assert!((at_230.noma_rate_u2 - 3.0057814558699117).abs() < 1e-12);
    }

    #[test]
    fn fig2b_near_user_flips_at_threshold() {
        let out = run_sweep(&sweep(FixedUser::D2, 230.0, 1.0, 400.0, fig2_link())).unwrap();
        // d1 in [230, 400] is not a valid labeling.
        assert_eq!(out.skipped_rows, 171);
        let x = out.crossover_u1_m.unwrap();
        assert!((x - 188.0).abs() <= 1.0);
        let first = &out.records[0];
        assert!(out
            .records
            .iter()
            .all(|rec| rec.dominant_u2 && rec.noma_rate_u2 == first.noma_rate_u2));
    }

    #[test]
    fn fig3a_uplink_sweep() {
        let out = run_sweep(&sweep(FixedUser::D1, 30.0, 31.0, 400.0, fig3_link())).unwrap();
        assert!(out.records.iter().all(|rec| rec.dominant_u2));
        let x = out.crossover_u1_m.unwrap();
        assert!((x - 97.4).abs() <= 1.0);
        assert_eq!(out.crossover_u2_m, None);
    }

    #[test]
    fn fig3b_uplink_threshold_varies_with_d1() {
        let out = run_sweep(&sweep(FixedUser::D2, 120.0, 1.0, 119.0, fig3_link())).unwrap();
        assert!(out
            .records
            .windows(2)
            .all(|w| w[1].threshold_m > w[0].threshold_m));
        assert!(out.records.iter().all(|rec| rec.dominant_u2));
        // Near user gains while 120 m stays beyond its radius.
        for rec in &out.records {
            assert_eq!(rec.dominant_u1, 120.0 > rec.threshold_m);
        }
    }

    #[test]
    fn sweep_rows_change_smoothly() {
        // |d/dd log2(1 + c d^-a)| <= a / (d ln 2); every rate here is a
        // difference of at most two such terms.
        for (spec, alpha) in [
            (sweep(FixedUser::D1, 30.0, 40.0, 400.0, fig2_link()), 4.0),
            (sweep(FixedUser::D2, 230.0, 1.0, 229.0, fig2_link()), 4.0),
            (sweep(FixedUser::D1, 30.0, 31.0, 400.0, fig3_link()), 4.0),
        ] {
            let out = run_sweep(&spec).unwrap();
            for w in out.records.windows(2) {
                let d = w[0].swept_distance_m;
                let bound = 2.0 * alpha * spec.step_m / (d * LN_2);
                for (a, b) in [
                    (w[0].noma_rate_u1, w[1].noma_rate_u1),
                    (w[0].oma_rate_u1, w[1].oma_rate_u1),
                    (w[0].noma_rate_u2, w[1].noma_rate_u2),
                    (w[0].oma_rate_u2, w[1].oma_rate_u2),
                ] {
                    assert!(
                        (a - b).abs() <= bound,
                        "jump {} > {bound} at {d}",
                        (a - b).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn sweep_matches_sequential_evaluation() {
        let spec = SweepSpec {
            sic: SicModel::new(0.05).unwrap(),
            ..sweep(FixedUser::D1, 30.0, 20.0, 300.0, fig2_link())
        };
        let out = run_sweep(&spec).unwrap();
        let expected: Vec<SweepRecord> = spec
            .grid()
            .into_iter()
            .filter(|&d2| d2 > 30.0)
            .map(|d2| {
                let report = rate_report(&spec.link.cluster(30.0, d2).unwrap(), spec.sic).unwrap();
                SweepRecord::from_report(d2, &report, spec.link.threshold_m(30.0).unwrap())
            })
            .collect();
        assert_eq!(out.records, expected);
        assert_eq!(out.skipped_rows, 11);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let base = sweep(FixedUser::D1, 30.0, 40.0, 400.0, fig2_link());
        assert!(run_sweep(&SweepSpec {
            lo_m: 400.0,
            hi_m: 40.0,
            ..base
        })
        .is_err());
        assert!(run_sweep(&SweepSpec {
            step_m: 0.0,
            ..base
        })
        .is_err());
        // Every grid point at or inside the fixed near user.
        assert!(run_sweep(&SweepSpec {
            lo_m: 1.0,
            hi_m: 30.0,
            ..base
        })
        .is_err());
        let bad = LinkParams::Downlink {
            a1: 0.5,
            budget: PowerBudget::new(10.0, 1e-10).unwrap(),
            pl: PathLoss::default(),
        };
        assert!(matches!(
            run_sweep(&SweepSpec { link: bad, ..base }),
            Err(Error::InfeasiblePowerFraction(_))
        ));
    }

    fn mc(link: LinkParams, trials: u64, seed: u64) -> MonteCarloSpec {
        MonteCarloSpec {
            trials,
            placement: Annulus {
                r_min_m: 10.0,
                r_max_m: 400.0,
            },
            link,
            seed,
        }
    }

    #[test]
    fn monte_carlo_invariants() {
        for link in [fig2_link(), fig3_link()] {
            let s = run_monte_carlo(&mc(link, 2000, 7)).unwrap();
            assert!(s.proposed.clusters > 0);
            assert_eq!(s.proposed.dominance_fraction_u1, 1.0);
            assert_eq!(s.proposed.dominance_fraction_u2, 1.0);
            assert!(s.random.dominance_fraction_u1 < 1.0);
            for f in [
                s.random.dominance_fraction_u1,
                s.random.dominance_fraction_u2,
                s.feasibility_rate,
            ] {
                assert!((0.0..=1.0).contains(&f));
            }
            assert_eq!(s.random.clusters, 2000);
            assert_eq!(s.feasibility_rate, s.proposed.clusters as f64 / 2000.0);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = run_monte_carlo(&mc(fig2_link(), 500, 99)).unwrap();
        let b = run_monte_carlo(&mc(fig2_link(), 500, 99)).unwrap();
        assert_eq!(a, b);
        let c = run_monte_carlo(&mc(fig2_link(), 500, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn monte_carlo_rejects_bad_specs() {
        assert!(run_monte_carlo(&mc(fig2_link(), 0, 1)).is_err());
        let mut spec = mc(fig2_link(), 10, 1);
        spec.placement = Annulus {
            r_min_m: 50.0,
            r_max_m: 50.0,
        };
        assert!(run_monte_carlo(&spec).is_err());
        spec.placement = Annulus {
            r_min_m: 0.0,
            r_max_m: 50.0,
        };
        assert!(run_monte_carlo(&spec).is_err());
    }

    #[test]
    fn annulus_draws_are_area_uniform() {
        let annulus = Annulus {
            r_min_m: 10.0,
            r_max_m: 400.0,
        };
        let mut rng = trial_rng(3, 0);
        let n = 20_000;
        let mut inside_median = 0;
        // Radius splitting the annulus area in half.
        let median = ((10.0f64.powi(2) + 400.0f64.powi(2)) / 2.0).sqrt();
        for _ in 0..n {
            let r = annulus.sample(&mut rng);
            assert!((10.0..=400.0).contains(&r));
            inside_median += (r < median) as usize;
        }
        let frac = inside_median as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }
}
