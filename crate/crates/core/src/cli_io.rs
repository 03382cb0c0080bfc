//! Scenario configuration, subcommand dispatch and CSV/JSON output.
//!
//! A scenario is a flat JSON object of scalar fields. Command-line flags
//! override fields of the file; the merged document is validated once and
//! echoed into the `#` comment header of every CSV output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{
    run_monte_carlo, run_sweep, Annulus, Direction, FixedUser, LinkParams, MonteCarloSpec,
    MonteCarloSummary, SweepOutput, SweepRecord, SweepSpec,
};
use crate::link_model::{PathLoss, PowerBudget, UserTerminal};
use crate::pairing::{select_pairs, PairingMode, PairingOutcome};
use crate::rate_engine::{rate_report, RateReport, SicModel};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits of every number written to CSV.
pub const CSV_SIGNIFICANT_DIGITS: usize = 9;

/// The scenario document as written, before validation. Field names are the
/// JSON keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0_w_per_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_fixed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_lo_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_hi_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_step_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates_m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn number(field: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::config(field, format!("expected a number, got {v}")))
}

fn count(field: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::config(field, format!("expected a non-negative integer, got {v}")))
}

fn text(field: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        // Candidate lists may be given as a JSON array of numbers too.
        Value::Array(items) if field == "candidates_m" => items
            .iter()
            .map(|x| number(field, x).map(|d| d.to_string()))
            .collect::<Result<Vec<_>>>()
            .map(|parts| parts.join(",")),
        _ => Err(Error::config(field, format!("expected a string, got {v}"))),
    }
}

impl RawConfig {
    pub fn from_json(text_doc: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text_doc)?;
        let Value::Object(map) = value else {
            return Err(Error::config("<document>", "expected a JSON object"));
        };
        Self::from_map(&map)
    }

    fn from_map(map: &Map<String, Value>) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (key, v) in map {
            let k = key.as_str();
            if v.is_null() {
                continue;
            }
            match k {
                "direction" => raw.direction = Some(text(k, v)?),
                "d1_m" => raw.d1_m = Some(number(k, v)?),
                "d2_m" => raw.d2_m = Some(number(k, v)?),
                "pt_w" => raw.pt_w = Some(number(k, v)?),
                "n0_w_per_hz" => raw.n0_w_per_hz = Some(number(k, v)?),
                "p1_w" => raw.p1_w = Some(number(k, v)?),
                "p2_w" => raw.p2_w = Some(number(k, v)?),
                "a1" => raw.a1 = Some(number(k, v)?),
                "alpha" => raw.alpha = Some(number(k, v)?),
                "beta" => raw.beta = Some(number(k, v)?),
                "sweep_fixed" => raw.sweep_fixed = Some(text(k, v)?),
                "sweep_lo_m" => raw.sweep_lo_m = Some(number(k, v)?),
                "sweep_hi_m" => raw.sweep_hi_m = Some(number(k, v)?),
                "sweep_step_m" => raw.sweep_step_m = Some(number(k, v)?),
                "trials" => raw.trials = Some(count(k, v)?),
                "r_min_m" => raw.r_min_m = Some(number(k, v)?),
                "r_max_m" => raw.r_max_m = Some(number(k, v)?),
                "candidates_m" => raw.candidates_m = Some(text(k, v)?),
                "pair_mode" => raw.pair_mode = Some(text(k, v)?),
                "seed" => raw.seed = Some(count(k, v)?),
                "output" => raw.output = Some(text(k, v)?),
                _ => return Err(Error::config(k, "unknown field")),
            }
        }
        Ok(raw)
    }

    /// Fields set in `overrides` replace the document's.
    pub fn apply(&mut self, overrides: &ConfigOverrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = overrides.$field.clone() { self.$field = Some(v); })*
            };
        }
        take!(
            d1_m,
            d2_m,
            pt_w,
            n0_w_per_hz,
            p1_w,
            p2_w,
            a1,
            alpha,
            beta,
            sweep_lo_m,
            sweep_hi_m,
            sweep_step_m,
            trials,
            r_min_m,
            r_max_m,
            candidates_m,
            seed,
            output
        );
        if let Some(d) = overrides.direction {
            self.direction = Some(direction_name(d).to_string());
        }
        if let Some(f) = overrides.sweep_fixed {
            self.sweep_fixed = Some(fixed_name(f).to_string());
        }
        if let Some(m) = overrides.pair_mode {
            self.pair_mode = Some(mode_name(m).to_string());
        }
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Downlink => "downlink",
        Direction::Uplink => "uplink",
    }
}

fn fixed_name(f: FixedUser) -> &'static str {
    match f {
        FixedUser::D1 => "d1",
        FixedUser::D2 => "d2",
    }
}

fn mode_name(m: PairingMode) -> &'static str {
    match m {
        PairingMode::Proposed => "proposed",
        PairingMode::Random => "random",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub fixed: FixedUser,
    pub fixed_distance_m: f64,
    pub lo_m: f64,
    pub hi_m: f64,
    pub step_m: f64,
}

/// A validated scenario. Link parameters are checked up front; fields only
/// some subcommands need are checked when that subcommand asks for them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub direction: Direction,
    pub link: LinkParams,
    pub sic: SicModel,
    pub d1_m: Option<f64>,
    pub d2_m: Option<f64>,
    pub sweep: Option<SweepParams>,
    pub trials: Option<u64>,
    pub placement: Option<Annulus>,
    pub candidates_m: Option<Vec<f64>>,
    pub pair_mode: PairingMode,
    pub seed: u64,
    pub output: Option<PathBuf>,
    raw: RawConfig,
}

/// Parses and validates a scenario document with defaults applied
/// (`alpha = 4`, `beta = 0`, `seed = 0`, proposed pairing, 1 m sweep step).
pub fn parse_config(text_doc: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_raw(RawConfig::from_json(text_doc)?)
}

fn required(field: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::config(field, "required field is missing"))
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(
            field,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

fn optional_positive(field: &str, v: Option<f64>) -> Result<Option<f64>> {
    v.map(|x| positive(field, x)).transpose()
}

impl ScenarioConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let direction = match raw.direction.as_deref() {
            Some("downlink") => Direction::Downlink,
            Some("uplink") => Direction::Uplink,
            Some(other) => {
                return Err(Error::config(
                    "direction",
                    format!("expected \"downlink\" or \"uplink\", got {other:?}"),
                ))
            }
            None => return Err(Error::config("direction", "required field is missing")),
        };
        let alpha = raw.alpha.unwrap_or(PathLoss::DEFAULT_EXPONENT);
        let pl = PathLoss::new(alpha).map_err(|e| Error::config("alpha", e.to_string()))?;
        let beta = raw.beta.unwrap_or(0.0);
        let sic = SicModel::new(beta).map_err(|e| Error::config("beta", e.to_string()))?;
        let n0 = positive("n0_w_per_hz", required("n0_w_per_hz", raw.n0_w_per_hz)?)?;

        let link = match direction {
            Direction::Downlink => {
                for (field, set) in [("p1_w", raw.p1_w), ("p2_w", raw.p2_w)] {
                    if set.is_some() {
                        return Err(Error::config(field, "only valid for uplink scenarios"));
                    }
                }
                let pt = positive("pt_w", required("pt_w", raw.pt_w)?)?;
                let a1 = required("a1", raw.a1)?;
                if !(a1.is_finite() && a1 > 0.0) {
                    return Err(Error::config("a1", format!("must be > 0, got {a1}")));
                }
                if a1 >= 0.5 {
                    return Err(Error::config(
                        "a1",
                        format!("infeasible power fraction a1 = {a1} (must be below 0.5)"),
                    ));
                }
                LinkParams::Downlink {
                    a1,
                    budget: PowerBudget {
                        total_power_w: pt,
                        noise_psd_w_per_hz: n0,
                    },
                    pl,
                }
            }
            Direction::Uplink => {
                if raw.a1.is_some() {
                    return Err(Error::config("a1", "only valid for downlink scenarios"));
                }
                let p1 = raw.p1_w.or(raw.pt_w).ok_or_else(|| {
                    Error::config("p1_w", "required field is missing (or set pt_w)")
                })?;
                let p2 = raw.p2_w.or(raw.pt_w).ok_or_else(|| {
                    Error::config("p2_w", "required field is missing (or set pt_w)")
                })?;
                LinkParams::Uplink {
                    p1_w: positive("p1_w", p1)?,
                    p2_w: positive("p2_w", p2)?,
                    noise_psd_w_per_hz: n0,
                    pl,
                }
            }
        };

        let d1_m = optional_positive("d1_m", raw.d1_m)?;
        let d2_m = optional_positive("d2_m", raw.d2_m)?;

        let sweep = match raw.sweep_fixed.as_deref() {
            None => None,
            Some(name) => {
                let (fixed, fixed_field, at) = match name {
                    "d1" => (FixedUser::D1, "d1_m", d1_m),
                    "d2" => (FixedUser::D2, "d2_m", d2_m),
                    other => {
                        return Err(Error::config(
                            "sweep_fixed",
                            format!("expected \"d1\" or \"d2\", got {other:?}"),
                        ))
                    }
                };
                let lo = positive("sweep_lo_m", required("sweep_lo_m", raw.sweep_lo_m)?)?;
                let hi = positive("sweep_hi_m", required("sweep_hi_m", raw.sweep_hi_m)?)?;
                if !(lo < hi) {
                    return Err(Error::config(
                        "sweep_hi_m",
                        format!("must exceed sweep_lo_m = {lo}"),
                    ));
                }
                Some(SweepParams {
                    fixed,
                    fixed_distance_m: required(fixed_field, at)?,
                    lo_m: lo,
                    hi_m: hi,
                    step_m: positive("sweep_step_m", raw.sweep_step_m.unwrap_or(1.0))?,
                })
            }
        };

        if raw.trials == Some(0) {
            return Err(Error::config("trials", "must be >= 1"));
        }
        let r_min = optional_positive("r_min_m", raw.r_min_m)?;
        let r_max = optional_positive("r_max_m", raw.r_max_m)?;
        let placement = match (r_min, r_max) {
            (Some(a), Some(b)) if a < b => Some(Annulus {
                r_min_m: a,
                r_max_m: b,
            }),
            (Some(a), Some(_)) => {
                return Err(Error::config(
                    "r_max_m",
                    format!("must exceed r_min_m = {a}"),
                ))
            }
            (None, Some(_)) => return Err(Error::config("r_min_m", "required with r_max_m")),
            (Some(_), None) => return Err(Error::config("r_max_m", "required with r_min_m")),
            (None, None) => None,
        };

        let candidates_m = raw
            .candidates_m
            .as_deref()
            .map(|s| {
                s.split(',')
                    .map(|part| {
                        let d: f64 = part.trim().parse().map_err(|_| {
                            Error::config("candidates_m", format!("not a number: {part:?}"))
                        })?;
                        positive("candidates_m", d)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()?;

        let pair_mode = match raw.pair_mode.as_deref() {
            None | Some("proposed") => PairingMode::Proposed,
            Some("random") => PairingMode::Random,
            Some(other) => {
                return Err(Error::config(
                    "pair_mode",
                    format!("expected \"proposed\" or \"random\", got {other:?}"),
                ))
            }
        };

        Ok(ScenarioConfig {
            direction,
            link,
            sic,
            d1_m,
            d2_m,
            sweep,
            trials: raw.trials,
            placement,
            candidates_m,
            pair_mode,
            seed: raw.seed.unwrap_or(0),
            output: raw.output.as_ref().map(PathBuf::from),
            raw,
        })
    }

    pub fn raw(&self) -> &RawConfig {
        &self.raw
    }

    /// Normalized power `P_t / N_0` (downlink) or `P_1 / N_0` (uplink).
    pub fn normalized_power(&self) -> f64 {
        match self.link {
            LinkParams::Downlink { budget, .. } => budget.total_power_w / budget.noise_psd_w_per_hz,
            LinkParams::Uplink {
                p1_w,
                noise_psd_w_per_hz,
                ..
            } => p1_w / noise_psd_w_per_hz,
        }
    }

    pub fn threshold_m(&self) -> Result<f64> {
        let d1 = match self.direction {
            // The downlink radius does not depend on the near user's position.
            Direction::Downlink => self.d1_m.unwrap_or(1.0),
            Direction::Uplink => required("d1_m", self.d1_m)?,
        };
        self.link.threshold_m(d1)
    }

    pub fn rate_report(&self) -> Result<RateReport> {
        let d1 = required("d1_m", self.d1_m)?;
        let d2 = required("d2_m", self.d2_m)?;
        if !(d1 < d2) {
            return Err(Error::config("d2_m", format!("must exceed d1_m = {d1}")));
        }
        rate_report(&self.link.cluster(d1, d2)?, self.sic)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = self
            .sweep
            .ok_or_else(|| Error::config("sweep_fixed", "required field is missing"))?;
        Ok(SweepSpec {
            fixed: s.fixed,
            fixed_distance_m: s.fixed_distance_m,
            lo_m: s.lo_m,
            hi_m: s.hi_m,
            step_m: s.step_m,
            link: self.link,
            sic: self.sic,
        })
    }

    pub fn monte_carlo_spec(&self) -> Result<MonteCarloSpec> {
        let trials = self
            .trials
            .ok_or_else(|| Error::config("trials", "required field is missing"))?;
        let placement = self
            .placement
            .ok_or_else(|| Error::config("r_min_m", "required field is missing"))?;
        Ok(MonteCarloSpec {
            trials,
            placement,
            link: self.link,
            seed: self.seed,
        })
    }

    /// Candidates numbered in the order given. Uplink candidates share one
    /// transmit power, so `p1_w` and `p2_w` must agree.
    pub fn candidates(&self) -> Result<Vec<UserTerminal>> {
        let distances = self
            .candidates_m
            .as_ref()
            .ok_or_else(|| Error::config("candidates_m", "required field is missing"))?;
        let power = match self.link {
            LinkParams::Downlink { .. } => None,
            LinkParams::Uplink { p1_w, p2_w, .. } => {
                if p1_w != p2_w {
                    return Err(Error::config(
                        "p2_w",
                        "pairing assumes one common uplink transmit power (p1_w = p2_w)",
                    ));
                }
                Some(p1_w)
            }
        };
        distances
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut user = UserTerminal::new(i as u32, d)?;
                user.tx_power_w = power;
                Ok(user)
            })
            .collect()
    }
}

/// Formats `x` with [`CSV_SIGNIFICANT_DIGITS`] significant digits, in fixed
/// notation for moderate exponents and scientific otherwise, without trailing
/// zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let digits = CSV_SIGNIFICANT_DIGITS - 1;
    let sci = format!("{:.*e}", digits, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..CSV_SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (digits as i32 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Comment lines written before the CSV header.
#[derive(Debug, Clone, Default)]
pub struct Metadata {
    entries: Vec<(String, String)>,
    timestamp: bool,
}

impl Metadata {
    pub fn new(command: &str, config: &ScenarioConfig, timestamp: bool) -> Self {
        let mut meta = Metadata {
            entries: Vec::new(),
            timestamp,
        };
        meta.push("tool", format!("noma {TOOL_VERSION}"));
        meta.push("command", command);
        meta.push(
            "config",
            serde_json::to_string(config.raw()).expect("raw config serializes"),
        );
        meta.push("seed", config.seed.to_string());
        meta
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "# {k}: {v}")?;
        }
        if self.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or_default();
            writeln!(out, "# generated_unix_s: {secs}")?;
        }
        Ok(())
    }
}

/// Column names of [`emit_csv`].
pub const SWEEP_COLUMNS: [&str; 8] = [
    "swept_distance_m",
    "noma_rate_u1",
    "oma_rate_u1",
    "noma_rate_u2",
    "oma_rate_u2",
    "dominant_u1",
    "dominant_u2",
    "threshold_m",
];

/// Sweep records as CSV: `#` metadata lines, a header, one row per record.
pub fn emit_csv<W: Write>(out: &mut W, records: &[SweepRecord], meta: &Metadata) -> Result<()> {
    if records.is_empty() {
        return Err(Error::domain("no records to write"));
    }
    meta.write_to(out)?;
    writeln!(out, "{}", SWEEP_COLUMNS.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig(r.swept_distance_m),
            format_sig(r.noma_rate_u1),
            format_sig(r.oma_rate_u1),
            format_sig(r.noma_rate_u2),
            format_sig(r.oma_rate_u2),
            r.dominant_u1,
            r.dominant_u2,
            format_sig(r.threshold_m),
        )?;
    }
    Ok(())
}

/// Records as a JSON array.
pub fn emit_json<W: Write, T: Serialize + ?Sized>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Per-field overrides of the scenario document.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigOverrides {
    #[arg(long, value_parser = parse_direction)]
    pub direction: Option<Direction>,
    #[arg(long = "d1")]
    pub d1_m: Option<f64>,
    #[arg(long = "d2")]
    pub d2_m: Option<f64>,
    /// Downlink total power, or common uplink power, in watts.
    #[arg(long = "pt")]
    pub pt_w: Option<f64>,
    /// Noise power spectral density in W/Hz.
    #[arg(long = "n0")]
    pub n0_w_per_hz: Option<f64>,
    #[arg(long = "p1")]
    pub p1_w: Option<f64>,
    #[arg(long = "p2")]
    pub p2_w: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = parse_fixed)]
    pub sweep_fixed: Option<FixedUser>,
    #[arg(long = "sweep-lo")]
    pub sweep_lo_m: Option<f64>,
    #[arg(long = "sweep-hi")]
    pub sweep_hi_m: Option<f64>,
    #[arg(long = "sweep-step")]
    pub sweep_step_m: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long = "r-min")]
    pub r_min_m: Option<f64>,
    #[arg(long = "r-max")]
    pub r_max_m: Option<f64>,
    /// Comma-separated candidate distances in meters.
    #[arg(long = "candidates")]
    pub candidates_m: Option<String>,
    #[arg(long, value_parser = parse_mode)]
    pub pair_mode: Option<PairingMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    pub output: Option<String>,
}

fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    match s {
        "downlink" | "dl" => Ok(Direction::Downlink),
        "uplink" | "ul" => Ok(Direction::Uplink),
        _ => Err(format!("expected downlink or uplink, got {s:?}")),
    }
}

fn parse_fixed(s: &str) -> std::result::Result<FixedUser, String> {
    match s {
        "d1" => Ok(FixedUser::D1),
        "d2" => Ok(FixedUser::D2),
        _ => Err(format!("expected d1 or d2, got {s:?}")),
    }
}

fn parse_mode(s: &str) -> std::result::Result<PairingMode, String> {
    match s {
        "proposed" => Ok(PairingMode::Proposed),
        "random" => Ok(PairingMode::Random),
        _ => Err(format!("expected proposed or random, got {s:?}")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file: a flat JSON object.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Omit the generation-time comment line from CSV output.
    #[arg(long)]
    pub no_timestamp: bool,
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Dominance radius of the configured link.
    Threshold(CommonArgs),
    /// NOMA and OMA rates of a single two-user cluster at d1, d2.
    Rates(CommonArgs),
    /// Rates over a grid of distances for one user.
    Sweep(CommonArgs),
    /// Proposed versus random user selection over random drops.
    MonteCarlo(CommonArgs),
    /// Pair a list of candidate users.
    Pair(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Threshold(_) => "threshold",
            Command::Rates(_) => "rates",
            Command::Sweep(_) => "sweep",
            Command::MonteCarlo(_) => "monte-carlo",
            Command::Pair(_) => "pair",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Threshold(a)
            | Command::Rates(a)
            | Command::Sweep(a)
            | Command::MonteCarlo(a)
            | Command::Pair(a) => a,
        }
    }
}

/// Reads the config file (if any), applies flag overrides and validates.
pub fn load_config(args: &CommonArgs) -> Result<ScenarioConfig> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RawConfig::default(),
    };
    raw.apply(&args.overrides);
    ScenarioConfig::from_raw(raw)
}

/// Output of one command, plus where it should go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub bytes: Vec<u8>,
    pub output: Option<PathBuf>,
}

pub fn run(command: &Command) -> Result<Rendered> {
    let args = command.args();
    let config = load_config(args)?;
    let bytes = render(command.name(), &config, args.format, !args.no_timestamp)?;
    Ok(Rendered {
        bytes,
        output: config.output.clone(),
    })
}

/// Runs `command` against a validated scenario and renders the result.
pub fn render(
    command: &str,
    config: &ScenarioConfig,
    format: OutputFormat,
    timestamp: bool,
) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut meta = Metadata::new(command, config, timestamp);
    match command {
        "threshold" => {
            let r = config.threshold_m()?;
            #[derive(Serialize)]
            struct Threshold {
                direction: Direction,
                #[serde(skip_serializing_if = "Option::is_none")]
                d1_m: Option<f64>,
                threshold_m: f64,
            }
            let d1_m = match config.direction {
                Direction::Downlink => None,
                Direction::Uplink => config.d1_m,
            };
            let value = Threshold {
                direction: config.direction,
                d1_m,
                threshold_m: r,
            };
            match format {
                OutputFormat::Json => emit_json(&mut out, &value)?,
                OutputFormat::Csv => {
                    meta.write_to(&mut out)?;
                    writeln!(out, "direction,d1_m,threshold_m")?;
                    writeln!(
                        out,
                        "{},{},{}",
                        direction_name(config.direction),
                        d1_m.map(format_sig).unwrap_or_default(),
                        format_sig(r)
                    )?;
                }
            }
        }
        "rates" => {
            let report = config.rate_report()?;
            match format {
                OutputFormat::Json => emit_json(&mut out, &report)?,
                OutputFormat::Csv => {
                    meta.push("noma_sum_rate", format_sig(report.noma_sum_rate));
                    meta.push("oma_sum_rate", format_sig(report.oma_sum_rate));
                    meta.write_to(&mut out)?;
                    writeln!(out, "user_id,distance_m,noma_rate,oma_rate,noma_dominant")?;
                    for u in &report.users {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            u.id,
                            format_sig(u.distance_m),
                            format_sig(u.noma_rate),
                            format_sig(u.oma_rate),
                            u.noma_dominant
                        )?;
                    }
                }
            }
        }
        "sweep" => {
            let result = run_sweep(&config.sweep_spec()?)?;
            match format {
                OutputFormat::Json => emit_json(&mut out, &result.records)?,
                OutputFormat::Csv => {
                    push_sweep_meta(&mut meta, &result);
                    emit_csv(&mut out, &result.records, &meta)?;
                }
            }
        }
        "monte-carlo" => {
            let summary = run_monte_carlo(&config.monte_carlo_spec()?)?;
            match format {
                OutputFormat::Json => emit_json(&mut out, &summary)?,
                OutputFormat::Csv => write_monte_carlo_csv(&mut out, &summary, &mut meta)?,
            }
        }
        "pair" => {
            let outcome = select_pairs(
                &config.candidates()?,
                &config.link.pairing_config()?,
                config.pair_mode,
                config.seed,
            )?;
            match format {
                OutputFormat::Json => emit_json(&mut out, &outcome)?,
                OutputFormat::Csv => write_pairs_csv(&mut out, &outcome, &mut meta)?,
            }
        }
        other => return Err(Error::domain(format!("unknown command {other:?}"))),
    }
    Ok(out)
}

fn push_sweep_meta(meta: &mut Metadata, result: &SweepOutput) {
    let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_else(|| "none".to_string());
    meta.push("crossover_u1_m", opt(result.crossover_u1_m));
    meta.push("crossover_u2_m", opt(result.crossover_u2_m));
    meta.push("skipped_rows", result.skipped_rows.to_string());
}

fn write_monte_carlo_csv<W: Write>(
    out: &mut W,
    s: &MonteCarloSummary,
    meta: &mut Metadata,
) -> Result<()> {
    meta.push("trials", s.trials.to_string());
    meta.push("feasibility_rate", format_sig(s.feasibility_rate));
    meta.push("placement_model", s.placement_model.clone());
    meta.push("random_selection_model", s.random_selection_model.clone());
    meta.write_to(out)?;
    writeln!(
        out,
        "mode,clusters,dominance_fraction_u1,dominance_fraction_u2,mean_noma_rate_u1,\
         mean_oma_rate_u1,mean_noma_rate_u2,mean_oma_rate_u2,mean_noma_sum_rate,mean_oma_sum_rate"
    )?;
    for (name, m) in [("proposed", &s.proposed), ("random", &s.random)] {
        let mut row = format!("{name},{}", m.clusters);
        for x in [
            m.dominance_fraction_u1,
            m.dominance_fraction_u2,
            m.mean_noma_rate_u1,
            m.mean_oma_rate_u1,
            m.mean_noma_rate_u2,
            m.mean_oma_rate_u2,
            m.mean_noma_sum_rate,
            m.mean_oma_sum_rate,
        ] {
            let _ = write!(row, ",{}", format_sig(x));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

fn write_pairs_csv<W: Write>(out: &mut W, o: &PairingOutcome, meta: &mut Metadata) -> Result<()> {
    if o.mode == PairingMode::Random {
        meta.push(
            "random_selection_model",
            "uniform shuffle of the given candidates",
        );
    }
    meta.write_to(out)?;
    writeln!(
        out,
        "mode,strong_id,strong_distance_m,weak_id,weak_distance_m,threshold_m,feasible"
    )?;
    let mode = mode_name(o.mode);
    for p in &o.pairs {
        writeln!(
            out,
            "{mode},{},{},{},{},{},{}",
            p.strong.id,
            format_sig(p.strong.distance_m),
            p.weak.id,
            format_sig(p.weak.distance_m),
            format_sig(p.threshold_m),
            p.feasible
        )?;
    }
    for u in &o.singletons {
        writeln!(out, "{mode},{},{},,,,", u.id, format_sig(u.distance_m))?;
    }
    Ok(())
}
