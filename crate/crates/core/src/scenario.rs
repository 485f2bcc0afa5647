//! Scenario files.
//!
//! A scenario is a JSON document. Every key is optional except `channel`;
//! unknown keys are rejected. A minimal file is `{"channel": "rice1"}`.
//!
//! ```json
//! {
//!   "n_tx": 4,
//!   "channel": {"type": "fixed", "matrix": [[1, 0.5, 0.25, 0.125], [0.125, 0.25, 0.5, 1]]},
//!   "noise": {"snr_db": 10.0},
//!   "snr_sweep_db": [0, 2, 4],
//!   "csi": {"gamma_th": 2.5, "force_ri": 2, "force_cqi": null},
//!   "link": {"caps_db": {"rank1": 19.0, "rank2": 16.0}, "max_harq_tx": 4},
//!   "n_slots": 2000, "csi_period": 10, "n_drops": 20, "seed": 0
//! }
//! ```
//!
//! Noise is `"noise_free"`, `{"snr_db": x}` relative to the mean received
//! power, or `{"variance": x}` absolute.
//!
//! Matrix entries are either reals or `[re, im]` pairs. A cap of `null`
//! disables that ceiling.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::channel::NoiseMode;
use crate::csi::CsiConfig;
use crate::error::{Error, Result};
use crate::link::{BlerModel, RankCaps};
use crate::numerics::CMatrix;

/// Channel model of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Fixed(CMatrix),
    Rice1 { k_factor: f64, coherence_slots: u64 },
}

/// gNB-side link settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub caps: RankCaps,
    pub bler: BlerModel,
    pub max_harq_tx: u32,
    /// Overrides the CQI → MCS mapping when set.
    pub force_mcs: Option<u8>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            caps: RankCaps::default(),
            bler: BlerModel::default(),
            max_harq_tx: 4,
            force_mcs: None,
        }
    }
}

/// Deployment labels carried along for reference; they do not affect the
/// simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub band: String,
    pub frequency_range: String,
    pub duplex: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            band: "n78".into(),
            frequency_range: "FR1".into(),
            duplex: "TDD".into(),
        }
    }
}

/// A validated simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_prb: usize,
    pub scs_khz: u32,
    pub channel: ChannelSpec,
    pub noise: NoiseMode,
    pub snr_sweep_db: Vec<f64>,
    pub csi: CsiConfig,
    /// Variance of the UE channel estimation error (0 = perfect).
    pub est_error_var: f64,
    pub link: LinkConfig,
    pub n_slots: u64,
    pub csi_period: u64,
    pub dl_duty_factor: f64,
    pub seed: u64,
    pub n_drops: usize,
    pub metadata: Metadata,
}

impl Scenario {
    /// Defaults around a given channel: 106 PRBs at 30 kHz, noise free,
    /// 20 drops of 2000 slots.
    pub fn with_channel(channel: ChannelSpec) -> Result<Self> {
        let n_tx = match &channel {
            ChannelSpec::Fixed(h) => h.cols(),
            ChannelSpec::Rice1 { .. } => 4,
        };
        let s = Self {
            n_tx,
            n_rx: 2,
            n_prb: 106,
            scs_khz: 30,
            channel,
            noise: NoiseMode::NoiseFree,
            snr_sweep_db: Vec::new(),
            csi: CsiConfig::default(),
            est_error_var: 0.0,
            link: LinkConfig::default(),
            n_slots: 2000,
            csi_period: 10,
            dl_duty_factor: 1.0,
            seed: 0,
            n_drops: 20,
            metadata: Metadata::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn rice1(n_tx: usize) -> Result<Self> {
        let s = Self {
            n_tx,
            ..Self::with_channel(ChannelSpec::Rice1 {
                k_factor: 1.0,
                coherence_slots: 10,
            })?
        };
        s.validate()?;
        Ok(s)
    }

    pub fn fixed(h: CMatrix) -> Result<Self> {
        Self::with_channel(ChannelSpec::Fixed(h))
    }

    /// Slot length in seconds for the configured subcarrier spacing.
    pub fn slot_duration_s(&self) -> f64 {
        15e-3 / f64::from(self.scs_khz)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if !matches!(self.n_tx, 2 | 4) {
            return cfg(format!("n_tx: must be 2 or 4, got {}", self.n_tx));
        }
        if self.n_rx != 2 {
            return cfg(format!(
                "n_rx: the UE has 2 receive antennas, got {}",
                self.n_rx
            ));
        }
        if !(1..=275).contains(&self.n_prb) {
            return cfg(format!("n_prb: must be in 1..=275, got {}", self.n_prb));
        }
        if !matches!(self.scs_khz, 15 | 30 | 60 | 120) {
            return cfg(format!(
                "scs_khz: must be 15, 30, 60 or 120, got {}",
                self.scs_khz
            ));
        }
        match &self.channel {
            ChannelSpec::Fixed(h) => {
                if h.rows() != self.n_rx || h.cols() != self.n_tx {
                    return cfg(format!(
                        "channel.matrix: expected {}x{}, got {}x{}",
                        self.n_rx,
                        self.n_tx,
                        h.rows(),
                        h.cols()
                    ));
                }
            }
            ChannelSpec::Rice1 {
                k_factor,
                coherence_slots,
            } => {
                if !(k_factor.is_finite() && *k_factor >= 0.0) {
                    return cfg(format!(
                        "channel.k_factor: must be finite and >= 0, got {k_factor}"
                    ));
                }
                if *coherence_slots == 0 {
                    return cfg("channel.coherence_slots: must be >= 1".into());
                }
            }
        }
        if let NoiseMode::SnrDb(snr) = self.noise {
            if !snr.is_finite() {
                return cfg(format!("noise.snr_db: must be finite, got {snr}"));
            }
        }
        if let NoiseMode::Variance(v) = self.noise {
            if !(v.is_finite() && v > 0.0) {
                return cfg(format!("noise.variance: must be finite and > 0, got {v}"));
            }
        }
        if let Some(bad) = self.snr_sweep_db.iter().find(|x| !x.is_finite()) {
            return cfg(format!("snr_sweep_db: non-finite value {bad}"));
        }
        self.csi.validate().map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("csi.{msg}")),
            other => other,
        })?;
        if !(self.est_error_var.is_finite() && self.est_error_var >= 0.0) {
            return cfg(format!(
                "csi.est_error_var: must be finite and >= 0, got {}",
                self.est_error_var
            ));
        }
        for (name, cap) in [
            ("rank1", self.link.caps.rank1_db),
            ("rank2", self.link.caps.rank2_db),
        ] {
            if !(cap == f64::INFINITY || (-10.0..=60.0).contains(&cap)) {
                return cfg(format!(
                    "link.caps_db.{name}: must be in [-10, 60] dB or null, got {cap}"
                ));
            }
        }
        let bler = self.link.bler;
        if !(bler.slope_per_db.is_finite() && bler.slope_per_db > 0.0) {
            return cfg(format!(
                "link.bler_slope_per_db: must be > 0, got {}",
                bler.slope_per_db
            ));
        }
        if !(bler.gap_db.is_finite() && bler.gap_db >= 0.0) {
            return cfg(format!(
                "link.bler_gap_db: must be >= 0, got {}",
                bler.gap_db
            ));
        }
        if !(1..=16).contains(&self.link.max_harq_tx) {
            return cfg(format!(
                "link.max_harq_tx: must be in 1..=16, got {}",
                self.link.max_harq_tx
            ));
        }
        if let Some(mcs) = self.link.force_mcs {
            if mcs > 28 {
                return cfg(format!("link.force_mcs: must be in 0..=28, got {mcs}"));
            }
        }
        if self.n_slots == 0 {
            return cfg("n_slots: must be >= 1".into());
        }
        if self.csi_period == 0 {
            return cfg("csi_period: must be >= 1".into());
        }
        if self.n_drops == 0 {
            return cfg("n_drops: must be >= 1".into());
        }
        if !(self.dl_duty_factor > 0.0 && self.dl_duty_factor <= 1.0) {
            return cfg(format!(
                "dl_duty_factor: must be in (0, 1], got {}",
                self.dl_duty_factor
            ));
        }
        Ok(())
    }

    /// Parses and validates a scenario document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("{path}: {}", e.into_inner()))
        })?;
        raw.resolve()
    }
}

/// Reads and validates the scenario at `path`.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json_str(&text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    n_tx: Option<usize>,
    #[serde(default = "default_n_rx")]
    n_rx: usize,
    #[serde(default = "default_n_prb")]
    n_prb: usize,
    #[serde(default = "default_scs")]
    scs_khz: u32,
    channel: RawChannel,
    #[serde(default)]
    noise: Option<RawNoise>,
    #[serde(default)]
    snr_sweep_db: Vec<f64>,
    #[serde(default)]
    csi: RawCsi,
    #[serde(default)]
    link: RawLink,
    #[serde(default = "default_n_slots")]
    n_slots: u64,
    #[serde(default = "default_csi_period")]
    csi_period: u64,
    #[serde(default = "default_duty")]
    dl_duty_factor: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_n_drops")]
    n_drops: usize,
    band: Option<String>,
    frequency_range: Option<String>,
    duplex: Option<String>,
}

fn default_n_rx() -> usize {
    2
}
fn default_n_prb() -> usize {
    106
}
fn default_scs() -> u32 {
    30
}
fn default_n_slots() -> u64 {
    2000
}
fn default_csi_period() -> u64 {
    10
}
fn default_duty() -> f64 {
    1.0
}
fn default_n_drops() -> usize {
    20
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawChannel {
    Name(String),
    Spec(RawChannelSpec),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawChannelSpec {
    Fixed {
        matrix: Vec<Vec<RawEntry>>,
    },
    Rice1 {
        #[serde(default = "default_k")]
        k_factor: f64,
        #[serde(default = "default_coherence")]
        coherence_slots: u64,
    },
}

fn default_k() -> f64 {
    1.0
}
fn default_coherence() -> u64 {
    10
}

#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum RawEntry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<RawEntry> for Complex64 {
    fn from(e: RawEntry) -> Self {
        match e {
            RawEntry::Real(x) => Complex64::new(x, 0.0),
            RawEntry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNoise {
    Keyword(String),
    Snr(RawSnr),
    Variance(RawVariance),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariance {
    variance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSnr {
    snr_db: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCsi {
    #[serde(default = "default_gamma_th")]
    gamma_th: f64,
    #[serde(default)]
    force_ri: Option<u8>,
    #[serde(default)]
    force_cqi: Option<u8>,
    #[serde(default = "default_clamp")]
    sinr_clamp_db: [i32; 2],
    #[serde(default)]
    est_error_var: f64,
}

impl Default for RawCsi {
    fn default() -> Self {
        Self {
            gamma_th: default_gamma_th(),
            force_ri: None,
            force_cqi: None,
            sinr_clamp_db: default_clamp(),
            est_error_var: 0.0,
        }
    }
}

fn default_gamma_th() -> f64 {
    2.5
}
fn default_clamp() -> [i32; 2] {
    [-10, 40]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    #[serde(default)]
    caps_db: RawCaps,
    #[serde(default = "default_slope")]
    bler_slope_per_db: f64,
    #[serde(default = "default_gap")]
    bler_gap_db: f64,
    #[serde(default = "default_harq")]
    max_harq_tx: u32,
    #[serde(default)]
    force_mcs: Option<u8>,
}

impl Default for RawLink {
    fn default() -> Self {
        Self {
            caps_db: RawCaps::default(),
            bler_slope_per_db: default_slope(),
            bler_gap_db: default_gap(),
            max_harq_tx: default_harq(),
            force_mcs: None,
        }
    }
}

fn default_slope() -> f64 {
    2.0
}
fn default_gap() -> f64 {
    1.0
}
fn default_harq() -> u32 {
    4
}

/// Absent → default ceiling; explicit `null` → disabled.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    #[serde(default = "default_cap1")]
    rank1: Option<f64>,
    #[serde(default = "default_cap2")]
    rank2: Option<f64>,
}

impl Default for RawCaps {
    fn default() -> Self {
        Self {
            rank1: default_cap1(),
            rank2: default_cap2(),
        }
    }
}

fn default_cap1() -> Option<f64> {
    Some(RankCaps::default().rank1_db)
}
fn default_cap2() -> Option<f64> {
    Some(RankCaps::default().rank2_db)
}

impl RawScenario {
    fn resolve(self) -> Result<Scenario> {
        let channel = match self.channel {
            RawChannel::Name(name) if name == "rice1" => ChannelSpec::Rice1 {
                k_factor: default_k(),
                coherence_slots: default_coherence(),
            },
            RawChannel::Name(name) => {
                return Err(Error::Config(format!(
                    "channel: unknown channel {name:?}; use \"rice1\" or an object"
                )))
            }
            RawChannel::Spec(RawChannelSpec::Rice1 {
                k_factor,
                coherence_slots,
            }) => ChannelSpec::Rice1 {
                k_factor,
                coherence_slots,
            },
            RawChannel::Spec(RawChannelSpec::Fixed { matrix }) => {
                let rows: Vec<Vec<Complex64>> = matrix
                    .into_iter()
                    .map(|r| r.into_iter().map(Complex64::from).collect())
                    .collect();
                let h = CMatrix::from_rows(&rows)
                    .map_err(|e| Error::Config(format!("channel.matrix: {e}")))?;
                ChannelSpec::Fixed(h)
            }
        };
        let n_tx = match (&channel, self.n_tx) {
            (_, Some(n)) => n,
            (ChannelSpec::Fixed(h), None) => h.cols(),
            (ChannelSpec::Rice1 { .. }, None) => 4,
        };
        let noise = match self.noise {
            None => NoiseMode::NoiseFree,
            Some(RawNoise::Keyword(k)) if k == "noise_free" => NoiseMode::NoiseFree,
            Some(RawNoise::Keyword(k)) => {
                return Err(Error::Config(format!(
                    "noise: unknown mode {k:?}; use \"noise_free\", {{\"snr_db\": x}} or {{\"variance\": x}}"
                )))
            }
            Some(RawNoise::Snr(s)) => NoiseMode::SnrDb(s.snr_db),
            Some(RawNoise::Variance(v)) => NoiseMode::Variance(v.variance),
        };
        let defaults = Metadata::default();
        let scenario = Scenario {
            n_tx,
            n_rx: self.n_rx,
            n_prb: self.n_prb,
            scs_khz: self.scs_khz,
            channel,
            noise,
            snr_sweep_db: self.snr_sweep_db,
            csi: CsiConfig {
                gamma_th: self.csi.gamma_th,
                force_ri: self.csi.force_ri,
                force_cqi: self.csi.force_cqi,
                sinr_clamp_db: (self.csi.sinr_clamp_db[0], self.csi.sinr_clamp_db[1]),
            },
            est_error_var: self.csi.est_error_var,
            link: LinkConfig {
                caps: RankCaps {
                    rank1_db: self.link.caps_db.rank1.unwrap_or(f64::INFINITY),
                    rank2_db: self.link.caps_db.rank2.unwrap_or(f64::INFINITY),
                },
                bler: BlerModel {
                    slope_per_db: self.link.bler_slope_per_db,
                    gap_db: self.link.bler_gap_db,
                },
                max_harq_tx: self.link.max_harq_tx,
                force_mcs: self.link.force_mcs,
            },
            n_slots: self.n_slots,
            csi_period: self.csi_period,
            dl_duty_factor: self.dl_duty_factor,
            seed: self.seed,
            n_drops: self.n_drops,
            metadata: Metadata {
                band: self.band.unwrap_or(defaults.band),
                frequency_range: self.frequency_range.unwrap_or(defaults.frequency_range),
                duplex: self.duplex.unwrap_or(defaults.duplex),
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
