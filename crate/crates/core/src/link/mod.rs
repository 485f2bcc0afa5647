//! gNB link adaptation and the PHY abstraction that turns grants into
//! delivered bits.

mod sim;
pub mod tables;

pub use sim::{
    derive_seed, drop_seed, realize_channel, simulate_drop, simulate_drop_with, SlotRecord,
    ThroughputStats,
};
pub use tables::{cqi_entry, cqi_table, mcs_entry, mcs_table, CqiEntry, McsEntry, RateEntry};

use crate::channel::ChannelGrid;
use crate::codebook::{precoder_for, PmiIndex};
use crate::csi::{mean_layer_sinr, CsiReport};
use crate::error::{Error, Result};
use crate::numerics::{lin_to_db, CMatrix};

/// Data resource elements per PRB per slot assumed by [`tbs`].
pub const DATA_RE_PER_PRB: u64 = 156;

/// Highest MCS whose spectral efficiency does not exceed that of `cqi`.
/// CQIs below the lowest MCS efficiency (0, 1, and 2 by equality) map to 0.
pub fn mcs_from_cqi(cqi: u8) -> Result<u8> {
    let target = cqi_entry(cqi)?.efficiency_x1024();
    Ok(mcs_table()
        .iter()
        .rev()
        .find(|m| m.efficiency_x1024() <= target)
        .map_or(0, |m| m.index))
}

/// Simplified transport block size, `⌊156 · n_prb · ν · Qm · R⌋` bits.
pub fn tbs(mcs: u8, n_layers: u8, n_prb: usize) -> Result<u64> {
    let entry = mcs_entry(mcs)?;
    tbs_for_rate(entry.qm, u32::from(entry.rate_x1024), n_layers, n_prb)
}

/// [`tbs`] for an explicit modulation order and ×1024 code rate.
pub fn tbs_for_rate(qm: u8, rate_x1024: u32, n_layers: u8, n_prb: usize) -> Result<u64> {
    if !matches!(n_layers, 1 | 2) {
        return Err(Error::Config(format!("unsupported layer count {n_layers}")));
    }
    if n_prb == 0 {
        return Err(Error::Config("n_prb must be >= 1".into()));
    }
    let bits_x1024 = DATA_RE_PER_PRB
        * n_prb as u64
        * u64::from(n_layers)
        * u64::from(qm)
        * u64::from(rate_x1024);
    Ok(bits_x1024 / 1024)
}

/// The gNB scheduling decision for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkGrant {
    pub n_layers: u8,
    pub pmi: PmiIndex,
    pub precoder: CMatrix,
    pub mcs: u8,
    pub tbs_bits: u64,
    pub n_prb: usize,
}

impl DownlinkGrant {
    /// Same grant with the MCS (and hence TBS) replaced.
    pub fn with_mcs(&self, mcs: u8) -> Result<Self> {
        Ok(Self {
            mcs,
            tbs_bits: tbs(mcs, self.n_layers, self.n_prb)?,
            ..self.clone()
        })
    }
}

/// Follows the report exactly: ν = RI, precoder from PMI, MCS from CQI.
pub fn schedule(report: &CsiReport, n_prb: usize) -> Result<DownlinkGrant> {
    if report.pmi.rank != report.ri {
        return Err(Error::Config(format!(
            "report rank {} disagrees with PMI rank {}",
            report.ri, report.pmi.rank
        )));
    }
    let mcs = mcs_from_cqi(report.cqi)?;
    Ok(DownlinkGrant {
        n_layers: report.ri,
        pmi: report.pmi,
        precoder: precoder_for(&report.pmi)?,
        mcs,
        tbs_bits: tbs(mcs, report.ri, n_prb)?,
        n_prb,
    })
}

/// Per-rank ceilings on the effective SINR, in dB. `f64::INFINITY` disables a
/// ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCaps {
    pub rank1_db: f64,
    pub rank2_db: f64,
}

impl Default for RankCaps {
    fn default() -> Self {
        Self {
            rank1_db: 19.0,
            rank2_db: 16.0,
        }
    }
}

impl RankCaps {
    pub const DISABLED: RankCaps = RankCaps {
        rank1_db: f64::INFINITY,
        rank2_db: f64::INFINITY,
    };

    pub fn for_layers(&self, n_layers: u8) -> f64 {
        if n_layers >= 2 {
            self.rank2_db
        } else {
            self.rank1_db
        }
    }
}

/// Mean linear MMSE SINR over subcarriers and layers, in dB, capped per rank.
pub fn effective_sinr_db(
    grid: &ChannelGrid,
    grant: &DownlinkGrant,
    noise_var: f64,
    caps: &RankCaps,
) -> Result<f64> {
    let mean = mean_layer_sinr(grid, &grant.precoder, noise_var)?;
    Ok(lin_to_db(mean).min(caps.for_layers(grant.n_layers)))
}

/// Logistic BLER waterfall around a Shannon-gap threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerModel {
    /// Logistic slope per dB.
    pub slope_per_db: f64,
    /// Gap to the Shannon threshold `10·log₁₀(2^SE − 1)`, dB.
    pub gap_db: f64,
}

impl Default for BlerModel {
    fn default() -> Self {
        Self {
            slope_per_db: 2.0,
            gap_db: 1.0,
        }
    }
}

impl BlerModel {
    /// SINR (dB) at which `mcs` has 50% BLER.
    pub fn threshold_db(&self, mcs: u8) -> Result<f64> {
        let se = mcs_entry(mcs)?.spectral_efficiency();
        Ok(lin_to_db(se.exp2() - 1.0) + self.gap_db)
    }

    pub fn bler(&self, eff_sinr_db: f64, mcs: u8) -> Result<f64> {
        if eff_sinr_db.is_nan() {
            return Err(Error::Domain("effective SINR is NaN".into()));
        }
        let th = self.threshold_db(mcs)?;
        Ok(1.0 / (1.0 + (self.slope_per_db * (eff_sinr_db - th)).exp()))
    }
}

/// BLER under the default model.
pub fn bler(eff_sinr_db: f64, mcs: u8) -> Result<f64> {
    BlerModel::default().bler(eff_sinr_db, mcs)
}
