//! Slot-level closed-loop simulation of one drop.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{effective_sinr_db, schedule, DownlinkGrant};
use crate::channel::{estimate, fixed_grid, noise_variance, rice1_grid, ChannelGrid, NoiseSpec};
use crate::codebook::Codebooks;
use crate::csi::{make_report, CsiReport};
use crate::error::Result;
use crate::scenario::{ChannelSpec, Scenario};

const DOMAIN_DROP: u64 = 1;
const DOMAIN_ESTIMATE: u64 = 2;
const DOMAIN_ACK: u64 = 3;

/// Deterministic 64-bit seed for `(base, domain, index)`.
pub fn derive_seed(base: u64, domain: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(domain);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Seed of drop `index` within a scenario run.
pub fn drop_seed(scenario_seed: u64, index: usize) -> u64 {
    derive_seed(scenario_seed, DOMAIN_DROP, index as u64)
}

/// Channel of `block` within the drop seeded by `seed`. One subcarrier per PRB.
pub fn realize_channel(scenario: &Scenario, seed: u64, block: u64) -> Result<ChannelGrid> {
    match &scenario.channel {
        ChannelSpec::Fixed(h) => fixed_grid(h, scenario.n_prb),
        ChannelSpec::Rice1 { k_factor, .. } => {
            rice1_grid(seed, *k_factor, scenario.n_tx, scenario.n_prb, block)
        }
    }
}

/// Counters of one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputStats {
    pub slots: u64,
    pub tb_attempts: u64,
    pub tb_acks: u64,
    /// Transport blocks abandoned after the last HARQ attempt.
    pub tb_dropped: u64,
    pub delivered_bits: u64,
    pub goodput_bps: f64,
    /// Fraction of attempts that were NACKed.
    pub mean_bler: f64,
    pub mean_mcs: f64,
    pub mean_ri: f64,
    pub mean_cqi: f64,
}

/// What happened in one slot.
#[derive(Debug, Clone, Copy)]
pub struct SlotRecord<'a> {
    pub slot: u64,
    pub block_id: u64,
    /// The report the transmitted grant was built from.
    pub report: &'a CsiReport,
    pub grant: &'a DownlinkGrant,
    pub retransmission: bool,
    pub eff_sinr_db: f64,
    pub bler: f64,
    pub ack: bool,
}

struct Scheduled {
    seq: u64,
    report: CsiReport,
    grant: DownlinkGrant,
}

struct Pending {
    scheduled: Scheduled,
    attempts: u32,
}

/// Runs one drop and returns its counters.
pub fn simulate_drop(scenario: &Scenario, seed: u64) -> Result<ThroughputStats> {
    simulate_drop_with(scenario, seed, |_| {})
}

/// [`simulate_drop`] with a per-slot observer.
///
/// Each slot carries one transport block: a pending HARQ retransmission if
/// there is one, otherwise a new block under the latest grant. CSI is
/// refreshed every `csi_period` slots and the fading channel every
/// `coherence_slots` slots.
pub fn simulate_drop_with<F>(
    scenario: &Scenario,
    seed: u64,
    mut observe: F,
) -> Result<ThroughputStats>
where
    F: FnMut(&SlotRecord<'_>),
{
    scenario.validate()?;
    let codebooks = Codebooks::new(scenario.n_tx as u8)?;
    let link = &scenario.link;
    let coherence = match scenario.channel {
        ChannelSpec::Fixed(_) => u64::MAX,
        ChannelSpec::Rice1 {
            coherence_slots, ..
        } => coherence_slots,
    };
    let realize = |block: u64| realize_channel(scenario, seed, block);
    let mut ack_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, DOMAIN_ACK, 0));

    let mut grid = realize(0)?;
    let mut noise: NoiseSpec = noise_variance(scenario.noise, &grid);
    let mut block = 0u64;
    let mut current: Option<Scheduled> = None;
    let mut pending: Option<Pending> = None;
    let mut seq = 0u64;
    // With perfect estimation the report depends only on the block.
    let mut report_cache: Option<(u64, CsiReport)> = None;
    let mut eff_cache: Option<(u64, u64, f64)> = None;

    let mut stats = ThroughputStats {
        slots: scenario.n_slots,
        tb_attempts: 0,
        tb_acks: 0,
        tb_dropped: 0,
        delivered_bits: 0,
        goodput_bps: 0.0,
        mean_bler: 0.0,
        mean_mcs: 0.0,
        mean_ri: 0.0,
        mean_cqi: 0.0,
    };
    let (mut sum_mcs, mut sum_ri, mut sum_cqi) = (0u64, 0u64, 0u64);

    for slot in 0..scenario.n_slots {
        let slot_block = slot / coherence;
        if slot_block != block {
            block = slot_block;
            grid = realize(block)?;
            noise = noise_variance(scenario.noise, &grid);
        }

        if slot % scenario.csi_period == 0 || current.is_none() {
            let report = match report_cache {
                Some((b, r)) if b == block && scenario.est_error_var == 0.0 => r,
                _ => {
                    let est_seed = derive_seed(seed, DOMAIN_ESTIMATE, slot);
                    let estimated = estimate(&grid, scenario.est_error_var, est_seed)?;
                    let r = make_report(&estimated, noise.variance, &scenario.csi, &codebooks)?;
                    report_cache = Some((block, r));
                    r
                }
            };
            let mut grant = schedule(&report, scenario.n_prb)?;
            if let Some(mcs) = link.force_mcs {
                grant = grant.with_mcs(mcs)?;
            }
            let unchanged = current
                .as_ref()
                .is_some_and(|c| c.report == report && c.grant == grant);
            if !unchanged {
                seq += 1;
                current = Some(Scheduled { seq, report, grant });
            }
        }

        let mut tx = match pending.take() {
            Some(p) => p,
            None => {
                let c = current.as_ref().expect("grant scheduled above");
                Pending {
                    scheduled: Scheduled {
                        seq: c.seq,
                        report: c.report,
                        grant: c.grant.clone(),
                    },
                    attempts: 0,
                }
            }
        };
        let retransmission = tx.attempts > 0;
        let eff = match eff_cache {
            Some((b, s, e)) if b == block && s == tx.scheduled.seq => e,
            _ => {
                let e = effective_sinr_db(&grid, &tx.scheduled.grant, noise.variance, &link.caps)?;
                eff_cache = Some((block, tx.scheduled.seq, e));
                e
            }
        };
        let p_fail = link.bler.bler(eff, tx.scheduled.grant.mcs)?;
        let ack = ack_rng.random::<f64>() < 1.0 - p_fail;

        tx.attempts += 1;
        stats.tb_attempts += 1;
        sum_mcs += u64::from(tx.scheduled.grant.mcs);
        sum_ri += u64::from(tx.scheduled.grant.n_layers);
        sum_cqi += u64::from(tx.scheduled.report.cqi);
        observe(&SlotRecord {
            slot,
            block_id: block,
            report: &tx.scheduled.report,
            grant: &tx.scheduled.grant,
            retransmission,
            eff_sinr_db: eff,
            bler: p_fail,
            ack,
        });

        if ack {
            stats.tb_acks += 1;
            stats.delivered_bits += tx.scheduled.grant.tbs_bits;
        } else if tx.attempts >= link.max_harq_tx {
            stats.tb_dropped += 1;
        } else {
            pending = Some(tx);
        }
    }

    let n = stats.tb_attempts as f64;
    stats.mean_bler = (stats.tb_attempts - stats.tb_acks) as f64 / n;
    stats.mean_mcs = sum_mcs as f64 / n;
    stats.mean_ri = sum_ri as f64 / n;
    stats.mean_cqi = sum_cqi as f64 / n;
    stats.goodput_bps =
        stats.delivered_bits as f64 / stats.slots as f64 / scenario.slot_duration_s()
            * scenario.dl_duty_factor;
    Ok(stats)
}
