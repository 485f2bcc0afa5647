//! Experiment drivers and their CSV output.
//!
//! Every sweep point reuses the same drop seeds, so differences between
//! points are not masked by differences in fading.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{estimate, noise_variance, NoiseMode};
use crate::codebook::{build_codebook, Codebooks};
use crate::csi::{gamma_profile, make_report, CsiReport};
use crate::error::{Error, Result};
use crate::link::{
    derive_seed, drop_seed, mcs_from_cqi, realize_channel, simulate_drop, ThroughputStats,
};
use crate::scenario::Scenario;

const INSPECT_DOMAIN: u64 = 16;

/// One forced-CQI sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqiRow {
    pub cqi: u8,
    pub mcs: u8,
    pub goodput_mbps_mean: f64,
    pub goodput_mbps_std: f64,
    pub mean_bler: f64,
}

/// One SNR sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRow {
    pub snr_db: f64,
    pub mean_ri: f64,
    pub mean_cqi: f64,
    pub mean_mcs: f64,
    pub mean_bler: f64,
    pub goodput_mbps: f64,
    /// Across-drop standard deviation; not part of the CSV.
    pub goodput_mbps_std: f64,
}

/// Single CSI evaluation with γ statistics over the subcarriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiInspection {
    pub report: CsiReport,
    pub gamma_min: f64,
    pub gamma_median: f64,
    pub gamma_max: f64,
}

struct Aggregate {
    goodput_mbps_mean: f64,
    goodput_mbps_std: f64,
    mean_bler: f64,
    mean_ri: f64,
    mean_cqi: f64,
    mean_mcs: f64,
}

fn aggregate(drops: &[ThroughputStats]) -> Aggregate {
    let n = drops.len() as f64;
    let mean = |f: fn(&ThroughputStats) -> f64| drops.iter().map(f).sum::<f64>() / n;
    let goodput_mbps_mean = mean(|s| s.goodput_bps / 1e6);
    let goodput_mbps_std = if drops.len() > 1 {
        let ss: f64 = drops
            .iter()
            .map(|s| (s.goodput_bps / 1e6 - goodput_mbps_mean).powi(2))
            .sum();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Aggregate {
        goodput_mbps_mean,
        goodput_mbps_std,
        mean_bler: mean(|s| s.mean_bler),
        mean_ri: mean(|s| s.mean_ri),
        mean_cqi: mean(|s| s.mean_cqi),
        mean_mcs: mean(|s| s.mean_mcs),
    }
}

// Runs every (point, drop) pair in parallel; results come back grouped by
// point in input order.
fn run_points(points: &[Scenario]) -> Result<Vec<Vec<ThroughputStats>>> {
    let jobs: Vec<(usize, u64)> = points
        .iter()
        .enumerate()
        .flat_map(|(p, s)| (0..s.n_drops).map(move |d| (p, drop_seed(s.seed, d))))
        .collect();
    let stats = jobs
        .par_iter()
        .map(|&(p, seed)| simulate_drop(&points[p], seed))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Vec<ThroughputStats>> = vec![Vec::new(); points.len()];
    for (&(p, _), st) in jobs.iter().zip(stats) {
        out[p].push(st);
    }
    Ok(out)
}

/// Forced-CQI sweep over CQI 0..=15.
pub fn run_sweep_cqi(scenario: &Scenario) -> Result<Vec<CqiRow>> {
    scenario.validate()?;
    let points: Vec<Scenario> = (0..=15u8)
        .map(|cqi| {
            let mut s = scenario.clone();
            s.csi.force_cqi = Some(cqi);
            s
        })
        .collect();
    let results = run_points(&points)?;
    (0..=15u8)
        .zip(results)
        .map(|(cqi, drops)| {
            let agg = aggregate(&drops);
            Ok(CqiRow {
                cqi,
                mcs: match scenario.link.force_mcs {
                    Some(m) => m,
                    None => mcs_from_cqi(cqi)?,
                },
                goodput_mbps_mean: agg.goodput_mbps_mean,
                goodput_mbps_std: agg.goodput_mbps_std,
                mean_bler: agg.mean_bler,
            })
        })
        .collect()
}

/// Closed-loop sweep over `scenario.snr_sweep_db`.
pub fn run_sweep_snr(scenario: &Scenario) -> Result<Vec<SnrRow>> {
    scenario.validate()?;
    if scenario.snr_sweep_db.is_empty() {
        return Err(Error::Config(
            "snr_sweep_db: empty; nothing to sweep".into(),
        ));
    }
    let points: Vec<Scenario> = scenario
        .snr_sweep_db
        .iter()
        .map(|&snr| {
            let mut s = scenario.clone();
            s.noise = NoiseMode::SnrDb(snr);
            s
        })
        .collect();
    let results = run_points(&points)?;
    Ok(scenario
        .snr_sweep_db
        .iter()
        .zip(results)
        .map(|(&snr_db, drops)| {
            let agg = aggregate(&drops);
            SnrRow {
                snr_db,
                mean_ri: agg.mean_ri,
                mean_cqi: agg.mean_cqi,
                mean_mcs: agg.mean_mcs,
                mean_bler: agg.mean_bler,
                goodput_mbps: agg.goodput_mbps_mean,
                goodput_mbps_std: agg.goodput_mbps_std,
            }
        })
        .collect())
}

/// One CSI evaluation on the first block of the first drop.
pub fn run_csi_inspect(scenario: &Scenario) -> Result<CsiInspection> {
    scenario.validate()?;
    let seed = drop_seed(scenario.seed, 0);
    let grid = realize_channel(scenario, seed, 0)?;
    let noise = noise_variance(scenario.noise, &grid);
    let estimated = estimate(
        &grid,
        scenario.est_error_var,
        derive_seed(seed, INSPECT_DOMAIN, 0),
    )?;
    let codebooks = Codebooks::new(scenario.n_tx as u8)?;
    let report = make_report(&estimated, noise.variance, &scenario.csi, &codebooks)?;
    let mut gammas = gamma_profile(&estimated)?;
    gammas.sort_by(f64::total_cmp);
    let n = gammas.len();
    let gamma_median = if n % 2 == 1 {
        gammas[n / 2]
    } else {
        0.5 * (gammas[n / 2 - 1] + gammas[n / 2])
    };
    Ok(CsiInspection {
        report,
        gamma_min: gammas[0],
        gamma_median,
        gamma_max: gammas[n - 1],
    })
}

pub const CQI_HEADER: &str = "cqi,mcs,goodput_mbps_mean,goodput_mbps_std,mean_bler";
pub const SNR_HEADER: &str = "snr_db,mean_ri,mean_cqi,mean_mcs,mean_bler,goodput_mbps";
pub const CSI_HEADER: &str = "ri,i11,i12,i13,i2,sinr_db,cqi,gamma_min,gamma_median,gamma_max";

pub fn cqi_rows_csv(rows: &[CqiRow]) -> String {
    let mut out = format!("{CQI_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6}",
            r.cqi, r.mcs, r.goodput_mbps_mean, r.goodput_mbps_std, r.mean_bler
        );
    }
    out
}

pub fn snr_rows_csv(rows: &[SnrRow]) -> String {
    let mut out = format!("{SNR_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.snr_db, r.mean_ri, r.mean_cqi, r.mean_mcs, r.mean_bler, r.goodput_mbps
        );
    }
    out
}

pub fn csi_inspection_csv(c: &CsiInspection) -> String {
    let p = &c.report.pmi;
    format!(
        "{CSI_HEADER}\n{},{},{},{},{},{},{},{:.6},{:.6},{:.6}\n",
        c.report.ri,
        p.i11,
        p.i12,
        p.i13,
        p.i2,
        c.report.wideband_sinr_db,
        c.report.cqi,
        c.gamma_min,
        c.gamma_median,
        c.gamma_max
    )
}

/// Goodput against CQI as whitespace-separated columns for gnuplot.
pub fn cqi_rows_gnuplot(rows: &[CqiRow]) -> String {
    let mut out = String::from("# cqi goodput_mbps\n");
    for r in rows {
        let _ = writeln!(out, "{} {:.6}", r.cqi, r.goodput_mbps_mean);
    }
    out
}

/// Goodput against SNR as whitespace-separated columns for gnuplot.
pub fn snr_rows_gnuplot(rows: &[SnrRow]) -> String {
    let mut out = String::from("# snr_db goodput_mbps\n");
    for r in rows {
        let _ = writeln!(out, "{} {:.6}", r.snr_db, r.goodput_mbps);
    }
    out
}

/// Every entry of one codebook, one CSV row each, matrix cells row-major.
pub fn dump_codebook(ports: u8, rank: u8) -> Result<String> {
    let cb = build_codebook(ports, rank)?;
    let rows = usize::from(ports);
    let cols = usize::from(rank);
    let mut out = String::from("i11,i12,i13,i2");
    for r in 0..rows {
        for c in 0..cols {
            let _ = write!(out, ",re_{r}_{c},im_{r}_{c}");
        }
    }
    out.push('\n');
    for e in cb.entries() {
        let p = &e.pmi;
        let _ = write!(out, "{},{},{},{}", p.i11, p.i12, p.i13, p.i2);
        for r in 0..rows {
            for c in 0..cols {
                let z = e.matrix.get(r, c);
                // Normalize -0 so the text is sign-stable.
                let _ = write!(out, ",{:.12},{:.12}", z.re + 0.0, z.im + 0.0);
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::CMatrix;

    fn fixed_2x4() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.5, 0.25, 0.125], &[0.125, 0.25, 0.5, 1.0]]).unwrap()
    }

    #[test]
    fn codebook_dump_row_counts() {
        for (ports, rank, n) in [(4, 1, 32), (4, 2, 32), (2, 1, 4), (2, 2, 2)] {
            let text = dump_codebook(ports, rank).unwrap();
            let lines: Vec<&str> = text.lines().collect();
            assert_eq!(lines.len(), n + 1);
            assert!(lines[0].starts_with("i11,i12,i13,i2,re_0_0,im_0_0"));
            let width = 4 + 2 * usize::from(ports) * usize::from(rank);
            assert!(lines.iter().all(|l| l.split(',').count() == width));
        }
        assert!(dump_codebook(3, 1).is_err());
        assert!(dump_codebook(4, 3).is_err());
    }

    #[test]
    fn codebook_dump_first_rank1_entry() {
        let text = dump_codebook(4, 1).unwrap();
        let first = text.lines().nth(1).unwrap();
        assert!(first.starts_with("0,0,0,0,0.500000000000,0.000000000000,0.500000000000"));
        assert!(!text.contains("-0.000000000000"));
    }

    #[test]
    fn inspect_fixed_examples() {
        let mut s = Scenario::fixed(fixed_2x4()).unwrap();
        s.noise = NoiseMode::Variance(0.1);
        let c = run_csi_inspect(&s).unwrap();
        assert_eq!(c.report.ri, 1);
        assert!((c.gamma_min - 2.6605).abs() < 1e-3);
        assert_eq!(c.gamma_min, c.gamma_max);

        let orth =
            CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]).unwrap();
        let mut s = Scenario::fixed(orth).unwrap();
        s.noise = NoiseMode::Variance(0.1);
        let c = run_csi_inspect(&s).unwrap();
        assert_eq!(c.report.ri, 2);
        let p = c.report.pmi;
        assert_eq!((p.i11, p.i12, p.i13, p.i2), (0, 0, 1, 0));

        let s = Scenario::fixed(CMatrix::zeros(2, 4)).unwrap();
        let c = run_csi_inspect(&s).unwrap();
        assert_eq!((c.report.ri, c.report.cqi), (1, 4));
        let line = csi_inspection_csv(&c);
        assert!(line.starts_with(CSI_HEADER));
        assert!(line.contains("inf"));
    }

    #[test]
    fn snr_sweep_needs_points() {
        let s = Scenario::rice1(4).unwrap();
        assert!(run_sweep_snr(&s).is_err());
    }

    #[test]
    fn rows_follow_input_order() {
        let mut s = Scenario::rice1(2).unwrap();
        s.n_drops = 2;
        s.n_slots = 50;
        s.snr_sweep_db = vec![12.0, 0.0, 6.0];
        let rows = run_sweep_snr(&s).unwrap();
        let snrs: Vec<f64> = rows.iter().map(|r| r.snr_db).collect();
        assert_eq!(snrs, [12.0, 0.0, 6.0]);
        let csv = snr_rows_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(SNR_HEADER));
        assert_eq!(snr_rows_gnuplot(&rows).lines().count(), 4);
    }
}
