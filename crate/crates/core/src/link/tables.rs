//! MCS and CQI tables (64QAM variants), loaded from the CSV files under
//! `data/`.
//!
//! Modulation order and the ×1024 code rate are authoritative; the printed
//! efficiency column is only a cross-check.

use std::sync::LazyLock;

use crate::error::{Error, Result};

pub const MCS_TABLE_CSV: &str = include_str!("../../data/mcs_table_64qam.csv");
pub const CQI_TABLE_CSV: &str = include_str!("../../data/cqi_table_64qam.csv");

/// One row of a modulation/coding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateEntry {
    pub index: u8,
    /// Bits per modulation symbol; 0 for the "out of range" CQI.
    pub qm: u8,
    /// Code rate × 1024.
    pub rate_x1024: u16,
}

impl RateEntry {
    pub fn code_rate(&self) -> f64 {
        f64::from(self.rate_x1024) / 1024.0
    }

    pub fn spectral_efficiency(&self) -> f64 {
        f64::from(self.qm) * self.code_rate()
    }

    /// Spectral efficiency × 1024, exact.
    pub fn efficiency_x1024(&self) -> u32 {
        u32::from(self.qm) * u32::from(self.rate_x1024)
    }
}

pub type McsEntry = RateEntry;
pub type CqiEntry = RateEntry;

/// Parses `index,qm,rate_x1024,efficiency` rows; `#` lines are comments.
pub fn parse_rate_table(text: &str) -> Result<Vec<RateEntry>> {
    let mut rows = Vec::new();
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some("index,qm,rate_x1024,efficiency") => {}
        other => return Err(Error::Table(format!("unexpected header {other:?}"))),
    }
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [index, qm, rate, eff] = fields[..] else {
            return Err(Error::Table(format!("expected 4 columns in {line:?}")));
        };
        let bad = |what: &str| Error::Table(format!("bad {what} in {line:?}"));
        let entry = RateEntry {
            index: index.parse().map_err(|_| bad("index"))?,
            qm: qm.parse().map_err(|_| bad("qm"))?,
            rate_x1024: rate.parse().map_err(|_| bad("rate"))?,
        };
        let printed: f64 = eff.parse().map_err(|_| bad("efficiency"))?;
        if (printed - entry.spectral_efficiency()).abs() > 1e-4 {
            return Err(bad("efficiency"));
        }
        if usize::from(entry.index) != rows.len() {
            return Err(bad("index order"));
        }
        if entry.rate_x1024 >= 1024 || !matches!(entry.qm, 0 | 2 | 4 | 6 | 8) {
            return Err(bad("rate or modulation"));
        }
        rows.push(entry);
    }
    Ok(rows)
}

static MCS_TABLE: LazyLock<Vec<McsEntry>> =
    LazyLock::new(|| parse_rate_table(MCS_TABLE_CSV).expect("embedded MCS table is valid"));
static CQI_TABLE: LazyLock<Vec<CqiEntry>> =
    LazyLock::new(|| parse_rate_table(CQI_TABLE_CSV).expect("embedded CQI table is valid"));

/// The 29-row PDSCH MCS table.
pub fn mcs_table() -> &'static [McsEntry] {
    &MCS_TABLE
}

/// The 16-row CQI table.
pub fn cqi_table() -> &'static [CqiEntry] {
    &CQI_TABLE
}

pub fn mcs_entry(mcs: u8) -> Result<&'static McsEntry> {
    mcs_table()
        .get(usize::from(mcs))
        .ok_or_else(|| Error::Index(format!("MCS {mcs} not in 0..={}", mcs_table().len() - 1)))
}

pub fn cqi_entry(cqi: u8) -> Result<&'static CqiEntry> {
    cqi_table()
        .get(usize::from(cqi))
        .ok_or_else(|| Error::Index(format!("CQI {cqi} not in 0..=15")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        assert_eq!(mcs_table().len(), 29);
        assert_eq!(cqi_table().len(), 16);
        assert_eq!(cqi_table()[0].efficiency_x1024(), 0);
        assert_eq!(
            mcs_table()[0],
            RateEntry {
                index: 0,
                qm: 2,
                rate_x1024: 120
            }
        );
        assert_eq!(
            mcs_table()[28],
            RateEntry {
                index: 28,
                qm: 6,
                rate_x1024: 948
            }
        );
    }

    #[test]
    fn cqi_efficiency_nondecreasing() {
        for w in cqi_table().windows(2) {
            assert!(w[1].efficiency_x1024() > w[0].efficiency_x1024());
        }
    }

    #[test]
    fn mcs_efficiency_increases_except_modulation_switch() {
        // Rows 16 (16QAM, 658) and 17 (64QAM, 438) are the one place where the
        // published table steps down: 2632 > 2628 (×1024).
        for w in mcs_table().windows(2) {
            if w[0].index == 16 {
                assert!(w[1].efficiency_x1024() < w[0].efficiency_x1024());
            } else {
                assert!(w[1].efficiency_x1024() > w[0].efficiency_x1024(), "{w:?}");
            }
        }
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_rate_table("nope\n0,2,120,0.2344").is_err());
        let hdr = "index,qm,rate_x1024,efficiency\n";
        assert!(parse_rate_table(&format!("{hdr}0,2,120")).is_err());
        assert!(parse_rate_table(&format!("{hdr}0,2,120,0.9")).is_err());
        assert!(parse_rate_table(&format!("{hdr}1,2,120,0.2344")).is_err());
        assert!(parse_rate_table(&format!("{hdr}0,3,120,0.3516")).is_err());
        assert_eq!(
            parse_rate_table(&format!("{hdr}0,2,120,0.2344"))
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn lookup_out_of_range() {
        assert!(mcs_entry(29).is_err());
        assert!(cqi_entry(16).is_err());
    }
}
