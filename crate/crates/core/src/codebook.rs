//! Type I single-panel precoding codebooks for 2 and 4 antenna ports.
//!
//! The 4-port codebook uses (N1, N2) = (2, 1) with oversampling O1 = 4, so
//! the beam index `i11` spans 0..8, `i12` is always 0 and the second-layer
//! offset `i13` maps to k1 ∈ {0, 4}. Matrices are normalized to unit total
//! power, `tr(W†W) = 1`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

const N1: u8 = 2;
const O1: u8 = 4;
/// Number of distinct DFT beams along the first dimension.
const N_BEAMS: u8 = N1 * O1;

/// Exact `e^{jπk/4}`, so that codebook entries carry no rounding in their
/// 0/±1 components.
pub fn phase8(k: u32) -> Complex64 {
    let h = FRAC_1_SQRT_2;
    let (re, im) = match k % 8 {
        0 => (1.0, 0.0),
        1 => (h, h),
        2 => (0.0, 1.0),
        3 => (-h, h),
        4 => (-1.0, 0.0),
        5 => (-h, -h),
        6 => (0.0, -1.0),
        _ => (h, -h),
    };
    Complex64::new(re, im)
}

/// Co-phasing factor `φ_n = jⁿ`.
fn cophase(n: u8) -> Complex64 {
    phase8(2 * u32::from(n))
}

/// DFT beam `v_l = [1, e^{jπl/4}]ᵀ` for the 2×1 panel.
fn beam(l: u8) -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), phase8(u32::from(l))]
}

/// A precoding matrix indicator for a given port count and rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PmiIndex {
    pub ports: u8,
    pub rank: u8,
    pub i11: u8,
    pub i12: u8,
    pub i13: u8,
    pub i2: u8,
}

impl PmiIndex {
    /// Builds an index, checking each component against its admissible range.
    pub fn new(ports: u8, rank: u8, i11: u8, i12: u8, i13: u8, i2: u8) -> Result<Self> {
        let idx = Self {
            ports,
            rank,
            i11,
            i12,
            i13,
            i2,
        };
        idx.validate()?;
        Ok(idx)
    }

    /// Shorthand for a 2-port index, where only `i2` is meaningful.
    pub fn two_port(rank: u8, i2: u8) -> Result<Self> {
        Self::new(2, rank, 0, 0, 0, i2)
    }

    pub fn validate(&self) -> Result<()> {
        check_config(self.ports, self.rank)?;
        let out = |what: &str, v: u8| Err(Error::Index(format!("{what}={v} for {self:?}")));
        match (self.ports, self.rank) {
            (2, r) => {
                if self.i11 != 0 {
                    return out("i11", self.i11);
                }
                if self.i12 != 0 {
                    return out("i12", self.i12);
                }
                if self.i13 != 0 {
                    return out("i13", self.i13);
                }
                let max_i2 = if r == 1 { 3 } else { 1 };
                if self.i2 > max_i2 {
                    return out("i2", self.i2);
                }
            }
            (_, r) => {
                if self.i11 >= N_BEAMS {
                    return out("i11", self.i11);
                }
                if self.i12 != 0 {
                    return out("i12", self.i12);
                }
                if r == 1 && self.i13 != 0 || r == 2 && self.i13 > 1 {
                    return out("i13", self.i13);
                }
                let max_i2 = if r == 1 { 3 } else { 1 };
                if self.i2 > max_i2 {
                    return out("i2", self.i2);
                }
            }
        }
        Ok(())
    }
}

fn check_config(ports: u8, rank: u8) -> Result<()> {
    if !matches!(ports, 2 | 4) || !matches!(rank, 1 | 2) {
        return Err(Error::Config(format!(
            "no Type I codebook for {ports} ports, rank {rank}"
        )));
    }
    Ok(())
}

/// The precoding matrix (ports × rank) selected by `idx`.
pub fn precoder_for(idx: &PmiIndex) -> Result<CMatrix> {
    idx.validate()?;
    let one = Complex64::new(1.0, 0.0);
    let w = match (idx.ports, idx.rank) {
        (2, 1) => {
            let s = FRAC_1_SQRT_2;
            CMatrix::new(2, 1, vec![one * s, cophase(idx.i2) * s])?
        }
        (2, _) => {
            let phi = cophase(idx.i2);
            CMatrix::new(2, 2, vec![one, one, phi, -phi])?.scale(0.5)
        }
        (_, 1) => {
            let v = beam(idx.i11);
            let phi = cophase(idx.i2);
            CMatrix::new(4, 1, vec![v[0], v[1], phi * v[0], phi * v[1]])?.scale(0.5)
        }
        _ => {
            let l = idx.i11;
            let l2 = idx.i11 + O1 * idx.i13;
            let (v, u) = (beam(l), beam(l2));
            let phi = cophase(idx.i2);
            CMatrix::new(
                4,
                2,
                vec![
                    v[0],
                    u[0],
                    v[1],
                    u[1],
                    phi * v[0],
                    -phi * u[0],
                    phi * v[1],
                    -phi * u[1],
                ],
            )?
            .scale(1.0 / 8f64.sqrt())
        }
    };
    Ok(w)
}

/// One codebook entry.
#[derive(Debug, Clone)]
pub struct CodebookEntry {
    pub pmi: PmiIndex,
    pub matrix: CMatrix,
}

/// An ordered Type I codebook for one (ports, rank) pair.
///
/// Entries are enumerated lexicographically by `(i11, i13, i2)`; the position
/// in this order breaks ties during PMI selection.
#[derive(Debug, Clone)]
pub struct PrecoderCodebook {
    ports: u8,
    rank: u8,
    entries: Vec<CodebookEntry>,
}

impl PrecoderCodebook {
    pub fn ports(&self) -> u8 {
        self.ports
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of `idx` in the enumeration order.
    pub fn position(&self, idx: &PmiIndex) -> Option<usize> {
        self.entries.iter().position(|e| e.pmi == *idx)
    }

    /// A codebook restricted to a single entry; useful for fixed-precoder
    /// experiments.
    pub fn single(entry: CodebookEntry) -> Self {
        Self {
            ports: entry.pmi.ports,
            rank: entry.pmi.rank,
            entries: vec![entry],
        }
    }

    /// A codebook over arbitrary entries of one (ports, rank) shape, searched
    /// in the given order.
    pub fn from_entries(entries: Vec<CodebookEntry>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Config("empty codebook".into()))?
            .pmi;
        if entries
            .iter()
            .any(|e| e.pmi.ports != first.ports || e.pmi.rank != first.rank)
        {
            return Err(Error::Config(
                "codebook entries disagree on ports or rank".into(),
            ));
        }
        Ok(Self {
            ports: first.ports,
            rank: first.rank,
            entries,
        })
    }
}

/// Enumerates the full codebook for `(ports, rank)`.
pub fn build_codebook(ports: u8, rank: u8) -> Result<PrecoderCodebook> {
    check_config(ports, rank)?;
    let (i11_range, i13_range, i2_range) = match (ports, rank) {
        (2, 1) => (0..1, 0..1, 0..4),
        (2, _) => (0..1, 0..1, 0..2),
        (_, 1) => (0..N_BEAMS, 0..1, 0..4),
        _ => (0..N_BEAMS, 0..2, 0..2),
    };
    let mut entries = Vec::new();
    for i11 in i11_range {
        for i13 in i13_range.clone() {
            for i2 in i2_range.clone() {
                let pmi = PmiIndex::new(ports, rank, i11, 0, i13, i2)?;
                let matrix = precoder_for(&pmi)?;
                entries.push(CodebookEntry { pmi, matrix });
            }
        }
    }
    Ok(PrecoderCodebook {
        ports,
        rank,
        entries,
    })
}

/// Rank-1 and rank-2 codebooks for one port count.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub rank1: PrecoderCodebook,
    pub rank2: PrecoderCodebook,
}

impl Codebooks {
    pub fn new(ports: u8) -> Result<Self> {
        Ok(Self {
            rank1: build_codebook(ports, 1)?,
            rank2: build_codebook(ports, 2)?,
        })
    }

    pub fn for_rank(&self, rank: u8) -> &PrecoderCodebook {
        if rank >= 2 {
            &self.rank2
        } else {
            &self.rank1
        }
    }
}
