//! UE-side CSI computation: rank indicator, PMI search and CQI lookup.
//!
//! The rank indicator is a per-subcarrier vote on the metric
//! `γ = Σ|mᵢⱼ|² / det(M)`, `M = ĤĤ†`: subcarriers with `γ < γ_th` vote for two
//! layers, and the report carries rank 2 only on a strict majority. The PMI is
//! the codebook entry with the largest wideband SINR, where the wideband SINR
//! is the ratio of the signal power and interference-plus-noise power at the
//! output of a per-layer linear MMSE receiver, each summed over all layers and
//! subcarriers. The CQI then follows from a rank-specific lookup on the
//! integer-dB wideband SINR.

use num_complex::Complex64;

use crate::channel::ChannelGrid;
use crate::codebook::{Codebooks, PmiIndex, PrecoderCodebook};
use crate::error::{Error, Result};
use crate::numerics::{gamma_metric, gram2, lin_to_int_db, lin_to_int_db_clamped, CMatrix};

/// Per-layer SINR reported for a noise-free link (+40 dB).
pub const NOISE_FREE_SINR: f64 = 1e4;

/// Noise floor, relative to `‖G‖_F²`, used to evaluate the noise-free limit.
const NOISE_FREE_FLOOR_REL: f64 = 1e-12;

/// Candidates within this relative distance of the best wideband SINR count
/// as tied.
pub const PMI_TIE_REL_TOL: f64 = 1e-12;

const MAX_RX: usize = 2;
const MAX_TX: usize = 4;
const MAX_LAYERS: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// SINR of one spatial layer together with the power split it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSinr {
    pub sinr: f64,
    pub signal: f64,
    pub interference_noise: f64,
}

/// Effective channel `G = H·W`, stored inline for the inner loops.
#[derive(Clone, Copy)]
struct Effective {
    n_rx: usize,
    n_layers: usize,
    g: [[Complex64; MAX_LAYERS]; MAX_RX],
}

/// Small inline copy of an `n_rx × n_tx` channel or `n_tx × ν` precoder.
#[derive(Clone, Copy)]
struct Inline<const R: usize, const C: usize> {
    rows: usize,
    cols: usize,
    a: [[Complex64; C]; R],
}

impl<const R: usize, const C: usize> Inline<R, C> {
    fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.rows() > R || m.cols() > C {
            return Err(Error::Dimension(format!(
                "{}x{} exceeds the supported {R}x{C}",
                m.rows(),
                m.cols()
            )));
        }
        let mut a = [[ZERO; C]; R];
        for (r, row) in a.iter_mut().enumerate().take(m.rows()) {
            for (c, x) in row.iter_mut().enumerate().take(m.cols()) {
                *x = m.get(r, c);
            }
        }
        Ok(Self {
            rows: m.rows(),
            cols: m.cols(),
            a,
        })
    }
}

fn effective(h: &Inline<MAX_RX, MAX_TX>, w: &Inline<MAX_TX, MAX_LAYERS>) -> Effective {
    let mut g = [[ZERO; MAX_LAYERS]; MAX_RX];
    for (r, row) in g.iter_mut().enumerate().take(h.rows) {
        for (l, x) in row.iter_mut().enumerate().take(w.cols) {
            let mut acc = ZERO;
            for t in 0..h.cols {
                acc += h.a[r][t] * w.a[t][l];
            }
            *x = acc;
        }
    }
    Effective {
        n_rx: h.rows,
        n_layers: w.cols,
        g,
    }
}

/// Per-layer MMSE SINR of `G` with noise variance `noise_var`.
///
/// The combiner for layer `l` is the unit-norm `w ∝ (GG† + σ²I)⁻¹ g_l`; the
/// signal part is `|w†g_l|²` and the remainder is `Σ_{k≠l}|w†g_k|² + σ²`.
fn mmse_layers(eff: &Effective, noise_var: f64) -> [LayerSinr; MAX_LAYERS] {
    let noise_free = noise_var <= 0.0;
    let power: f64 = eff
        .g
        .iter()
        .take(eff.n_rx)
        .flat_map(|row| row.iter().take(eff.n_layers))
        .map(Complex64::norm_sqr)
        .sum();
    let sigma2 = if !noise_free {
        noise_var
    } else if power > 0.0 {
        NOISE_FREE_FLOOR_REL * power
    } else {
        1.0
    };

    // R = G G† + σ² I, then its inverse.
    let mut r = [[ZERO; MAX_RX]; MAX_RX];
    for (i, row) in r.iter_mut().enumerate().take(eff.n_rx) {
        for (j, x) in row.iter_mut().enumerate().take(eff.n_rx) {
            let mut acc = ZERO;
            for l in 0..eff.n_layers {
                acc += eff.g[i][l] * eff.g[j][l].conj();
            }
            if i == j {
                acc += sigma2;
            }
            *x = acc;
        }
    }
    let rinv = if eff.n_rx == 1 {
        Some([[r[0][0].inv(), ZERO], [ZERO, ZERO]])
    } else {
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        (det.re > 0.0 && det.is_finite()).then(|| {
            let inv_det = det.inv();
            [
                [r[1][1] * inv_det, -r[0][1] * inv_det],
                [-r[1][0] * inv_det, r[0][0] * inv_det],
            ]
        })
    };

    let mut out = [LayerSinr {
        sinr: 0.0,
        signal: 0.0,
        interference_noise: sigma2,
    }; MAX_LAYERS];
    let Some(rinv) = rinv else {
        return out;
    };
    for (l, slot) in out.iter_mut().enumerate().take(eff.n_layers) {
        let mut w = [ZERO; MAX_RX];
        for (i, wi) in w.iter_mut().enumerate().take(eff.n_rx) {
            *wi = (0..eff.n_rx).map(|j| rinv[i][j] * eff.g[j][l]).sum();
        }
        let norm2: f64 = w.iter().take(eff.n_rx).map(Complex64::norm_sqr).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            continue;
        }
        let scale = norm2.sqrt().recip();
        let project = |k: usize| -> f64 {
            let acc: Complex64 = (0..eff.n_rx).map(|i| w[i].conj() * eff.g[i][k]).sum();
            (acc * scale).norm_sqr()
        };
        let signal = project(l);
        let interference: f64 = (0..eff.n_layers).filter(|&k| k != l).map(project).sum();
        let interference_noise = interference + sigma2;
        let mut sinr = signal / interference_noise;
        if noise_free {
            sinr = sinr.min(NOISE_FREE_SINR);
        }
        *slot = LayerSinr {
            sinr,
            signal,
            interference_noise,
        };
    }
    out
}

fn check_noise(noise_var: f64) -> Result<()> {
    if noise_var.is_nan() || noise_var < 0.0 {
        return Err(Error::Domain(format!(
            "noise variance must be >= 0, got {noise_var}"
        )));
    }
    Ok(())
}

// Consecutive identical subcarriers collapsed to (channel, multiplicity).
// Flat fading grids reduce to a single entry.
fn runs(grid: &ChannelGrid) -> Result<Vec<(Inline<MAX_RX, MAX_TX>, f64)>> {
    let mut out: Vec<(Inline<MAX_RX, MAX_TX>, f64)> = Vec::new();
    let mats = grid.matrices();
    for (i, h) in mats.iter().enumerate() {
        match out.last_mut() {
            Some((_, count)) if mats[i - 1] == *h => *count += 1.0,
            _ => out.push((Inline::from_matrix(h)?, 1.0)),
        }
    }
    Ok(out)
}

/// Per-layer linear MMSE SINR for channel `h` (≤2 rows) and precoder `w`.
///
/// With `noise_var == 0` the noise-free limit is returned, each layer capped at
/// [`NOISE_FREE_SINR`]; layers that receive no power report 0.
pub fn layer_sinrs(h: &CMatrix, w: &CMatrix, noise_var: f64) -> Result<Vec<LayerSinr>> {
    check_noise(noise_var)?;
    if h.cols() != w.rows() {
        return Err(Error::Dimension(format!(
            "channel has {} columns but precoder has {} rows",
            h.cols(),
            w.rows()
        )));
    }
    let hi = Inline::<MAX_RX, MAX_TX>::from_matrix(h)?;
    let wi = Inline::<MAX_TX, MAX_LAYERS>::from_matrix(w)?;
    let eff = effective(&hi, &wi);
    Ok(mmse_layers(&eff, noise_var)[..eff.n_layers].to_vec())
}

/// Mean per-layer linear SINR over all subcarriers and layers of `grid`
/// precoded by `w`.
pub fn mean_layer_sinr(grid: &ChannelGrid, w: &CMatrix, noise_var: f64) -> Result<f64> {
    check_noise(noise_var)?;
    if grid.n_tx() != w.rows() {
        return Err(Error::Dimension(format!(
            "grid has {} transmit antennas but precoder has {} rows",
            grid.n_tx(),
            w.rows()
        )));
    }
    let wi = Inline::<MAX_TX, MAX_LAYERS>::from_matrix(w)?;
    let mut acc = 0.0;
    for (h, count) in runs(grid)? {
        let eff = effective(&h, &wi);
        acc += count
            * mmse_layers(&eff, noise_var)[..eff.n_layers]
                .iter()
                .map(|l| l.sinr)
                .sum::<f64>();
    }
    Ok(acc / (grid.n_sc() * wi.cols) as f64)
}

/// Outcome of the PMI search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmiSelection {
    pub pmi: PmiIndex,
    /// Position of the winner in the codebook enumeration.
    pub position: usize,
    /// Wideband SINR of the winner, linear.
    pub wideband_sinr: f64,
    /// Wideband SINR of the winner in integer dB, clamped to [-10, 40].
    pub wideband_sinr_db: i32,
}

/// Wideband SINR (linear) of every codebook entry, in enumeration order.
pub fn wideband_sinrs(
    grid: &ChannelGrid,
    noise_var: f64,
    cb: &PrecoderCodebook,
) -> Result<Vec<f64>> {
    check_noise(noise_var)?;
    if grid.n_sc() == 0 {
        return Err(Error::Dimension("empty channel grid".into()));
    }
    if usize::from(cb.ports()) != grid.n_tx() {
        return Err(Error::Config(format!(
            "{}-port codebook used on a {}-antenna channel",
            cb.ports(),
            grid.n_tx()
        )));
    }
    let channels = runs(grid)?;
    cb.entries()
        .iter()
        .map(|entry| {
            let w = Inline::<MAX_TX, MAX_LAYERS>::from_matrix(&entry.matrix)?;
            let (mut signal, mut interference_noise) = (0.0, 0.0);
            for (h, count) in &channels {
                let eff = effective(h, &w);
                for layer in &mmse_layers(&eff, noise_var)[..eff.n_layers] {
                    signal += count * layer.signal;
                    interference_noise += count * layer.interference_noise;
                }
            }
            Ok(signal / interference_noise)
        })
        .collect()
}

/// Exhaustive PMI search over `cb` for the given rank.
///
/// Ties (within [`PMI_TIE_REL_TOL`]) go to the earliest entry in enumeration
/// order.
pub fn select_pmi(
    grid: &ChannelGrid,
    rank: u8,
    noise_var: f64,
    cb: &PrecoderCodebook,
) -> Result<PmiSelection> {
    if cb.rank() != rank {
        return Err(Error::Config(format!(
            "rank-{} codebook used for a rank-{rank} search",
            cb.rank()
        )));
    }
    if cb.is_empty() {
        return Err(Error::Config("empty codebook".into()));
    }
    let ratios = wideband_sinrs(grid, noise_var, cb)?;
    let best = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let position = ratios
        .iter()
        .position(|&r| r >= best * (1.0 - PMI_TIE_REL_TOL))
        .unwrap_or(0);
    let wideband_sinr = ratios[position];
    Ok(PmiSelection {
        pmi: cb.entries()[position].pmi,
        position,
        wideband_sinr,
        wideband_sinr_db: lin_to_int_db(wideband_sinr)?,
    })
}

/// CSI engine settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiConfig {
    pub gamma_th: f64,
    pub force_ri: Option<u8>,
    pub force_cqi: Option<u8>,
    pub sinr_clamp_db: (i32, i32),
}

impl Default for CsiConfig {
    fn default() -> Self {
        Self {
            gamma_th: 2.5,
            force_ri: None,
            force_cqi: None,
            sinr_clamp_db: (-10, 40),
        }
    }
}

impl CsiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_th.is_nan() || self.gamma_th < 2.0 || self.gamma_th.is_infinite() {
            return Err(Error::Config(format!(
                "gamma_th must be a finite value >= 2, got {}",
                self.gamma_th
            )));
        }
        if let Some(ri) = self.force_ri {
            if !matches!(ri, 1 | 2) {
                return Err(Error::Config(format!("force_ri must be 1 or 2, got {ri}")));
            }
        }
        if let Some(cqi) = self.force_cqi {
            if cqi > 15 {
                return Err(Error::Config(format!(
                    "force_cqi must be 0..=15, got {cqi}"
                )));
            }
        }
        let (lo, hi) = self.sinr_clamp_db;
        if lo > hi || lo < -10 || hi > 40 {
            return Err(Error::Config(format!(
                "sinr_clamp_db must lie within [-10, 40] with lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// γ for every subcarrier of a 2-receive-antenna grid.
pub fn gamma_profile(grid: &ChannelGrid) -> Result<Vec<f64>> {
    grid.matrices()
        .iter()
        .map(|h| gamma_metric(&gram2(h)?))
        .collect()
}

/// Rank indicator by majority vote of `γ < γ_th` over subcarriers.
pub fn compute_ri(grid: &ChannelGrid, cfg: &CsiConfig) -> Result<u8> {
    if let Some(ri) = cfg.force_ri {
        return Ok(ri);
    }
    if grid.n_rx() < 2 || grid.n_tx() < 2 {
        return Ok(1);
    }
    let mut rank2 = 0usize;
    for g in gamma_profile(grid)? {
        if g < cfg.gamma_th {
            rank2 += 1;
        }
    }
    let rank1 = grid.n_sc() - rank2;
    Ok(if rank2 > rank1 { 2 } else { 1 })
}

// Largest integer-dB SINR for each CQI, rank 1 then rank 2. Anything above the
// last bound maps to the top CQI (15 for rank 1, 13 for rank 2).
const CQI_BOUNDS_RANK1: [(i32, u8); 11] = [
    (2, 4),
    (3, 5),
    (5, 6),
    (7, 7),
    (9, 8),
    (10, 9),
    (12, 10),
    (15, 11),
    (16, 12),
    (18, 13),
    (19, 14),
];
const CQI_BOUNDS_RANK2: [(i32, u8); 9] = [
    (2, 4),
    (3, 5),
    (5, 6),
    (7, 7),
    (9, 8),
    (11, 9),
    (13, 10),
    (15, 11),
    (21, 12),
];

/// CQI for an integer-dB wideband SINR at the given rank.
pub fn select_cqi(wideband_sinr_db: i32, ri: u8) -> u8 {
    let (bounds, top): (&[(i32, u8)], u8) = if ri >= 2 {
        (&CQI_BOUNDS_RANK2, 13)
    } else {
        (&CQI_BOUNDS_RANK1, 15)
    };
    bounds
        .iter()
        .find(|(bound, _)| wideband_sinr_db <= *bound)
        .map_or(top, |&(_, cqi)| cqi)
}

/// The UE → gNB feedback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiReport {
    pub ri: u8,
    pub pmi: PmiIndex,
    pub wideband_sinr_db: i32,
    pub cqi: u8,
}

/// Runs the full RI → PMI → CQI chain on an estimated grid.
///
/// A forced CQI is reported verbatim, including values the lookup itself never
/// produces.
pub fn make_report(
    grid: &ChannelGrid,
    noise_var: f64,
    cfg: &CsiConfig,
    codebooks: &Codebooks,
) -> Result<CsiReport> {
    let ri = compute_ri(grid, cfg)?;
    let selection = select_pmi(grid, ri, noise_var, codebooks.for_rank(ri))?;
    let (lo, hi) = cfg.sinr_clamp_db;
    let wideband_sinr_db = lin_to_int_db_clamped(selection.wideband_sinr, lo, hi)?;
    let cqi = cfg
        .force_cqi
        .unwrap_or_else(|| select_cqi(wideband_sinr_db, ri));
    Ok(CsiReport {
        ri,
        pmi: selection.pmi,
        wideband_sinr_db,
        cqi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::fixed_grid;
    use crate::codebook::{build_codebook, precoder_for};

    fn fixed_2x4() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.5, 0.25, 0.125], &[0.125, 0.25, 0.5, 1.0]]).unwrap()
    }

    fn selector() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]).unwrap()
    }

    #[test]
    fn rank1_mrc_sinr() {
        let w = precoder_for(&PmiIndex::new(4, 1, 0, 0, 0, 0).unwrap()).unwrap();
        let s = layer_sinrs(&selector(), &w, 0.1).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].sinr - 5.0).abs() < 1e-12);
        assert!((s[0].signal - 0.5).abs() < 1e-12);
        assert!((s[0].interference_noise - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rank2_orthogonal_sinr() {
        let w = precoder_for(&PmiIndex::new(4, 2, 0, 0, 1, 0).unwrap()).unwrap();
        let s = layer_sinrs(&selector(), &w, 0.1).unwrap();
        assert_eq!(s.len(), 2);
        for l in &s {
            assert!((l.sinr - 2.5).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn noise_free_is_clamped() {
        let cb = build_codebook(4, 2).unwrap();
        // entry 0 keeps both singular values of HW away from zero
        let w = &cb.entries()[0].matrix;
        for l in layer_sinrs(&fixed_2x4(), w, 0.0).unwrap() {
            assert_eq!(l.sinr, NOISE_FREE_SINR);
        }
        // zero channel carries nothing even without noise
        for l in layer_sinrs(&CMatrix::zeros(2, 4), w, 0.0).unwrap() {
            assert_eq!(l.sinr, 0.0);
        }
    }

    #[test]
    fn layer_sinrs_rejects_mismatch() {
        let w = CMatrix::zeros(2, 1);
        assert!(matches!(
            layer_sinrs(&fixed_2x4(), &w, 0.1),
            Err(Error::Dimension(_))
        ));
        let w = CMatrix::zeros(4, 1);
        assert!(layer_sinrs(&fixed_2x4(), &w, -1.0).is_err());
    }

    #[test]
    fn pmi_tie_goes_to_first_orthogonal_pair() {
        let grid = fixed_grid(&selector(), 12).unwrap();
        let cb = build_codebook(4, 2).unwrap();
        let ratios = wideband_sinrs(&grid, 0.1, &cb).unwrap();
        let tied = ratios.iter().filter(|r| (*r - 2.5).abs() < 1e-9).count();
        assert_eq!(tied, 16);
        let sel = select_pmi(&grid, 2, 0.1, &cb).unwrap();
        assert_eq!(sel.pmi, PmiIndex::new(4, 2, 0, 0, 1, 0).unwrap());
        assert_eq!(sel.position, 2);
        assert_eq!(sel.wideband_sinr_db, 4);
    }

    #[test]
    fn single_candidate_codebook() {
        let cb = build_codebook(4, 1).unwrap();
        let only = PrecoderCodebook::single(cb.entries()[17].clone());
        let grid = fixed_grid(&fixed_2x4(), 3).unwrap();
        let sel = select_pmi(&grid, 1, 0.3, &only).unwrap();
        assert_eq!(sel.pmi, cb.entries()[17].pmi);
    }

    #[test]
    fn pmi_codebook_mismatch() {
        let grid = fixed_grid(&fixed_2x4(), 3).unwrap();
        let cb2 = build_codebook(2, 1).unwrap();
        assert!(matches!(
            select_pmi(&grid, 1, 0.1, &cb2),
            Err(Error::Config(_))
        ));
        let cb = build_codebook(4, 1).unwrap();
        assert!(select_pmi(&grid, 2, 0.1, &cb).is_err());
    }

    #[test]
    fn ri_examples() {
        let cfg = CsiConfig::default();
        let ortho = fixed_grid(&selector(), 10).unwrap();
        assert_eq!(compute_ri(&ortho, &cfg).unwrap(), 2);
        let fixed = fixed_grid(&fixed_2x4(), 106).unwrap();
        assert_eq!(compute_ri(&fixed, &cfg).unwrap(), 1);
        let forced = CsiConfig {
            force_ri: Some(2),
            ..cfg
        };
        assert_eq!(compute_ri(&fixed, &forced).unwrap(), 2);
        let zero = fixed_grid(&CMatrix::zeros(2, 4), 1).unwrap();
        assert_eq!(compute_ri(&zero, &cfg).unwrap(), 1);
        let miso = fixed_grid(&CMatrix::from_real_rows(&[&[1.0], &[0.2]]).unwrap(), 4).unwrap();
        assert_eq!(compute_ri(&miso, &cfg).unwrap(), 1);
    }

    #[test]
    fn ri_majority_vote() {
        // γ = a/b + b/a for diag(a, b) channels
        let diag = |ratio: f64| {
            CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, ratio.sqrt(), 0.0, 0.0]])
                .unwrap()
        };
        // ratio r gives γ = r + 1/r: 2.1 → r≈1.37, 3.0 → r≈2.62
        let r_low = (2.1 + (2.1f64 * 2.1 - 4.0).sqrt()) / 2.0;
        let r_high = (3.0 + (3.0f64 * 3.0 - 4.0).sqrt()) / 2.0;
        let mut mats = vec![diag(r_low); 60];
        mats.extend(vec![diag(r_high); 46]);
        let grid = ChannelGrid::new(mats, 0).unwrap();
        let gammas = gamma_profile(&grid).unwrap();
        assert!((gammas[0] - 2.1).abs() < 1e-9 && (gammas[105] - 3.0).abs() < 1e-9);
        assert_eq!(compute_ri(&grid, &CsiConfig::default()).unwrap(), 2);

        // an exact tie stays at rank 1
        let mut mats = vec![diag(r_low); 53];
        mats.extend(vec![diag(r_high); 53]);
        let grid = ChannelGrid::new(mats, 0).unwrap();
        assert_eq!(compute_ri(&grid, &CsiConfig::default()).unwrap(), 1);
    }

    #[test]
    fn cqi_examples() {
        assert_eq!(select_cqi(3, 1), 5);
        assert_eq!(select_cqi(16, 2), 12);
        assert_eq!(select_cqi(25, 2), 13);
        assert_eq!(select_cqi(-8, 1), 4);
        assert_eq!(select_cqi(40, 1), 15);
        assert_eq!(select_cqi(19, 1), 14);
        assert_eq!(select_cqi(20, 1), 15);
    }

    #[test]
    fn config_validation() {
        assert!(CsiConfig::default().validate().is_ok());
        let bad = CsiConfig {
            gamma_th: 1.9,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CsiConfig {
            force_ri: Some(3),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CsiConfig {
            force_cqi: Some(16),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CsiConfig {
            sinr_clamp_db: (5, 0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn report_examples() {
        let codebooks = Codebooks::new(4).unwrap();
        let grid = fixed_grid(&fixed_2x4(), 106).unwrap();
        let cfg = CsiConfig::default();
        let r = make_report(&grid, 0.1, &cfg, &codebooks).unwrap();
        assert_eq!(r.ri, 1);
        assert_eq!(r.pmi.rank, 1);
        assert_eq!(r.cqi, select_cqi(r.wideband_sinr_db, 1));

        let forced = CsiConfig {
            force_ri: Some(2),
            ..cfg
        };
        let r = make_report(&grid, 0.1, &forced, &codebooks).unwrap();
        assert_eq!((r.ri, r.pmi.rank), (2, 2));
        assert!(r.cqi <= 13);

        let forced = CsiConfig {
            force_cqi: Some(9),
            ..cfg
        };
        assert_eq!(make_report(&grid, 0.1, &forced, &codebooks).unwrap().cqi, 9);

        let zero = fixed_grid(&CMatrix::zeros(2, 4), 1).unwrap();
        let r = make_report(&zero, 0.0, &cfg, &codebooks).unwrap();
        assert_eq!((r.ri, r.cqi), (1, 4));
    }
}
