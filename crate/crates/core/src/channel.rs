//! Channel realizations, noise normalization and the UE channel estimate.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{db_to_lin, CMatrix};

/// Per-subcarrier channel matrices for one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    n_rx: usize,
    n_tx: usize,
    matrices: Vec<CMatrix>,
    block_id: u64,
}

impl ChannelGrid {
    /// Wraps per-subcarrier matrices; all must share one `n_rx × n_tx` shape
    /// with `n_rx ∈ {1, 2}`.
    pub fn new(matrices: Vec<CMatrix>, block_id: u64) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::Dimension("channel grid needs at least one subcarrier".into()))?;
        let (n_rx, n_tx) = (first.rows(), first.cols());
        if !(1..=2).contains(&n_rx) {
            return Err(Error::Dimension(format!(
                "UE supports at most 2 receive antennas, got {n_rx}"
            )));
        }
        if matrices
            .iter()
            .any(|m| m.rows() != n_rx || m.cols() != n_tx)
        {
            return Err(Error::Dimension(
                "subcarrier matrices differ in shape".into(),
            ));
        }
        Ok(Self {
            n_rx,
            n_tx,
            matrices,
            block_id,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_sc(&self) -> usize {
        self.matrices.len()
    }

    pub fn block_id(&self) -> u64 {
        self.block_id
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn subcarrier(&self, sc: usize) -> &CMatrix {
        &self.matrices[sc]
    }

    /// Same grid with every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// Mean per-receive-antenna power under an isotropic unit-power input,
    /// `mean_sc ‖H‖_F² / (n_rx · n_tx)`.
    pub fn mean_rx_power(&self) -> f64 {
        let total: f64 = self.matrices.iter().map(CMatrix::frobenius_sq).sum();
        total / (self.matrices.len() * self.n_rx * self.n_tx) as f64
    }
}

/// Replicates a fixed 2-row channel matrix across `n_sc` subcarriers.
pub fn fixed_grid(h: &CMatrix, n_sc: usize) -> Result<ChannelGrid> {
    if h.rows() != 2 {
        return Err(Error::Dimension(format!(
            "fixed channel must have 2 rows, got {}",
            h.rows()
        )));
    }
    if n_sc == 0 {
        return Err(Error::Dimension("n_sc must be >= 1".into()));
    }
    ChannelGrid::new(vec![h.clone(); n_sc], 0)
}

/// Single-tap Rician channel, frequency flat over the `n_sc` subcarriers.
///
/// `H = √(K/(K+1))·e^{jθ}·1 + √(1/(K+1))·G` with `G` i.i.d. CN(0, 1) per
/// block and θ uniform, drawn once per seed. The realization is a pure function of `(seed, block_id)`.
/// `k_factor = ∞` gives the pure line-of-sight channel.
pub fn rice1_grid(
    seed: u64,
    k_factor: f64,
    n_tx: usize,
    n_sc: usize,
    block_id: u64,
) -> Result<ChannelGrid> {
    if k_factor.is_nan() || k_factor < 0.0 {
        return Err(Error::Config(format!(
            "k_factor must be >= 0, got {k_factor}"
        )));
    }
    if n_tx == 0 || n_sc == 0 {
        return Err(Error::Dimension("n_tx and n_sc must be >= 1".into()));
    }
    let (los_amp, nlos_amp) = if k_factor.is_infinite() {
        (1.0, 0.0)
    } else {
        (
            (k_factor / (k_factor + 1.0)).sqrt(),
            (1.0 / (k_factor + 1.0)).sqrt(),
        )
    };
    // LOS phase is fixed for the whole drop; the scattered part is per block.
    let mut phase_rng = ChaCha8Rng::seed_from_u64(seed);
    phase_rng.set_stream(u64::MAX);
    let theta: f64 = phase_rng.random::<f64>() * TAU;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block_id);
    let los = Complex64::from_polar(los_amp, theta);
    let entries: Vec<Complex64> = (0..2 * n_tx)
        .map(|_| los + cn_sample(&mut rng, 1.0) * nlos_amp)
        .collect();
    let h = CMatrix::new(2, n_tx, entries)?;
    ChannelGrid::new(vec![h; n_sc], block_id)
}

/// One draw of CN(0, var).
fn cn_sample<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var).sqrt() * FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// How the receiver noise is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    NoiseFree,
    /// SNR in dB relative to the mean received power.
    SnrDb(f64),
    /// Absolute per-antenna variance, independent of the channel.
    Variance(f64),
}

/// Resolved noise: the mode and the per-receive-antenna linear variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub mode: NoiseMode,
    pub variance: f64,
}

/// Noise variance normalized to the grid's mean received power.
///
/// The variance is zero for noise-free operation and for a channel that
/// carries no power at all.
pub fn noise_variance(mode: NoiseMode, grid: &ChannelGrid) -> NoiseSpec {
    let variance = match mode {
        NoiseMode::NoiseFree => 0.0,
        NoiseMode::SnrDb(snr_db) => grid.mean_rx_power() / db_to_lin(snr_db),
        NoiseMode::Variance(v) => v,
    };
    NoiseSpec { mode, variance }
}

/// The UE's estimate of `grid`: exact when `est_error_var == 0`, otherwise
/// each entry is perturbed by independent CN(0, est_error_var) noise drawn
/// from `seed`.
pub fn estimate(grid: &ChannelGrid, est_error_var: f64, seed: u64) -> Result<ChannelGrid> {
    if est_error_var.is_nan() || est_error_var < 0.0 {
        return Err(Error::Config(format!(
            "estimation error variance must be >= 0, got {est_error_var}"
        )));
    }
    if est_error_var == 0.0 {
        return Ok(grid.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = grid
        .matrices()
        .iter()
        .map(|m| {
            let data = m
                .as_slice()
                .iter()
                .map(|&z| z + cn_sample(&mut rng, est_error_var))
                .collect();
            CMatrix::new(m.rows(), m.cols(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelGrid::new(matrices, grid.block_id())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gamma_metric, gram2};

    fn fixed_2x4() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.5, 0.25, 0.125], &[0.125, 0.25, 0.5, 1.0]]).unwrap()
    }

    #[test]
    fn fixed_grid_copies() {
        let g = fixed_grid(&fixed_2x4(), 106).unwrap();
        assert_eq!(g.n_sc(), 106);
        assert_eq!((g.n_rx(), g.n_tx()), (2, 4));
        assert!(g.matrices().iter().all(|m| *m == fixed_2x4()));

        let fixed_2x2 = CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]).unwrap();
        let g = fixed_grid(&fixed_2x2, 106).unwrap();
        assert_eq!((g.n_sc(), g.n_tx()), (106, 2));

        let z = fixed_grid(&CMatrix::zeros(2, 4), 1).unwrap();
        assert_eq!(z.subcarrier(0).frobenius_sq(), 0.0);
    }

    #[test]
    fn fixed_grid_rejects_wrong_rows() {
        assert!(matches!(
            fixed_grid(&CMatrix::zeros(3, 4), 4),
            Err(Error::Dimension(_))
        ));
        assert!(fixed_grid(&fixed_2x4(), 0).is_err());
    }

    #[test]
    fn rice1_is_flat_and_deterministic() {
        let a = rice1_grid(7, 1.0, 4, 16, 3).unwrap();
        let b = rice1_grid(7, 1.0, 4, 16, 3).unwrap();
        assert_eq!(a, b);
        let first = a.subcarrier(0);
        assert!(a.matrices().iter().all(|m| m == first));
        let c = rice1_grid(7, 1.0, 4, 16, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rice1_los_limit_is_rank_one() {
        let g = rice1_grid(11, f64::INFINITY, 4, 1, 0).unwrap();
        let h = g.subcarrier(0);
        let p = h.get(0, 0);
        assert!((p.norm() - 1.0).abs() < 1e-12);
        assert!(h.as_slice().iter().all(|z| (z - p).norm() < 1e-12));
        assert_eq!(gamma_metric(&gram2(h).unwrap()).unwrap(), f64::INFINITY);

        let g = rice1_grid(11, 1e12, 4, 1, 0).unwrap();
        let h = g.subcarrier(0);
        let p = h.get(0, 0) / h.get(0, 0).norm();
        assert!(h.as_slice().iter().all(|z| (z - p).norm() < 1e-4));
        assert!(gamma_metric(&gram2(h).unwrap()).unwrap() > 1e9);
    }

    #[test]
    fn noise_variance_examples() {
        let unit = fixed_grid(
            &CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap(),
            4,
        )
        .unwrap();
        assert!((noise_variance(NoiseMode::SnrDb(0.0), &unit).variance - 1.0).abs() < 1e-15);
        assert!((noise_variance(NoiseMode::SnrDb(10.0), &unit).variance - 0.1).abs() < 1e-15);
        assert_eq!(noise_variance(NoiseMode::NoiseFree, &unit).variance, 0.0);
    }

    #[test]
    fn noise_variance_is_homogeneous() {
        let g = fixed_grid(&fixed_2x4(), 3).unwrap();
        let v = noise_variance(NoiseMode::SnrDb(7.0), &g).variance;
        let v3 = noise_variance(NoiseMode::SnrDb(7.0), &g.scaled(3.0)).variance;
        assert!((v3 / v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_estimate_is_identity() {
        let g = rice1_grid(1, 1.0, 4, 8, 0).unwrap();
        assert_eq!(estimate(&g, 0.0, 5).unwrap(), g);
        assert!(estimate(&g, -1.0, 5).is_err());
    }

    #[test]
    fn noisy_estimate_is_seeded() {
        let g = fixed_grid(&fixed_2x4(), 8).unwrap();
        let a = estimate(&g, 0.01, 5).unwrap();
        assert_eq!(a, estimate(&g, 0.01, 5).unwrap());
        assert_ne!(a, estimate(&g, 0.01, 6).unwrap());
        assert_ne!(a, g);
    }
}
