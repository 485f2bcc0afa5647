#![allow(dead_code)]

use csi_loop::channel::ChannelGrid;
use csi_loop::codebook::PrecoderCodebook;
use csi_loop::numerics::CMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixed_2x4() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.5, 0.25, 0.125], &[0.125, 0.25, 0.5, 1.0]]).unwrap()
}

pub fn fixed_2x2() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let data = (0..rows * cols)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CMatrix::new(rows, cols, data).unwrap()
}

/// A frequency-selective grid: each subcarrier independent.
pub fn random_grid(seed: u64, n_tx: usize, n_sc: usize) -> ChannelGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats = (0..n_sc)
        .map(|_| random_matrix(&mut rng, 2, n_tx))
        .collect();
    ChannelGrid::new(mats, 0).unwrap()
}

/// MMSE (signal, interference + noise) per layer from explicit matrix
/// algebra: combiner w = (GG† + σ²I)⁻¹ g_l scaled to unit norm.
pub fn oracle_layers(h: &CMatrix, w: &CMatrix, noise: f64) -> Vec<(f64, f64)> {
    let g = h * w;
    let mut r = &g * &g.adjoint();
    for i in 0..r.rows() {
        r.set(i, i, r.get(i, i) + noise);
    }
    let rinv = r.inverse().unwrap();
    (0..g.cols())
        .map(|l| {
            let gl = CMatrix::new(g.rows(), 1, g.column(l)).unwrap();
            let comb = &rinv * &gl;
            let norm = comb.frobenius_sq().sqrt();
            let proj = |k: usize| -> f64 {
                let gk = CMatrix::new(g.rows(), 1, g.column(k)).unwrap();
                let z = (&comb.adjoint() * &gk).get(0, 0) / norm;
                z.norm_sqr()
            };
            let interference: f64 = (0..g.cols()).filter(|&k| k != l).map(proj).sum();
            (proj(l), interference + noise)
        })
        .collect()
}

/// Closed-form MMSE SINR: 1 / [(I + G†G/σ²)⁻¹]_ll − 1.
pub fn closed_form_sinr(h: &CMatrix, w: &CMatrix, noise: f64) -> Vec<f64> {
    let g = h * w;
    let mut a = (&g.adjoint() * &g).scale(1.0 / noise);
    for i in 0..a.rows() {
        a.set(i, i, a.get(i, i) + 1.0);
    }
    let ainv = a.inverse().unwrap();
    (0..a.rows())
        .map(|l| 1.0 / ainv.get(l, l).re - 1.0)
        .collect()
}

/// Brute-force PMI search: position and wideband SINR of the best entry,
/// earliest wins on ties.
pub fn oracle_pmi(grid: &ChannelGrid, noise: f64, cb: &PrecoderCodebook) -> (usize, f64) {
    let mut best: Option<(usize, f64)> = None;
    for (pos, e) in cb.entries().iter().enumerate() {
        let (mut s, mut i) = (0.0, 0.0);
        for h in grid.matrices() {
            for (sl, il) in oracle_layers(h, &e.matrix, noise) {
                s += sl;
                i += il;
            }
        }
        let ratio = s / i;
        match best {
            Some((_, b)) if ratio <= b * (1.0 + 1e-12) => {}
            _ => best = Some((pos, ratio)),
        }
    }
    best.unwrap()
}
