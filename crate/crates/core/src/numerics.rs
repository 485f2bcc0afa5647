//! Small dense complex linear algebra.
//!
//! Everything here is sized for the CSI loop: 2-row channel matrices, 2×2
//! Hermitian Gram matrices and precoders with at most four rows. No attempt is
//! made at general-purpose performance.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative determinant threshold below which a Gram matrix counts as singular.
pub const SINGULAR_REL_EPS: f64 = 1e-12;

/// Lower and upper clamp of the integer-dB SINR scale.
pub const DB_CLAMP_MIN: i32 = -10;
pub const DB_CLAMP_MAX: i32 = 40;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// Builds a matrix from nested rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Conjugate (Hermitian) transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let acc = (0..self.cols).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Squared Frobenius norm, i.e. `tr(A A†)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    /// Appends zero-valued columns on the right.
    pub fn pad_columns(&self, extra: usize) -> Self {
        let cols = self.cols + extra;
        let mut out = Self::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }

    /// Inverse of a small square matrix by Gauss-Jordan elimination with
    /// partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "cannot invert non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))
                .expect("non-empty range");
            if a.get(pivot, col).norm() <= SINGULAR_REL_EPS * scale || scale == 0.0 {
                return Err(Error::Domain("matrix is singular".into()));
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a.get(col, col).inv();
            for c in 0..n {
                a.set(col, c, a.get(col, c) * p);
                inv.set(col, c, inv.get(col, c) * p);
            }
            for r in (0..n).filter(|&r| r != col) {
                let f = a.get(r, col);
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    a.set(r, c, a.get(r, c) - f * a.get(col, c));
                    inv.set(r, c, inv.get(r, c) - f * inv.get(col, c));
                }
            }
        }
        Ok(inv)
    }

    /// Largest elementwise distance to `other`; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

/// Eigenvalues of a 2×2 Hermitian PSD matrix, descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair2 {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl EigenPair2 {
    /// `σ₁/σ₂ + σ₂/σ₁`, or `+∞` when `σ₂` vanishes.
    pub fn ratio_sum(&self) -> f64 {
        if self.sigma2 <= 0.0 {
            return f64::INFINITY;
        }
        self.sigma1 / self.sigma2 + self.sigma2 / self.sigma1
    }
}

fn require_2x2(m: &CMatrix) -> Result<()> {
    if m.rows != 2 || m.cols != 2 {
        return Err(Error::Dimension(format!(
            "expected 2x2 matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Gram matrix `H H†` of a 2-row channel.
///
/// For a 2×N_tx channel this is the 2×2 matrix whose nonzero spectrum equals
/// that of `H† H`.
pub fn gram2(h: &CMatrix) -> Result<CMatrix> {
    if h.rows != 2 {
        return Err(Error::Dimension(format!(
            "gram2 needs a 2-row channel, got {} rows",
            h.rows
        )));
    }
    let row_dot = |a: usize, b: usize| -> Complex64 {
        (0..h.cols).map(|c| h.get(a, c) * h.get(b, c).conj()).sum()
    };
    let m11 = row_dot(0, 0).re;
    let m22 = row_dot(1, 1).re;
    let m12 = row_dot(0, 1);
    CMatrix::new(
        2,
        2,
        vec![
            Complex64::new(m11, 0.0),
            m12,
            m12.conj(),
            Complex64::new(m22, 0.0),
        ],
    )
}

/// Closed-form eigenvalues of a 2×2 Hermitian matrix.
pub fn eig2(m: &CMatrix) -> Result<EigenPair2> {
    require_2x2(m)?;
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = 0.5 * (m.get(0, 1) + m.get(1, 0).conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    Ok(EigenPair2 {
        sigma1: (mean + radius).max(0.0),
        sigma2: (mean - radius).max(0.0),
    })
}

/// The rank metric `Σ|mᵢⱼ|² / det(M)` of a 2×2 Hermitian PSD matrix.
///
/// Returns `+∞` when `det(M) ≤ 1e-12 · tr(M)²`.
pub fn gamma_metric(m: &CMatrix) -> Result<f64> {
    require_2x2(m)?;
    let num: f64 = m.frobenius_sq();
    let det = (m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)).re;
    let tr = m.trace().re;
    if det <= SINGULAR_REL_EPS * tr * tr {
        return Ok(f64::INFINITY);
    }
    Ok(num / det)
}

/// `round(10·log₁₀ x)` clamped to `[-10, 40]` dB.
pub fn lin_to_int_db(x: f64) -> Result<i32> {
    lin_to_int_db_clamped(x, DB_CLAMP_MIN, DB_CLAMP_MAX)
}

/// `round(10·log₁₀ x)` clamped to `[lo, hi]` dB.
pub fn lin_to_int_db_clamped(x: f64, lo: i32, hi: i32) -> Result<i32> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "linear power ratio must be >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(lo);
    }
    if x.is_infinite() {
        return Ok(hi);
    }
    let db = (10.0 * x.log10()).round();
    Ok(db.clamp(f64::from(lo), f64::from(hi)) as i32)
}

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
