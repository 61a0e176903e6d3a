//! Mergeable moment sums for 4-vectors with standard errors on means and covariances.

use serde::{Deserialize, Serialize};
use twovec_core::linalg::{Mat4, Vec4};

/// Raw sums of `y = x − shift` up to fourth order (only the mixed terms needed for covariance errors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: u64,
    shift: Vec4,
    s1: Vec4,
    s2: Mat4,
    /// `Σ y_i² y_j`
    s21: Mat4,
    /// `Σ y_i² y_j²`
    s22: Mat4,
}

/// Finalized sample statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: u64,
    pub mean: Vec4,
    pub cov: Mat4,
    pub se_mean: Vec4,
    pub se_cov: Mat4,
}

impl Moments {
    pub fn new(shift: Vec4) -> Self {
        Moments { n: 0, shift, s1: [0.0; 4], s2: [[0.0; 4]; 4], s21: [[0.0; 4]; 4], s22: [[0.0; 4]; 4] }
    }

    pub fn push(&mut self, x: &Vec4) {
        let y: Vec4 = core::array::from_fn(|i| x[i] - self.shift[i]);
        self.n += 1;
        for i in 0..4 {
            self.s1[i] += y[i];
            let yi2 = y[i] * y[i];
            for j in 0..4 {
                self.s2[i][j] += y[i] * y[j];
                self.s21[i][j] += yi2 * y[j];
                self.s22[i][j] += yi2 * y[j] * y[j];
            }
        }
    }

    /// Adds the sums of `other`. Both must share the same shift.
    pub fn merge(&mut self, other: &Moments) {
        debug_assert_eq!(self.shift, other.shift);
        self.n += other.n;
        for i in 0..4 {
            self.s1[i] += other.s1[i];
            for j in 0..4 {
                self.s2[i][j] += other.s2[i][j];
                self.s21[i][j] += other.s21[i][j];
                self.s22[i][j] += other.s22[i][j];
            }
        }
    }

    pub fn summary(&self) -> Summary {
        let n = self.n as f64;
        if self.n == 0 {
            return Summary { n: 0, mean: self.shift, cov: [[0.0; 4]; 4], se_mean: [0.0; 4], se_cov: [[0.0; 4]; 4] };
        }
        let m: Vec4 = core::array::from_fn(|i| self.s1[i] / n);
        // raw moments of y about zero
        let e2 = |i: usize, j: usize| self.s2[i][j] / n;
        let e21 = |i: usize, j: usize| self.s21[i][j] / n;
        let e22 = |i: usize, j: usize| self.s22[i][j] / n;

        let mut cov = [[0.0; 4]; 4];
        let mut se_cov = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let c = e2(i, j) - m[i] * m[j];
                cov[i][j] = if self.n > 1 { c * n / (n - 1.0) } else { 0.0 };
                // E[(a−ā)²(b−b̄)²] expanded in raw moments
                let (a, b) = (m[i], m[j]);
                let mu22 = e22(i, j) - 2.0 * b * e21(i, j) - 2.0 * a * e21(j, i)
                    + b * b * e2(i, i)
                    + a * a * e2(j, j)
                    + 4.0 * a * b * e2(i, j)
                    - 3.0 * a * a * b * b;
                se_cov[i][j] = ((mu22 - c * c).max(0.0) / n).sqrt();
            }
        }
        let mean: Vec4 = core::array::from_fn(|i| self.shift[i] + m[i]);
        let se_mean: Vec4 = core::array::from_fn(|i| (cov[i][i].max(0.0) / n).sqrt());
        Summary { n: self.n, mean, cov, se_mean, se_cov }
    }
}

/// `(empirical − predicted) / se`, or `None` where the standard error vanishes.
pub fn z_score(empirical: f64, predicted: f64, se: f64) -> Option<f64> {
    (se > 0.0).then(|| (empirical - predicted) / se)
}

/// Tolerance used when a standard error collapses to zero (noise-free runs).
pub const ZERO_SE_FLOOR: f64 = 1e-12;

pub fn within(empirical: f64, predicted: f64, se: f64, k: f64) -> bool {
    (empirical - predicted).abs() <= k * se + ZERO_SE_FLOOR
}
