//! Error analysis of the regular-path estimator.
//!
//! Notation: `q̄ᵗ` is the raw estimate from noise-free observations, `q` its
//! normalization, `Δq̄ = q̄ᵗ − q̄`, `Δq̌ = Δq̄/|q̄ᵗ|`, `Δq̂ = q − q̂` and
//! `δq̂ = q⁻¹ ⊗ q̂`. Perturbed observations are `b = bᵗ + Δb`, `r = rᵗ + Δr`.
//!
//! Covariances of `Δq̂` are those of the second-order error model
//! `Δq̂ ≈ AΔ + z(Δ)` with `A = I − qqᵀ`, `z = (Δᵀq)Δ + ½(ΔᵀQΔ)q`, `Q = I − 3qqᵀ`
//! and `Δ = Δq̌ ~ N(0, P)`. The fourth-order result is assembled from
//! Gaussian fourth moments, so odd moments never appear.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_raw, sum_diff, VectorObservation};
use crate::linalg::{
    self, cross, cross_matrix, dot, identity, mat_add, mat_mul, mat_scale, mat_sub, mat_vec, outer, sandwich,
    trace, transpose, Mat3, Mat4, Vec3, Vec4,
};
use crate::math::{abs, sqrt};
use crate::quat::{Quat4, UnitQuaternion};

/// Symmetry and PSD tolerance for noise covariances.
pub const NOISE_TOL: f64 = 1e-12;

/// `|q − Δq̌|` at or below this makes the norm ratio `ν` undefined.
pub const DEGENERATE_RATIO_TOL: f64 = 1e-12;

pub type Mat12 = [[f64; 12]; 12];

/// Slot of each measurement error inside the 12-dimensional joint vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    B1 = 0,
    R1 = 1,
    B2 = 2,
    R2 = 3,
}

/// Joint Gaussian covariance of `(Δb₁, Δr₁, Δb₂, Δr₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NoiseModel {
    joint: Mat12,
}

impl NoiseModel {
    pub fn zero() -> Self {
        NoiseModel { joint: [[0.0; 12]; 12] }
    }

    /// Validates symmetry and positive semidefiniteness.
    pub fn from_joint(joint: Mat12) -> Result<Self> {
        if linalg::is_symmetric_psd(&joint, NOISE_TOL) {
            Ok(NoiseModel { joint: linalg::symmetrize(&joint) })
        } else {
            Err(Error::InvalidNoiseModel)
        }
    }

    /// Four mutually uncorrelated errors.
    pub fn independent(p_b1: Mat3, p_r1: Mat3, p_b2: Mat3, p_r2: Mat3) -> Result<Self> {
        let mut m = Self::zero();
        for (slot, p) in [(Slot::B1, p_b1), (Slot::R1, p_r1), (Slot::B2, p_b2), (Slot::R2, p_r2)] {
            m.set_block(slot, slot, &p);
        }
        Self::from_joint(m.joint)
    }

    /// `σ² I₃` on every vector.
    pub fn isotropic(sigma: f64) -> Result<Self> {
        let p = mat_scale(&identity::<3>(), sigma * sigma);
        Self::independent(p, p, p, p)
    }

    /// `σ² (I₃ − vvᵀ)` on every vector `v`, confining errors to the tangent plane.
    pub fn tangent(sigma: f64, vm1: &VectorObservation, vm2: &VectorObservation) -> Result<Self> {
        let t = |v: &Vec3| mat_scale(&mat_sub(&identity::<3>(), &outer(v, v)), sigma * sigma);
        Self::independent(t(&vm1.b), t(&vm1.r), t(&vm2.b), t(&vm2.r))
    }

    /// Returns a copy with the cross-covariance `E{Δa Δcᵀ} = p` (and its transpose) set.
    pub fn with_cross(mut self, a: Slot, c: Slot, p: &Mat3) -> Result<Self> {
        self.set_block(a, c, p);
        self.set_block(c, a, &transpose(p));
        Self::from_joint(self.joint)
    }

    fn set_block(&mut self, a: Slot, c: Slot, p: &Mat3) {
        let (i0, j0) = (3 * a as usize, 3 * c as usize);
        for i in 0..3 {
            for j in 0..3 {
                self.joint[i0 + i][j0 + j] = p[i][j];
            }
        }
    }

    pub fn block(&self, a: Slot, c: Slot) -> Mat3 {
        let (i0, j0) = (3 * a as usize, 3 * c as usize);
        core::array::from_fn(|i| core::array::from_fn(|j| self.joint[i0 + i][j0 + j]))
    }

    pub fn joint(&self) -> &Mat12 {
        &self.joint
    }

    /// True when all four vectors have no cross-covariances.
    pub fn is_block_diagonal(&self) -> bool {
        (0..12).all(|i| (0..12).all(|j| i / 3 == j / 3 || self.joint[i][j] == 0.0))
    }
}

/// One draw of `(Δb₁, Δr₁, Δb₂, Δr₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MeasurementErrors {
    pub db1: Vec3,
    pub dr1: Vec3,
    pub db2: Vec3,
    pub dr2: Vec3,
}

impl MeasurementErrors {
    pub fn from_array(x: &[f64; 12]) -> Self {
        let v = |k: usize| -> Vec3 { [x[3 * k], x[3 * k + 1], x[3 * k + 2]] };
        MeasurementErrors { db1: v(0), dr1: v(1), db2: v(2), dr2: v(3) }
    }

    pub fn to_array(&self) -> [f64; 12] {
        let mut x = [0.0; 12];
        for (k, v) in [self.db1, self.dr1, self.db2, self.dr2].iter().enumerate() {
            x[3 * k..3 * k + 3].copy_from_slice(v);
        }
        x
    }

    pub fn scaled(&self, k: f64) -> Self {
        MeasurementErrors::from_array(&linalg::scale(&self.to_array(), k))
    }

    /// Observations `bᵗ + Δb`, `rᵗ + Δr`.
    pub fn apply(&self, vm1: &VectorObservation, vm2: &VectorObservation) -> (VectorObservation, VectorObservation) {
        (
            VectorObservation::new_unchecked(linalg::add(&vm1.b, &self.db1), linalg::add(&vm1.r, &self.dr1)),
            VectorObservation::new_unchecked(linalg::add(&vm2.b, &self.db2), linalg::add(&vm2.r, &self.dr2)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ErrorBudget {
    pub qbar_true: Quat4,
    pub qbar_true_norm: f64,
    /// `q̄ᵗ/|q̄ᵗ|`, sign-aligned to the supplied true attitude.
    pub q: UnitQuaternion,
    pub p_qbar: Mat4,
    pub p_qcheck: Mat4,
    pub p_qhat_2nd: Mat4,
    pub p_qhat_4th: Mat4,
    /// `M P_Δq̂ Mᵀ` with the second-order `P_Δq̂`.
    pub p_deltaq: Mat4,
    /// `M P_Δq̂ Mᵀ` with the fourth-order `P_Δq̂`.
    pub p_deltaq_4th: Mat4,
    pub bias_qhat: Quat4,
    pub bias_deltaq: Quat4,
    pub nu_mean: f64,
    /// `qᵀ E{Δq̂}`; its sign depends on the geometry.
    pub radial_bias: f64,
}

fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    linalg::sub(a, b)
}

/// `Δq̄ = q̄ᵗ − q̄(perturbed)`, including the bilinear terms.
pub fn delta_qbar_exact(vm1: &VectorObservation, vm2: &VectorObservation, err: &MeasurementErrors) -> Quat4 {
    let t1 = sum_diff(vm1);
    let t2 = sum_diff(vm2);
    let ds1: Vec3 = core::array::from_fn(|i| 0.5 * (err.db1[i] + err.dr1[i]));
    let dd1: Vec3 = core::array::from_fn(|i| 0.5 * (err.db1[i] - err.dr1[i]));
    let dd2: Vec3 = core::array::from_fn(|i| 0.5 * (err.db2[i] - err.dr2[i]));
    let e = sub3(&sub3(&cross(&t2.d, &dd1), &cross(&t1.d, &dd2)), &cross(&dd1, &dd2));
    let s = -dot(&t2.d, &ds1) - dot(&t1.s, &dd2) - dot(&ds1, &dd2);
    Quat4::new(e, s)
}

/// `J` with `Δq̄ ≈ J·(Δb₁, Δr₁, Δb₂, Δr₂)`.
pub fn jacobian(vm1: &VectorObservation, vm2: &VectorObservation) -> [[f64; 12]; 4] {
    let d1 = sum_diff(vm1).d;
    let p2 = sum_diff(vm2);
    let s1 = sum_diff(vm1).s;
    let d2 = p2.d;
    let d2x = cross_matrix(&d2);
    let d1x = cross_matrix(&d1);
    let mut j = [[0.0; 12]; 4];
    for r in 0..3 {
        for c in 0..3 {
            j[r][c] = 0.5 * d2x[r][c];
            j[r][3 + c] = -0.5 * d2x[r][c];
            j[r][6 + c] = -0.5 * d1x[r][c];
            j[r][9 + c] = 0.5 * d1x[r][c];
        }
    }
    for c in 0..3 {
        j[3][c] = -0.5 * d2[c];
        j[3][3 + c] = -0.5 * d2[c];
        j[3][6 + c] = -0.5 * s1[c];
        j[3][9 + c] = 0.5 * s1[c];
    }
    j
}

/// First-order part of [`delta_qbar_exact`].
pub fn delta_qbar_linear(vm1: &VectorObservation, vm2: &VectorObservation, err: &MeasurementErrors) -> Quat4 {
    let j = jacobian(vm1, vm2);
    let x = err.to_array();
    Quat4::from_array(core::array::from_fn(|i| dot(&j[i], &x)))
}

/// `J C Jᵀ` over the joint covariance, cross-covariances included.
pub fn cov_delta_qbar(vm1: &VectorObservation, vm2: &VectorObservation, noise: &NoiseModel) -> Mat4 {
    let j = jacobian(vm1, vm2);
    let c = noise.joint();
    let mut jc = [[0.0; 12]; 4];
    for i in 0..4 {
        for k in 0..12 {
            jc[i][k] = (0..12).map(|m| j[i][m] * c[m][k]).sum();
        }
    }
    let p = core::array::from_fn(|i| core::array::from_fn(|k| dot(&jc[i], &j[k])));
    linalg::symmetrize(&p)
}

/// Closed form for mutually uncorrelated errors.
///
/// The scalar/vector coupling of the first vector pair involves `P_r₁ − P_b₁`:
/// the `Δb₁` and `Δr₁` contributions enter the vector part with opposite signs
/// and the scalar part with the same sign.
pub fn cov_delta_qbar_uncorrelated(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    p_b1: &Mat3,
    p_r1: &Mat3,
    p_b2: &Mat3,
    p_r2: &Mat3,
) -> Mat4 {
    let SumDiffPair3 { s1, d1, d2 } = SumDiffPair3::new(vm1, vm2);
    let d1x = cross_matrix(&d1);
    let d2x = cross_matrix(&d2);
    let sum1 = mat_add(p_b1, p_r1);
    let sum2 = mat_add(p_b2, p_r2);
    let diff1 = mat_sub(p_r1, p_b1);
    let vv = mat_add(&sandwich(&d2x, &sum1), &sandwich(&d1x, &sum2));
    let vs1 = mat_vec(&mat_mul(&d2x, &diff1), &d2);
    let vs2 = mat_vec(&mat_mul(&d1x, &sum2), &s1);
    let ss = dot(&d2, &mat_vec(&sum1, &d2)) + dot(&s1, &mat_vec(&sum2, &s1));
    let mut p = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = 0.25 * vv[i][j];
        }
        p[i][3] = 0.25 * (vs1[i] + vs2[i]);
        p[3][i] = p[i][3];
    }
    p[3][3] = 0.25 * ss;
    p
}

/// `(σ²/2)[Σ(|dⱼ|²I − dⱼdⱼᵀ), d₁×s₁; (d₁×s₁)ᵀ, |d₂|² + |s₁|²]`, for `σ²I₃` on every vector.
pub fn cov_delta_qbar_isotropic(vm1: &VectorObservation, vm2: &VectorObservation, sigma: f64) -> Mat4 {
    let SumDiffPair3 { s1, d1, d2 } = SumDiffPair3::new(vm1, vm2);
    let k = 0.5 * sigma * sigma;
    let ds = cross(&d1, &s1);
    let mut p = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let diag = if i == j { dot(&d1, &d1) + dot(&d2, &d2) } else { 0.0 };
            p[i][j] = k * (diag - d1[i] * d1[j] - d2[i] * d2[j]);
        }
        p[i][3] = k * ds[i];
        p[3][i] = k * ds[i];
    }
    p[3][3] = k * (dot(&d2, &d2) + dot(&s1, &s1));
    p
}

struct SumDiffPair3 {
    s1: Vec3,
    d1: Vec3,
    d2: Vec3,
}

impl SumDiffPair3 {
    fn new(vm1: &VectorObservation, vm2: &VectorObservation) -> Self {
        let p1 = sum_diff(vm1);
        SumDiffPair3 { s1: p1.s, d1: p1.d, d2: sum_diff(vm2).d }
    }
}

/// `ν = |q̄ᵗ|/|q̄| = (1 − 2qᵀΔq̌ + |Δq̌|²)^(−½)`.
pub fn nu_exact(q: UnitQuaternion, dq_check: Quat4) -> Result<f64> {
    // 1 − 2qᵀΔ + |Δ|² is |q − Δ|²; forming the difference first avoids cancellation
    let n = q.quat().sub(dq_check).norm();
    if !(n > DEGENERATE_RATIO_TOL) {
        return Err(Error::DegenerateRatio);
    }
    Ok(1.0 / n)
}

/// `Δq̂ = νΔq̌ + (1 − ν)q`.
pub fn additive_error_exact(q: UnitQuaternion, dq_check: Quat4) -> Result<Quat4> {
    let nu = nu_exact(q, dq_check)?;
    Ok(dq_check.scale(nu).add(q.quat().scale(1.0 - nu)))
}

/// `M = [[e×] − qI, e; −eᵀ, −q]`, so that `δq̂ = 1_q + MΔq̂`.
pub fn m_matrix(q: UnitQuaternion) -> Mat4 {
    let e = q.e();
    let s = q.q();
    let ex = cross_matrix(&e);
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = ex[i][j] - if i == j { s } else { 0.0 };
        }
        m[i][3] = e[i];
        m[3][i] = -e[i];
    }
    m[3][3] = -s;
    m
}

pub fn multiplicative_error_exact(q: UnitQuaternion, dq_hat: Quat4) -> Quat4 {
    let md = mat_vec(&m_matrix(q), &dq_hat.to_array());
    Quat4::IDENTITY.add(Quat4::from_array(md))
}

/// `Q = I − 3qqᵀ`.
pub fn q_matrix(q: UnitQuaternion) -> Mat4 {
    let v = q.to_array();
    mat_sub(&identity::<4>(), &mat_scale(&outer(&v, &v), 3.0))
}

/// `A = I − qqᵀ`.
pub fn projection(q: UnitQuaternion) -> Mat4 {
    let v = q.to_array();
    mat_sub(&identity::<4>(), &outer(&v, &v))
}

fn quad(m: &Mat4, x: &Vec4) -> f64 {
    dot(x, &mat_vec(m, x))
}

/// `1 + qᵀΔ − ½ΔᵀQΔ`.
pub fn nu_second_order(q: UnitQuaternion, dq_check: Quat4) -> f64 {
    let d = dq_check.to_array();
    1.0 + dot(&q.to_array(), &d) - 0.5 * quad(&q_matrix(q), &d)
}

/// `(I − qqᵀ)Δ + [ΔΔᵀ + ½(ΔᵀQΔ)I]q`.
pub fn additive_error_second_order(q: UnitQuaternion, dq_check: Quat4) -> Quat4 {
    let d = dq_check.to_array();
    let qv = q.to_array();
    let lin = mat_vec(&projection(q), &d);
    let qd = dot(&qv, &d);
    let h = 0.5 * quad(&q_matrix(q), &d);
    Quat4::from_array(core::array::from_fn(|i| lin[i] + qd * d[i] + h * qv[i]))
}

/// `N = P + ½tr(QP)I`.
pub fn n_matrix(p_qcheck: &Mat4, q: UnitQuaternion) -> Mat4 {
    let t = 0.5 * trace(&mat_mul(&q_matrix(q), p_qcheck));
    mat_add(p_qcheck, &mat_scale(&identity::<4>(), t))
}

/// `E{ν} = 1 − ½tr(QP)`.
pub fn bias_nu(p_qcheck: &Mat4, q: UnitQuaternion) -> f64 {
    1.0 - 0.5 * trace(&mat_mul(&q_matrix(q), p_qcheck))
}

/// `E{Δq̂} = Nq`.
pub fn bias_additive(p_qcheck: &Mat4, q: UnitQuaternion) -> Quat4 {
    Quat4::from_array(mat_vec(&n_matrix(p_qcheck, q), &q.to_array()))
}

/// `E{δq̂} = 1_q + MNq`.
pub fn bias_multiplicative(p_qcheck: &Mat4, q: UnitQuaternion) -> Quat4 {
    multiplicative_error_exact(q, bias_additive(p_qcheck, q))
}

/// Second-order covariance family derived from `P_Δq̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovFamily {
    pub p_qcheck: Mat4,
    pub p_qhat_2nd: Mat4,
    pub p_deltaq: Mat4,
}

pub fn cov_family(p_qbar: &Mat4, qbar_true_norm: f64, q: UnitQuaternion) -> CovFamily {
    let p_qcheck = mat_scale(p_qbar, 1.0 / (qbar_true_norm * qbar_true_norm));
    let p_qhat_2nd = cov_additive_second_order(q, &p_qcheck);
    let p_deltaq = sandwich(&m_matrix(q), &p_qhat_2nd);
    CovFamily { p_qcheck, p_qhat_2nd, p_deltaq }
}

/// `APAᵀ`, the covariance of the first-order part alone.
pub fn cov_additive_projection(q: UnitQuaternion, p_qcheck: &Mat4) -> Mat4 {
    sandwich(&projection(q), p_qcheck)
}

/// `APAᵀ + NqqᵀNᵀ`.
pub fn cov_additive_second_order(q: UnitQuaternion, p_qcheck: &Mat4) -> Mat4 {
    let nq = mat_vec(&n_matrix(p_qcheck, q), &q.to_array());
    linalg::symmetrize(&mat_add(&cov_additive_projection(q, p_qcheck), &outer(&nq, &nq)))
}

/// `E{xᵢxⱼxₖxₘ}` for zero-mean Gaussian `x` with covariance `P`.
///
/// Indices are sorted first and only the upper triangle of `P` is read, so the
/// result is bitwise identical under every index permutation.
pub fn gaussian_moment4(p: &Mat4, i: usize, j: usize, k: usize, m: usize) -> f64 {
    let mut ix = [i, j, k, m];
    ix.sort_unstable();
    let [i, j, k, m] = ix;
    p[i][j] * p[k][m] + p[i][k] * p[j][m] + p[i][m] * p[j][k]
}

// Σ_{klmn} a_{kl} b_{mn} E{x_k x_l x_m x_n}
fn expect_quad_product(p: &Mat4, a: &Mat4, b: &Mat4) -> f64 {
    let mut s = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            if a[k][l] == 0.0 {
                continue;
            }
            for m in 0..4 {
                for n in 0..4 {
                    s += a[k][l] * b[m][n] * gaussian_moment4(p, k, l, m, n);
                }
            }
        }
    }
    s
}

/// The six fourth-moment terms of `E{zzᵀ}` with their prefactors applied:
///
/// 1. `E{(Δᵀq)² ΔΔᵀ}`
/// 2. `−3 E{(Δᵀq)³ Δ} qᵀ`
/// 3. `E{(ΔᵀΔ) ΔΔᵀ} qqᵀ`
/// 4. `¼ E{(ΔᵀΔ)²} qqᵀ`
/// 5. `−3/2 E{(Δᵀq)² ΔᵀΔ} qqᵀ`
/// 6. `9/4 E{(Δᵀq)⁴} qqᵀ`
///
/// Terms 2 and 3 are not symmetric; `E{zzᵀ}` uses their symmetric parts.
pub fn fourth_order_terms(q: UnitQuaternion, p: &Mat4) -> [Mat4; 6] {
    let qv = q.to_array();
    let qq = outer(&qv, &qv);
    let id = identity::<4>();
    // (Δᵀq)Δ_i = Σ_kl q_k δ_il Δ_k Δ_l
    let unit_row = |i: usize| -> Mat4 { core::array::from_fn(|k| core::array::from_fn(|l| if l == i { qv[k] } else { 0.0 })) };
    let pair = |i: usize, j: usize| -> Mat4 {
        core::array::from_fn(|k| core::array::from_fn(|l| if k == i && l == j { 1.0 } else { 0.0 }))
    };
    let mut t1 = [[0.0; 4]; 4];
    let mut t2 = [[0.0; 4]; 4];
    let mut t3 = [[0.0; 4]; 4];
    for i in 0..4 {
        // E{(Δᵀq)³ Δ_i} = E{[(Δᵀq)Δ_i]·(Δᵀq)²}
        let cubic = expect_quad_product(p, &unit_row(i), &qq);
        for j in 0..4 {
            t1[i][j] = expect_quad_product(p, &qq, &pair(i, j));
            t2[i][j] = -3.0 * cubic * qv[j];
        }
    }
    let mut e_dd = [[0.0; 4]; 4];
    for (i, row) in e_dd.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = expect_quad_product(p, &id, &pair(i, j));
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            t3[i][j] = (0..4).map(|k| e_dd[i][k] * qq[k][j]).sum();
        }
    }
    let s4 = expect_quad_product(p, &id, &id);
    let s5 = expect_quad_product(p, &qq, &id);
    let s6 = expect_quad_product(p, &qq, &qq);
    [
        t1,
        t2,
        t3,
        mat_scale(&qq, 0.25 * s4),
        mat_scale(&qq, -1.5 * s5),
        mat_scale(&qq, 2.25 * s6),
    ]
}

/// Covariance of the second-order error model `AΔ + z(Δ)` under `Δ ~ N(0, P)`.
///
/// Equals `APAᵀ + E{zzᵀ} − NqqᵀNᵀ`; the first/second-order cross moments are
/// odd and vanish.
pub fn cov_additive_fourth_order(q: UnitQuaternion, p_qcheck: &Mat4) -> Mat4 {
    let p = p_qcheck;
    let qv = q.to_array();
    let qm = q_matrix(q);
    // z_i = Σ_kl C_i[k][l] Δ_k Δ_l with C_i symmetric
    let c: [Mat4; 4] = core::array::from_fn(|i| {
        core::array::from_fn(|k| {
            core::array::from_fn(|l| {
                let lin = 0.5 * (qv[k] * if l == i { 1.0 } else { 0.0 } + qv[l] * if k == i { 1.0 } else { 0.0 });
                lin + 0.5 * qm[k][l] * qv[i]
            })
        })
    });
    let mut ezz = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let v = expect_quad_product(p, &c[i], &c[j]);
            ezz[i][j] = v;
            ezz[j][i] = v;
        }
    }
    let nq = mat_vec(&n_matrix(p, q), &qv);
    let cov_z = mat_sub(&ezz, &outer(&nq, &nq));
    linalg::symmetrize(&mat_add(&cov_additive_projection(q, p), &cov_z))
}

/// Full analytic budget for a non-singular noise-free geometry.
pub fn error_budget(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    noise: &NoiseModel,
    q_true: UnitQuaternion,
    tau: f64,
) -> Result<ErrorBudget> {
    let qbar = estimate_raw(vm1, vm2);
    let n = qbar.norm();
    if !(n > tau) {
        return Err(Error::SingularTrueGeometry);
    }
    let q = crate::quat::normalize(qbar)?.aligned_to(q_true);
    let p_qbar = cov_delta_qbar(vm1, vm2, noise);
    let fam = cov_family(&p_qbar, n, q);
    let p_qhat_4th = cov_additive_fourth_order(q, &fam.p_qcheck);
    let m = m_matrix(q);
    let bias_qhat = bias_additive(&fam.p_qcheck, q);
    Ok(ErrorBudget {
        qbar_true: qbar,
        qbar_true_norm: n,
        q,
        p_qbar,
        p_qcheck: fam.p_qcheck,
        p_qhat_2nd: fam.p_qhat_2nd,
        p_qhat_4th,
        p_deltaq: fam.p_deltaq,
        p_deltaq_4th: sandwich(&m, &p_qhat_4th),
        bias_qhat,
        bias_deltaq: bias_multiplicative(&fam.p_qcheck, q),
        nu_mean: bias_nu(&fam.p_qcheck, q),
        radial_bias: dot(&q.to_array(), &bias_qhat.to_array()),
    })
}

/// Standard deviation of the small rotation angle implied by `P_δq̂`: `2·sqrt(tr of the vector block)`.
pub fn attitude_sigma(p_deltaq: &Mat4) -> f64 {
    2.0 * sqrt(abs(p_deltaq[0][0] + p_deltaq[1][1] + p_deltaq[2][2]))
}
