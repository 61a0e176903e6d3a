//! Fixed-size vector and matrix helpers on plain arrays.
//!
//! Matrices are row-major `[[f64; N]; N]`. Everything here is small enough that
//! the compiler unrolls it; no heap, no generic numeric traits.

use crate::math::{abs, sqrt};

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat4 = [[f64; 4]; 4];

pub fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        s += a[i] * b[i];
    }
    s
}

pub fn norm<const N: usize>(a: &[f64; N]) -> f64 {
    sqrt(dot(a, a))
}

pub fn add<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| a[i] + b[i])
}

pub fn sub<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| a[i] - b[i])
}

pub fn scale<const N: usize>(a: &[f64; N], k: f64) -> [f64; N] {
    core::array::from_fn(|i| a[i] * k)
}

pub fn neg<const N: usize>(a: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| -a[i])
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `[v×]`, so that `cross_matrix(v) w == v × w`.
pub fn cross_matrix(v: &Vec3) -> Mat3 {
    [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
}

/// True when `|u × v| <= tol·|u|·|v|`. A zero vector is parallel to everything.
pub fn parallel(u: &Vec3, v: &Vec3, tol: f64) -> bool {
    norm(&cross(u, v)) <= tol * norm(u) * norm(v)
}

pub fn zeros<const N: usize>() -> [[f64; N]; N] {
    [[0.0; N]; N]
}

pub fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn outer<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [[f64; N]; N] {
    core::array::from_fn(|i| core::array::from_fn(|j| a[i] * b[j]))
}

pub fn transpose<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    core::array::from_fn(|i| core::array::from_fn(|j| m[j][i]))
}

pub fn mat_vec<const N: usize>(m: &[[f64; N]; N], v: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|i| dot(&m[i], v))
}

pub fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn mat_add<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    core::array::from_fn(|i| add(&a[i], &b[i]))
}

pub fn mat_sub<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    core::array::from_fn(|i| sub(&a[i], &b[i]))
}

pub fn mat_scale<const N: usize>(a: &[[f64; N]; N], k: f64) -> [[f64; N]; N] {
    core::array::from_fn(|i| scale(&a[i], k))
}

pub fn trace<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    (0..N).map(|i| m[i][i]).sum()
}

/// `a · m · aᵀ`.
pub fn sandwich<const N: usize>(a: &[[f64; N]; N], m: &[[f64; N]; N]) -> [[f64; N]; N] {
    mat_mul(&mat_mul(a, m), &transpose(a))
}

/// `(m + mᵀ)/2`.
pub fn symmetrize<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    core::array::from_fn(|i| core::array::from_fn(|j| 0.5 * (m[i][j] + m[j][i])))
}

pub fn frobenius<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut s = 0.0;
    for row in m {
        s += dot(row, row);
    }
    sqrt(s)
}

pub fn max_abs_diff<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let d = abs(a[i][j] - b[i][j]);
            if d > m || d.is_nan() {
                m = d;
            }
        }
    }
    m
}

pub fn is_finite<const N: usize>(m: &[[f64; N]; N]) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_finite()))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in the columns,
/// sorted by descending eigenvalue. Only the upper triangle of `m` is trusted.
pub fn sym_eigen<const N: usize>(m: &[[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut a = symmetrize(m);
    let mut v = identity::<N>();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..N {
            for j in (i + 1)..N {
                off += a[i][j] * a[i][j];
            }
        }
        let scale_sq = {
            let f = frobenius(&a);
            f * f
        };
        if off <= 1e-34 * scale_sq || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (abs(theta) + sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: [usize; N] = core::array::from_fn(|i| i);
    // insertion sort, N is tiny
    for i in 1..N {
        let mut j = i;
        while j > 0 && a[order[j]][order[j]] > a[order[j - 1]][order[j - 1]] {
            order.swap(j, j - 1);
            j -= 1;
        }
    }
    let vals = core::array::from_fn(|i| a[order[i]][order[i]]);
    let vecs = core::array::from_fn(|r| core::array::from_fn(|c| v[r][order[c]]));
    (vals, vecs)
}

/// Symmetric positive semidefinite square root `L` with `L·L = m`.
///
/// Negative eigenvalues within rounding are clamped to zero.
pub fn psd_sqrt<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    let (vals, vecs) = sym_eigen(m);
    // eigenvalues at round-off level are null directions; their square roots would not be
    let floor = vals.iter().fold(0.0f64, |a, &l| a.max(abs(l))) * (N as f64) * f64::EPSILON;
    let mut out = [[0.0; N]; N];
    for (k, &lam) in vals.iter().enumerate() {
        let r = if lam > floor { sqrt(lam) } else { 0.0 };
        for i in 0..N {
            for j in 0..N {
                out[i][j] += r * vecs[i][k] * vecs[j][k];
            }
        }
    }
    out
}

/// Checks symmetry and positive semidefiniteness at an absolute tolerance.
pub fn is_symmetric_psd<const N: usize>(m: &[[f64; N]; N], tol: f64) -> bool {
    if !is_finite(m) {
        return false;
    }
    for i in 0..N {
        for j in (i + 1)..N {
            if abs(m[i][j] - m[j][i]) > tol {
                return false;
            }
        }
    }
    let (vals, _) = sym_eigen(m);
    vals[N - 1] >= -tol
}
