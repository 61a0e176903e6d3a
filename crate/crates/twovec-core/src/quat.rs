//! Scalar-last quaternions `[e; q]`.
//!
//! `compose` is the Hamilton product. `rotate` applies the attitude matrix
//!
//! ```text
//! A(q) = (q² − |e|²) I + 2 e eᵀ − 2 q [e×]
//! ```
//!
//! which is the transpose of the Hamilton active rotation `v ↦ q ⊗ v ⊗ q*`.
//! With that pairing, `rotate(compose(p, r), v) == rotate(r, rotate(p, v))`:
//! the left operand acts first.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Vec3, Vec4};
use crate::math::{abs, atan2, cos, sin, sqrt};

/// Tolerance on `| |q|² − 1 |` accepted by [`UnitQuaternion::new`].
pub const UNIT_TOL: f64 = 1e-12;

/// General (not necessarily unit) quaternion, vector part `e`, scalar part `q`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 4]", into = "[f64; 4]"))]
pub struct Quat4 {
    pub e: Vec3,
    pub q: f64,
}

impl From<[f64; 4]> for Quat4 {
    fn from(a: [f64; 4]) -> Self {
        Quat4::from_array(a)
    }
}

impl From<Quat4> for [f64; 4] {
    fn from(q: Quat4) -> Self {
        q.to_array()
    }
}

impl Quat4 {
    /// The identity element `1_q = [0, 0, 0, 1]`.
    pub const IDENTITY: Quat4 = Quat4 { e: [0.0; 3], q: 1.0 };
    pub const ZERO: Quat4 = Quat4 { e: [0.0; 3], q: 0.0 };

    pub const fn new(e: Vec3, q: f64) -> Self {
        Quat4 { e, q }
    }

    /// From `[x, y, z, w]` with the scalar last.
    pub const fn from_array(a: [f64; 4]) -> Self {
        Quat4 { e: [a[0], a[1], a[2]], q: a[3] }
    }

    pub const fn to_array(self) -> Vec4 {
        [self.e[0], self.e[1], self.e[2], self.q]
    }

    pub fn norm_sq(self) -> f64 {
        linalg::dot(&self.e, &self.e) + self.q * self.q
    }

    pub fn norm(self) -> f64 {
        sqrt(self.norm_sq())
    }

    pub fn dot(self, o: Quat4) -> f64 {
        linalg::dot(&self.e, &o.e) + self.q * o.q
    }

    pub fn add(self, o: Quat4) -> Quat4 {
        Quat4::new(linalg::add(&self.e, &o.e), self.q + o.q)
    }

    pub fn sub(self, o: Quat4) -> Quat4 {
        Quat4::new(linalg::sub(&self.e, &o.e), self.q - o.q)
    }

    pub fn scale(self, k: f64) -> Quat4 {
        Quat4::new(linalg::scale(&self.e, k), self.q * k)
    }

    pub fn neg(self) -> Quat4 {
        self.scale(-1.0)
    }

    pub fn conj(self) -> Quat4 {
        Quat4::new(linalg::neg(&self.e), self.q)
    }

    pub fn is_finite(self) -> bool {
        self.e.iter().all(|x| x.is_finite()) && self.q.is_finite()
    }
}

/// Hamilton product `p ⊗ r = [p_q e_r + r_q e_p + e_p × e_r ; p_q r_q − e_pᵀ e_r]`.
pub fn compose(p: Quat4, r: Quat4) -> Quat4 {
    let c = linalg::cross(&p.e, &r.e);
    let e = core::array::from_fn(|i| p.q * r.e[i] + r.q * p.e[i] + c[i]);
    Quat4::new(e, p.q * r.q - linalg::dot(&p.e, &r.e))
}

/// Rotation quaternion with `| |q|² − 1 | <= UNIT_TOL`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "[f64; 4]", into = "[f64; 4]"))]
pub struct UnitQuaternion(Quat4);

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        UnitQuaternion::new(Quat4::from_array(a))
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.0.to_array()
    }
}

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quat4::IDENTITY);

    /// Accepts `q` only if it is already unit norm.
    pub fn new(q: Quat4) -> Result<Self> {
        if q.is_finite() && abs(q.norm_sq() - 1.0) <= UNIT_TOL {
            Ok(UnitQuaternion(q))
        } else {
            Err(Error::NotUnit)
        }
    }

    /// `[u sin(θ/2); cos(θ/2)]` for a unit axis `u`.
    ///
    /// Under [`rotate`] this is a frame rotation: vectors turn by `−θ` about `u`.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Result<Self> {
        let n = linalg::norm(axis);
        if !(n > 0.0) {
            return Err(Error::NormUnderflow);
        }
        let s = sin(0.5 * angle) / n;
        normalize(Quat4::new(linalg::scale(axis, s), cos(0.5 * angle)))
    }

    pub const fn quat(self) -> Quat4 {
        self.0
    }

    pub const fn e(self) -> Vec3 {
        self.0.e
    }

    pub const fn q(self) -> f64 {
        self.0.q
    }

    pub const fn to_array(self) -> Vec4 {
        self.0.to_array()
    }

    pub fn neg(self) -> Self {
        UnitQuaternion(self.0.neg())
    }

    pub fn dot(self, o: UnitQuaternion) -> f64 {
        self.0.dot(o.0)
    }

    /// Returns `self` or `−self`, whichever has non-negative dot with `reference`.
    pub fn aligned_to(self, reference: UnitQuaternion) -> Self {
        if self.dot(reference) < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    /// Returns the sign representative with scalar part ≥ 0.
    pub fn canonical(self) -> Self {
        if self.0.q < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    /// The attitude matrix `A(q)` applied by [`rotate`].
    pub fn to_dcm(self) -> Mat3 {
        let Quat4 { e, q } = self.0;
        let c = q * q - linalg::dot(&e, &e);
        let ex = linalg::cross_matrix(&e);
        core::array::from_fn(|i| {
            core::array::from_fn(|j| {
                let d = if i == j { c } else { 0.0 };
                d + 2.0 * e[i] * e[j] - 2.0 * q * ex[i][j]
            })
        })
    }

    pub fn compose(self, o: UnitQuaternion) -> UnitQuaternion {
        // product of unit quaternions is unit up to rounding; renormalize to keep the invariant tight
        let p = compose(self.0, o.0);
        UnitQuaternion(p.scale(1.0 / p.norm()))
    }
}

/// `q / |q|`; fails with [`Error::NormUnderflow`] for a zero or non-finite input.
pub fn normalize(qb: Quat4) -> Result<UnitQuaternion> {
    let n = qb.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::NormUnderflow);
    }
    Ok(UnitQuaternion(qb.scale(1.0 / n)))
}

/// `[−e; q]`, the inverse of a unit quaternion under [`compose`].
pub fn inverse(q: UnitQuaternion) -> UnitQuaternion {
    UnitQuaternion(q.0.conj())
}

pub use crate::linalg::cross_matrix;

/// `A(q) v = (q² − |e|²) v + 2 (eᵀv) e − 2 q (e × v)`.
pub fn rotate(q: UnitQuaternion, v: &Vec3) -> Vec3 {
    let Quat4 { e, q: s } = q.0;
    let c = s * s - linalg::dot(&e, &e);
    let ev = 2.0 * linalg::dot(&e, v);
    let x = linalg::cross(&e, v);
    core::array::from_fn(|i| c * v[i] + ev * e[i] - 2.0 * s * x[i])
}

/// Rotation angle between two attitudes in `[0, π]`, blind to the quaternion sign.
///
/// Equal to `2·acos(|q1·q2|)` but evaluated as `2·atan2(|vec(q1⁻¹⊗q2)|, |q1·q2|)`
/// so that angles near zero keep full precision.
pub fn angle_between(q1: UnitQuaternion, q2: UnitQuaternion) -> f64 {
    let d = compose(q1.0.conj(), q2.0);
    2.0 * atan2(linalg::norm(&d.e), abs(d.q))
}
