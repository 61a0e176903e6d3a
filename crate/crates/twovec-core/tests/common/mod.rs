#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use twovec_core::linalg::{cross, dot, norm, scale, Vec3};
use twovec_core::quat::{normalize, rotate, Quat4, UnitQuaternion};
use twovec_core::VectorObservation;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vec(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v: Vec3 = core::array::from_fn(|_| rng.sample(StandardNormal));
        let n = norm(&v);
        if n > 1e-3 {
            return scale(&v, 1.0 / n);
        }
    }
}

pub fn unit_quat(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let a: [f64; 4] = core::array::from_fn(|_| rng.sample(StandardNormal));
        if let Ok(q) = normalize(Quat4::from_array(a)) {
            return q;
        }
    }
}

/// Unit vector perpendicular to `v`.
pub fn perp_unit(rng: &mut impl Rng, v: &Vec3) -> Vec3 {
    loop {
        let w = unit_vec(rng);
        let c = cross(v, &w);
        let n = norm(&c);
        if n > 1e-2 {
            return scale(&c, 1.0 / n);
        }
    }
}

/// Reference pair with at least ~6° separation.
pub fn reference_pair(rng: &mut impl Rng) -> (Vec3, Vec3) {
    loop {
        let a = unit_vec(rng);
        let b = unit_vec(rng);
        if norm(&cross(&a, &b)) > 0.1 {
            return (a, b);
        }
    }
}

pub fn observe(q: UnitQuaternion, r1: Vec3, r2: Vec3) -> (VectorObservation, VectorObservation) {
    (
        VectorObservation::new_unchecked(rotate(q, &r1), r1),
        VectorObservation::new_unchecked(rotate(q, &r2), r2),
    )
}

pub fn axis_angle(axis: &Vec3, angle: f64) -> UnitQuaternion {
    UnitQuaternion::from_axis_angle(axis, angle).unwrap()
}

pub fn max_abs4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

pub fn dist_up_to_sign(a: UnitQuaternion, b: UnitQuaternion) -> f64 {
    let d = dot(&a.to_array(), &b.to_array());
    let s = if d < 0.0 { -1.0 } else { 1.0 };
    max_abs4(&a.to_array(), &b.quat().scale(s).to_array())
}
