//! Gaussian measurement-error sampling.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use twovec_core::error_analysis::{Mat12, MeasurementErrors, NoiseModel};
use twovec_core::linalg::{self, cross, dot, mat_vec, psd_sqrt, scale, Mat3, Vec3};

/// Error model for a single unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorNoise {
    /// `σ²(I − vvᵀ)`.
    Tangent { sigma: f64 },
    /// `σ²I`.
    Isotropic { sigma: f64 },
    Full { covariance: Mat3 },
}

impl VectorNoise {
    pub fn covariance(&self, v: &Vec3) -> Mat3 {
        let id = linalg::identity::<3>();
        match *self {
            VectorNoise::Tangent { sigma } => {
                linalg::mat_scale(&linalg::mat_sub(&id, &linalg::outer(v, v)), sigma * sigma)
            }
            VectorNoise::Isotropic { sigma } => linalg::mat_scale(&id, sigma * sigma),
            VectorNoise::Full { covariance } => covariance,
        }
    }
}

fn normal3(rng: &mut impl Rng) -> Vec3 {
    core::array::from_fn(|_| rng.sample(StandardNormal))
}

/// One zero-mean draw for the vector `v`. Tangent draws are projected onto the plane orthogonal to `v`.
pub fn sample_noise(noise: &VectorNoise, v: &Vec3, rng: &mut impl Rng) -> Vec3 {
    match *noise {
        VectorNoise::Tangent { sigma } => {
            let n = normal3(rng);
            let vv = dot(v, v);
            let t = if vv > 0.0 { linalg::sub(&n, &scale(v, dot(&n, v) / vv)) } else { n };
            // second projection pass removes the residual left by rounding
            let t = if vv > 0.0 { linalg::sub(&t, &scale(v, dot(&t, v) / vv)) } else { t };
            scale(&t, sigma)
        }
        VectorNoise::Isotropic { sigma } => scale(&normal3(rng), sigma),
        VectorNoise::Full { covariance } => mat_vec(&psd_sqrt(&covariance), &normal3(rng)),
    }
}

/// Draws `(Δb₁, Δr₁, Δb₂, Δr₂)` as `L·n` with `L` the symmetric square root of the joint covariance.
#[derive(Debug, Clone)]
pub struct JointSampler {
    root: Mat12,
    zero: bool,
}

impl JointSampler {
    pub fn new(noise: &NoiseModel) -> Self {
        let root = psd_sqrt(noise.joint());
        let zero = root.iter().all(|r| r.iter().all(|&x| x == 0.0));
        JointSampler { root, zero }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> MeasurementErrors {
        if self.zero {
            return MeasurementErrors::default();
        }
        let n: [f64; 12] = core::array::from_fn(|_| rng.sample(StandardNormal));
        MeasurementErrors::from_array(&mat_vec(&self.root, &n))
    }
}

/// Unit vector orthogonal to `v`, used to build tangent bases in tests and fixtures.
pub fn any_orthogonal(v: &Vec3) -> Vec3 {
    let k = (0..3).min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let c = cross(v, &e);
    scale(&c, 1.0 / linalg::norm(&c))
}
