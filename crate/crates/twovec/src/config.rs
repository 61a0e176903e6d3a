//! Scenario files.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use twovec_core::error_analysis::{Mat12, NoiseModel};
use twovec_core::estimator::{EstimatorConfig, VectorObservation};
use twovec_core::linalg::{cross, norm, Vec3};
use twovec_core::quat::{normalize, rotate, Quat4, UnitQuaternion};

use crate::error::{HarnessError, Result};
use crate::noise::VectorNoise;

/// RNG stream reserved for drawing a random true attitude; trial chunks use streams `0..`.
pub const ATTITUDE_STREAM: u64 = u64::MAX;

pub const DEFAULT_CHUNK_SIZE: u64 = 10_000;

/// Tolerance on `| |r| − 1 |` for reference vectors.
pub const REFERENCE_UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomTag {
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrueAttitude {
    Fixed(UnitQuaternion),
    /// Uniform on the sphere, drawn from the scenario seed.
    Random(RandomTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// `σ²(I − vvᵀ)` on each of the four vectors.
    Tangent { sigma: f64 },
    /// `σ²I` on each of the four vectors.
    Isotropic { sigma: f64 },
    /// Independent per-vector models.
    PerVector { b1: VectorNoise, r1: VectorNoise, b2: VectorNoise, r2: VectorNoise },
    /// Full covariance of `(Δb₁, Δr₁, Δb₂, Δr₂)`.
    Joint { covariance: Mat12 },
}

impl NoiseSpec {
    pub fn model(&self, vm1: &VectorObservation, vm2: &VectorObservation) -> Result<NoiseModel> {
        let m = match self {
            NoiseSpec::Tangent { sigma } => NoiseModel::tangent(*sigma, vm1, vm2),
            NoiseSpec::Isotropic { sigma } => NoiseModel::isotropic(*sigma),
            NoiseSpec::PerVector { b1, r1, b2, r2 } => NoiseModel::independent(
                b1.covariance(&vm1.b),
                r1.covariance(&vm1.r),
                b2.covariance(&vm2.b),
                r2.covariance(&vm2.r),
            ),
            NoiseSpec::Joint { covariance } => NoiseModel::from_joint(*covariance),
        };
        m.map_err(|e| HarnessError::Config(format!("noise: {e}")))
    }

    /// Replaces the scale of a single-σ model.
    pub fn with_sigma(&self, sigma: f64) -> Result<NoiseSpec> {
        match self {
            NoiseSpec::Tangent { .. } => Ok(NoiseSpec::Tangent { sigma }),
            NoiseSpec::Isotropic { .. } => Ok(NoiseSpec::Isotropic { sigma }),
            _ => Err(HarnessError::Config("--sigma only applies to tangent or isotropic noise".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub true_quaternion: TrueAttitude,
    pub r1: Vec3,
    pub r2: Vec3,
    pub noise: NoiseSpec,
    pub trials: u64,
    pub seed: u64,
    /// Trials per RNG stream; part of the reproducibility contract.
    #[serde(default = "default_chunk_size")]
    pub chunk_size: u64,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_chunk_size() -> u64 {
    DEFAULT_CHUNK_SIZE
}

/// A validated scenario with the true observations built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub q_true: UnitQuaternion,
    pub vm1: VectorObservation,
    pub vm2: VectorObservation,
    pub noise: NoiseModel,
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    pub estimator: EstimatorConfig,
}

/// Uniform random attitude from four standard normals.
pub fn random_attitude(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let q = Quat4::from_array(core::array::from_fn(|_| rng.sample(StandardNormal)));
        if q.norm() > 1e-3 {
            if let Ok(u) = normalize(q) {
                return u;
            }
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<Scenario> {
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.chunk_size < 1 {
            return Err(HarnessError::Config("chunk_size must be at least 1".into()));
        }
        if !self.estimator.is_valid() {
            return Err(HarnessError::Config("estimator thresholds must lie in (0, 1)".into()));
        }
        for (name, r) in [("r1", &self.r1), ("r2", &self.r2)] {
            if !((norm(r) - 1.0).abs() <= REFERENCE_UNIT_TOL) {
                return Err(HarnessError::Config(format!("{name} is not a unit vector")));
            }
        }
        if !(norm(&cross(&self.r1, &self.r2)) > self.estimator.collinearity_threshold) {
            return Err(HarnessError::Config("r1 and r2 are collinear".into()));
        }
        let q_true = match self.true_quaternion {
            TrueAttitude::Fixed(q) => q,
            TrueAttitude::Random(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(ATTITUDE_STREAM);
                random_attitude(&mut rng)
            }
        };
        let vm1 = VectorObservation::new_unchecked(rotate(q_true, &self.r1), self.r1);
        let vm2 = VectorObservation::new_unchecked(rotate(q_true, &self.r2), self.r2);
        let noise = self.noise.model(&vm1, &vm2)?;
        Ok(Scenario {
            q_true,
            vm1,
            vm2,
            noise,
            trials: self.trials,
            seed: self.seed,
            chunk_size: self.chunk_size,
            estimator: self.estimator,
        })
    }
}
