//! Scenarios shared by the acceptance suite, the examples and the CLI tests.

use rand::Rng;
use twovec_core::estimator::{raw_norm, EstimatorConfig, VectorObservation};
use twovec_core::linalg::{cross, norm, scale, Vec3};
use twovec_core::quat::{rotate, UnitQuaternion};

use crate::config::{random_attitude, NoiseSpec, OutputSpec, ScenarioConfig, TrueAttitude, DEFAULT_CHUNK_SIZE};
use crate::montecarlo::chunk_rng;

/// Lower bound on `|q̄ᵗ|` for the random statistical fixtures.
pub const MIN_QBAR_NORM: f64 = 0.5;

pub fn scenario(q: UnitQuaternion, r1: Vec3, r2: Vec3, sigma: f64, trials: u64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        true_quaternion: TrueAttitude::Fixed(q),
        r1,
        r2,
        noise: NoiseSpec::Tangent { sigma },
        trials,
        seed,
        chunk_size: DEFAULT_CHUNK_SIZE,
        estimator: EstimatorConfig::default(),
        output: OutputSpec::default(),
    }
}

/// Half turn about z observed along x and y.
pub fn half_turn_z(sigma: f64, trials: u64, seed: u64) -> ScenarioConfig {
    let q = UnitQuaternion::try_from([0.0, 0.0, 1.0, 0.0]).expect("unit");
    scenario(q, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], sigma, trials, seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v: Vec3 = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return scale(&v, 1.0 / n);
        }
    }
}

/// Random attitudes and reference pairs with `|q̄ᵗ| ≥ MIN_QBAR_NORM`, reproducible from `seed`.
pub fn random_fixtures(count: usize, sigma: f64, trials: u64, seed: u64) -> Vec<ScenarioConfig> {
    let mut rng = chunk_rng(seed, u64::MAX - 1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = random_attitude(&mut rng);
        let r1 = random_unit(&mut rng);
        let r2 = random_unit(&mut rng);
        if norm(&cross(&r1, &r2)) < 0.3 {
            continue;
        }
        let vm1 = VectorObservation::new_unchecked(rotate(q, &r1), r1);
        let vm2 = VectorObservation::new_unchecked(rotate(q, &r2), r2);
        if raw_norm(&vm1, &vm2) >= MIN_QBAR_NORM {
            out.push(scenario(q, r1, r2, sigma, trials, seed.wrapping_add(out.len() as u64 + 1)));
        }
    }
    out
}

/// The four statistical fixtures: the half turn about z plus three random geometries.
pub fn statistical_fixtures(sigma: f64, trials: u64, seed: u64) -> Vec<ScenarioConfig> {
    let mut v = vec![half_turn_z(sigma, trials, seed)];
    v.extend(random_fixtures(3, sigma, trials, seed));
    v
}
