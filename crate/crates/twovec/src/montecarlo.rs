//! Trial loop, chunked RNG streams and the comparison against the analytic budget.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twovec_core::error_analysis::additive_error_second_order;
use twovec_core::estimator::{estimate, SingularCase};
use twovec_core::linalg::{mat_vec, psd_sqrt, Mat4, Vec4};
use twovec_core::quat::{compose, inverse, Quat4, UnitQuaternion};

use crate::config::Scenario;
use crate::error::{HarnessError, Result};
use crate::noise::JointSampler;
use crate::stats::{Moments, Summary};

/// Generator for chunk `chunk` of a run seeded with `seed`: ChaCha8 keyed by the seed, stream = chunk index.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub trials: u64,
    pub accepted: u64,
    /// Trials where the estimator returned an error.
    pub rejections: u64,
    /// Trials that went through a singular-case formula or a frame rotation.
    pub singular_path: u64,
    /// Accepted samples with `q̂ᵀq_true < 0` after alignment; zero by construction.
    pub hemisphere_violations: u64,
    pub mean_additive: Quat4,
    pub mean_multiplicative: Quat4,
    pub cov_additive: Mat4,
    pub cov_multiplicative: Mat4,
    pub se_mean_additive: Vec4,
    pub se_mean_multiplicative: Vec4,
    pub se_cov_additive: Mat4,
    pub se_cov_multiplicative: Mat4,
}

#[derive(Debug, Clone, Copy)]
struct ChunkResult {
    additive: Moments,
    multiplicative: Moments,
    rejections: u64,
    singular_path: u64,
    hemisphere_violations: u64,
}

fn run_chunk(sc: &Scenario, sampler: &JointSampler, chunk: u64, count: u64) -> ChunkResult {
    let mut rng = chunk_rng(sc.seed, chunk);
    let q_true = sc.q_true;
    let q_inv = inverse(q_true).quat();
    let mut out = ChunkResult {
        additive: Moments::new([0.0; 4]),
        multiplicative: Moments::new([0.0, 0.0, 0.0, 1.0]),
        rejections: 0,
        singular_path: 0,
        hemisphere_violations: 0,
    };
    for _ in 0..count {
        let err = sampler.sample(&mut rng);
        let (p1, p2) = err.apply(&sc.vm1, &sc.vm2);
        let res = match estimate(&p1, &p2, &sc.estimator) {
            Ok(r) => r,
            Err(_) => {
                out.rejections += 1;
                continue;
            }
        };
        if res.case != SingularCase::Regular || res.rotated_frame.is_some() {
            out.singular_path += 1;
        }
        let q_hat = res.quaternion.aligned_to(q_true);
        if q_hat.dot(q_true) < 0.0 {
            out.hemisphere_violations += 1;
        }
        out.additive.push(&q_true.quat().sub(q_hat.quat()).to_array());
        out.multiplicative.push(&compose(q_inv, q_hat.quat()).to_array());
    }
    out
}

/// Runs a closure on a pool of `threads` workers, or on the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn chunks(trials: u64, chunk_size: u64) -> Vec<(u64, u64)> {
    let n = trials.div_ceil(chunk_size);
    (0..n).map(|c| (c, chunk_size.min(trials - c * chunk_size))).collect()
}

/// Perturb, estimate, align and accumulate `Δq̂ = q − q̂` and `δq̂ = q⁻¹ ⊗ q̂` over all trials.
///
/// Chunks may run on any thread; they are reduced in chunk order, so the result depends
/// only on the seed and the chunk size.
pub fn run_trials(sc: &Scenario, threads: Option<usize>) -> Result<EmpiricalStats> {
    let sampler = JointSampler::new(&sc.noise);
    let parts: Vec<ChunkResult> = with_threads(threads, || {
        chunks(sc.trials, sc.chunk_size)
            .into_par_iter()
            .map(|(c, count)| run_chunk(sc, &sampler, c, count))
            .collect()
    })?;
    let mut total = ChunkResult {
        additive: Moments::new([0.0; 4]),
        multiplicative: Moments::new([0.0, 0.0, 0.0, 1.0]),
        rejections: 0,
        singular_path: 0,
        hemisphere_violations: 0,
    };
    for p in &parts {
        total.additive.merge(&p.additive);
        total.multiplicative.merge(&p.multiplicative);
        total.rejections += p.rejections;
        total.singular_path += p.singular_path;
        total.hemisphere_violations += p.hemisphere_violations;
    }
    let a = total.additive.summary();
    let m = total.multiplicative.summary();
    Ok(EmpiricalStats {
        trials: sc.trials,
        accepted: a.n,
        rejections: total.rejections,
        singular_path: total.singular_path,
        hemisphere_violations: total.hemisphere_violations,
        mean_additive: Quat4::from_array(a.mean),
        mean_multiplicative: Quat4::from_array(m.mean),
        cov_additive: a.cov,
        cov_multiplicative: m.cov,
        se_mean_additive: a.se_mean,
        se_mean_multiplicative: m.se_mean,
        se_cov_additive: a.se_cov,
        se_cov_multiplicative: m.se_cov,
    })
}

/// Samples `Δq̂ ≈ AΔq̌ + z(Δq̌)` with `Δq̌ ~ N(0, P)` and returns its moments.
pub fn sample_quadratic_model(
    q: UnitQuaternion,
    p_qcheck: &Mat4,
    samples: u64,
    seed: u64,
    chunk_size: u64,
    threads: Option<usize>,
) -> Result<Summary> {
    let root = psd_sqrt(p_qcheck);
    let parts: Vec<Moments> = with_threads(threads, || {
        chunks(samples, chunk_size)
            .into_par_iter()
            .map(|(c, count)| {
                let mut rng = chunk_rng(seed, c);
                let mut acc = Moments::new([0.0; 4]);
                for _ in 0..count {
                    let n: Vec4 = core::array::from_fn(|_| rng.sample(StandardNormal));
                    let dq = Quat4::from_array(mat_vec(&root, &n));
                    acc.push(&additive_error_second_order(q, dq).to_array());
                }
                acc
            })
            .collect()
    })?;
    let mut total = Moments::new([0.0; 4]);
    for p in &parts {
        total.merge(p);
    }
    Ok(total.summary())
}
