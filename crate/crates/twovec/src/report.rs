//! Analytic vs empirical comparison and report output.

use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use twovec_core::error_analysis::{cov_additive_projection, error_budget, ErrorBudget};
use twovec_core::linalg::{frobenius, mat_sub, Mat4};

use crate::config::{Format, Scenario, ScenarioConfig};
use crate::error::Result;
use crate::montecarlo::{run_trials, EmpiricalStats};
use crate::stats::{within, z_score};

/// Pass threshold in standard errors.
pub const Z_THRESHOLD: f64 = 5.0;

/// Relative Frobenius error above which the fourth-order prediction is reported as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScores {
    pub bias_additive: [Option<f64>; 4],
    pub bias_multiplicative: [Option<f64>; 4],
    pub cov_additive: [[Option<f64>; 4]; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    /// `‖C_emp − P_4th‖_F`
    pub fourth_order: f64,
    /// `‖C_emp − APAᵀ‖_F`
    pub projection_only: f64,
    /// `‖C_emp − (APAᵀ + NqqᵀNᵀ)‖_F`
    pub second_order: f64,
    /// `fourth_order / ‖P_4th‖_F`
    pub relative_fourth_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Only gating checks decide the overall verdict.
    pub gating: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationPayload {
    pub config: ScenarioConfig,
    pub true_quaternion: [f64; 4],
    pub analytic: ErrorBudget,
    pub projection_prediction: Mat4,
    pub empirical: EmpiricalStats,
    pub z_scores: ZScores,
    pub distances: Distances,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub unix_time_s: u64,
    pub runtime_s: f64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    #[serde(flatten)]
    pub payload: ValidationPayload,
    pub metadata: Metadata,
}

fn check(name: &str, passed: bool, gating: bool) -> Check {
    Check { name: name.to_string(), passed, gating }
}

/// Compares a finished run against the analytic budget.
pub fn compare(config: &ScenarioConfig, sc: &Scenario, budget: ErrorBudget, stats: EmpiricalStats) -> ValidationPayload {
    let bias_a = budget.bias_qhat.to_array();
    let bias_m = budget.bias_deltaq.to_array();
    let mean_a = stats.mean_additive.to_array();
    let mean_m = stats.mean_multiplicative.to_array();
    let pred = budget.p_qhat_4th;
    let projection = cov_additive_projection(budget.q, &budget.p_qcheck);

    let z_scores = ZScores {
        bias_additive: core::array::from_fn(|i| z_score(mean_a[i], bias_a[i], stats.se_mean_additive[i])),
        bias_multiplicative: core::array::from_fn(|i| z_score(mean_m[i], bias_m[i], stats.se_mean_multiplicative[i])),
        cov_additive: core::array::from_fn(|i| {
            core::array::from_fn(|j| z_score(stats.cov_additive[i][j], pred[i][j], stats.se_cov_additive[i][j]))
        }),
    };
    let fourth = frobenius(&mat_sub(&stats.cov_additive, &pred));
    let pred_norm = frobenius(&pred);
    let distances = Distances {
        fourth_order: fourth,
        projection_only: frobenius(&mat_sub(&stats.cov_additive, &projection)),
        second_order: frobenius(&mat_sub(&stats.cov_additive, &budget.p_qhat_2nd)),
        relative_fourth_order: if pred_norm > 0.0 { fourth / pred_norm } else { 0.0 },
    };

    let bias_add_ok = (0..4).all(|i| within(mean_a[i], bias_a[i], stats.se_mean_additive[i], Z_THRESHOLD));
    let bias_mul_ok = (0..4).all(|i| within(mean_m[i], bias_m[i], stats.se_mean_multiplicative[i], Z_THRESHOLD));
    let cov_ok = (0..4)
        .all(|i| (0..4).all(|j| within(stats.cov_additive[i][j], pred[i][j], stats.se_cov_additive[i][j], Z_THRESHOLD)));
    let checks = vec![
        check("bias_additive", bias_add_ok, true),
        check("bias_multiplicative", bias_mul_ok, true),
        check("covariance_fourth_order", cov_ok, true),
        check("no_rejections", stats.rejections == 0, true),
        check("hemisphere_alignment", stats.hemisphere_violations == 0, true),
        check("fourth_order_not_worse_than_projection", distances.fourth_order <= distances.projection_only, false),
        check("fourth_order_within_10_percent", distances.relative_fourth_order <= DIVERGENCE_THRESHOLD, false),
    ];
    let passed = checks.iter().filter(|c| c.gating).all(|c| c.passed);
    ValidationPayload {
        config: config.clone(),
        true_quaternion: sc.q_true.to_array(),
        analytic: budget,
        projection_prediction: projection,
        empirical: stats,
        z_scores,
        distances,
        checks,
        passed,
    }
}

/// Runs the scenario and scores it against the analytic predictions.
pub fn validate(config: &ScenarioConfig, threads: Option<usize>) -> Result<ValidationReport> {
    let start = Instant::now();
    let sc = config.resolve()?;
    let budget = error_budget(&sc.vm1, &sc.vm2, &sc.noise, sc.q_true, sc.estimator.singularity_threshold)?;
    let stats = run_trials(&sc, threads)?;
    let payload = compare(config, &sc, budget, stats);
    let metadata = Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        runtime_s: start.elapsed().as_secs_f64(),
        threads,
    };
    Ok(ValidationReport { payload, metadata })
}

impl ValidationReport {
    /// Canonical serialization of the payload alone; stable across runs with the same config.
    pub fn payload_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.payload)?)
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out).map_err(|source| crate::error::HarnessError::Io { path: "<output>".into(), source })?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["key", "value"])?;
                for (k, v) in flatten(&serde_json::to_value(self)?) {
                    w.write_record([k, v])?;
                }
                w.flush().map_err(|source| crate::error::HarnessError::Io { path: "<output>".into(), source })?;
            }
        }
        Ok(())
    }
}

/// Flattens a JSON tree into `(dotted.path, scalar)` rows; array elements use their index.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| go(&join(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| go(&join(&i.to_string()), x, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub relative_fourth_order: f64,
    pub diverged: bool,
    pub passed: bool,
}

/// Validates the scenario at each σ and marks where the fourth-order prediction
/// misses the empirical covariance by more than [`DIVERGENCE_THRESHOLD`].
pub fn sigma_sweep(config: &ScenarioConfig, sigmas: &[f64], threads: Option<usize>) -> Result<Vec<SweepPoint>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let mut cfg = config.clone();
            cfg.noise = cfg.noise.with_sigma(sigma)?;
            let r = validate(&cfg, threads)?.payload;
            let rel = r.distances.relative_fourth_order;
            Ok(SweepPoint { sigma, relative_fourth_order: rel, diverged: rel > DIVERGENCE_THRESHOLD, passed: r.passed })
        })
        .collect()
}
