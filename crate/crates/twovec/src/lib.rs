//! Monte Carlo validation, reference solvers, scenario files and reports for `twovec-core`.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod montecarlo;
pub mod noise;
pub mod oracles;
pub mod report;
pub mod stats;

pub use config::{Format, NoiseSpec, Scenario, ScenarioConfig, TrueAttitude};
pub use error::{HarnessError, Result};
pub use montecarlo::{run_trials, EmpiricalStats};
pub use noise::{sample_noise, JointSampler, VectorNoise};
pub use oracles::{davenport_oracle, triad_oracle};
pub use report::{validate, ValidationReport};
