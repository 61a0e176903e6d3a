//! Closed-form two-vector estimator and the singular-case formulas.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cross, dot, norm, scale, Vec3};
use crate::math::{abs, atan2, cos, sin};
use crate::quat::{normalize, Quat4, UnitQuaternion};
use crate::seq_rot::{self, Axis};

/// Accepted deviation of `|b|`, `|r|` from one.
pub const OBSERVATION_UNIT_TOL: f64 = 1e-9;

/// A body-frame direction `b` paired with its reference-frame counterpart `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct VectorObservation {
    pub b: Vec3,
    pub r: Vec3,
}

impl VectorObservation {
    /// Validates that both vectors are unit norm within [`OBSERVATION_UNIT_TOL`].
    pub fn new(b: Vec3, r: Vec3) -> Result<Self> {
        let obs = VectorObservation { b, r };
        if obs.is_unit() {
            Ok(obs)
        } else {
            Err(Error::NotUnit)
        }
    }

    /// No validation. Used for noisy measurements, which are not renormalized.
    pub const fn new_unchecked(b: Vec3, r: Vec3) -> Self {
        VectorObservation { b, r }
    }

    /// Rescales both vectors to unit norm.
    pub fn renormalized(self) -> Result<Self> {
        let nb = norm(&self.b);
        let nr = norm(&self.r);
        if !(nb > 0.0 && nr > 0.0) {
            return Err(Error::NormUnderflow);
        }
        Ok(VectorObservation { b: scale(&self.b, 1.0 / nb), r: scale(&self.r, 1.0 / nr) })
    }

    pub fn is_unit(&self) -> bool {
        let ok = |v: &Vec3| v.iter().all(|x| x.is_finite()) && abs(norm(v) - 1.0) <= OBSERVATION_UNIT_TOL;
        ok(&self.b) && ok(&self.r)
    }
}

/// `s = ½(b + r)`, `d = ½(b − r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SumDiffPair {
    pub s: Vec3,
    pub d: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[allow(non_camel_case_types)]
pub enum SingularCase {
    Regular,
    /// Identity attitude: both differences vanish.
    A_ZeroAttitude,
    /// Rotation about the first observation: `d₁ = 0`.
    B_AroundVM1,
    /// Rotation about the second observation: `d₂ = 0`.
    C_AroundVM2,
    /// Parallel differences: `d₁ × d₂ = 0` with both nonzero.
    D_ParallelDiffs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HemisphereConvention {
    /// Sign chosen so that the scalar part is non-negative.
    ScalarNonNegative,
    /// Sign chosen to agree with the reference; falls back to scalar ≥ 0 when `None`.
    AlignToReference(Option<UnitQuaternion>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    /// `τ`: absolute floor for `|d|`, relative floor for parallelism, and floor for the raw norm.
    pub singularity_threshold: f64,
    /// Relative floor for `|r₁ × r₂|` and `|b₁ × b₂|`, and for the kernel basis norms.
    pub collinearity_threshold: f64,
    pub hemisphere_convention: HemisphereConvention,
    /// Rescale observations to unit norm before estimating.
    pub renormalize: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            singularity_threshold: 1e-6,
            collinearity_threshold: 1e-8,
            hemisphere_convention: HemisphereConvention::ScalarNonNegative,
            renormalize: false,
        }
    }
}

impl EstimatorConfig {
    pub fn apply_hemisphere(&self, q: UnitQuaternion) -> UnitQuaternion {
        match self.hemisphere_convention {
            HemisphereConvention::AlignToReference(Some(r)) => q.aligned_to(r),
            _ => q.canonical(),
        }
    }

    pub fn is_valid(&self) -> bool {
        let ok = |t: f64| t > 0.0 && t < 1.0;
        ok(self.singularity_threshold) && ok(self.collinearity_threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EstimateResult {
    pub quaternion: UnitQuaternion,
    pub case: SingularCase,
    /// Axis of the π frame rotation used, if the sequential-rotation path ran.
    pub rotated_frame: Option<Axis>,
    /// `|q̄|` of the problem that produced the quaternion (the rotated one if any).
    pub raw_norm: f64,
}

pub fn sum_diff(obs: &VectorObservation) -> SumDiffPair {
    SumDiffPair {
        s: core::array::from_fn(|i| 0.5 * (obs.b[i] + obs.r[i])),
        d: core::array::from_fn(|i| 0.5 * (obs.b[i] - obs.r[i])),
    }
}

/// Orthonormal basis `(q₁, q₂)` of the kernel and `(q₃, q₄)` of its complement.
pub fn kernel_basis(obs: &VectorObservation, cfg: &EstimatorConfig) -> Result<[Quat4; 4]> {
    let SumDiffPair { s, d } = sum_diff(obs);
    let ns = norm(&s);
    let nd = norm(&d);
    if ns < cfg.collinearity_threshold || nd < cfg.collinearity_threshold {
        return Err(Error::DegenerateBasis);
    }
    let sxd = cross(&s, &d);
    Ok([
        Quat4::new(scale(&s, 1.0 / ns), 0.0),
        Quat4::new(scale(&sxd, -1.0 / ns), ns),
        Quat4::new(scale(&d, 1.0 / nd), 0.0),
        Quat4::new(scale(&sxd, 1.0 / nd), nd),
    ])
}

/// `q̄ = [d₁ × d₂ ; s₁ᵀ d₂]`, unnormalized.
pub fn estimate_raw(vm1: &VectorObservation, vm2: &VectorObservation) -> Quat4 {
    let p1 = sum_diff(vm1);
    let p2 = sum_diff(vm2);
    Quat4::new(cross(&p1.d, &p2.d), dot(&p1.s, &p2.d))
}

/// `sqrt(|d₁ × d₂|² + (s₁ᵀ d₂)²)`.
pub fn raw_norm(vm1: &VectorObservation, vm2: &VectorObservation) -> f64 {
    estimate_raw(vm1, vm2).norm()
}

pub fn classify(vm1: &VectorObservation, vm2: &VectorObservation, cfg: &EstimatorConfig) -> SingularCase {
    let tau = cfg.singularity_threshold;
    let d1 = sum_diff(vm1).d;
    let d2 = sum_diff(vm2).d;
    let small1 = norm(&d1) < tau;
    let small2 = norm(&d2) < tau;
    match (small1, small2) {
        (true, true) => SingularCase::A_ZeroAttitude,
        (true, false) => SingularCase::B_AroundVM1,
        (false, true) => SingularCase::C_AroundVM2,
        (false, false) if linalg::parallel(&d1, &d2, tau) => SingularCase::D_ParallelDiffs,
        _ => SingularCase::Regular,
    }
}

fn unit_cross(a: &Vec3, b: &Vec3, tol: f64) -> Result<Vec3> {
    let c = cross(a, b);
    let n = norm(&c);
    if !(n > tol * norm(a) * norm(b)) {
        return Err(Error::CollinearObservations);
    }
    Ok(scale(&c, 1.0 / n))
}

/// Fails if either side of the pair is collinear.
pub fn check_collinearity(vm1: &VectorObservation, vm2: &VectorObservation, cfg: &EstimatorConfig) -> Result<()> {
    unit_cross(&vm1.r, &vm2.r, cfg.collinearity_threshold)?;
    unit_cross(&vm1.b, &vm2.b, cfg.collinearity_threshold)?;
    Ok(())
}

/// `(b₁ × b₂, r₁ × r₂)`, each normalized.
pub fn pseudo_measurement(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
) -> Result<VectorObservation> {
    Ok(VectorObservation {
        b: unit_cross(&vm1.b, &vm2.b, cfg.collinearity_threshold)?,
        r: unit_cross(&vm1.r, &vm2.r, cfg.collinearity_threshold)?,
    })
}

pub fn estimate_case_a() -> UnitQuaternion {
    UnitQuaternion::IDENTITY
}

// Rotation about the invariant observation `axis` by the angle that carries
// `other.r` to `other.b`, with `other` perpendicular to the axis.
//
// Half-angle magnitudes come from |d| = sin(α/2), |s| = cos(α/2). The sense of
// rotation is the sign of axisᵀ(d × s); at α = π both signs describe the same
// attitude.
fn about_invariant_axis(axis: &Vec3, other: &VectorObservation) -> Result<UnitQuaternion> {
    let SumDiffPair { s, d } = sum_diff(other);
    let sense = dot(axis, &cross(&d, &s));
    let k = if sense < 0.0 { -norm(&d) } else { norm(&d) };
    normalize(Quat4::new(scale(axis, k), norm(&s)))
}

fn invariant_axis_case(
    invariant: &VectorObservation,
    other: &VectorObservation,
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
) -> Result<UnitQuaternion> {
    check_collinearity(vm1, vm2, cfg)?;
    let axis = {
        let n = norm(&invariant.r);
        scale(&invariant.r, 1.0 / n)
    };
    let rn = norm(&other.r);
    if abs(dot(&axis, &other.r)) <= cfg.collinearity_threshold * rn {
        about_invariant_axis(&axis, other)
    } else {
        about_invariant_axis(&axis, &pseudo_measurement(vm1, vm2, cfg)?)
    }
}

/// Rotation about `r₁` (case B).
pub fn estimate_case_b(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
) -> Result<UnitQuaternion> {
    invariant_axis_case(vm1, vm2, vm1, vm2, cfg)
}

/// Rotation about `r₂` (case C).
pub fn estimate_case_c(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
) -> Result<UnitQuaternion> {
    invariant_axis_case(vm2, vm1, vm1, vm2, cfg)
}

/// Eigenaxis along the intersection of the two observation planes (case D).
///
/// Returns [`Error::UndefinedAxis`] when the planes coincide with opposite
/// normals (rotation by π about an axis in the plane).
pub fn estimate_case_d(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
) -> Result<UnitQuaternion> {
    let b3 = unit_cross(&vm1.b, &vm2.b, cfg.collinearity_threshold)?;
    let r3 = unit_cross(&vm1.r, &vm2.r, cfg.collinearity_threshold)?;
    let c = cross(&b3, &r3);
    let sin_a = norm(&c);
    let cos_a = dot(&b3, &r3);
    if sin_a < cfg.singularity_threshold {
        return if cos_a > 0.0 { Ok(UnitQuaternion::IDENTITY) } else { Err(Error::UndefinedAxis) };
    }
    let alpha = atan2(sin_a, cos_a);
    let u = scale(&c, 1.0 / sin_a);
    normalize(Quat4::new(scale(&u, sin(0.5 * alpha)), cos(0.5 * alpha)))
}

/// Estimates the attitude mapping each `rᵢ` to `bᵢ`.
///
/// Regular, well-conditioned inputs use `q̄/|q̄|` directly. Singular cases use
/// their closed-form geometry; case D at π and an ill-conditioned regular
/// input go through the sequential-rotation path.
pub fn estimate(vm1: &VectorObservation, vm2: &VectorObservation, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    let (vm1, vm2) = if cfg.renormalize { (vm1.renormalized()?, vm2.renormalized()?) } else { (*vm1, *vm2) };
    check_collinearity(&vm1, &vm2, cfg)?;
    let case = classify(&vm1, &vm2, cfg);
    let raw = estimate_raw(&vm1, &vm2);
    let rn = raw.norm();
    let direct = |quaternion: UnitQuaternion| EstimateResult {
        quaternion: cfg.apply_hemisphere(quaternion),
        case,
        rotated_frame: None,
        raw_norm: rn,
    };
    match case {
        SingularCase::Regular if rn >= cfg.singularity_threshold => Ok(direct(normalize(raw)?)),
        SingularCase::Regular => seq_rot::resolve(&vm1, &vm2, cfg),
        SingularCase::A_ZeroAttitude => Ok(direct(estimate_case_a())),
        SingularCase::B_AroundVM1 => Ok(direct(estimate_case_b(&vm1, &vm2, cfg)?)),
        SingularCase::C_AroundVM2 => Ok(direct(estimate_case_c(&vm1, &vm2, cfg)?)),
        SingularCase::D_ParallelDiffs => match estimate_case_d(&vm1, &vm2, cfg) {
            Ok(q) => Ok(direct(q)),
            Err(Error::UndefinedAxis) => seq_rot::resolve(&vm1, &vm2, cfg),
            Err(e) => Err(e),
        },
    }
}

/// Half-angle cosine identity `|s|² + |d|² = ½(|b|² + |r|²)`; exposed for diagnostics.
pub fn sum_diff_energy(p: &SumDiffPair) -> f64 {
    dot(&p.s, &p.s) + dot(&p.d, &p.d)
}

/// `|b₁ × b₂|/(|b₁||b₂|)` and the same for `r`, the sines of the observation angles.
pub fn observation_sines(vm1: &VectorObservation, vm2: &VectorObservation) -> (f64, f64) {
    let s = |a: &Vec3, b: &Vec3| norm(&cross(a, b)) / (norm(a) * norm(b));
    (s(&vm1.b, &vm2.b), s(&vm1.r, &vm2.r))
}

