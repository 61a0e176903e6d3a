//! Sequential rotations: move a singular problem away from its singularity by
//! re-expressing the reference frame through a half turn about a coordinate
//! axis, estimate there, and map the result back.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    classify, estimate_raw, sum_diff, EstimateResult, EstimatorConfig, SingularCase, VectorObservation,
};
use crate::linalg::{add, parallel, Mat4, Vec3};
use crate::quat::{compose, normalize, Quat4, UnitQuaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub const fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn unit(self) -> Vec3 {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }

    /// `[axis; 0]`, the half turn about this axis.
    pub fn half_turn(self) -> UnitQuaternion {
        UnitQuaternion::new(Quat4::new(self.unit(), 0.0)).expect("coordinate axis is unit")
    }
}

/// Ordered axis candidates and the one that was finally used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationPlan<'a> {
    pub candidates: &'a [Axis],
    pub chosen: Option<Axis>,
}

impl Default for RotationPlan<'static> {
    fn default() -> Self {
        RotationPlan { candidates: &Axis::ALL, chosen: None }
    }
}

impl<'a> RotationPlan<'a> {
    pub fn new(candidates: &'a [Axis]) -> Self {
        RotationPlan { candidates, chosen: None }
    }
}

/// Negates the two reference components orthogonal to `axis`. Body vectors are untouched.
pub fn rotate_reference(r: &Vec3, axis: Axis) -> Vec3 {
    let k = axis.index();
    core::array::from_fn(|i| if i == k { r[i] } else { -r[i] })
}

pub fn rotate_observations(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    axis: Axis,
) -> (VectorObservation, VectorObservation) {
    let f = |o: &VectorObservation| VectorObservation { b: o.b, r: rotate_reference(&o.r, axis) };
    (f(vm1), f(vm2))
}

/// Signed permutation `M` with `M·q^C = [axis; 0] ⊗ q^C`, derived from [`compose`].
pub fn remap_matrix(axis: Axis) -> Mat4 {
    let a = Quat4::new(axis.unit(), 0.0);
    let mut m = [[0.0; 4]; 4];
    for j in 0..4 {
        let mut basis = [0.0; 4];
        basis[j] = 1.0;
        let col = compose(a, Quat4::from_array(basis)).to_array();
        for i in 0..4 {
            m[i][j] = col[i];
        }
    }
    m
}

/// Maps an attitude estimated against the rotated reference frame back to the original one.
pub fn unmap_quaternion(q_c: UnitQuaternion, axis: Axis) -> UnitQuaternion {
    axis.half_turn().compose(q_c)
}

// Difference vectors of the rotated problem: d + (component of r orthogonal to the axis).
fn rotated_diffs(vm1: &VectorObservation, vm2: &VectorObservation, axis: Axis) -> (Vec3, Vec3) {
    let perp = |r: &Vec3| {
        let mut p = *r;
        p[axis.index()] = 0.0;
        p
    };
    (add(&sum_diff(vm1).d, &perp(&vm1.r)), add(&sum_diff(vm2).d, &perp(&vm2.r)))
}

/// False when the half turn about `axis` would leave the problem singular.
///
/// Every case shares one test: the rotated differences must not be parallel
/// (a vanishing one counts as parallel). Cases A, B and C additionally reject an
/// axis along an invariant body vector, and A rejects parallel off-axis
/// reference projections; these are implied by the shared test but kept
/// explicit.
pub fn validate_axis(
    case: SingularCase,
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    axis: Axis,
    cfg: &EstimatorConfig,
) -> bool {
    let tol = cfg.singularity_threshold;
    let u = axis.unit();
    let along = |v: &Vec3| parallel(v, &u, tol);
    let (dc1, dc2) = rotated_diffs(vm1, vm2, axis);
    let invalid = match case {
        SingularCase::A_ZeroAttitude => {
            let mut p1 = vm1.r;
            let mut p2 = vm2.r;
            p1[axis.index()] = 0.0;
            p2[axis.index()] = 0.0;
            along(&vm1.b) || along(&vm2.b) || parallel(&p1, &p2, tol)
        }
        SingularCase::B_AroundVM1 => along(&vm1.b),
        SingularCase::C_AroundVM2 => along(&vm2.b),
        SingularCase::D_ParallelDiffs | SingularCase::Regular => false,
    };
    !(invalid || parallel(&dc1, &dc2, tol))
}

fn try_axis(
    case: SingularCase,
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    axis: Axis,
    cfg: &EstimatorConfig,
) -> Option<EstimateResult> {
    if !validate_axis(case, vm1, vm2, axis, cfg) {
        return None;
    }
    let (c1, c2) = rotate_observations(vm1, vm2, axis);
    if classify(&c1, &c2, cfg) != SingularCase::Regular {
        return None;
    }
    let raw = estimate_raw(&c1, &c2);
    let rn = raw.norm();
    if rn < cfg.singularity_threshold {
        return None;
    }
    let q_c = normalize(raw).ok()?;
    Some(EstimateResult {
        quaternion: cfg.apply_hemisphere(unmap_quaternion(q_c, axis)),
        case,
        rotated_frame: Some(axis),
        raw_norm: rn,
    })
}

/// Tries the plan's axes in order and returns the first well-conditioned detour.
pub fn resolve_with_plan(
    vm1: &VectorObservation,
    vm2: &VectorObservation,
    cfg: &EstimatorConfig,
    plan: &mut RotationPlan<'_>,
) -> Result<EstimateResult> {
    let case = classify(vm1, vm2, cfg);
    for &axis in plan.candidates {
        if let Some(res) = try_axis(case, vm1, vm2, axis, cfg) {
            plan.chosen = Some(axis);
            return Ok(res);
        }
    }
    Err(Error::EstimationFailed)
}

/// [`resolve_with_plan`] with the order X, Y, Z.
pub fn resolve(vm1: &VectorObservation, vm2: &VectorObservation, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    resolve_with_plan(vm1, vm2, cfg, &mut RotationPlan::default())
}
