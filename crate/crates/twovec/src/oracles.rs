//! Reference attitude solvers used to cross-check the closed-form estimator.

use twovec_core::estimator::VectorObservation;
use twovec_core::linalg::{self, cross, norm, outer, scale, sym_eigen, Mat3, Mat4};
use twovec_core::quat::{normalize, Quat4, UnitQuaternion};

use crate::error::{HarnessError, Result};

/// Minimum separation between the two largest eigenvalues of `K`.
pub const SPECTRAL_GAP_TOL: f64 = 1e-10;

/// Davenport's `K` matrix for `b = A(q) r`, scalar-last.
pub fn davenport_k(observations: &[VectorObservation], weights: &[f64]) -> Mat4 {
    let mut bm: Mat3 = [[0.0; 3]; 3];
    let mut z = [0.0; 3];
    for (o, &w) in observations.iter().zip(weights) {
        bm = linalg::mat_add(&bm, &linalg::mat_scale(&outer(&o.b, &o.r), w));
        z = linalg::add(&z, &scale(&cross(&o.b, &o.r), w));
    }
    let sigma = linalg::trace(&bm);
    let mut k = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = bm[i][j] + bm[j][i] - if i == j { sigma } else { 0.0 };
        }
        k[i][3] = z[i];
        k[3][i] = z[i];
    }
    k[3][3] = sigma;
    k
}

/// Dominant eigenvector of the `K` matrix (Wahba-optimal attitude).
pub fn davenport_oracle(observations: &[VectorObservation], weights: &[f64]) -> Result<UnitQuaternion> {
    if observations.len() < 2 || observations.len() != weights.len() {
        return Err(HarnessError::Config("q-method needs at least two weighted observations".into()));
    }
    let k = davenport_k(observations, weights);
    // eigenvalues come back in descending order
    let (vals, vecs) = sym_eigen(&k);
    if vals[0] - vals[1] <= SPECTRAL_GAP_TOL {
        return Err(HarnessError::DegenerateSpectrum);
    }
    let v = Quat4::from_array(core::array::from_fn(|i| vecs[i][0]));
    Ok(normalize(v)?.canonical())
}

fn triad_frame(v1: &linalg::Vec3, v2: &linalg::Vec3) -> Option<Mat3> {
    let c = cross(v1, v2);
    let n = norm(&c);
    if n < 1e-12 {
        return None;
    }
    let t1 = scale(v1, 1.0 / norm(v1));
    let t2 = scale(&c, 1.0 / n);
    let t3 = cross(&t1, &t2);
    // columns t1, t2, t3
    Some(core::array::from_fn(|i| [t1[i], t2[i], t3[i]]))
}

/// Quaternion of a rotation matrix `A` with `b = A r`, using the largest-pivot branch.
pub fn dcm_to_quaternion(a: &Mat3) -> Result<UnitQuaternion> {
    let tr = a[0][0] + a[1][1] + a[2][2];
    let pivots = [a[0][0], a[1][1], a[2][2], tr];
    let k = (0..4).max_by(|&x, &y| pivots[x].total_cmp(&pivots[y])).unwrap_or(3);
    let q = match k {
        3 => {
            let w = 0.5 * (1.0 + tr).sqrt();
            let f = 0.25 / w;
            [(a[1][2] - a[2][1]) * f, (a[2][0] - a[0][2]) * f, (a[0][1] - a[1][0]) * f, w]
        }
        0 => {
            let e1 = 0.5 * (1.0 + 2.0 * a[0][0] - tr).sqrt();
            let f = 0.25 / e1;
            [e1, (a[0][1] + a[1][0]) * f, (a[0][2] + a[2][0]) * f, (a[1][2] - a[2][1]) * f]
        }
        1 => {
            let e2 = 0.5 * (1.0 + 2.0 * a[1][1] - tr).sqrt();
            let f = 0.25 / e2;
            [(a[0][1] + a[1][0]) * f, e2, (a[1][2] + a[2][1]) * f, (a[2][0] - a[0][2]) * f]
        }
        _ => {
            let e3 = 0.5 * (1.0 + 2.0 * a[2][2] - tr).sqrt();
            let f = 0.25 / e3;
            [(a[0][2] + a[2][0]) * f, (a[1][2] + a[2][1]) * f, e3, (a[0][1] - a[1][0]) * f]
        }
    };
    Ok(normalize(Quat4::from_array(q))?.canonical())
}

/// TRIAD: the first observation is matched exactly, the second only fixes the remaining roll.
pub fn triad_oracle(vm1: &VectorObservation, vm2: &VectorObservation) -> Result<UnitQuaternion> {
    let collinear = || HarnessError::Core(twovec_core::Error::CollinearObservations);
    let mb = triad_frame(&vm1.b, &vm2.b).ok_or_else(collinear)?;
    let mr = triad_frame(&vm1.r, &vm2.r).ok_or_else(collinear)?;
    let a = linalg::mat_mul(&mb, &linalg::transpose(&mr));
    dcm_to_quaternion(&a)
}
