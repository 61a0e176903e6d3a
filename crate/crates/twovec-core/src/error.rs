use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Error {
    /// A quaternion or vector with (numerically) zero norm was normalized.
    NormUnderflow,
    /// A value required to be unit norm was not.
    NotUnit,
    /// |s| or |d| too small for the kernel basis to exist.
    DegenerateBasis,
    /// The two observations (body or reference side) are parallel.
    CollinearObservations,
    /// The eigenaxis is undefined (rotation by pi with vanishing cross product).
    UndefinedAxis,
    /// No frame rotation produced a well-conditioned problem.
    EstimationFailed,
    /// The perturbed unnormalized estimate vanished, so the norm ratio is undefined.
    DegenerateRatio,
    /// A covariance matrix is asymmetric, indefinite or non-finite.
    InvalidNoiseModel,
    /// The noise-free geometry is singular; the error analysis does not apply.
    SingularTrueGeometry,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Error::NormUnderflow => "norm underflow",
            Error::NotUnit => "input is not unit norm",
            Error::DegenerateBasis => "degenerate kernel basis",
            Error::CollinearObservations => "observations are collinear",
            Error::UndefinedAxis => "rotation axis is undefined",
            Error::EstimationFailed => "no valid frame rotation found",
            Error::DegenerateRatio => "perturbed estimate vanished",
            Error::InvalidNoiseModel => "invalid noise model",
            Error::SingularTrueGeometry => "true geometry is singular",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
