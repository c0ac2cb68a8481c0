//! Error type shared by all modules of the crate.

use core::fmt;

/// Errors raised on domain violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// Mass must be strictly positive.
    NonPositiveMass,
    /// Observation horizon must be at least one tick.
    ZeroHorizon,
    /// Frame velocity must satisfy |beta| < 1.
    InvalidBeta,
    /// Momentum propensity must lie in [-1, 1].
    InvalidMomentum,
    /// Energy propensity must lie in [0, 1].
    InvalidEnergy,
    /// Elapsed time must be strictly positive.
    ZeroTau,
    /// Site outside the light cone: |xi| must not exceed tau.
    OutsideLightCone,
    /// The light-like case b = 0 has no Gaussian limit.
    DegenerateLightLike,
    /// Variance of the site energy law needs tau >= 2.
    TauTooSmallForVariance,
    /// Density vector entries must be nonnegative.
    NegativeDensity,
    /// Probabilities must sum to one within tolerance.
    NotNormalized,
    /// A source set needs at least one source.
    EmptySources,
    /// Source positions must be distinct.
    DuplicateSource,
    /// Source probabilities and positions must have equal length.
    SourceLengthMismatch,
    /// Two-slit separation must be even so the sources sit on lattice sites.
    OddSlitSeparation,
    /// A ring needs circumference >= 2.
    RingTooSmall,
    /// Exhaustive enumeration refused: the path space is too large.
    EnumerationTooLarge,
    /// Denominator of the matter-wave frequency vanished.
    FrequencySingularity,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Error::NonPositiveMass => "mass must be strictly positive",
            Error::ZeroHorizon => "observation horizon must be at least 1",
            Error::InvalidBeta => "frame velocity must satisfy |beta| < 1",
            Error::InvalidMomentum => "momentum propensity must lie in [-1, 1]",
            Error::InvalidEnergy => "energy propensity must lie in [0, 1]",
            Error::ZeroTau => "elapsed time must be strictly positive",
            Error::OutsideLightCone => "|xi| must not exceed tau",
            Error::DegenerateLightLike => "light-like walk (b = 0) has no Gaussian limit",
            Error::TauTooSmallForVariance => "site energy variance requires tau >= 2",
            Error::NegativeDensity => "density entries must be nonnegative",
            Error::NotNormalized => "probabilities must sum to one",
            Error::EmptySources => "source set is empty",
            Error::DuplicateSource => "source positions must be distinct",
            Error::SourceLengthMismatch => "positions and probabilities differ in length",
            Error::OddSlitSeparation => "slit separation must be even",
            Error::RingTooSmall => "ring circumference must be at least 2",
            Error::EnumerationTooLarge => "path space too large for exhaustive enumeration",
            Error::FrequencySingularity => "matter-wave frequency denominator vanished",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
