use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in a computation.
///
/// Variants split into input problems (bad curve, bad configuration) and
/// internal consistency failures; see [`Error::is_consistency_failure`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not supported (must be odd)")]
    BadCharacteristic(u32),
    #[error("curve is not smooth: {0}")]
    NotSmooth(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("residue expansion ran out of precision after {0} terms")]
    PrecisionExhausted(usize),
    #[error("cohomology window did not stabilize: {0}")]
    WindowNotStabilized(String),
    #[error("fixed space not saturated: found F_p-dimension {found}, expected {expected}")]
    FixedSpaceNotSaturated { found: usize, expected: usize },
    #[error("no Frobenius-fixed class: {0}")]
    NoFixedClass(String),
    #[error("class is not Frobenius-fixed")]
    ClassNotFixed,
    #[error("cocycle has no Frobenius gauge")]
    GaugeMissing,
    #[error("gauge could not be solved: {0}")]
    GaugeUnsolvable(String),
    #[error("invalid gauge: {0}")]
    GaugeInvalid(String),
    #[error("transition matrix is not invertible over the overlap")]
    NotInvertible,
    #[error("Cartier output violates gluing: {0}")]
    GluingViolated(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors that signal a bug or a broken invariant rather than
    /// bad user input.
    pub fn is_consistency_failure(&self) -> bool {
        matches!(
            self,
            Error::GluingViolated(_)
                | Error::Consistency(_)
                | Error::WindowNotStabilized(_)
                | Error::GaugeUnsolvable(_)
                | Error::PrecisionExhausted(_)
                | Error::FixedSpaceNotSaturated { .. }
        )
    }

    /// Variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BadCharacteristic(_) => "BadCharacteristic",
            Error::NotSmooth(_) => "NotSmooth",
            Error::Config(_) => "Config",
            Error::InvalidInput(_) => "InvalidInput",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::WindowNotStabilized(_) => "WindowNotStabilized",
            Error::FixedSpaceNotSaturated { .. } => "FixedSpaceNotSaturated",
            Error::NoFixedClass(_) => "NoFixedClass",
            Error::ClassNotFixed => "ClassNotFixed",
            Error::GaugeMissing => "GaugeMissing",
            Error::GaugeUnsolvable(_) => "GaugeUnsolvable",
            Error::GaugeInvalid(_) => "GaugeInvalid",
            Error::NotInvertible => "NotInvertible",
            Error::GluingViolated(_) => "GluingViolated",
            Error::Consistency(_) => "Consistency",
        }
    }
}
