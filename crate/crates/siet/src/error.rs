use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A composition did not sum to the block length.
    #[error("CountMismatch: counts sum to {got}, block length is {expected}")]
    CountMismatch { expected: u64, got: u64 },

    /// A probability vector failed validation.
    #[error("NotAPmf: {0}")]
    NotAPmf(String),

    /// A decoding radius exceeded the diameter of its layer circle, so the
    /// packing angle is undefined.
    #[error("RadiusTooLarge: radius {radius} exceeds layer diameter {diameter}")]
    RadiusTooLarge { radius: f64, diameter: f64 },

    /// The composition class is too large to enumerate.
    #[error(
        "TooManyCodewords: class holds exp({log_count:.3}) ~ codewords, enumeration cap is {cap}"
    )]
    TooManyCodewords { log_count: f64, cap: u64 },

    /// More codewords were requested than the composition class contains.
    #[error("Exhausted: requested {requested} codewords, class holds {available}")]
    Exhausted { requested: u64, available: u64 },

    /// No realizable layer-probability vector exists for the block length.
    #[error("Infeasible: {0}")]
    Infeasible(String),

    /// Pairwise-distance bounds need at least two symbols.
    #[error("DegenerateConstellation: at least two channel input symbols required")]
    DegenerateConstellation,

    /// Message-count dependent bounds need at least two messages.
    #[error("TooFewMessages: message count must be at least 2, got {0}")]
    TooFewMessages(u64),

    /// The entropy-form rate bound is undefined when a symbol is never used.
    #[error("ZeroTypeEntry: type entry for symbol ({layer}:{index}) is zero")]
    ZeroTypeEntry { layer: usize, index: usize },

    /// Target decoding-error probability outside the open unit interval.
    #[error("InvalidEpsilon: epsilon must lie strictly inside (0,1), got {0}")]
    InvalidEpsilon(f64),

    /// A derived geometry (amplitudes, radii) is not constructible.
    #[error("InfeasibleGeometry: {0}")]
    InfeasibleGeometry(String),
}
