use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population index {0} is outside 1..=8")]
    PopulationIndex(usize),
    #[error("population table is empty (total count is zero)")]
    EmptyTable,
    #[error("population counts overflow a 64-bit total")]
    CountOverflow,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("axis {label} has norm {norm}, expected a unit vector")]
    NonUnitAxis { label: char, norm: f64 },
    #[error("axis triple must carry the labels a, b, c in that order")]
    AxisLabels,
    #[error("angle {0} rad is outside the open interval (0, pi)")]
    AngleRange(f64),
    #[error("cannot draw {requested} pairs from a bag holding {available}")]
    Overdraw { requested: u64, available: u64 },
    #[error("reservoir composition has no positive weight")]
    ZeroWeight,
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("an infinite reservoir cannot be drained")]
    InfiniteDrain,
    #[error("draw list is empty")]
    EmptyDraws,
    #[error("multiplicity must be positive and finite, got {0}")]
    NonPositiveMultiplicity(f64),
    #[error("probability distribution sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("dice total {0} is outside 2..=12")]
    DiceTotal(u32),
    #[error("axis-choice policy lists no axis pairs")]
    EmptyPolicy,
    #[error("total multiplicity is zero")]
    ZeroTotal,
    #[error("search budget must be at least 1")]
    ZeroBudget,
}
