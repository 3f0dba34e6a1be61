use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by model construction, validation and counting.
#[derive(Debug, Error)]
pub enum Error {
    /// A simplex with no outcomes (Λ = 0) or no lattice resolution (L = 0).
    #[error("degenerate simplex: lambda_count={lambda_count}, denominator={denominator} (both must be >= 1)")]
    DegenerateSimplex { lambda_count: usize, denominator: u64 },

    /// Lattice numerators do not sum to the denominator.
    #[error("lattice numerators sum to {sum}, expected denominator {denominator}")]
    UnnormalizedLattice { sum: u64, denominator: u64 },

    /// Rank outside [0, V).
    #[error("rank {rank} out of range: V(lambda_count={lambda_count}, L={denominator}) = {total}")]
    RankOutOfRange {
        lambda_count: usize,
        denominator: u64,
        rank: BigUint,
        total: BigUint,
    },

    /// A conditional distribution whose entries do not sum to one.
    #[error("distribution does not sum to 1: {context}")]
    UnnormalizedDistribution { context: String },

    /// Negative probability entry.
    #[error("negative probability in {context}")]
    NegativeProbability { context: String },

    /// Context construction with inconsistent wing sizes or out-of-range choices.
    #[error("invalid context: {0}")]
    InvalidContext(String),

    /// A context whose wing size does not match the model.
    #[error("context has N={context_n}, model has N={model_n}")]
    ContextDimensionMismatch { context_n: u32, model_n: u32 },

    /// Hidden-variable table and kernel disagree on the number of λ values.
    #[error("lambda count mismatch: kernel has {kernel}, table has {table}")]
    LambdaMismatch { kernel: usize, table: usize },

    /// Table denominators differ within one model.
    #[error("table denominator mismatch: expected {expected}, found {found}")]
    DenominatorMismatch { expected: u64, found: u64 },

    /// Enumeration refused: the requested configuration space exceeds the budget.
    #[error("budget exceeded: enumerating {required} configurations, budget is {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },

    /// Scenario too large for native context indexing.
    #[error("scenario N={n} too large to enumerate contexts")]
    ScenarioTooLarge { n: u32 },

    /// Sub-ensembles are undefined because constraint (m) fails:
    /// λ is correlated with more than the mechanism actually used.
    #[error("sub-ensembles undefined: model violates constraint (m)")]
    SubEnsemblesUndefined,

    /// A mechanism-dependence demonstration was requested for a model whose
    /// statistics already depend only on the settings.
    #[error("no dependence to demonstrate: model satisfies condition (ii)")]
    NoDependenceToDemonstrate,

    /// Model file failed structural validation.
    #[error("model validation: {0}")]
    ModelValidation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
