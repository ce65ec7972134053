use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("linear component has an empty constant set")]
    EmptyConstants,

    #[error("negative entry {0} where a natural number is required")]
    NegativeEntry(String),

    #[error("matrix is not rectangular")]
    RaggedMatrix,

    #[error("matrix has no rows or no columns")]
    EmptyMatrix,

    #[error("homomorphism matrix must be non-negative, found {0}")]
    NegativeMatrixEntry(String),

    #[error("operation needs at least one operand")]
    NoOperands,

    #[error("period set is not linearly independent")]
    DependentPeriods,

    #[error("unknown operation kind `{0}`")]
    UnknownKind(String),

    #[error("malformed input: {0}")]
    Schema(String),

    #[error("resource limit exceeded in {stage}: {metric} = {value} > {limit}")]
    ResourceLimit {
        stage: &'static str,
        metric: &'static str,
        value: String,
        limit: String,
    },
}

impl Error {
    /// Stable short tag used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ZeroDimension => "zero_dimension",
            Error::EmptyConstants => "empty_constants",
            Error::NegativeEntry(_) => "negative_entry",
            Error::RaggedMatrix => "ragged_matrix",
            Error::EmptyMatrix => "empty_matrix",
            Error::NegativeMatrixEntry(_) => "negative_matrix_entry",
            Error::NoOperands => "no_operands",
            Error::DependentPeriods => "dependent_periods",
            Error::UnknownKind(_) => "unknown_kind",
            Error::Schema(_) => "schema",
            Error::ResourceLimit { .. } => "resource_limit",
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
