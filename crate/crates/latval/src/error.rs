use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("empty input: at least one point is required")]
    EmptyInput,
    #[error("ambient dimension {got} exceeds the supported maximum {max}")]
    AmbientDimTooLarge { got: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} exceed the supported maximum of {max}")]
    TooLarge { what: &'static str, max: usize },
    #[error("coordinate overflow while normalizing to machine integers")]
    Overflow,
    #[error("empty face has no lattice data")]
    EmptyFace,
    #[error("projection landed on a face boundary; resample")]
    DegenerateProjection,
    #[error("dilation factor must be non-negative")]
    NegativeDilate,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} nodes for a degree-{degree} fit, got {got}")]
    NotEnoughNodes {
        degree: usize,
        needed: usize,
        got: usize,
    },
    #[error("duplicate evaluation node {0}")]
    DuplicateNode(i64),
    #[error("values are inconsistent with a degree-{degree} polynomial at node {node}")]
    InconsistentValues { degree: usize, node: i64 },
    #[error("weighted normal equations are ill-conditioned")]
    IllConditioned,
    #[error("statistical fit requires strictly positive standard errors")]
    NonPositiveStderr,
}
