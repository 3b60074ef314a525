use thiserror::Error;

/// Errors raised by the library. Mathematical findings (an obstruction,
/// a nonzero residual) are values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },

    #[error("degree {degree} exceeds validity order {order}")]
    OrderExceeded { degree: u32, order: u32 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("index total {got} does not match required total {want}")]
    BadIndexTotal { got: i64, want: i64 },

    #[error("premise violated: {table}[{t},{s},{r},{h}] is nonzero")]
    PremiseViolated {
        table: &'static str,
        t: i64,
        s: i64,
        r: i64,
        h: i64,
    },

    #[error("bad size for {kind}: mhat = {mhat}")]
    BadSize { kind: String, mhat: usize },

    #[error("xi must be nonzero")]
    ZeroXi,

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("invalid manifold: {0}")]
    Invalid(String),

    #[error("singular normalization system at degree {0}")]
    SingularSystem(u32),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
