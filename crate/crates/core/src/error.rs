use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("symbol {symbol} outside alphabet 1..={d}")]
    SymbolOutOfRange { symbol: u32, d: usize },

    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),

    #[error("cannot drop a symbol from the empty word")]
    EmptyWord,

    #[error("dual point period must be nonempty")]
    EmptyPeriod,

    #[error("infinite coincidence: both points are equal, a depth bound is required")]
    InfiniteCoincidence,

    #[error("word of length {len} cannot be regrouped in blocks of {block}")]
    RegroupLength { len: usize, block: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finding failed in branch {branch} for target {target}: {reason}")]
    RootFinding { branch: u32, target: f64, reason: String },

    #[error("point {x} lies in the gap ({left}, {right}) between branch domains")]
    InGap { x: f64, left: f64, right: f64 },

    #[error("point {x} lies outside the unit interval")]
    OutsideUnitInterval { x: f64 },

    #[error("derivative order {order} exceeds smoothness {max} of branch {branch}")]
    DerivativeOrder { branch: u32, order: usize, max: usize },

    #[error("expansivity violated: minimal forward derivative {min_derivative} of branch {branch}")]
    NotExpanding { branch: u32, min_derivative: f64 },

    #[error("ratio vector off the simplex: {0}")]
    Simplex(String),

    #[error("coincident interpolation nodes at {0}")]
    CoincidentNodes(f64),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("mismatched correspondence: {0}")]
    Mismatch(String),

    #[error("depth {requested} exceeds available depth {available}")]
    DepthExceeded { requested: usize, available: usize },
}
