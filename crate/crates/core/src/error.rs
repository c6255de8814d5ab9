use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported order {0}: supported orders are 2, 3, 4, 5, 7, 8, 9")]
    UnsupportedOrder(u32),

    #[error("division by zero in GF({0})")]
    DivisionByZero(u8),

    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u8, right: u8 },

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("ambient dimension {n} too large for GF({q}) (max {max})")]
    AmbientTooLarge { n: usize, q: u8, max: usize },

    #[error("{what}: predicted count {} exceeds cap {cap}", short_count(.predicted))]
    CapExceeded {
        what: String,
        predicted: BigUint,
        cap: u64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("outside regime: {0}")]
    OutsideRegime(String),

    #[error("the zero vector does not span a line")]
    ZeroVector,

    #[error("family is empty in dimension {0}")]
    EmptySlice(usize),

    #[error("family has diameter {found} > {bound}")]
    DiameterViolation { found: usize, bound: usize },

    #[error("graph is not regular: {0}")]
    NotRegular(String),

    #[error("no perfect matching: {matched} of {size} vertices matched")]
    NoPerfectMatching { matched: usize, size: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Counts with more than 30 digits are abbreviated to their leading digits
/// and length.
fn short_count(x: &BigUint) -> String {
    let s = x.to_string();
    if s.len() <= 30 {
        s
    } else {
        format!("{}.{}e{}", &s[..1], &s[1..4], s.len() - 1)
    }
}
