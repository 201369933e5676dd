use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what}: value {value:#x} does not fit in {bits} bits")]
    WidthMismatch {
        what: &'static str,
        value: u64,
        bits: u32,
    },

    #[error("s-box table of length {len} is not a permutation")]
    SboxNotBijective { len: usize },

    #[error("invalid round configuration: {0}")]
    InvalidRounds(String),

    #[error("domain of 2^{bits} points exceeds the enumeration limit of 2^{limit}; use the Walsh transform or sampling")]
    DomainTooLarge { bits: u32, limit: u32 },

    #[error("a zero mask is not a linear approximation")]
    ZeroMask,

    #[error("exact verification needs the toy cipher (full codebook 2^16), got a {0}-bit block")]
    ExactVerificationInfeasible(u32),

    #[error("invalid statistical parameter: {0}")]
    InvalidParameter(String),

    #[error("stage layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("missing key fragment `{0}`")]
    MissingFragment(String),

    #[error("duplicate plaintext {0:#x} in known-plaintext set")]
    DuplicatePair(u64),

    #[error("request refused: {reason} (estimated cost 2^{log2_cost:.1})")]
    Infeasible { reason: String, log2_cost: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
