use thiserror::Error;

use crate::necklace::{Bidegree, Necklace};

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {what} {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("matrix size n = {0} is not supported (expected 2, 3 or 4)")]
    UnsupportedSize(usize),

    #[error("operands disagree: {0}")]
    Mismatch(String),

    #[error("necklace {0} is not CH_{1}")]
    NotCayleyHamilton(Necklace, usize),

    #[error("no expression known for necklace {0}; the table frontier is at degree {1}")]
    Unreachable(Necklace, usize),

    #[error("bidegree {bidegree} stayed rank deficient: rank {rank} of {unknowns} unknowns")]
    RankDeficient {
        bidegree: Bidegree,
        rank: usize,
        unknowns: usize,
    },

    #[error("swap image of generator a{0} is not a combination of generators")]
    SwapCoverage(usize),

    #[error("sampler gave up after {0} attempts")]
    SamplingExhausted(usize),

    #[error("{path}:{line}: {reason}")]
    Format {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
