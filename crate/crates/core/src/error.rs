use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be a positive integer")]
    InvalidModulus,

    #[error("value {value} is outside the residue range [0, {}]", .n - 1)]
    InvalidValue { value: i64, n: usize },

    #[error("{m} is not coprime to {n}")]
    NotAUnit { m: i64, n: usize },

    #[error("modulus {0} has no nontrivial units")]
    DegenerateModulus(usize),

    #[error("no subsequence has sum {residue} (mod {n}) and length {len}")]
    NotAchievable {
        n: usize,
        residue: usize,
        len: usize,
    },

    #[error("brute-force oracle is limited to {max} elements, got {len}")]
    OracleTooLarge { len: usize, max: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// No unit rescaling brings a long zero-sum-free sequence below `n`.
    /// This would contradict the structure theorem for long zero-sum-free
    /// sequences, so callers record it as a finding.
    #[error("no unit m brings {seq} (mod {n}) to positive residues with total < n")]
    TheoremDFailure { n: usize, seq: String },

    /// A search that cannot fail if the underlying lemma holds came back empty.
    #[error("internal error: {0}")]
    Internal(String),
}
