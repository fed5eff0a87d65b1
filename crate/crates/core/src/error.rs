use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs of inconsistent shape or out-of-range parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A community with a single member has no within-block pairs.
    #[error("community {community} has {size} member(s); at least 2 are needed to estimate its diagonal entry")]
    DegenerateCommunity { community: usize, size: usize },

    #[error("k-means could not produce {k} nonempty clusters after {restarts} restarts")]
    ClusteringFailure { k: usize, restarts: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver failed on a {n}x{n} matrix: {detail}")]
    Eigensolver { n: usize, detail: String },

    #[error("bootstrap replicates are degenerate: {0}")]
    DegenerateBootstrap(String),

    #[error("row separation is undefined for a single community")]
    UndefinedSeparation,

    #[error("malformed Tracy-Widom table at line {line}: {reason}")]
    Table { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver { .. } | Error::DegenerateBootstrap(_) | Error::ClusteringFailure { .. }
        )
    }
}
