use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // p-adic arithmetic
    #[error("inversion of an element that is zero at working precision")]
    InversionOfZero,
    #[error("no significant digits remain ({0})")]
    PrecisionExhausted(String),
    #[error("element is not a square in Q_p^2: {0}")]
    NotASquare(String),
    #[error("Hilbert symbol needs nonzero arguments")]
    ZeroArgument,
    #[error("invalid p-adic context: {0}")]
    InvalidContext(String),

    // quaternions
    #[error("no auxiliary prime p0 <= {0} satisfies the Hashimoto conditions")]
    NotFoundWithinBound(u64),
    #[error("Gram matrix of the eta basis is not the standard symplectic matrix: {0}")]
    GramNotSymplectic(String),
    #[error("no parameter a in the search range gives a symplectic eta basis")]
    NoValidParameter,

    // nearly rigid functions
    #[error("function has a log term and no log branch was supplied")]
    MissingLogBranch,
    #[error("point lies on the boundary P^1(Q_p)")]
    PointOnBoundary,
    #[error("function is not nearly rigid: positive power of (z - z*) survives")]
    NotNearlyRigid,
    #[error("function contains the formal logarithm L")]
    HasLogTerm,

    // Shimura-Maass
    #[error("sample point is degenerate for the given matrix: {0}")]
    SamplePointDegenerate(String),
    #[error("vanishing Pochhammer factor at weight {weight}, depth {depth}")]
    ZeroPochhammer { weight: i64, depth: usize },
    #[error("residual is not in the graded span")]
    NotInGradedSpan,

    // de Rham
    #[error("symmetric-power degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("operation needs a non-negative symmetric-power section: {0}")]
    NegativeWeight(String),
    #[error("not a basis monomial: {0}")]
    InvalidMonomial(String),
    #[error("operation mixes different t_p exponents: {0} vs {1}")]
    TpMismatch(i64, i64),

    // Coleman
    #[error("symmetric-power degree must be even, got {0}")]
    OddDegree(i64),
    #[error("u-terms survive the final primitive equation: {0}")]
    CancellationFailure(String),
    #[error("index {j} outside the admissible range for n = {n}")]
    IndexOutOfRange { j: i64, n: i64 },
    #[error("identity failed: {0}")]
    IdentityFailure(String),

    // tree and cocycles
    #[error("vertices are not adjacent: {0}")]
    NotAdjacent(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("cochain is not invariant under the group: {0}")]
    NotInvariant(String),
    #[error("cochain is not a coboundary on the supplied data: {0}")]
    NotACocycle(String),
    #[error("edge {0} missing from the supplied cochain")]
    MissingEdge(String),

    // CM points
    #[error("matrix does not define a quadratic embedding: {0}")]
    NotAnEmbedding(String),
    #[error("fixed points lie in Q_p (split case)")]
    RootInQp,

    // I/O
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error("malformed input at {path}: {msg}")]
    Parse { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
