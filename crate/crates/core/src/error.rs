use crate::pipedream::Tile;

/// Errors produced by the library.
///
/// Domain errors (bad input, violated preconditions) are distinguished from
/// [`Error::Internal`], which signals that an invariant the theory guarantees
/// was observed to fail.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("tile {0} is not a cross")]
    NotACross(Tile),

    #[error("tile {0} is not movable")]
    NotMovable(Tile),

    #[error("tile {0} is not ladder movable")]
    NotLadderMovable(Tile),

    #[error("no chute move lands on tile {0}")]
    NoChute(Tile),

    #[error("cell {0} is not in the diagram")]
    NotADiagramCell(Tile),

    #[error("pipe dreams belong to different permutations ({0} vs {1})")]
    PermutationMismatch(String, String),

    #[error("pipe dream is not reduced")]
    NotReduced,

    #[error("pipe dreams are equal; there is no disagreement")]
    NoDisagreement,

    #[error("tiles {0} and {1} are southwest-comparable")]
    SouthwestComparable(Tile, Tile),

    #[error("invalid tableau (pipe {pipe}, stage {stage}): {reason}")]
    InvalidTableau {
        pipe: usize,
        stage: usize,
        reason: String,
    },

    #[error("tableaux belong to different permutations")]
    TableauMismatch,

    #[error("budget exceeded: more than {limit} elements")]
    BudgetExceeded { limit: usize },

    #[error("grid size {0} is not supported (maximum is {max})", max = crate::pipedream::MAX_N)]
    GridTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
