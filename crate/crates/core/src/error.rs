use thiserror::Error;

/// Failures of the expression kernel.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared name `{0}`")]
    Undeclared(String),
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("no derivative rule for `{generator}` with respect to `{symbol}`")]
    MissingRule { generator: String, symbol: String },
    #[error("cannot differentiate with respect to `{0}`: not a plain symbol")]
    NotASymbol(String),
    #[error("unbound variable `{0}` during evaluation")]
    Unbound(String),
    #[error("`{0}` has no exact value at this point")]
    NoRoot(String),
    #[error("substitution changes the defining relation of `{0}`; bind it explicitly")]
    RelationChanged(String),
    #[error("substitution rebinds argument `{arg}` of unbound function atom `{func}`")]
    FunctionArgument { func: String, arg: String },
    #[error("invalid algebraic generator `{name}`: {msg}")]
    InvalidGenerator { name: String, msg: String },
    #[error("invalid declaration: {0}")]
    Declaration(String),
}

pub type ExprResult<T> = std::result::Result<T, ExprError>;

/// Failures of the geometric pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("point is outside the domain: {0}")]
    OutsideDomain(String),
    #[error("generator does not vanish at the point; component {0} is nonzero")]
    NotVanishing(usize),
    #[error("fiber action is not linear in the fiber coordinates: {0}")]
    NonLinearFiber(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("section is not invariant; defect {0}")]
    NotInvariant(String),
    #[error("extraction residual is nonzero: {0}")]
    Residual(String),
    #[error("symmetric power dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("degenerate metric: determinant normalizes to zero")]
    DegenerateMetric,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
