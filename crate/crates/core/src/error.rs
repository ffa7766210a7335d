use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("critical point {0} outside (0, 1/2)")]
    InvalidCriticalPoint(f64),

    #[error("argument {x} outside the unit interval")]
    Domain { x: f64 },

    #[error("preimage {value} of {y} falls outside [0, 1]")]
    PreimageOutOfInterval { y: f64, value: f64 },

    #[error("scaling factor leaves the open simplex at depth {0}")]
    InvalidFactor(usize),

    #[error("denominator s_2 = {0:e} below guard")]
    DegenerateScaling(f64),

    #[error("no fixed point found: {0}")]
    NoRoot(String),

    #[error("{count} fixed points found where one was expected: {roots:?}")]
    MultipleRoots { count: usize, roots: Vec<f64> },

    #[error("empty feasible domain")]
    EmptyDomain,

    #[error("point {0} is outside the resolved domain")]
    OutsideDomain(f64),

    #[error("renormalization needs depth >= 2, got {0}")]
    DepthExhausted(usize),

    #[error("branch undefined at level {level} for depth {depth}")]
    BranchUndefined { level: usize, depth: usize },

    #[error("gap filler on [{lo}, {hi}] is not monotone or leaves [0, 1]")]
    FillerOvershoot { lo: f64, hi: f64 },

    #[error("estimates do not converge: {0:?}")]
    NonConvergent(Vec<f64>),

    #[error("branch {branch} has derivative {derivative} at its fixed point, need > 2")]
    ExpansionTooWeak { branch: usize, derivative: f64 },

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("monotonicity violated: {0}")]
    NotMonotone(String),
}

pub type Result<T> = std::result::Result<T, Error>;
