use crate::expr::ExprError;

/// Errors raised by the geometric and numerical operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point (x={x}, y={y}) lies outside the chart")]
    ChartDomain { x: f64, y: f64 },
    #[error("chart is singular at (x={x}, y={y})")]
    SingularChart { x: f64, y: f64 },
    #[error("t = {t} lies outside the warp domain ({lo}, {hi})")]
    WarpDomain { t: f64, lo: f64, hi: f64 },
    #[error("warp expression: {0}")]
    Expr(#[from] ExprError),
    #[error("profile parameter rho = {rho} outside the chart of the isometry class")]
    ProfileChart { rho: f64 },
    #[error("state is not admissible: first integral requires t_s = {target}, |t_s| > 1")]
    Inadmissible { target: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate tangent basis (det g = {det})")]
    DegenerateTangents { det: f64 },
    #[error("grid of {rows}x{cols} samples is too small, need at least 3x3")]
    InsufficientGrid { rows: usize, cols: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
