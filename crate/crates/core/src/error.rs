use thiserror::Error;

/// Failure modes surfaced by ball construction, samplers, and estimators.
///
/// Every variant carries enough context to be rendered as a machine-readable
/// error without re-deriving state.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator label {label:?}")]
    UnknownLabel { label: String },

    #[error("malformed word token {token:?}")]
    MalformedToken { token: String },

    #[error("group spec invalid: {reason}")]
    InvalidGroupSpec { reason: String },

    #[error("ball of radius {radius} exceeds vertex cap {cap} (stopped at {reached} vertices)")]
    VertexCapExceeded { radius: u32, cap: usize, reached: usize },

    #[error("parameter {name} = {value} outside {expected}")]
    OutOfRange { name: &'static str, value: f64, expected: &'static str },

    #[error("edge id {edge} out of bounds ({edges} edges)")]
    EdgeOutOfBounds { edge: usize, edges: usize },

    #[error("vertex id {vertex} out of bounds ({vertices} vertices)")]
    VertexOutOfBounds { vertex: usize, vertices: usize },

    #[error("label/config size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("graph is not connected: vertex {vertex} cannot reach the root")]
    Disconnected { vertex: usize },

    #[error("cycle popping exceeded pop cap {cap}")]
    PopCapExceeded { cap: u64 },

    #[error("ball too small for antipodal reference vertices: {reason}")]
    DegenerateBall { reason: String },

    #[error("ends radius {radius} not below ball radius {ball_radius}")]
    RadiusOutOfRange { radius: u32, ball_radius: u32 },

    #[error("estimate undefined: {reason}")]
    Undefined { reason: String },

    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },
}
