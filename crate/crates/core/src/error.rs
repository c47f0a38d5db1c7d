use num_complex::Complex64;

/// Library-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quantity over- or underflowed the representable range.
    #[error("range error: {0}")]
    Range(String),

    /// Requested tolerance not met; carries the best estimate and the
    /// error bound actually achieved.
    #[error("accuracy error: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy {
        estimate: Complex64,
        achieved: f64,
        requested: f64,
    },

    /// Non-finite sample while evaluating an integrand.
    #[error("non-finite sample at node {node}")]
    NonFinite { node: f64 },

    /// Matrix assembly failed (degenerate mesh or data).
    #[error("assembly error: {0}")]
    Assembly(String),

    /// A shifted system could not be factorized; reported with the
    /// contour-node index when it occurs inside a cache build.
    #[error("singular system at contour node {node_index}: {detail}")]
    SingularSystem { node_index: usize, detail: String },

    /// Eigensolver did not converge.
    #[error("eigensolver failed to converge: {0}")]
    EigenConvergence(String),

    /// Spectral tail bound not met at the maximum mode count.
    #[error("truncation error: tail estimate {tail:.3e} exceeds tolerance {tol:.3e} at {modes} modes")]
    Truncation { tail: f64, tol: f64, modes: usize },
}
