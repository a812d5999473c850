use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window [{n_min}, {n_max}]: need n_min < n_max")]
    InvalidWindow { n_min: i64, n_max: i64 },

    #[error("window [{n_min}, {n_max}] does not contain the potential support [{support_lo}, {support_hi}]")]
    WindowTooSmall {
        n_min: i64,
        n_max: i64,
        support_lo: i64,
        support_hi: i64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("branch ambiguous: lambda = {0} lies strictly inside (0, 4); pass side = plus or minus")]
    BranchAmbiguous(f64),

    #[error("spectral parameter {lambda} is a band edge; use the Puiseux terms or the zero-energy solutions")]
    EdgeSingularity { lambda: f64 },

    #[error("potential is not generic at the band edge (W = {w0:e}); {context}")]
    NonGeneric { w0: f64, context: String },

    #[error("Wronskian |W| = {modulus:e} below tolerance at theta = {theta}")]
    WronskianVanishes { theta: f64, modulus: f64 },

    #[error("singular system at lambda = {lambda}; nearest truncated eigenvalue {nearest_eigenvalue}")]
    SingularSystem {
        lambda: num_complex::Complex64,
        nearest_eigenvalue: f64,
    },

    #[error("eigenvector for omega = {omega} does not decay inside the window (boundary ratio {boundary_ratio:e}); enlarge window to N >= {suggested_n}")]
    EnlargeWindow {
        omega: f64,
        boundary_ratio: f64,
        suggested_n: i64,
    },

    #[error("window half-width {n} too small for t = {t}: need N >= {required} (group velocity bound)")]
    WindowTimeMismatch { n: i64, t: f64, required: i64 },

    #[error("quadrature did not converge: achieved error {achieved:e} (tolerance {tolerance:e})")]
    QuadratureNotConverged { achieved: f64, tolerance: f64 },

    #[error("failed to parse potential: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
