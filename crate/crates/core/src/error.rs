use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} out of range: {detail}")]
    Range { what: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    Convergence { sweeps: usize, off_diagonal: f64 },

    #[error("moments are not realizable by a real spectrum (imaginary residue {imaginary:e})")]
    IllPosedMoments { imaginary: f64 },

    #[error("Vandermonde nodes nearly coincide (gap {gap:e})")]
    Conditioning { gap: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("point is too close to a focal variety (f = {f})")]
    FocalPoint { f: f64 },

    #[error("level projection failed: {0}")]
    Projection(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polynomial is not S^1-invariant under the complex structure (residual {residual:e})")]
    Invariance { residual: f64 },

    #[error("adapted frame is degenerate (<Jx, nu> = {inner:e})")]
    FrameDegeneracy { inner: f64 },

    #[error("expected {expected} distinct principal curvatures, found {found}")]
    SpectralGap { expected: usize, found: usize },

    #[error("t = {t} is within the blow-up band of a pole at t = {pole}")]
    BlowUp { t: f64, pole: f64 },

    #[error("numerical integration failed: {0}")]
    Integration(String),
}

impl Error {
    pub(crate) fn range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            what,
            detail: detail.into(),
        }
    }
}
