use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    /// Plasma and Drude permittivities diverge at xi = 0; the static term
    /// goes through the per-family zero-frequency limits instead.
    #[error("permittivity of the {model} model diverges at zero frequency; use the static limit")]
    StaticLimitRequired { model: &'static str },

    #[error("material has no transport parameters (sigma, mean free path, Fermi velocity)")]
    MissingTransport,

    #[error("reflection coefficient undefined at l = 0, k_perp = 0")]
    ZeroMomentumStatic,

    #[error("quadrature did not converge after {evaluations} evaluations (last {last:e}, previous {previous:e})")]
    QuadratureNonConvergence {
        last: f64,
        previous: f64,
        evaluations: usize,
    },

    #[error("Matsubara sum not truncated before l = {max_l}")]
    TruncationCap { max_l: u64 },

    #[error(
        "finite-difference estimates disagree: step h gives {coarse:e}, step h/2 gives {fine:e}"
    )]
    UnstableDerivative { coarse: f64, fine: f64 },

    #[error("root bracketing failed in [{lo:e}, {hi:e}] rad/s after {found} roots")]
    BracketFailure { lo: f64, hi: f64, found: usize },

    #[error("mode-sum deviation does not stabilize under refinement ({coarse:e} vs {fine:e})")]
    GridUnstable { coarse: f64, fine: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::TruncationCap { .. }
                | Error::UnstableDerivative { .. }
                | Error::BracketFailure { .. }
                | Error::GridUnstable { .. }
        )
    }
}
