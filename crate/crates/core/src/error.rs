use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Zα at or beyond the stability bound (D-1)/2.
    #[error("stability bound violated: z_alpha = {z_alpha} must be below (D-1)/2 = {bound} for D = {dim}")]
    Stability { dim: u32, z_alpha: f64, bound: f64 },

    /// κ² ≤ (Zα)², so s = √(κ² − (Zα)²) is not real.
    #[error("subcritical sector: kappa = {kappa}, z_alpha = {z_alpha} gives kappa^2 <= (Z alpha)^2")]
    Subcritical { kappa: f64, z_alpha: f64 },

    #[error("invalid level label: {0}")]
    InvalidLabel(String),

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("spurious-mode filter removed every candidate ({0}); grid is inadequate")]
    SpuriousSpectrum(String),

    #[error("ambiguous SUSY pairing: {0}")]
    Pairing(String),

    #[error("no sign convention for the angular matrix element annihilates the kernel: {0}")]
    Convention(String),

    #[error("kernel normalization: {0}")]
    Normalization(String),
}
