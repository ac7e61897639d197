//! Radial reduction of the Dirac–Coulomb problem in D spatial dimensions.
//!
//! Each eigenvalue κ of the Dirac operator K gives a two-component radial
//! problem for the large and small amplitudes (F, G):
//!
//! ```text
//! H_κ = [  m − Zα/r      d/dr + κ/r ]
//!       [ −d/dr + κ/r   −m − Zα/r   ]
//! ```
//!
//! The same operator serves odd and even D; only the allowed κ differ.

mod eigen;
mod grid;
mod operator;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{Pencil, DEFAULT_BISECTION_STEPS};
pub use grid::{GridScheme, RadialGrid};
pub use operator::{build_radial_hamiltonian, build_radial_part, OperatorKind, RadialOperator};
pub use solve::{
    convergence_study, n_prime_of_level, oscillation_fraction, solve_spectrum, solve_spectrum_with, ConvergenceReport, Eigenpair,
    LevelConvergence, SolveOptions, SpectrumRecord, SpectrumResult,
};

/// Physical configuration, natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysParams {
    #[serde(rename = "D")]
    pub dim: u32,
    pub z_alpha: f64,
    pub m: f64,
}

impl PhysParams {
    /// Validated parameters with m = 1.
    pub fn new(dim: u32, z_alpha: f64) -> Result<Self> {
        Self::with_mass(dim, z_alpha, 1.0)
    }

    pub fn with_mass(dim: u32, z_alpha: f64, m: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("D = {dim} must be >= 2")));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidInput(format!("mass m = {m} must be positive")));
        }
        if !(z_alpha.is_finite() && z_alpha > 0.0) {
            return Err(Error::InvalidInput(format!("z_alpha = {z_alpha} must be positive")));
        }
        let bound = stability_bound(dim);
        if z_alpha >= bound {
            return Err(Error::Stability { dim, z_alpha, bound });
        }
        Ok(Self { dim, z_alpha, m })
    }

    /// Zero coupling, for free-particle checks only. Most routines that need
    /// a length scale from Zα refuse these parameters.
    pub fn free(dim: u32) -> Self {
        Self { dim, z_alpha: 0.0, m: 1.0 }
    }

    pub fn stability_bound(&self) -> f64 {
        stability_bound(self.dim)
    }

    /// Smallest allowed |κ|, namely (D−1)/2.
    pub fn min_abs_kappa(&self) -> f64 {
        f64::from(self.dim - 1) / 2.0
    }
}

/// (D−1)/2
pub fn stability_bound(dim: u32) -> f64 {
    f64::from(dim.saturating_sub(1)) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("sign must be + or -, got {other:?}"))),
        }
    }
}

/// One eigenvalue sector of K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaSector {
    pub l: u32,
    pub sign: Sign,
    /// 2κ, an exact integer for both parities of D.
    pub twice_kappa: i32,
    pub kappa: f64,
    /// √(κ² − (Zα)²)
    pub s: f64,
}

impl KappaSector {
    pub fn abs_kappa(&self) -> f64 {
        self.kappa.abs()
    }

    /// G/F of the regular small-r solution and of the κ>0 ground state.
    pub fn small_ratio(&self, z_alpha: f64) -> f64 {
        (self.kappa - self.s) / z_alpha
    }
}

/// κ = sign·(l + (D−1)/2) together with s.
pub fn kappa_of(params: &PhysParams, l: u32, sign: Sign) -> Result<KappaSector> {
    if params.dim < 2 {
        return Err(Error::InvalidInput(format!("D = {} must be >= 2", params.dim)));
    }
    let twice_abs = 2 * l as i32 + params.dim as i32 - 1;
    let twice_kappa = sign.as_i32() * twice_abs;
    let kappa = f64::from(twice_kappa) / 2.0;
    let disc = kappa * kappa - params.z_alpha * params.z_alpha;
    if disc <= 0.0 {
        return Err(Error::Subcritical { kappa, z_alpha: params.z_alpha });
    }
    Ok(KappaSector { l, sign, twice_kappa, kappa, s: disc.sqrt() })
}

/// Sector from |κ| and a sign; |κ| must be l + (D−1)/2 for some l ≥ 0.
pub fn sector_from_abs_kappa(params: &PhysParams, abs_kappa: f64, sign: Sign) -> Result<KappaSector> {
    let twice = 2.0 * abs_kappa;
    let l2 = twice - f64::from(params.dim - 1);
    if twice.fract() != 0.0 || l2 < 0.0 || l2 % 2.0 != 0.0 {
        return Err(Error::InvalidInput(format!(
            "|kappa| = {abs_kappa} is not l + (D-1)/2 for D = {} and integer l >= 0",
            params.dim
        )));
    }
    kappa_of(params, (l2 / 2.0) as u32, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_rule_examples() {
        let p3 = PhysParams::new(3, 0.5).unwrap();
        assert_eq!(kappa_of(&p3, 0, Sign::Plus).unwrap().kappa, 1.0);
        assert_eq!(kappa_of(&p3, 1, Sign::Minus).unwrap().kappa, -2.0);
        let p2 = PhysParams::new(2, 0.4).unwrap();
        assert_eq!(kappa_of(&p2, 0, Sign::Plus).unwrap().kappa, 0.5);
        let s = kappa_of(&p3, 0, Sign::Plus).unwrap().s;
        assert!((s - 0.866_025_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn kappa_parity_follows_dimension() {
        for d in 2..=9u32 {
            let p = PhysParams::new(d, 0.3).unwrap();
            for l in 0..4 {
                let k = kappa_of(&p, l, Sign::Plus).unwrap();
                assert_eq!(k.twice_kappa % 2 == 0, d % 2 == 1);
                assert!(k.s > 0.0 && k.s < k.abs_kappa());
            }
        }
    }

    #[test]
    fn stability_bound_is_enforced() {
        assert!(matches!(PhysParams::new(3, 1.2), Err(Error::Stability { .. })));
        assert!(matches!(PhysParams::new(2, 0.5), Err(Error::Stability { .. })));
        assert!(PhysParams::new(2, 0.49).is_ok());
        assert!(PhysParams::new(1, 0.1).is_err());
        assert!(PhysParams::with_mass(3, 0.5, -1.0).is_err());
    }

    #[test]
    fn subcritical_sector_is_rejected() {
        let bogus = PhysParams { dim: 3, z_alpha: 1.5, m: 1.0 };
        assert!(matches!(kappa_of(&bogus, 0, Sign::Plus), Err(Error::Subcritical { .. })));
    }

    #[test]
    fn abs_kappa_lookup() {
        let p4 = PhysParams::new(4, 0.6).unwrap();
        let k = sector_from_abs_kappa(&p4, 1.5, Sign::Minus).unwrap();
        assert_eq!((k.l, k.twice_kappa), (0, -3));
        assert!(sector_from_abs_kappa(&p4, 1.0, Sign::Plus).is_err());
        assert!(sector_from_abs_kappa(&p4, 0.5, Sign::Plus).is_err());
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("+".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-1".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("x".parse::<Sign>().is_err());
    }
}
