//! Relativistic hydrogen in D spatial dimensions.
//!
//! * [`clifford`]: exact gamma matrices, γ^{D+1} and spin generators.
//! * [`radial`]: radial Dirac–Coulomb operators per κ sector and their spectra.
//! * [`analytic`]: closed-form energies, level bookkeeping and the kernel doublet.
//! * [`susy`]: the Johnson–Lippmann operator A and the N = 2 supercharges on
//!   a paired (±|κ|) block, with numerical checks of the algebra.

pub mod analytic;
pub mod clifford;
mod dense;
pub mod error;
pub mod export;
pub mod radial;
pub mod sparse;
pub mod susy;

pub use error::{Error, Result};
