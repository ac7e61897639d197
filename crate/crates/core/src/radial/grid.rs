use serde::Serialize;

use super::PhysParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    Uniform,
    LogUniform,
}

/// Staggered radial grid.
///
/// `2n+3` radii `r[0] = r_min < … < r[2n+2] = r_max` are laid out either
/// uniformly or geometrically. The unknowns live on the `2n+1` interior
/// radii: odd offsets (`r[2], r[4], …`) are the `n` primary nodes and even
/// offsets (`r[1], r[3], …`) the `n+1` dual nodes. One component of the
/// doublet sits on each family, so the first-order coupling between them is a
/// compact two-point difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    pub scheme: GridScheme,
    pub r_min: f64,
    pub r_max: f64,
    /// Number of primary nodes.
    pub n_points: usize,
    #[serde(skip)]
    radii: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(scheme: GridScheme, r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min < r_max) {
            return Err(Error::InvalidInput(format!("need 0 < r_min < r_max, got r_min = {r_min}, r_max = {r_max}")));
        }
        if n_points < 4 {
            return Err(Error::InvalidInput(format!("n_points = {n_points} must be at least 4")));
        }
        let count = 2 * n_points + 3;
        let last = (count - 1) as f64;
        let mut radii: Vec<f64> = match scheme {
            GridScheme::Uniform => {
                let h = (r_max - r_min) / last;
                (0..count).map(|j| r_min + j as f64 * h).collect()
            }
            GridScheme::LogUniform => {
                let (a, b) = (r_min.ln(), r_max.ln());
                (0..count).map(|j| (a + (b - a) * j as f64 / last).exp()).collect()
            }
        };
        radii[0] = r_min;
        radii[count - 1] = r_max;
        let weights = (1..count - 1).map(|j| radii[j + 1] - radii[j - 1]).collect();
        Ok(Self { scheme, r_min, r_max, n_points, radii, weights })
    }

    /// Log-uniform grid scaled to a sector: `r_min = 10⁻³|κ|/(Zα m)` and
    /// `r_max = 40(n′_top + |κ|)/(Zα m)`, enough room for every level up to
    /// radial quantum number `n′_top` to decay.
    pub fn for_sector(params: &PhysParams, abs_kappa: f64, n_points: usize, n_prime_top: u32) -> Result<Self> {
        if params.z_alpha <= 0.0 {
            return Err(Error::InvalidInput("default grid needs z_alpha > 0 for its length scale".into()));
        }
        let scale = params.z_alpha * params.m;
        Self::new(
            GridScheme::LogUniform,
            1e-3 * abs_kappa / scale,
            40.0 * (f64::from(n_prime_top) + abs_kappa) / scale,
            n_points,
        )
    }

    /// Same scheme and extent with a different number of primary nodes.
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(self.scheme, self.r_min, self.r_max, n_points)
    }

    pub fn refined(&self) -> Result<Self> {
        self.with_points(2 * self.n_points)
    }

    /// Number of unknown nodes, `2n+1`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// All `2n+3` radii including the two boundary radii.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radius of unknown node `k`.
    pub fn node(&self, k: usize) -> f64 {
        self.radii[k + 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.radii[1..self.radii.len() - 1]
    }

    /// Quadrature weight of node `k` (the span of its two neighbours).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_primary(k: usize) -> bool {
        k % 2 == 1
    }

    /// Quadrature over the dual nodes. Exact for constants: `Σ w = r_max − r_min`.
    pub fn dual_quadrature(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.len()).step_by(2).map(|k| self.weights[k] * f(self.node(k))).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_dual_quadrature_of_constant_is_exact_length() {
        let g = RadialGrid::new(GridScheme::Uniform, 0.5, 10.5, 50).unwrap();
        assert!((g.dual_quadrature(|_| 1.0) - 10.0).abs() < 1e-12);
        assert_eq!(g.len(), 101);
    }

    #[test]
    fn sector_grid_defaults() {
        let p = PhysParams::new(3, 0.5).unwrap();
        let g = RadialGrid::for_sector(&p, 1.0, 800, 0).unwrap();
        assert!((g.r_max - 80.0).abs() < 1e-12);
        assert!((g.r_min - 2e-3).abs() < 1e-15);
        assert_eq!(g.scheme, GridScheme::LogUniform);
        assert!(RadialGrid::for_sector(&PhysParams::free(3), 1.0, 10, 0).is_err());
    }

    #[test]
    fn rejects_bad_extents() {
        assert!(RadialGrid::new(GridScheme::Uniform, 0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(GridScheme::LogUniform, 2.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(GridScheme::LogUniform, 1.0, 2.0, 2).is_err());
    }

    proptest! {
        #[test]
        fn nodes_increase_and_weights_positive(
            r_min in 1e-6f64..1.0,
            span in 1.0f64..500.0,
            n in 4usize..300,
            log in any::<bool>(),
        ) {
            let scheme = if log { GridScheme::LogUniform } else { GridScheme::Uniform };
            let g = RadialGrid::new(scheme, r_min, r_min + span, n).unwrap();
            prop_assert!(g.radii().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.weights().iter().all(|&w| w > 0.0));
            let total = g.dual_quadrature(|_| 1.0);
            prop_assert!((total - span).abs() <= 1e-9 * span);
        }
    }
}
