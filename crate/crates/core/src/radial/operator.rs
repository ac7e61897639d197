use serde::Serialize;

use super::eigen::Pencil;
use super::{KappaSector, PhysParams, RadialGrid};
use crate::error::{Error, Result};
use crate::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Hamiltonian,
    Identity,
    /// Mass and Coulomb terms, `γ⁰m − Zα/r`.
    Potential,
    /// First-order coupling `±d/dr + κ/r` including the inner closure.
    Derivative,
    Composite,
}

/// A radial operator on one κ sector, stored as the symmetric pencil `(L, W)`
/// with `H = W⁻¹L`.
///
/// Unknowns are interleaved in node order. For κ > 0 the large component F
/// sits on the primary nodes and G on the dual nodes; for κ < 0 the roles are
/// swapped, so the regular small-r behaviour can always be closed on the
/// innermost dual node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub params: PhysParams,
    pub sector: KappaSector,
    pub grid: RadialGrid,
    pub kind: OperatorKind,
    pencil: Pencil,
    /// Ratio of the eliminated boundary unknown at `r_min` to unknown 0,
    /// or 0 for a Dirichlet closure.
    closure: f64,
}

impl RadialOperator {
    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    pub fn len(&self) -> usize {
        self.pencil.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pencil.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.pencil.weights
    }

    pub fn closure_ratio(&self) -> f64 {
        self.closure
    }

    pub fn large_on_primary(&self) -> bool {
        self.sector.kappa > 0.0
    }

    /// True when unknown `k` holds the large component F.
    pub fn is_large(&self, k: usize) -> bool {
        RadialGrid::is_primary(k) == self.large_on_primary()
    }

    /// Symmetric form `L = W·H`.
    pub fn symmetric_matrix(&self) -> Csr {
        Csr::tridiagonal(&self.pencil.diag, &self.pencil.off)
    }

    /// The operator itself, `H = W⁻¹L`, acting on node values.
    pub fn matrix(&self) -> Csr {
        let inv: Vec<f64> = self.pencil.weights.iter().map(|w| 1.0 / w).collect();
        self.symmetric_matrix().scale_rows(&inv)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.pencil.apply(v).iter().zip(&self.pencil.weights).map(|(y, w)| y / w).collect()
    }

    /// Sum of two operators on the same sector and grid.
    pub fn add(&self, other: &RadialOperator) -> Result<RadialOperator> {
        if self.grid != other.grid || self.sector != other.sector {
            return Err(Error::InvalidInput("operators live on different sectors or grids".into()));
        }
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        let kind = match (self.kind, other.kind) {
            (OperatorKind::Potential, OperatorKind::Derivative) => OperatorKind::Hamiltonian,
            _ => OperatorKind::Composite,
        };
        Ok(RadialOperator {
            params: self.params,
            sector: self.sector,
            grid: self.grid.clone(),
            kind,
            pencil: Pencil {
                diag: zip(&self.pencil.diag, &other.pencil.diag),
                off: zip(&self.pencil.off, &other.pencil.off),
                weights: self.pencil.weights.clone(),
            },
            closure: if self.closure != 0.0 { self.closure } else { other.closure },
        })
    }

    /// Large and small components as `(r, value)` pairs on their own nodes.
    pub fn components(&self, v: &[f64]) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let mut large = Vec::new();
        let mut small = Vec::new();
        for (k, &x) in v.iter().enumerate() {
            let entry = (self.grid.node(k), x);
            if self.is_large(k) {
                large.push(entry);
            } else {
                small.push(entry);
            }
        }
        (large, small)
    }

    /// Fraction of the quadrature norm carried by G.
    pub fn norm_weight_small(&self, v: &[f64]) -> f64 {
        let w = &self.pencil.weights;
        let (mut small, mut total) = (0.0, 0.0);
        for (k, &x) in v.iter().enumerate() {
            let c = w[k] * x * x;
            total += c;
            if !self.is_large(k) {
                small += c;
            }
        }
        small / total
    }
}

fn check_consistent(params: &PhysParams, sector: &KappaSector) -> Result<()> {
    let expected = 2 * sector.l as i32 + params.dim as i32 - 1;
    if sector.twice_kappa.abs() != expected {
        return Err(Error::InvalidInput(format!(
            "sector kappa = {} does not match l = {} in D = {}",
            sector.kappa, sector.l, params.dim
        )));
    }
    Ok(())
}

/// Ratio of the boundary unknown at `r_out` to unknown 0 at `r_in` for
/// `F ∝ r^s e^{−Zα m r/|κ|}`, `G/F = (κ − s)/Zα`.
///
/// This is the kernel doublet's exact local form. Both sectors use the same
/// exponential, which keeps `β₋ = −β₊` and hence A symmetric at the boundary.
fn closure_ratio(params: &PhysParams, sector: &KappaSector, r_out: f64, r_in: f64) -> f64 {
    let lambda = params.z_alpha * params.m / sector.abs_kappa();
    let ratio = (r_out / r_in).powf(sector.s) * (-lambda * (r_out - r_in)).exp();
    let c0 = sector.small_ratio(params.z_alpha);
    if sector.kappa > 0.0 {
        ratio / c0
    } else {
        ratio * c0
    }
}

/// Assemble one constituent of the radial Hamiltonian.
pub fn build_radial_part(
    params: &PhysParams,
    sector: &KappaSector,
    grid: &RadialGrid,
    kind: OperatorKind,
) -> Result<RadialOperator> {
    check_consistent(params, sector)?;
    let n = grid.len();
    let w = grid.weights().to_vec();
    let kappa = sector.kappa;
    let large_on_primary = kappa > 0.0;
    let carries_large = |k: usize| RadialGrid::is_primary(k) == large_on_primary;

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    let mut closure = 0.0;

    match kind {
        OperatorKind::Identity => diag.clone_from(&w),
        OperatorKind::Potential => {
            for (k, d) in diag.iter_mut().enumerate() {
                let mass = if carries_large(k) { params.m } else { -params.m };
                *d = w[k] * (mass - params.z_alpha / grid.node(k));
            }
        }
        OperatorKind::Derivative => {
            // pair (k, k+1): one primary node and one dual node
            for (k, e) in off.iter_mut().enumerate() {
                let (prim, dual) = if RadialGrid::is_primary(k) { (k, k + 1) } else { (k + 1, k) };
                let toward = if dual > prim { 1.0 } else { -1.0 };
                let diff = if large_on_primary { toward } else { -toward };
                *e = diff + kappa * 0.5 * w[dual] / grid.node(prim);
            }
            if params.z_alpha > 0.0 {
                let r = grid.radii();
                let beta = closure_ratio(params, sector, r[0], r[1]);
                let diff = if large_on_primary { 1.0 } else { -1.0 };
                let coupling = diff + kappa * 0.5 * w[0] / r[0];
                diag[0] = coupling * beta;
                closure = beta;
            }
        }
        OperatorKind::Hamiltonian => {
            let pot = build_radial_part(params, sector, grid, OperatorKind::Potential)?;
            let der = build_radial_part(params, sector, grid, OperatorKind::Derivative)?;
            return pot.add(&der);
        }
        OperatorKind::Composite => {
            return Err(Error::InvalidInput("composite operators are formed by adding parts".into()));
        }
    }

    Ok(RadialOperator {
        params: *params,
        sector: *sector,
        grid: grid.clone(),
        kind,
        pencil: Pencil { diag, off, weights: w },
        closure,
    })
}

/// Discretized radial Dirac–Coulomb Hamiltonian for one sector.
///
/// The inner boundary imposes the regular solution
/// `F ∝ r^s e^{−Zα m r/|κ|}`, `G/F = (κ − s)/Zα` between `r_min` and the first node; the outer boundary
/// is Dirichlet. With Zα = 0 both ends are Dirichlet.
pub fn build_radial_hamiltonian(
    params: &PhysParams,
    sector: &KappaSector,
    grid: &RadialGrid,
) -> Result<RadialOperator> {
    build_radial_part(params, sector, grid, OperatorKind::Hamiltonian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{kappa_of, GridScheme, Sign};

    fn d3() -> (PhysParams, KappaSector, RadialGrid) {
        let p = PhysParams::new(3, 0.5).unwrap();
        let k = kappa_of(&p, 0, Sign::Plus).unwrap();
        let g = RadialGrid::for_sector(&p, 1.0, 100, 0).unwrap();
        (p, k, g)
    }

    #[test]
    fn hamiltonian_is_exactly_symmetric() {
        let (p, k, g) = d3();
        let h = build_radial_hamiltonian(&p, &k, &g).unwrap();
        assert!(h.symmetric_matrix().is_symmetric_exact());
        assert_eq!(h.kind, OperatorKind::Hamiltonian);
        let km = kappa_of(&p, 0, Sign::Minus).unwrap();
        assert!(build_radial_hamiltonian(&p, &km, &g).unwrap().symmetric_matrix().is_symmetric_exact());
    }

    #[test]
    fn hamiltonian_is_the_sum_of_its_parts() {
        let (p, k, g) = d3();
        let pot = build_radial_part(&p, &k, &g, OperatorKind::Potential).unwrap();
        let der = build_radial_part(&p, &k, &g, OperatorKind::Derivative).unwrap();
        let id = build_radial_part(&p, &k, &g, OperatorKind::Identity).unwrap();
        let h = build_radial_hamiltonian(&p, &k, &g).unwrap();
        assert_eq!(pot.add(&der).unwrap().pencil(), h.pencil());
        assert_eq!(h.add(&id).unwrap().kind, OperatorKind::Composite);
        let ones = vec![1.0; id.len()];
        assert_eq!(id.apply(&ones), ones);
    }

    #[test]
    fn block_structure_diagonal_on_components() {
        // the potential never couples neighbours; the derivative couples only F to G
        let (p, k, g) = d3();
        let pot = build_radial_part(&p, &k, &g, OperatorKind::Potential).unwrap();
        assert!(pot.pencil().off.iter().all(|&e| e == 0.0));
        let h = build_radial_hamiltonian(&p, &k, &g).unwrap();
        for kk in 0..h.len() - 1 {
            assert_ne!(h.is_large(kk), h.is_large(kk + 1));
        }
    }

    #[test]
    fn mismatched_sector_is_rejected() {
        let (p, mut k, g) = d3();
        k.l = 3;
        assert!(build_radial_hamiltonian(&p, &k, &g).is_err());
    }

    #[test]
    fn uniform_grid_builds() {
        let (p, k, _) = d3();
        let g = RadialGrid::new(GridScheme::Uniform, 0.05, 80.0, 200).unwrap();
        let h = build_radial_hamiltonian(&p, &k, &g).unwrap();
        assert!(h.closure_ratio() > 0.0);
        assert_eq!(h.matrix().nrows(), 401);
    }
}
