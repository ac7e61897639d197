//! Johnson–Lippmann operator and N = 2 supercharges on a paired block.
//!
//! A block couples the sectors κ = +|κ| and κ = −|κ| on one shared grid.
//! Vectors are `(ψ₊, ψ₋)`; K acts as `diag(+|κ|, −|κ|)` and A has zero
//! diagonal blocks, with `X: ψ₊ → ψ₋` and `Y: ψ₋ → ψ₊`.
//!
//! Radially, A maps a doublet of sector κ to sector −κ as
//!
//! ```text
//! F′ = −η·F + c(F_r − κF/r) + (κ/(m r))·G
//! G′ = −(κ/(m r))·F − η·G + c(G_r + κG/r),      c = κ/(Zα m)
//! ```
//!
//! where η is the sign of the angular matrix element of σ·x̂ between the two
//! sectors. It is fixed numerically: only η = −1 annihilates the kernel doublet.
//! Because the two components sit on staggered nodes, the non-derivative term
//! is the average of the two neighbouring source values.

use serde::Serialize;

use crate::analytic::{ground_energy, kernel_wavefunction};
use crate::dense::{fitted_order, max_abs, spectral_norm};
use crate::error::{Error, Result};
use crate::export::{f17, f17_opt, f17_vec};
use crate::radial::{
    build_radial_hamiltonian, sector_from_abs_kappa, solve_spectrum, solve_spectrum_with, PhysParams, RadialGrid,
    RadialOperator, Sign, SolveOptions,
};
use crate::sparse::Csr;

/// Which form of A the blocks are assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Direct radial reduction, each block from its own source sector, with
    /// κ/r evaluated at the source node.
    Direct,
    /// Hermitian form: the + → − block with κ/r at the geometric midpoint of
    /// the two nodes, and the − → + block as its W-adjoint.
    Hermitian,
}

/// Paired (+|κ|, −|κ|) system on one grid.
#[derive(Debug, Clone)]
pub struct SusyBlock {
    pub params: PhysParams,
    pub abs_kappa: f64,
    pub plus: RadialOperator,
    pub minus: RadialOperator,
    h_block: Csr,
    k_diag: Vec<f64>,
    weights: Vec<f64>,
    a_block: Option<Csr>,
    eta: Option<f64>,
}

impl SusyBlock {
    pub fn new(params: &PhysParams, abs_kappa: f64, grid: &RadialGrid) -> Result<Self> {
        if params.z_alpha <= 0.0 {
            return Err(Error::InvalidInput("A is defined only for z_alpha > 0".into()));
        }
        let sp = sector_from_abs_kappa(params, abs_kappa, Sign::Plus)?;
        let sm = sector_from_abs_kappa(params, abs_kappa, Sign::Minus)?;
        let plus = build_radial_hamiltonian(params, &sp, grid)?;
        let minus = build_radial_hamiltonian(params, &sm, grid)?;
        let n = plus.len();
        let h_block = Csr::block2x2((n, n), [[Some(&plus.matrix()), None], [None, Some(&minus.matrix())]]);
        let k_diag = [vec![abs_kappa; n], vec![-abs_kappa; n]].concat();
        let weights = [plus.weights(), minus.weights()].concat();
        Ok(Self { params: *params, abs_kappa, plus, minus, h_block, k_diag, weights, a_block: None, eta: None })
    }

    /// Block on the default log grid, sized for the three lowest + levels.
    pub fn with_points(params: &PhysParams, abs_kappa: f64, n_points: usize) -> Result<Self> {
        let grid = RadialGrid::for_sector(params, abs_kappa, n_points, 2)?;
        Self::new(params, abs_kappa, &grid)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.plus.grid
    }

    /// Unknowns per sector.
    pub fn sector_len(&self) -> usize {
        self.plus.len()
    }

    pub fn h_block(&self) -> &Csr {
        &self.h_block
    }

    pub fn k_diag(&self) -> &[f64] {
        &self.k_diag
    }

    pub fn k_block(&self) -> Csr {
        Csr::from_diag(&self.k_diag)
    }

    /// Quadrature weights of the block; A and H are self-adjoint in this metric.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn a_block(&self) -> Result<&Csr> {
        self.a_block.as_ref().ok_or_else(|| Error::InvalidInput("A has not been built for this block".into()))
    }

    /// Sign of the angular matrix element chosen by [`SusyBlock::build_a`].
    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    /// Populate A, selecting η by the kernel contract: the residual
    /// `‖A ψ₀‖/‖ψ₀‖` must fall below 0.1 and at least halve when the grid is
    /// doubled.
    pub fn build_a(&mut self) -> Result<ConventionReport> {
        let fine = SusyBlock::new(&self.params, self.abs_kappa, &self.grid().refined()?)?;
        let mut trials = Vec::new();
        for eta in [-1.0, 1.0] {
            let coarse = self.kernel_residual_with(eta)?;
            let refined = fine.kernel_residual_with(eta)?;
            let ok = refined < 0.1 && coarse / refined >= 2.0;
            trials.push(ConventionTrial { eta, residual: coarse, refined_residual: refined, accepted: ok });
        }
        let best = trials
            .iter()
            .filter(|t| t.accepted)
            .min_by(|a, b| a.refined_residual.total_cmp(&b.refined_residual))
            .map(|t| t.eta);
        let Some(eta) = best else {
            let detail: Vec<String> = trials
                .iter()
                .map(|t| format!("eta = {:+}: {:.3e} -> {:.3e}", t.eta, t.residual, t.refined_residual))
                .collect();
            return Err(Error::Convention(detail.join(", ")));
        };
        self.build_a_with_eta(eta);
        Ok(ConventionReport { eta, trials })
    }

    /// Populate A with a fixed η, bypassing the selection. η = +1 is the
    /// negative control.
    pub fn build_a_with_eta(&mut self, eta: f64) {
        self.a_block = Some(self.assemble(eta, Route::Direct));
        self.eta = Some(eta);
    }

    /// Full A by either route.
    pub fn assemble(&self, eta: f64, route: Route) -> Csr {
        let n = self.sector_len();
        let x = assemble_transfer(&self.plus, &self.minus, eta, route);
        let y = match route {
            Route::Direct => assemble_transfer(&self.minus, &self.plus, eta, route),
            Route::Hermitian => {
                let inv_plus: Vec<f64> = self.plus.weights().iter().map(|w| 1.0 / w).collect();
                x.transpose().scale_rows(&inv_plus).scale_cols(self.minus.weights())
            }
        };
        Csr::block2x2((n, n), [[None, Some(&y)], [Some(&x), None]])
    }

    /// Block-lower part of A, the map from the + sector to the − sector.
    fn transfer_plus_to_minus(&self, eta: f64) -> Csr {
        assemble_transfer(&self.plus, &self.minus, eta, Route::Direct)
    }

    fn kernel_residual_with(&self, eta: f64) -> Result<f64> {
        let psi0 = kernel_wavefunction(&self.params, &self.plus.sector, self.grid())?;
        let image = self.transfer_plus_to_minus(eta).matvec(&psi0.values);
        // ψ₀ is normalized in the + metric
        Ok(w_norm(&image, self.minus.weights()))
    }

    /// `‖A ψ₀‖/‖ψ₀‖` for the discretized kernel doublet, with the built A.
    pub fn kernel_residual(&self) -> Result<f64> {
        let eta = self.eta.ok_or_else(|| Error::InvalidInput("A has not been built for this block".into()))?;
        self.kernel_residual_with(eta)
    }

    /// Rayleigh quotient of H₊ on the kernel doublet, E/m.
    pub fn kernel_rayleigh(&self) -> Result<f64> {
        let psi0 = kernel_wavefunction(&self.params, &self.plus.sector, self.grid())?;
        Ok(self.plus.pencil().rayleigh_quotient(&psi0.values) / self.params.m)
    }

    /// Bound eigenvectors embedded in the block: `n_plus` from the + sector
    /// then `n_minus` from the − sector.
    pub fn bound_basis(&self, n_plus: usize, n_minus: usize) -> Result<Vec<Vec<f64>>> {
        let n = self.sector_len();
        let opts = SolveOptions::single_grid();
        let mut basis = Vec::with_capacity(n_plus + n_minus);
        for (op, count, offset) in [(&self.plus, n_plus, 0), (&self.minus, n_minus, n)] {
            if count == 0 {
                continue;
            }
            let res = solve_spectrum_with(op, count, &opts)?;
            if res.levels.len() < count {
                return Err(Error::Convergence(format!(
                    "sector kappa = {} resolves only {} of {count} levels",
                    op.sector.kappa,
                    res.levels.len()
                )));
            }
            for level in res.levels {
                let mut v = vec![0.0; 2 * n];
                v[offset..offset + n].copy_from_slice(&level.vector);
                basis.push(v);
            }
        }
        Ok(basis)
    }

    /// Residuals of `[H, A] = 0` and of `A² = 1 + (K/Zα)²(H²/m² − 1)`,
    /// projected on the resolved bound states (three + levels, two − levels):
    /// `R ↦ VᵀW R V`.
    pub fn projected_residuals(&self) -> Result<ProjectedResiduals> {
        let a = self.a_block()?;
        let basis = self.bound_basis(3, 2)?;
        let a17 = self.assemble(self.eta.unwrap_or(-1.0), Route::Hermitian);
        let m2 = self.params.m * self.params.m;
        let c2 = (self.abs_kappa / self.params.z_alpha).powi(2);
        let w = &self.weights;

        let h = &self.h_block;
        let mut comm = Vec::new();
        let mut a2 = Vec::new();
        let mut route_cols = Vec::new();
        let mut sym = Vec::new();
        let columns: Vec<_> = basis
            .iter()
            .map(|v| {
                let av = a.matvec(v);
                let hv = h.matvec(v);
                let comm_col: Vec<f64> =
                    h.matvec(&av).iter().zip(a.matvec(&hv)).map(|(x, y)| x - y).collect();
                let aav = a.matvec(&av);
                let hhv = h.matvec(&hv);
                let a2_col: Vec<f64> = (0..v.len())
                    .map(|i| aav[i] - (v[i] + c2 * (hhv[i] / m2 - v[i])))
                    .collect();
                let diff: Vec<f64> = av.iter().zip(a17.matvec(v)).map(|(x, y)| x - y).collect();
                (comm_col, a2_col, diff, av)
            })
            .collect();
        for vi in &basis {
            comm.push(columns.iter().map(|c| w_dot(vi, &c.0, w)).collect::<Vec<_>>());
            a2.push(columns.iter().map(|c| w_dot(vi, &c.1, w)).collect::<Vec<_>>());
            sym.push(columns.iter().map(|c| w_dot(vi, &c.3, w)).collect::<Vec<_>>());
        }
        for c in &columns {
            route_cols.push(c.2.clone());
        }
        let route_gram: Vec<Vec<f64>> = route_cols
            .iter()
            .map(|ci| route_cols.iter().map(|cj| w_dot(ci, cj, w)).collect())
            .collect();
        let asym: Vec<Vec<f64>> = (0..sym.len())
            .map(|i| (0..sym.len()).map(|j| sym[i][j] - sym[j][i]).collect())
            .collect();
        Ok(ProjectedResiduals {
            n_points: self.grid().n_points,
            commutator_spectral: spectral_norm(&comm),
            commutator_max: max_abs(&comm),
            a_squared_spectral: spectral_norm(&a2),
            a_squared_max: max_abs(&a2),
            route_difference: max_eigen_sqrt(&route_gram),
            hermiticity_defect: spectral_norm(&asym),
        })
    }

    /// Apply the built A to the trial doublet `F = x^a e^{−x}`,
    /// `G = [(|κ| − a)/Zα]·F` of the + sector. Eliminating G turns `A ψ = 0`
    /// into `[(x d/dx + x)² − s²] F = 0`, so the F′ rows must vanish and the
    /// G′ rows must equal `(s² − a²) F/(Zα x)`.
    pub fn ode_elimination_check(&self, a_exp: f64) -> Result<OdeCheck> {
        let eta = self.eta.ok_or_else(|| Error::InvalidInput("A has not been built for this block".into()))?;
        let za = self.params.z_alpha;
        let kappa = self.abs_kappa;
        let s = self.plus.sector.s;
        let lambda = za * self.params.m / kappa;
        let grid = self.grid();
        let trial: Vec<f64> = (0..grid.len())
            .map(|k| {
                let x = lambda * grid.node(k);
                let f = x.powf(a_exp) * (-x).exp();
                if self.plus.is_large(k) {
                    f
                } else {
                    (kappa - a_exp) / za * f
                }
            })
            .collect();
        let image = self.transfer_plus_to_minus(eta).matvec(&trial);
        let w = self.minus.weights();
        let (mut f_res, mut g_err, mut g_ref) = (0.0, 0.0, 0.0);
        for k in 0..grid.len() {
            let x = lambda * grid.node(k);
            // stay clear of both closures
            if !(0.05..=20.0).contains(&x) {
                continue;
            }
            if self.minus.is_large(k) {
                f_res += w[k] * image[k] * image[k];
            } else {
                let expected = (s * s - a_exp * a_exp) * x.powf(a_exp) * (-x).exp() / (za * x);
                g_err += w[k] * (image[k] - expected).powi(2);
                g_ref += w[k] * expected * expected;
            }
        }
        Ok(OdeCheck {
            exponent: a_exp,
            f_rows_rel_residual: (f_res / g_ref).sqrt(),
            g_rows_rel_error: (g_err / g_ref).sqrt(),
        })
    }
}

/// Radial transfer block from sector `src` (κ) to sector `dst` (−κ).
fn assemble_transfer(src: &RadialOperator, dst: &RadialOperator, eta: f64, route: Route) -> Csr {
    let kappa = src.sector.kappa;
    let m = src.params.m;
    let c = kappa / (src.params.z_alpha * m);
    let grid = &src.grid;
    let radii = grid.radii();
    let w = src.weights();
    let n = src.len();
    let mut triplets = Vec::with_capacity(3 * n);
    for k in 0..n {
        let rk = grid.node(k);
        let to_large = dst.is_large(k);
        let (local, curv) = if to_large { (kappa / (m * rk), -1.0) } else { (-kappa / (m * rk), 1.0) };
        triplets.push((k, k, local));
        for (nb, dir) in [(k as isize - 1, -1.0), (k as isize + 1, 1.0)] {
            // radii[nb + 1] is the node radius, or a boundary radius for nb = −1, n
            let r_nb = radii[(nb + 1) as usize];
            let rr = match route {
                Route::Direct => r_nb,
                Route::Hermitian => (r_nb * rk).sqrt(),
            };
            let coef = -0.5 * eta + c * dir / w[k] + curv * c * kappa / (2.0 * rr);
            if nb < 0 {
                // eliminated unknown at r_min, tied to unknown 0 by the closure
                triplets.push((k, 0, coef * src.closure_ratio()));
            } else if (nb as usize) < n {
                triplets.push((k, nb as usize, coef));
            }
        }
    }
    Csr::from_triplets(n, n, &triplets)
}

fn w_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| w * x * y).sum()
}

fn w_norm(a: &[f64], w: &[f64]) -> f64 {
    w_dot(a, a, w).sqrt()
}

fn max_eigen_sqrt(gram: &[Vec<f64>]) -> f64 {
    crate::dense::symmetric_eigenvalues(gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionTrial {
    pub eta: f64,
    #[serde(serialize_with = "f17")]
    pub residual: f64,
    #[serde(serialize_with = "f17")]
    pub refined_residual: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionReport {
    pub eta: f64,
    pub trials: Vec<ConventionTrial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectedResiduals {
    pub n_points: usize,
    #[serde(serialize_with = "f17")]
    pub commutator_spectral: f64,
    #[serde(serialize_with = "f17")]
    pub commutator_max: f64,
    #[serde(serialize_with = "f17")]
    pub a_squared_spectral: f64,
    #[serde(serialize_with = "f17")]
    pub a_squared_max: f64,
    /// `‖(A_direct − A_hermitian)V‖`
    #[serde(serialize_with = "f17")]
    pub route_difference: f64,
    /// `‖VᵀWAV − (VᵀWAV)ᵀ‖`
    #[serde(serialize_with = "f17")]
    pub hermiticity_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeCheck {
    pub exponent: f64,
    #[serde(serialize_with = "f17")]
    pub f_rows_rel_residual: f64,
    #[serde(serialize_with = "f17")]
    pub g_rows_rel_error: f64,
}

/// Supercharges of one block. `Q₂ = i·q2_imag` is stored through its real
/// factor so that everything stays real.
#[derive(Debug, Clone, PartialEq)]
pub struct SusyCharges {
    pub q1: Csr,
    pub q2_imag: Csr,
    pub q_plus: Csr,
    pub q_minus: Csr,
    pub h_susy: Csr,
}

/// `Q₁ = A`, `Q₂ = iAK/|κ|`, `Q± = ½(1 ± K/|κ|)A`, `𝓗 = {Q₊, Q₋}`.
pub fn build_supercharges(block: &SusyBlock) -> Result<SusyCharges> {
    let a = block.a_block()?;
    let grading: Vec<f64> = block.k_diag.iter().map(|k| k / block.abs_kappa).collect();
    let pa = a.scale_rows(&grading);
    let q_plus = a.add(&pa).scale(0.5);
    let q_minus = a.sub(&pa).scale(0.5);
    let h_susy = q_plus.matmul(&q_minus).add(&q_minus.matmul(&q_plus));
    Ok(SusyCharges { q1: a.clone(), q2_imag: a.scale_cols(&grading), q_plus, q_minus, h_susy })
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub norm_type: String,
    #[serde(serialize_with = "f17")]
    pub residual: f64,
    #[serde(serialize_with = "f17_opt")]
    pub refinement_order: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", serialize_with = "f17_vec")]
    pub residuals_by_grid: Vec<f64>,
}

impl IdentityResult {
    fn exact(name: &str, m: &Csr) -> Self {
        let residual = m.max_abs();
        Self {
            name: name.into(),
            norm_type: "max_abs".into(),
            residual,
            refinement_order: None,
            pass: residual == 0.0,
            residuals_by_grid: Vec::new(),
        }
    }
}

/// Tolerance-free matrix identities of a block with A built.
pub fn exact_identities(block: &SusyBlock, charges: &SusyCharges) -> Result<Vec<IdentityResult>> {
    let a = block.a_block()?;
    let anti_ak = a.scale_cols(&block.k_diag).add(&a.scale_rows(&block.k_diag));
    let q1q2 = charges.q1.matmul(&charges.q2_imag).add(&charges.q2_imag.matmul(&charges.q1));
    let a2 = a.matmul(a);
    Ok(vec![
        IdentityResult::exact("{A,K} = 0", &anti_ak),
        IdentityResult::exact("Q+^2 = 0", &charges.q_plus.matmul(&charges.q_plus)),
        IdentityResult::exact("Q-^2 = 0", &charges.q_minus.matmul(&charges.q_minus)),
        IdentityResult::exact("{Q1,Q2} = 0", &q1q2),
        IdentityResult::exact("H_susy - A^2 = 0", &charges.h_susy.sub(&a2)),
        IdentityResult::exact("Q+ + Q- - Q1 = 0", &charges.q_plus.add(&charges.q_minus).sub(&charges.q1)),
    ])
}

/// Thresholds for the refinement-ordered identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Smallest acceptable drop of a residual when the grid doubles.
    pub min_ratio_per_doubling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { min_ratio_per_doubling: 3.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "D")]
    pub dim: u32,
    #[serde(serialize_with = "f17")]
    pub z_alpha: f64,
    pub abs_kappa: f64,
    pub n_points: Vec<usize>,
    pub identities: Vec<IdentityResult>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|i| i.pass)
    }

    pub fn first_failure(&self) -> Option<&IdentityResult> {
        self.identities.iter().find(|i| !i.pass)
    }
}

fn refinement_result(name: &str, norm_type: &str, n_points: &[usize], values: Vec<f64>, tol: &Tolerances) -> IdentityResult {
    let pass = n_points.windows(2).zip(values.windows(2)).all(|(n, v)| {
        let doublings = (n[1] as f64 / n[0] as f64).log2();
        v[0] / v[1] >= tol.min_ratio_per_doubling.powf(doublings)
    });
    IdentityResult {
        name: name.into(),
        norm_type: norm_type.into(),
        residual: *values.last().unwrap_or(&f64::NAN),
        refinement_order: Some(fitted_order(n_points, &values)),
        pass,
        residuals_by_grid: values,
    }
}

fn check_grid_family(n_points: &[usize]) -> Result<()> {
    if n_points.len() < 2 || n_points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("need at least two increasing grid sizes".into()));
    }
    Ok(())
}

/// Build a block at each grid size with A selected by the kernel contract.
pub fn refinement_family(params: &PhysParams, abs_kappa: f64, n_points: &[usize]) -> Result<Vec<SusyBlock>> {
    check_grid_family(n_points)?;
    n_points
        .iter()
        .map(|&n| {
            let mut b = SusyBlock::with_points(params, abs_kappa, n)?;
            b.build_a()?;
            Ok(b)
        })
        .collect()
}

/// `[H, A]` and the A² identity under refinement, projected on the bound
/// states, plus the agreement of the two assembly routes and the symmetry of
/// A in the quadrature metric.
pub fn verify_a_squared(blocks: &[SusyBlock], tol: &Tolerances) -> Result<Vec<IdentityResult>> {
    let n_points: Vec<usize> = blocks.iter().map(|b| b.grid().n_points).collect();
    check_grid_family(&n_points)?;
    let res: Vec<ProjectedResiduals> = blocks.iter().map(SusyBlock::projected_residuals).collect::<Result<_>>()?;
    let col = |f: fn(&ProjectedResiduals) -> f64| res.iter().map(f).collect::<Vec<_>>();
    Ok(vec![
        refinement_result("A^2 = 1 + (K/Za)^2 (H^2/m^2 - 1)", "projected_spectral", &n_points, col(|r| r.a_squared_spectral), tol),
        refinement_result("A^2 = 1 + (K/Za)^2 (H^2/m^2 - 1)", "projected_max", &n_points, col(|r| r.a_squared_max), tol),
        refinement_result("[H,A] = 0", "projected_spectral", &n_points, col(|r| r.commutator_spectral), tol),
        refinement_result("[H,A] = 0", "projected_max", &n_points, col(|r| r.commutator_max), tol),
        refinement_result("A direct = A hermitian", "projected_spectral", &n_points, col(|r| r.route_difference), tol),
        refinement_result("A symmetric in W", "projected_spectral", &n_points, col(|r| r.hermiticity_defect), tol),
    ])
}

/// Kernel annihilation `‖A ψ₀‖/‖ψ₀‖` and the Rayleigh quotient of H on ψ₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelStudy {
    pub n_points: Vec<usize>,
    #[serde(serialize_with = "f17_vec")]
    pub residuals: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub fitted_order: f64,
    #[serde(serialize_with = "f17_vec")]
    pub rayleigh: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub ground_energy: f64,
    pub eta: f64,
}

pub fn kernel_study(blocks: &[SusyBlock]) -> Result<KernelStudy> {
    let first = blocks.first().ok_or_else(|| Error::InvalidInput("no blocks".into()))?;
    let n_points: Vec<usize> = blocks.iter().map(|b| b.grid().n_points).collect();
    check_grid_family(&n_points)?;
    let residuals: Vec<f64> = blocks.iter().map(SusyBlock::kernel_residual).collect::<Result<_>>()?;
    let rayleigh: Vec<f64> = blocks.iter().map(SusyBlock::kernel_rayleigh).collect::<Result<_>>()?;
    Ok(KernelStudy {
        fitted_order: fitted_order(&n_points, &residuals),
        n_points,
        residuals,
        rayleigh,
        ground_energy: ground_energy(&first.params, first.abs_kappa)?,
        eta: first.eta.unwrap_or(f64::NAN),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMatch {
    pub plus_index: usize,
    pub minus_index: usize,
    #[serde(serialize_with = "f17")]
    pub e_plus: f64,
    #[serde(serialize_with = "f17")]
    pub e_minus: f64,
    #[serde(serialize_with = "f17")]
    pub gap: f64,
    /// Rayleigh quotient of H₋ on Q₋ applied to the + state, E/m.
    #[serde(serialize_with = "f17")]
    pub q_minus_rayleigh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    pub abs_kappa: f64,
    #[serde(serialize_with = "f17")]
    pub tolerance: f64,
    #[serde(serialize_with = "f17_vec")]
    pub plus_levels: Vec<f64>,
    #[serde(serialize_with = "f17_vec")]
    pub minus_levels: Vec<f64>,
    pub pairs: Vec<PairMatch>,
    pub unpaired_plus: Vec<usize>,
    pub unpaired_minus: Vec<usize>,
    /// Unpaired + states minus unpaired − states.
    pub witten_index: i64,
    /// `⟨ψ, 𝓗 ψ⟩` for the lowest + state; tends to 0 under refinement.
    #[serde(serialize_with = "f17")]
    pub zero_mode_quotient: f64,
}

impl PairingReport {
    /// One unpaired state, the lowest + level, every gap within tolerance.
    pub fn is_supersymmetric(&self) -> bool {
        self.witten_index == 1
            && self.unpaired_plus == [0]
            && self.unpaired_minus.is_empty()
            && self.pairs.iter().all(|p| p.gap < self.tolerance)
    }

    pub fn max_gap(&self) -> f64 {
        self.pairs.iter().fold(0.0, |m, p| m.max(p.gap))
    }
}

/// Default gap tolerance on E/m for an 800-point grid.
pub const DEFAULT_PAIRING_TOL: f64 = 1e-5;

/// Match the `count` lowest + levels with the `count − 1` lowest − levels.
pub fn spectral_pairing(block: &SusyBlock, count: usize, tol: f64) -> Result<PairingReport> {
    if count < 1 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let plus = solve_spectrum(&block.plus, count)?;
    let minus = if count > 1 { solve_spectrum(&block.minus, count - 1)?.levels } else { Vec::new() };
    let plus = plus.levels;
    let mut taken = vec![false; plus.len()];
    let mut pairs = Vec::new();
    let mut unpaired_minus = Vec::new();
    let x = block.transfer_plus_to_minus(block.eta.unwrap_or(-1.0));

    for (j, lm) in minus.iter().enumerate() {
        let close: Vec<usize> = (0..plus.len()).filter(|&i| (plus[i].energy - lm.energy).abs() <= tol).collect();
        match close.as_slice() {
            [] => unpaired_minus.push(j),
            [i] if !taken[*i] => {
                taken[*i] = true;
                let image = x.matvec(&plus[*i].vector);
                let rq = block.minus.pencil().rayleigh_quotient(&image) / block.params.m;
                pairs.push(PairMatch {
                    plus_index: *i,
                    minus_index: j,
                    e_plus: plus[*i].energy,
                    e_minus: lm.energy,
                    gap: (plus[*i].energy - lm.energy).abs(),
                    q_minus_rayleigh: rq,
                });
            }
            _ => {
                return Err(Error::Pairing(format!(
                    "minus level {j} (E = {:.10}) matches + levels {close:?} within {tol:.1e}",
                    lm.energy
                )))
            }
        }
    }
    let unpaired_plus: Vec<usize> = (0..plus.len()).filter(|&i| !taken[i]).collect();

    let zero_mode_quotient = match plus.first() {
        Some(ground) => {
            let image = x.matvec(&ground.vector);
            w_dot(&image, &image, block.minus.weights())
        }
        None => f64::NAN,
    };

    Ok(PairingReport {
        abs_kappa: block.abs_kappa,
        tolerance: tol,
        witten_index: unpaired_plus.len() as i64 - unpaired_minus.len() as i64,
        plus_levels: plus.iter().map(|l| l.energy).collect(),
        minus_levels: minus.iter().map(|l| l.energy).collect(),
        pairs,
        unpaired_plus,
        unpaired_minus,
        zero_mode_quotient,
    })
}

/// The whole suite for one |κ| block on the default grids: exact identities
/// on the finest grid, refinement-ordered residuals, kernel annihilation and
/// spectral pairing of three + levels.
pub fn verify_block(params: &PhysParams, abs_kappa: f64, n_points: &[usize], tol: &Tolerances) -> Result<VerificationReport> {
    check_grid_family(n_points)?;
    let base = RadialGrid::for_sector(params, abs_kappa, n_points[0], 2)?;
    let grids: Vec<RadialGrid> = n_points.iter().map(|&n| base.with_points(n)).collect::<Result<_>>()?;
    verify_on_grids(params, abs_kappa, &grids, 3, tol)
}

/// [`verify_block`] on caller-supplied grids, pairing `count` + levels.
pub fn verify_on_grids(
    params: &PhysParams,
    abs_kappa: f64,
    grids: &[RadialGrid],
    count: usize,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let n_points: Vec<usize> = grids.iter().map(|g| g.n_points).collect();
    check_grid_family(&n_points)?;
    let blocks: Vec<SusyBlock> = grids
        .iter()
        .map(|g| {
            let mut b = SusyBlock::new(params, abs_kappa, g)?;
            b.build_a()?;
            Ok(b)
        })
        .collect::<Result<_>>()?;
    let finest = blocks.last().expect("family is non-empty");
    let charges = build_supercharges(finest)?;
    let mut identities = exact_identities(finest, &charges)?;
    identities.extend(verify_a_squared(&blocks, tol)?);

    let kernel = kernel_study(&blocks)?;
    identities.push(IdentityResult {
        name: "A psi0 = 0".into(),
        norm_type: "relative_l2".into(),
        residual: *kernel.residuals.last().unwrap_or(&f64::NAN),
        refinement_order: Some(kernel.fitted_order),
        pass: kernel.fitted_order >= KERNEL_MIN_ORDER,
        residuals_by_grid: kernel.residuals.clone(),
    });

    let pairing = spectral_pairing(finest, count, DEFAULT_PAIRING_TOL)?;
    identities.push(IdentityResult {
        name: "Witten index = 1, pair gaps".into(),
        norm_type: "max_gap".into(),
        residual: pairing.max_gap(),
        refinement_order: None,
        pass: pairing.is_supersymmetric(),
        residuals_by_grid: Vec::new(),
    });

    Ok(VerificationReport { dim: params.dim, z_alpha: params.z_alpha, abs_kappa, n_points, identities })
}

/// Fitted order the kernel residual must reach. A second-order scheme
/// approaches 2 from below.
pub const KERNEL_MIN_ORDER: f64 = 1.9;

#[cfg(test)]
mod tests {
    use super::*;

    fn block(dim: u32, za: f64, ak: f64, n: usize) -> SusyBlock {
        let p = PhysParams::new(dim, za).unwrap();
        let mut b = SusyBlock::with_points(&p, ak, n).unwrap();
        b.build_a().unwrap();
        b
    }

    #[test]
    fn convention_selects_negative_eta() {
        let p = PhysParams::new(3, 0.5).unwrap();
        let mut b = SusyBlock::with_points(&p, 1.0, 200).unwrap();
        let rep = b.build_a().unwrap();
        assert_eq!(rep.eta, -1.0);
        let bad = rep.trials.iter().find(|t| t.eta == 1.0).unwrap();
        assert!(!bad.accepted && bad.refined_residual > 0.1);
    }

    #[test]
    fn exact_identities_hold() {
        let b = block(3, 0.5, 1.0, 100);
        let q = build_supercharges(&b).unwrap();
        for id in exact_identities(&b, &q).unwrap() {
            assert!(id.pass, "{} = {}", id.name, id.residual);
        }
    }

    #[test]
    fn a_block_has_zero_diagonal_blocks() {
        let b = block(4, 0.6, 1.5, 60);
        let a = b.a_block().unwrap();
        let n = b.sector_len();
        for i in 0..2 * n {
            for (j, _) in a.row(i) {
                assert_ne!(i < n, j < n);
            }
        }
    }

    #[test]
    fn kernel_is_annihilated_and_reproduces_ground_energy() {
        let b = block(3, 0.5, 1.0, 400);
        assert!(b.kernel_residual().unwrap() < 2e-3);
        assert!((b.kernel_rayleigh().unwrap() - 0.866_025_403_784_438_6).abs() < 5e-5);
    }

    #[test]
    fn eliminating_g_gives_the_kernel_ode() {
        let coarse = block(3, 0.5, 1.0, 200);
        let fine = block(3, 0.5, 1.0, 400);
        for a in [1.5, 2.5] {
            let c = coarse.ode_elimination_check(a).unwrap();
            let f = fine.ode_elimination_check(a).unwrap();
            assert!(f.g_rows_rel_error < 1e-3 && f.f_rows_rel_residual < 1e-3, "{f:?}");
            assert!(c.g_rows_rel_error / f.g_rows_rel_error > 3.0);
        }
    }

    #[test]
    fn pairing_on_coarse_grid() {
        let b = block(3, 0.5, 1.0, 400);
        let rep = spectral_pairing(&b, 3, 1e-4).unwrap();
        assert!(rep.is_supersymmetric(), "{rep:?}");
        assert!((rep.pairs[0].e_plus - 0.965_925_83).abs() < 1e-4);
        for p in &rep.pairs {
            assert!((p.q_minus_rayleigh - p.e_plus).abs() < 1e-3);
        }
        assert!(rep.zero_mode_quotient < 1e-4);
    }

    #[test]
    fn ambiguous_pairing_is_an_error() {
        let b = block(3, 0.5, 1.0, 100);
        assert!(matches!(spectral_pairing(&b, 3, 0.5), Err(Error::Pairing(_))));
    }

    #[test]
    fn flipped_convention_does_not_converge() {
        let p = PhysParams::new(3, 0.5).unwrap();
        let res: Vec<f64> = [100, 200]
            .iter()
            .map(|&n| {
                let mut b = SusyBlock::with_points(&p, 1.0, n).unwrap();
                b.build_a_with_eta(1.0);
                b.projected_residuals().unwrap().a_squared_spectral
            })
            .collect();
        assert!(res[1] > 0.1 && res[0] / res[1] < 1.5, "{res:?}");
    }

    #[test]
    fn missing_a_is_reported() {
        let p = PhysParams::new(3, 0.5).unwrap();
        let b = SusyBlock::with_points(&p, 1.0, 50).unwrap();
        assert!(build_supercharges(&b).is_err());
        assert!(b.kernel_residual().is_err());
    }
}
