use serde::Serialize;

use super::{build_radial_hamiltonian, KappaSector, OperatorKind, PhysParams, RadialGrid, RadialOperator, Sign};
use crate::analytic::energy_from_n_prime;
use crate::dense::fitted_order;
use crate::error::{Error, Result};
use crate::export::{f17, f17_vec, fmt17, CsvRow};

/// Upper edge of the bound-state window, just below m. Keeps the exact
/// `E = m` zero mode of the free operator out of the count.
const WINDOW_TOP: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Reject states whose components alternate sign on more than
    /// `max_oscillation` of adjacent node pairs.
    pub filter_oscillation: bool,
    pub max_oscillation: f64,
    /// Re-solve on the doubled grid and keep only levels that reappear.
    pub confirm_by_doubling: bool,
    pub doubling_rel_tol: f64,
    /// Largest norm fraction allowed beyond `0.75·r_max`; states that leak
    /// further are box modes, not resolved bound states.
    pub max_tail_weight: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            filter_oscillation: true,
            max_oscillation: 0.5,
            confirm_by_doubling: true,
            doubling_rel_tol: 1e-3,
            max_tail_weight: 1e-6,
        }
    }
}

impl SolveOptions {
    /// Oscillation and confinement checks only.
    pub fn single_grid() -> Self {
        Self { confirm_by_doubling: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub level_index: usize,
    /// E/m
    #[serde(serialize_with = "f17")]
    pub energy: f64,
    /// Interleaved node values with `Σ w v² = 1`.
    #[serde(skip)]
    pub vector: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub norm_weight_small: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub levels: Vec<Eigenpair>,
    pub requested: usize,
    /// Set when fewer than `requested` levels were resolved.
    pub truncation_notice: Option<String>,
    /// Candidates removed by the filters, with the reason.
    pub rejected: Vec<(f64, String)>,
}

/// Largest fraction of sign alternations between adjacent significant
/// entries of either component.
pub fn oscillation_fraction(op: &RadialOperator, v: &[f64]) -> f64 {
    let (large, small) = op.components(v);
    [large, small]
        .iter()
        .map(|comp| {
            let peak = comp.iter().fold(0.0f64, |m, &(_, x)| m.max(x.abs()));
            let floor = 1e-6 * peak;
            let sig: Vec<f64> = comp.iter().map(|&(_, x)| x).filter(|x| x.abs() > floor).collect();
            if sig.len() < 2 {
                return 0.0;
            }
            let flips = sig.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
            flips as f64 / (sig.len() - 1) as f64
        })
        .fold(0.0, f64::max)
}

fn tail_weight(op: &RadialOperator, v: &[f64]) -> f64 {
    let cut = 0.75 * op.grid.r_max;
    let w = op.weights();
    (0..v.len()).filter(|&k| op.grid.node(k) > cut).map(|k| w[k] * v[k] * v[k]).sum()
}

pub fn solve_spectrum(op: &RadialOperator, count: usize) -> Result<SpectrumResult> {
    solve_spectrum_with(op, count, &SolveOptions::default())
}

/// The `count` lowest bound states with `0 < E/m < 1`, ascending.
pub fn solve_spectrum_with(op: &RadialOperator, count: usize, opts: &SolveOptions) -> Result<SpectrumResult> {
    if op.kind != OperatorKind::Hamiltonian {
        return Err(Error::InvalidInput(format!("solve_spectrum needs a Hamiltonian, got {:?}", op.kind)));
    }
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let m = op.params.m;
    let pencil = op.pencil();
    let candidates = pencil.eigenvalues_between(0.0, m * WINDOW_TOP, usize::MAX)?;

    let refined = if opts.confirm_by_doubling && !candidates.is_empty() {
        let fine = build_radial_hamiltonian(&op.params, &op.sector, &op.grid.refined()?)?;
        Some(fine.pencil().eigenvalues_between(0.0, m * WINDOW_TOP, usize::MAX)?)
    } else {
        None
    };

    let mut levels = Vec::new();
    let mut rejected = Vec::new();
    for &e in &candidates {
        if levels.len() == count {
            break;
        }
        let v = pencil.eigenvector(e)?;
        if opts.filter_oscillation {
            let osc = oscillation_fraction(op, &v);
            if osc > opts.max_oscillation {
                rejected.push((e, format!("oscillating on {:.0}% of node pairs", 100.0 * osc)));
                continue;
            }
        }
        let tail = tail_weight(op, &v);
        if tail > opts.max_tail_weight {
            rejected.push((e, format!("not confined: {tail:.1e} of the norm beyond 0.75 r_max")));
            continue;
        }
        if let Some(fine) = &refined {
            let found = fine.iter().any(|&f| (f - e).abs() <= opts.doubling_rel_tol * e.abs());
            if !found {
                rejected.push((e, "absent after grid doubling".into()));
                continue;
            }
        }
        levels.push(Eigenpair {
            level_index: levels.len(),
            energy: e / m,
            norm_weight_small: op.norm_weight_small(&v),
            vector: v,
        });
    }

    if levels.is_empty() && !candidates.is_empty() {
        let summary: Vec<String> = rejected.iter().map(|(e, why)| format!("E = {e:.8}: {why}")).collect();
        return Err(Error::SpuriousSpectrum(summary.join("; ")));
    }
    let truncation_notice = (levels.len() < count).then(|| {
        format!(
            "only {} of {count} requested bound states are resolved on this grid (r_max = {})",
            levels.len(),
            op.grid.r_max
        )
    });
    Ok(SpectrumResult { levels, requested: count, truncation_notice, rejected })
}

/// Radial quantum number of the i-th level of a sector: the κ < 0 ladder
/// starts one rung up.
pub fn n_prime_of_level(sector: &KappaSector, level_index: usize) -> u32 {
    level_index as u32 + u32::from(sector.sign == Sign::Minus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelConvergence {
    pub level_index: usize,
    pub n_prime: u32,
    #[serde(serialize_with = "f17")]
    pub analytic: f64,
    #[serde(serialize_with = "f17_vec")]
    pub numeric: Vec<f64>,
    /// |E_num − E_exact| / E_exact, floored at one ulp (never reported as 0).
    #[serde(serialize_with = "f17_vec")]
    pub rel_errors: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub fitted_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub params: PhysParams,
    pub sector: KappaSector,
    pub n_points: Vec<usize>,
    pub levels: Vec<LevelConvergence>,
}

/// Eigenvalue errors against the closed form over a family of grids, with
/// the least-squares order in `h ∝ 1/n_points`.
pub fn convergence_study(
    params: &PhysParams,
    sector: &KappaSector,
    grids: &[RadialGrid],
    count: usize,
) -> Result<ConvergenceReport> {
    if grids.len() < 2 {
        return Err(Error::InvalidInput("a convergence study needs at least two grids".into()));
    }
    if grids.windows(2).any(|w| w[1].n_points <= w[0].n_points) {
        return Err(Error::InvalidInput("grid family must have increasing n_points".into()));
    }
    let mut per_grid = Vec::with_capacity(grids.len());
    for grid in grids {
        let op = build_radial_hamiltonian(params, sector, grid)?;
        per_grid.push(solve_spectrum_with(&op, count, &SolveOptions::single_grid())?.levels);
    }
    let resolved = per_grid.iter().map(Vec::len).min().unwrap_or(0);
    let n_points: Vec<usize> = grids.iter().map(|g| g.n_points).collect();
    let mut levels = Vec::with_capacity(resolved);
    for i in 0..resolved {
        let n_prime = n_prime_of_level(sector, i);
        let analytic = energy_from_n_prime(params.z_alpha, sector.abs_kappa(), n_prime)?;
        let numeric: Vec<f64> = per_grid.iter().map(|lv| lv[i].energy).collect();
        let rel_errors: Vec<f64> = numeric
            .iter()
            .map(|e| ((e - analytic) / analytic).abs().max(f64::EPSILON))
            .collect();
        let fitted_order = fitted_order(&n_points, &rel_errors);
        levels.push(LevelConvergence { level_index: i, n_prime, analytic, numeric, rel_errors, fitted_order });
    }
    Ok(ConvergenceReport { params: *params, sector: *sector, n_points, levels })
}

/// One row of a spectrum export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRecord {
    #[serde(rename = "D")]
    pub dim: u32,
    #[serde(serialize_with = "f17")]
    pub z_alpha: f64,
    pub l: u32,
    pub sign: Sign,
    #[serde(serialize_with = "f17")]
    pub kappa: f64,
    pub level_index: usize,
    #[serde(rename = "E_over_m", serialize_with = "f17")]
    pub e_over_m: f64,
    #[serde(serialize_with = "f17")]
    pub norm_weight_small: f64,
}

impl SpectrumRecord {
    pub fn from_level(op: &RadialOperator, level: &Eigenpair) -> Self {
        Self {
            dim: op.params.dim,
            z_alpha: op.params.z_alpha,
            l: op.sector.l,
            sign: op.sector.sign,
            kappa: op.sector.kappa,
            level_index: level.level_index,
            e_over_m: level.energy,
            norm_weight_small: level.norm_weight_small,
        }
    }
}

impl CsvRow for SpectrumRecord {
    fn header() -> Vec<&'static str> {
        vec!["D", "z_alpha", "l", "sign", "kappa", "level_index", "E_over_m", "norm_weight_small"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.dim.to_string(),
            fmt17(self.z_alpha),
            self.l.to_string(),
            self.sign.to_string(),
            fmt17(self.kappa),
            self.level_index.to_string(),
            fmt17(self.e_over_m),
            fmt17(self.norm_weight_small),
        ]
    }
}
