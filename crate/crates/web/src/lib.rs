//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws SVG.

use serde::Serialize;
use susyh_core::analytic::{energy_from_n_prime, level_scheme_export};
use susyh_core::radial::{build_radial_hamiltonian, kappa_of, n_prime_of_level, solve_spectrum, PhysParams, RadialGrid, Sign};
use susyh_core::susy::{spectral_pairing, SusyBlock, DEFAULT_PAIRING_TOL};
use wasm_bindgen::prelude::*;

/// Points per curve sent to the page.
const PLOT_POINTS: usize = 300;
/// Larger grids freeze the tab.
const MAX_GRID_POINTS: usize = 2000;

#[derive(Serialize)]
struct Curve {
    r: Vec<f64>,
    large: Vec<f64>,
    small: Vec<f64>,
}

#[derive(Serialize)]
struct LevelOut {
    level_index: usize,
    n_prime: u32,
    energy: f64,
    analytic: f64,
    norm_weight_small: f64,
    curve: Curve,
}

#[derive(Serialize)]
struct SpectrumOut {
    kappa: f64,
    grid_points: usize,
    levels: Vec<LevelOut>,
    notice: Option<String>,
}

fn check_points(n: usize) -> Result<(), String> {
    if !(32..=MAX_GRID_POINTS).contains(&n) {
        return Err(format!("grid points must lie in 32..={MAX_GRID_POINTS}, got {n}"));
    }
    Ok(())
}

/// Thins interleaved node values to at most `PLOT_POINTS` per component.
fn thin(pairs: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let step = pairs.len().div_ceil(PLOT_POINTS).max(1);
    pairs.iter().step_by(step).map(|&(r, v)| (r, v)).unzip()
}

pub fn level_scheme_json(z_alpha: f64, d_min: u32, d_max: u32, n_max: u32) -> Result<String, String> {
    if d_min > d_max {
        return Err(format!("empty D range {d_min}:{d_max}"));
    }
    if n_max == 0 || n_max > 12 {
        return Err(format!("n_max must lie in 1..=12, got {n_max}"));
    }
    let dims: Vec<u32> = (d_min..=d_max).collect();
    let scheme = level_scheme_export(z_alpha, &dims, n_max).map_err(|e| e.to_string())?;
    serde_json::to_string(&scheme).map_err(|e| e.to_string())
}

pub fn radial_spectrum_json(dim: u32, z_alpha: f64, l: u32, sign: &str, levels: usize, grid_points: usize) -> Result<String, String> {
    check_points(grid_points)?;
    if levels == 0 || levels > 8 {
        return Err(format!("levels must lie in 1..=8, got {levels}"));
    }
    let run = || -> susyh_core::Result<SpectrumOut> {
        let params = PhysParams::new(dim, z_alpha)?;
        let sign: Sign = sign.parse()?;
        let sector = kappa_of(&params, l, sign)?;
        let top = n_prime_of_level(&sector, levels - 1);
        let grid = RadialGrid::for_sector(&params, sector.abs_kappa(), grid_points, top)?;
        let op = build_radial_hamiltonian(&params, &sector, &grid)?;
        let res = solve_spectrum(&op, levels)?;
        let mut out = Vec::new();
        for lvl in &res.levels {
            let n_prime = n_prime_of_level(&sector, lvl.level_index);
            let (large, small) = op.components(&lvl.vector);
            let (r, large) = thin(&large);
            let (_, small) = thin(&small);
            out.push(LevelOut {
                level_index: lvl.level_index,
                n_prime,
                energy: lvl.energy,
                analytic: energy_from_n_prime(z_alpha, sector.abs_kappa(), n_prime)?,
                norm_weight_small: lvl.norm_weight_small,
                curve: Curve { r, large, small },
            });
        }
        Ok(SpectrumOut { kappa: sector.kappa, grid_points, levels: out, notice: res.truncation_notice })
    };
    let out = run().map_err(|e| e.to_string())?;
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn pairing_json(dim: u32, z_alpha: f64, abs_kappa: f64, count: usize, grid_points: usize) -> Result<String, String> {
    check_points(grid_points)?;
    let params = PhysParams::new(dim, z_alpha).map_err(|e| e.to_string())?;
    let block = SusyBlock::with_points(&params, abs_kappa, grid_points).map_err(|e| e.to_string())?;
    let report = spectral_pairing(&block, count, DEFAULT_PAIRING_TOL).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct PairingOut<'a> {
        #[serde(flatten)]
        report: &'a susyh_core::susy::PairingReport,
        supersymmetric: bool,
        max_gap: f64,
    }
    serde_json::to_string(&PairingOut { supersymmetric: report.is_supersymmetric(), max_gap: report.max_gap(), report: &report })
        .map_err(|e| e.to_string())
}

/// Closed-form level scheme for D in `d_min..=d_max`.
#[wasm_bindgen(js_name = levelScheme)]
pub fn level_scheme(z_alpha: f64, d_min: u32, d_max: u32, n_max: u32) -> Result<String, JsError> {
    level_scheme_json(z_alpha, d_min, d_max, n_max).map_err(|e| JsError::new(&e))
}

/// Numerical bound states of one κ sector with their radial profiles.
#[wasm_bindgen(js_name = radialSpectrum)]
pub fn radial_spectrum(dim: u32, z_alpha: f64, l: u32, sign: &str, levels: usize, grid_points: usize) -> Result<String, JsError> {
    radial_spectrum_json(dim, z_alpha, l, sign, levels, grid_points).map_err(|e| JsError::new(&e))
}

/// Matches the κ = +|κ| and κ = −|κ| spectra level by level.
#[wasm_bindgen(js_name = pairing)]
pub fn pairing(dim: u32, z_alpha: f64, abs_kappa: f64, count: usize, grid_points: usize) -> Result<String, JsError> {
    pairing_json(dim, z_alpha, abs_kappa, count, grid_points).map_err(|e| JsError::new(&e))
}
