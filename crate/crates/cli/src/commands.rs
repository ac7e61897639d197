use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use susyh_core::analytic::{energy_from_n_prime, ground_energy, kernel_wavefunction, level_scheme_export, LevelSchemeRow};
use susyh_core::clifford::{build_gamma_rep_capped, verify_clifford, verify_so_algebra, CliffordReport, DEFAULT_SPINOR_CAP};
use susyh_core::export::{f17, f17_vec, fmt17, CsvRow};
use susyh_core::radial::{
    build_radial_hamiltonian, convergence_study, kappa_of, n_prime_of_level, solve_spectrum, ConvergenceReport, PhysParams,
    RadialGrid, Sign, SpectrumRecord,
};
use susyh_core::susy::{kernel_study, verify_on_grids, SusyBlock, Tolerances, VerificationReport, KERNEL_MIN_ORDER};

use crate::args::{ConvergenceArgs, GridArgs, KernelArgs, LevelsArgs, SpectrumArgs, VerifyArgs};

/// Distance of the kernel Rayleigh quotient from the closed-form ground energy.
pub const KERNEL_RAYLEIGH_TOL: f64 = 1e-5;
/// Smallest fitted eigenvalue order accepted by `convergence`.
pub const MIN_EIGEN_ORDER: f64 = 1.8;

/// A command's result in every output format.
pub struct Report {
    pub json: String,
    pub csv: Vec<Vec<String>>,
    pub text: String,
    /// First failed check, if any.
    pub failure: Option<String>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn sector_grid(params: &PhysParams, abs_kappa: f64, n: usize, n_prime_top: u32, grid: &GridArgs) -> Result<RadialGrid> {
    let g = RadialGrid::for_sector(params, abs_kappa, n, n_prime_top)?;
    Ok(match grid.r_max {
        Some(r_max) => RadialGrid::new(g.scheme, g.r_min, r_max, n)?,
        None => g,
    })
}

/// Grid sizes n/4, n/2, n.
fn family(grid: &GridArgs) -> Result<Vec<usize>> {
    let n = grid.grid_points;
    if n < 32 {
        bail!("--grid-points {n} is too small for a refinement family (need at least 32)");
    }
    Ok(vec![n / 4, n / 2, n])
}

fn params_for(dim: u32, za: f64) -> Result<PhysParams> {
    PhysParams::new(dim, za).with_context(|| format!("D = {dim}"))
}

#[derive(Serialize)]
struct SpectrumRow {
    #[serde(flatten)]
    record: SpectrumRecord,
    n_prime: u32,
    #[serde(rename = "E_analytic", serialize_with = "f17")]
    e_analytic: f64,
    #[serde(serialize_with = "f17")]
    abs_diff: f64,
    #[serde(serialize_with = "f17")]
    rel_diff: f64,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report> {
    if a.levels == 0 {
        bail!("--levels must be at least 1");
    }
    let za = a.common.zalpha;
    let per_dim: Vec<(Vec<SpectrumRow>, Option<String>)> = a
        .common
        .dim
        .dims()
        .par_iter()
        .map(|&d| -> Result<_> {
            let params = params_for(d, za)?;
            let sector = kappa_of(&params, a.l, a.sign)?;
            let top = n_prime_of_level(&sector, a.levels - 1);
            let grid = sector_grid(&params, sector.abs_kappa(), a.grid.grid_points, top, &a.grid)?;
            let op = build_radial_hamiltonian(&params, &sector, &grid)?;
            let res = solve_spectrum(&op, a.levels)?;
            let rows = res
                .levels
                .iter()
                .map(|lvl| -> Result<SpectrumRow> {
                    let n_prime = n_prime_of_level(&sector, lvl.level_index);
                    let exact = energy_from_n_prime(za, sector.abs_kappa(), n_prime)?;
                    Ok(SpectrumRow {
                        record: SpectrumRecord::from_level(&op, lvl),
                        n_prime,
                        e_analytic: exact,
                        abs_diff: (lvl.energy - exact).abs(),
                        rel_diff: ((lvl.energy - exact) / exact).abs(),
                    })
                })
                .collect::<Result<_>>()?;
            Ok((rows, res.truncation_notice.map(|n| format!("D = {d}: {n}"))))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut notices = Vec::new();
    for (r, n) in per_dim {
        rows.extend(r);
        notices.extend(n);
    }

    let mut header: Vec<String> = SpectrumRecord::header().into_iter().map(String::from).collect();
    header.extend(["n_prime", "E_analytic", "abs_diff", "rel_diff"].map(String::from));
    let mut csv = vec![header];
    for r in &rows {
        let mut f = r.record.fields();
        f.extend([r.n_prime.to_string(), fmt17(r.e_analytic), fmt17(r.abs_diff), fmt17(r.rel_diff)]);
        csv.push(f);
    }

    let mut text = format!("{:>3} {:>3} {:>5} {:>6} {:>3} {:>18} {:>18} {:>10}\n", "D", "l", "kappa", "level", "n'", "E/m numeric", "E/m analytic", "rel diff");
    for r in &rows {
        let rec = &r.record;
        writeln!(
            text,
            "{:>3} {:>3} {:>5} {:>6} {:>3} {:>18.12} {:>18.12} {:>10.2e}",
            rec.dim, rec.l, rec.kappa, rec.level_index, r.n_prime, rec.e_over_m, r.e_analytic, r.rel_diff
        )?;
    }
    for n in &notices {
        writeln!(text, "note: {n}")?;
    }
    Ok(Report { json: to_json(&rows)?, csv, text, failure: None })
}

#[derive(Serialize)]
struct CliffordEntry {
    #[serde(flatten)]
    report: CliffordReport,
    so_algebra: bool,
}

#[derive(Serialize)]
struct VerifyOutput {
    clifford: Vec<CliffordEntry>,
    blocks: Vec<VerificationReport>,
    pass: bool,
}

fn default_kappas(params: &PhysParams) -> Vec<f64> {
    let k0 = params.min_abs_kappa();
    vec![k0, k0 + 1.0]
}

pub fn verify(a: &VerifyArgs) -> Result<Report> {
    let dims = a.common.dim.dims();
    let clifford: Vec<CliffordEntry> = dims
        .par_iter()
        .map(|&d| -> Result<_> {
            let rep = build_gamma_rep_capped(d, DEFAULT_SPINOR_CAP)?;
            Ok(CliffordEntry { so_algebra: verify_so_algebra(&rep)?, report: verify_clifford(&rep) })
        })
        .collect::<Result<_>>()?;

    let blocks: Vec<VerificationReport> = if a.clifford_only {
        Vec::new()
    } else {
        let n_points = family(&a.grid)?;
        let jobs: Vec<(PhysParams, f64)> = dims
            .iter()
            .map(|&d| {
                let p = params_for(d, a.common.zalpha)?;
                let ks = if a.abs_kappa.is_empty() { default_kappas(&p) } else { a.abs_kappa.clone() };
                Ok(ks.into_iter().map(move |k| (p, k)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        jobs.par_iter()
            .map(|(p, k)| -> Result<_> {
                let grids: Vec<RadialGrid> = n_points
                    .iter()
                    .map(|&n| sector_grid(p, *k, n, a.levels.saturating_sub(1) as u32, &a.grid))
                    .collect::<Result<_>>()?;
                verify_on_grids(p, *k, &grids, a.levels, &Tolerances::default())
                    .with_context(|| format!("D = {}, |kappa| = {k}", p.dim))
            })
            .collect::<Result<_>>()?
    };

    let mut failure = None;
    for c in &clifford {
        if let Some(f) = c.report.failures().next() {
            failure.get_or_insert_with(|| format!("D = {}: {}", c.report.dim, f.name));
        } else if !c.so_algebra {
            failure.get_or_insert_with(|| format!("D = {}: so(D) commutation relations", c.report.dim));
        }
    }
    for b in &blocks {
        if let Some(f) = b.first_failure() {
            failure.get_or_insert_with(|| {
                format!("D = {}, |kappa| = {}: {} ({}), residual {}", b.dim, b.abs_kappa, f.name, f.norm_type, fmt17(f.residual))
            });
        }
    }

    let mut csv = vec![["D", "abs_kappa", "name", "norm_type", "residual", "refinement_order", "pass"].map(String::from).to_vec()];
    let mut text = String::new();
    for c in &clifford {
        let r = &c.report;
        writeln!(text, "D = {} clifford (spinor dim {}): {}", r.dim, r.spinor_dim, if r.all_pass() && c.so_algebra { "pass" } else { "FAIL" })?;
        for chk in &r.checks {
            csv.push(vec![r.dim.to_string(), String::new(), chk.name.clone(), "exact".into(), String::new(), String::new(), chk.pass.to_string()]);
        }
        csv.push(vec![r.dim.to_string(), String::new(), "so(D) algebra".into(), "exact".into(), String::new(), String::new(), c.so_algebra.to_string()]);
    }
    for b in &blocks {
        writeln!(text, "D = {} |kappa| = {} grids {:?}", b.dim, b.abs_kappa, b.n_points)?;
        for id in &b.identities {
            let order = id.refinement_order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
            writeln!(
                text,
                "  {:<4} {:<36} {:<20} {:>11.3e}  order {order}",
                if id.pass { "ok" } else { "FAIL" },
                id.name,
                id.norm_type,
                id.residual
            )?;
            csv.push(vec![
                b.dim.to_string(),
                fmt17(b.abs_kappa),
                id.name.clone(),
                id.norm_type.clone(),
                fmt17(id.residual),
                id.refinement_order.map(fmt17).unwrap_or_default(),
                id.pass.to_string(),
            ]);
        }
    }
    let out = VerifyOutput { pass: failure.is_none(), clifford, blocks };
    Ok(Report { json: to_json(&out)?, csv, text, failure })
}

#[derive(Serialize)]
struct KernelRow {
    #[serde(rename = "D")]
    dim: u32,
    #[serde(serialize_with = "f17")]
    z_alpha: f64,
    #[serde(serialize_with = "f17")]
    kappa: f64,
    #[serde(serialize_with = "f17")]
    s: f64,
    #[serde(serialize_with = "f17")]
    ratio: f64,
    #[serde(serialize_with = "f17")]
    norm_weight_small: f64,
    #[serde(serialize_with = "f17")]
    truncated_fraction: f64,
    #[serde(serialize_with = "f17")]
    inner_fraction: f64,
    #[serde(rename = "E0_over_m", serialize_with = "f17")]
    ground_energy: f64,
    #[serde(serialize_with = "f17")]
    rayleigh: f64,
    n_points: Vec<usize>,
    #[serde(serialize_with = "f17_vec")]
    residuals: Vec<f64>,
    #[serde(serialize_with = "f17")]
    fitted_order: f64,
    eta: f64,
    pass: bool,
}

pub fn kernel(a: &KernelArgs) -> Result<Report> {
    let n_points = family(&a.grid)?;
    let rows: Vec<KernelRow> = a
        .common
        .dim
        .dims()
        .par_iter()
        .map(|&d| -> Result<_> {
            let params = params_for(d, a.common.zalpha)?;
            let sector = kappa_of(&params, a.l, Sign::Plus)?;
            let blocks: Vec<SusyBlock> = n_points
                .iter()
                .map(|&n| -> Result<_> {
                    let grid = sector_grid(&params, sector.abs_kappa(), n, 2, &a.grid)?;
                    let mut b = SusyBlock::new(&params, sector.abs_kappa(), &grid)?;
                    b.build_a()?;
                    Ok(b)
                })
                .collect::<Result<_>>()?;
            let study = kernel_study(&blocks)?;
            let finest = blocks.last().expect("three grids");
            let doublet = kernel_wavefunction(&params, &sector, finest.grid())?;
            let rayleigh = *study.rayleigh.last().expect("three grids");
            let e0 = ground_energy(&params, sector.kappa)?;
            Ok(KernelRow {
                dim: d,
                z_alpha: params.z_alpha,
                kappa: sector.kappa,
                s: sector.s,
                ratio: doublet.ratio,
                norm_weight_small: doublet.norm_weight_small,
                truncated_fraction: doublet.truncated_fraction,
                inner_fraction: doublet.inner_fraction,
                ground_energy: e0,
                rayleigh,
                pass: study.fitted_order >= KERNEL_MIN_ORDER && (rayleigh - e0).abs() < KERNEL_RAYLEIGH_TOL,
                n_points: study.n_points,
                residuals: study.residuals,
                fitted_order: study.fitted_order,
                eta: study.eta,
            })
        })
        .collect::<Result<_>>()?;

    let failure = rows.iter().find(|r| !r.pass).map(|r| {
        format!(
            "D = {}: kernel residual order {:.3} (need {KERNEL_MIN_ORDER}), Rayleigh error {:.2e} (need {KERNEL_RAYLEIGH_TOL:.0e})",
            r.dim,
            r.fitted_order,
            (r.rayleigh - r.ground_energy).abs()
        )
    });
    let mut csv = vec![[
        "D", "z_alpha", "kappa", "s", "ratio", "norm_weight_small", "truncated_fraction", "inner_fraction", "E0_over_m", "rayleigh",
        "residual", "fitted_order", "pass",
    ]
    .map(String::from)
    .to_vec()];
    let mut text = String::new();
    for r in &rows {
        csv.push(vec![
            r.dim.to_string(),
            fmt17(r.z_alpha),
            fmt17(r.kappa),
            fmt17(r.s),
            fmt17(r.ratio),
            fmt17(r.norm_weight_small),
            fmt17(r.truncated_fraction),
            fmt17(r.inner_fraction),
            fmt17(r.ground_energy),
            fmt17(r.rayleigh),
            fmt17(*r.residuals.last().unwrap_or(&f64::NAN)),
            fmt17(r.fitted_order),
            r.pass.to_string(),
        ]);
        writeln!(
            text,
            "D = {} kappa = {}: G/F = {:.10}, small weight {:.3e}, cut {:.1e} (inner {:.1e})\n  E0/m = {:.12}, <H> = {:.12}\n  |A psi0|/|psi0| = {:?} order {:.3} (eta = {}) {}",
            r.dim,
            r.kappa,
            r.ratio,
            r.norm_weight_small,
            r.truncated_fraction,
            r.inner_fraction,
            r.ground_energy,
            r.rayleigh,
            r.residuals.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(),
            r.fitted_order,
            r.eta,
            if r.pass { "pass" } else { "FAIL" }
        )?;
    }
    Ok(Report { json: to_json(&rows)?, csv, text, failure })
}

/// Every (D, l) ladder has one unpaired bottom level and all other rungs
/// point at a partner with equal energy.
pub fn ladder_structure_failure(rows: &[LevelSchemeRow]) -> Option<String> {
    let mut bottoms: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for row in rows {
        let count = bottoms.entry((row.dim, row.l)).or_insert(0);
        if row.is_ladder_bottom {
            *count += 1;
            if row.partner_id.is_some() {
                return Some(format!("row {}: ladder bottom has a partner", row.id));
            }
            continue;
        }
        let Some(pid) = row.partner_id else {
            return Some(format!("row {} (D = {}, n = {}, kappa = {}) is unpaired", row.id, row.dim, row.n, row.kappa));
        };
        let Some(partner) = rows.iter().find(|p| p.id == pid) else {
            return Some(format!("row {}: partner {pid} missing", row.id));
        };
        if partner.e_over_m != row.e_over_m || partner.kappa != -row.kappa || partner.partner_id != Some(row.id) {
            return Some(format!("row {}: partner {pid} is not its mirror", row.id));
        }
    }
    bottoms
        .iter()
        .find(|(_, &c)| c != 1)
        .map(|((d, l), c)| format!("D = {d}, l = {l} ladder has {c} unpaired bottom levels"))
}

pub fn levels(a: &LevelsArgs) -> Result<Report> {
    if a.n_max == 0 {
        bail!("--n-max must be at least 1");
    }
    let scheme = level_scheme_export(a.common.zalpha, &a.common.dim.dims(), a.n_max)?;
    let mut csv = vec![LevelSchemeRow::header().into_iter().map(String::from).collect::<Vec<_>>()];
    csv.extend(scheme.rows.iter().map(CsvRow::fields));
    let mut text = String::new();
    let mut last = None;
    for r in &scheme.rows {
        if last != Some(r.dim) {
            writeln!(text, "D = {} (tanh D = {:.6})", r.dim, r.tanh_d)?;
            last = Some(r.dim);
        }
        let partner = r.partner_id.map(|p| format!("<-> {p}")).unwrap_or_else(|| "unpaired".into());
        writeln!(text, "  #{:<4} n = {} l = {} kappa = {:>5}  E/m = {:.12}  {partner}", r.id, r.n, r.l, r.kappa, r.e_over_m)?;
    }
    for (d, l) in &scheme.skipped {
        writeln!(text, "skipped D = {d}, l = {l}: subcritical at z_alpha = {}", a.common.zalpha)?;
    }
    let failure = ladder_structure_failure(&scheme.rows);
    Ok(Report { json: to_json(&scheme)?, csv, text, failure })
}

pub fn convergence(a: &ConvergenceArgs) -> Result<Report> {
    if a.levels == 0 {
        bail!("--levels must be at least 1");
    }
    let n_points = family(&a.grid)?;
    let reports: Vec<ConvergenceReport> = a
        .common
        .dim
        .dims()
        .par_iter()
        .map(|&d| -> Result<_> {
            let params = params_for(d, a.common.zalpha)?;
            let sector = kappa_of(&params, a.l, a.sign)?;
            let top = n_prime_of_level(&sector, a.levels - 1);
            let grids: Vec<RadialGrid> = n_points
                .iter()
                .map(|&n| sector_grid(&params, sector.abs_kappa(), n, top, &a.grid))
                .collect::<Result<_>>()?;
            Ok(convergence_study(&params, &sector, &grids, a.levels)?)
        })
        .collect::<Result<_>>()?;

    let mut failure = None;
    let mut csv = vec![["D", "kappa", "level_index", "n_prime", "n_points", "E_numeric", "E_analytic", "rel_error", "fitted_order"]
        .map(String::from)
        .to_vec()];
    let mut text = String::new();
    for rep in &reports {
        writeln!(text, "D = {} kappa = {} grids {:?}", rep.params.dim, rep.sector.kappa, rep.n_points)?;
        for lvl in &rep.levels {
            if lvl.fitted_order < MIN_EIGEN_ORDER {
                failure.get_or_insert_with(|| {
                    format!("D = {}, level {}: order {:.3} below {MIN_EIGEN_ORDER}", rep.params.dim, lvl.level_index, lvl.fitted_order)
                });
            }
            let errs: Vec<String> = lvl.rel_errors.iter().map(|e| format!("{e:.3e}")).collect();
            writeln!(text, "  level {} (n' = {}): rel errors {} order {:.3}", lvl.level_index, lvl.n_prime, errs.join(" "), lvl.fitted_order)?;
            for (i, n) in rep.n_points.iter().enumerate() {
                csv.push(vec![
                    rep.params.dim.to_string(),
                    fmt17(rep.sector.kappa),
                    lvl.level_index.to_string(),
                    lvl.n_prime.to_string(),
                    n.to_string(),
                    fmt17(lvl.numeric[i]),
                    fmt17(lvl.analytic),
                    fmt17(lvl.rel_errors[i]),
                    fmt17(lvl.fitted_order),
                ]);
            }
        }
    }
    Ok(Report { json: to_json(&reports)?, csv, text, failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use susyh_core::analytic::level_scheme_export;

    #[test]
    fn exported_scheme_has_clean_ladders() {
        let scheme = level_scheme_export(0.5, &[2, 3, 4, 5, 6, 7, 8, 9], 4).unwrap();
        assert_eq!(ladder_structure_failure(&scheme.rows), None);
    }

    #[test]
    fn broken_partner_link_is_caught() {
        let mut rows = level_scheme_export(0.5, &[3], 3).unwrap().rows;
        let i = rows.iter().position(|r| r.partner_id.is_some()).unwrap();
        rows[i].partner_id = None;
        assert!(ladder_structure_failure(&rows).is_some());
    }

    #[test]
    fn default_kappas_are_the_two_smallest() {
        let p = PhysParams::new(4, 0.6).unwrap();
        assert_eq!(default_kappas(&p), [1.5, 2.5]);
    }
}
