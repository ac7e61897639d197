//! Closed-form spectrum, level bookkeeping and the kernel doublet.
//!
//! With `|κ| = l + (D−1)/2` and `s = √(κ² − (Zα)²)` the bound levels are
//!
//! ```text
//! E/m = [1 + (Zα)² / (n − |κ| + (D−3)/2 + s)²]^(−1/2),   n = l + 1 + n′
//! ```
//!
//! The denominator is `n′ + s`, so a ladder rung is reached from the one below
//! by `s → s + 1`, and the energy depends on κ only through |κ|.

use serde::Serialize;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};
use crate::export::{f17, CsvRow};
use crate::radial::{kappa_of, KappaSector, PhysParams, RadialGrid, Sign};

/// Default largest fraction of the analytic kernel norm a grid may cut off.
pub const DEFAULT_MAX_TRUNCATION: f64 = 1e-8;

fn check_subcritical(z_alpha: f64, kappa: f64) -> Result<f64> {
    let disc = kappa * kappa - z_alpha * z_alpha;
    if disc <= 0.0 {
        return Err(Error::Subcritical { kappa, z_alpha });
    }
    Ok(disc.sqrt())
}

/// Lowest level of a κ sector, `√(1 − (Zα/κ)²)`.
///
/// The equivalent form `[1 + (Zα/s)²]^(−1/2)` is evaluated too and must agree
/// to a few ulp.
pub fn ground_energy(params: &PhysParams, kappa: f64) -> Result<f64> {
    let s = check_subcritical(params.z_alpha, kappa)?;
    let za = params.z_alpha;
    let direct = (1.0 - (za / kappa).powi(2)).sqrt();
    let via_s = (1.0 + (za / s).powi(2)).powf(-0.5);
    let tol = 8.0 * f64::EPSILON * direct.max(via_s).max(f64::MIN_POSITIVE);
    if (direct - via_s).abs() > tol.max(1e-15 * (za / s).powi(2)) {
        return Err(Error::InvalidInput(format!(
            "ground-energy forms disagree: {direct} vs {via_s} (kappa = {kappa}, z_alpha = {za})"
        )));
    }
    Ok(direct)
}

/// Energy of radial quantum number `n′` in a sector of the given |κ|.
pub fn energy_from_n_prime(z_alpha: f64, abs_kappa: f64, n_prime: u32) -> Result<f64> {
    let s = check_subcritical(z_alpha, abs_kappa)?;
    Ok(energy_from_denominator(z_alpha, f64::from(n_prime) + s))
}

fn energy_from_denominator(z_alpha: f64, denom: f64) -> f64 {
    (1.0 + (z_alpha / denom).powi(2)).powf(-0.5)
}

/// Rung `n′ + 1` obtained from rung `n′` by the shift `s → s + 1`.
pub fn ladder_shifted_energy(z_alpha: f64, abs_kappa: f64, n_prime: u32) -> Result<f64> {
    let s = check_subcritical(z_alpha, abs_kappa)?;
    Ok(energy_from_denominator(z_alpha, f64::from(n_prime) + (s + 1.0)))
}

/// `(E − m)/m` without cancellation: `−q / (√(1+q)(1 + √(1+q)))` with
/// `q = (Zα/(n′+s))²`.
pub fn binding_from_n_prime(z_alpha: f64, abs_kappa: f64, n_prime: u32) -> Result<f64> {
    let s = check_subcritical(z_alpha, abs_kappa)?;
    let q = (z_alpha / (f64::from(n_prime) + s)).powi(2);
    let root = (1.0 + q).sqrt();
    Ok(-q / (root * (1.0 + root)))
}

/// Radial multiplet label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LevelLabel {
    pub n: u32,
    pub l: u32,
    pub sign: Sign,
    pub n_prime: u32,
}

impl LevelLabel {
    pub fn new(n: u32, l: u32, sign: Sign) -> Result<Self> {
        if n < l + 1 {
            return Err(Error::InvalidLabel(format!("n = {n} must be at least l + 1 = {}", l + 1)));
        }
        let n_prime = n - l - 1;
        if n_prime == 0 && sign == Sign::Minus {
            return Err(Error::InvalidLabel(format!(
                "n = l + 1 = {n} admits only kappa > 0 (the ladder bottom has no negative partner)"
            )));
        }
        Ok(Self { n, l, sign, n_prime })
    }

    pub fn is_ladder_bottom(&self) -> bool {
        self.n_prime == 0
    }

    /// The opposite-sign label with the same (n, l), if it exists.
    pub fn partner(&self) -> Option<LevelLabel> {
        LevelLabel::new(self.n, self.l, self.sign.flip()).ok().filter(|_| self.n_prime >= 1)
    }
}

fn abs_kappa_of(dim: u32, l: u32) -> f64 {
    f64::from(l) + f64::from(dim - 1) / 2.0
}

/// General level formula, evaluated literally as
/// `n − |κ| + (D−3)/2 + s` in the denominator.
pub fn energy(params: &PhysParams, label: &LevelLabel) -> Result<f64> {
    let relabel = LevelLabel::new(label.n, label.l, label.sign)?;
    if relabel != *label {
        return Err(Error::InvalidLabel(format!("inconsistent n_prime in {label:?}")));
    }
    let abs_kappa = abs_kappa_of(params.dim, label.l);
    let s = check_subcritical(params.z_alpha, abs_kappa)?;
    let shift = f64::from(label.n) - abs_kappa + (f64::from(params.dim) - 3.0) / 2.0;
    Ok(energy_from_denominator(params.z_alpha, shift + s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub label: LevelLabel,
    pub kappa: f64,
    pub s: f64,
    #[serde(rename = "E_over_m", serialize_with = "f17")]
    pub e_over_m: f64,
    pub partner: Option<LevelLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub params: PhysParams,
    pub rows: Vec<SpectrumRow>,
}

/// All labels with `n ≤ n_max`, sorted by (l, n) with the + sign first.
pub fn enumerate_levels(params: &PhysParams, n_max: u32) -> Result<SpectrumTable> {
    let mut rows = Vec::new();
    for l in 0..n_max {
        for n in l + 1..=n_max {
            for sign in [Sign::Plus, Sign::Minus] {
                let Ok(label) = LevelLabel::new(n, l, sign) else { continue };
                let sector = kappa_of(params, l, sign)?;
                rows.push(SpectrumRow {
                    label,
                    kappa: sector.kappa,
                    s: sector.s,
                    e_over_m: energy(params, &label)?,
                    partner: label.partner(),
                });
            }
        }
    }
    Ok(SpectrumTable { params: *params, rows })
}

/// Discretized zero mode of A on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelDoublet {
    /// Interleaved node values, normalized so that `Σ w v² = 1`.
    pub values: Vec<f64>,
    /// G/F = (κ − s)/Zα.
    pub ratio: f64,
    /// Closed form `c²/(1+c²)` with `c = (κ − s)/Zα`.
    pub norm_weight_small: f64,
    /// Analytic norm fraction beyond `r_max`.
    pub truncated_fraction: f64,
    /// Analytic norm fraction below `r_min`; carried by the regular-solution
    /// closure rather than by grid nodes.
    pub inner_fraction: f64,
}

/// The κ > 0 kernel doublet `F ∝ x^s e^{−x}`, `G = [(κ−s)/Zα]·F`,
/// `x = (Zα m/|κ|) r`.
///
/// The dimension-dependent powers of r in the full wavefunction factor out of
/// the (F, G) reduction, so odd and even D share this profile.
pub fn kernel_wavefunction(params: &PhysParams, sector: &KappaSector, grid: &RadialGrid) -> Result<KernelDoublet> {
    kernel_wavefunction_with(params, sector, grid, DEFAULT_MAX_TRUNCATION)
}

pub fn kernel_wavefunction_with(
    params: &PhysParams,
    sector: &KappaSector,
    grid: &RadialGrid,
    max_truncation: f64,
) -> Result<KernelDoublet> {
    if sector.sign != Sign::Plus {
        return Err(Error::InvalidInput("the kernel of A is normalizable only for kappa > 0".into()));
    }
    if params.z_alpha <= 0.0 {
        return Err(Error::InvalidInput("the kernel needs z_alpha > 0".into()));
    }
    let lambda = params.z_alpha * params.m / sector.abs_kappa();
    let s = sector.s;
    let c = sector.small_ratio(params.z_alpha);

    // ∫ x^{2s} e^{−2x} dx, as regularized incomplete gamma of order 2s+1
    let order = 2.0 * s + 1.0;
    let truncated_fraction = gamma_ur(order, 2.0 * lambda * grid.r_max);
    let inner_fraction = gamma_lr(order, 2.0 * lambda * grid.r_min);
    if truncated_fraction > max_truncation {
        return Err(Error::Normalization(format!(
            "r_max = {} cuts off {truncated_fraction:.3e} of the kernel norm (limit {max_truncation:.1e})",
            grid.r_max
        )));
    }

    let mut values: Vec<f64> = (0..grid.len())
        .map(|k| {
            let x = lambda * grid.node(k);
            let f = x.powf(s) * (-x).exp();
            if RadialGrid::is_primary(k) {
                f
            } else {
                c * f
            }
        })
        .collect();
    let norm = values.iter().zip(grid.weights()).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    values.iter_mut().for_each(|v| *v /= norm);

    Ok(KernelDoublet {
        values,
        ratio: c,
        norm_weight_small: c * c / (1.0 + c * c),
        truncated_fraction,
        inner_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonrelRow {
    pub n: u32,
    pub l: u32,
    #[serde(serialize_with = "f17")]
    pub z_alpha: f64,
    /// (E − m)/m from the relativistic formula.
    #[serde(serialize_with = "f17")]
    pub binding: f64,
    /// −(Zα)²/(2 n_eff²) with n_eff = n + (D−3)/2.
    #[serde(serialize_with = "f17")]
    pub nonrel: f64,
    #[serde(serialize_with = "f17")]
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonrelRatio {
    pub n: u32,
    pub l: u32,
    #[serde(serialize_with = "f17")]
    pub z_alpha_hi: f64,
    #[serde(serialize_with = "f17")]
    pub z_alpha_lo: f64,
    /// deviation(hi) / deviation(lo); (Zα)² scaling predicts (hi/lo)².
    #[serde(serialize_with = "f17")]
    pub ratio: f64,
    #[serde(serialize_with = "f17")]
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonrelReport {
    #[serde(rename = "D")]
    pub dim: u32,
    pub rows: Vec<NonrelRow>,
    pub ratios: Vec<NonrelRatio>,
}

impl NonrelReport {
    /// True when every consecutive deviation ratio is within `rel_tol` of its
    /// (Zα)² prediction.
    pub fn scales_quadratically(&self, rel_tol: f64) -> bool {
        !self.ratios.is_empty() && self.ratios.iter().all(|r| (r.ratio / r.expected - 1.0).abs() <= rel_tol)
    }
}

/// Compare `(E − m)/m` with the nonrelativistic levels for every (n, l) with
/// `n ≤ n_max`, across a sequence of couplings.
pub fn nonrel_limit_check(dim: u32, z_alphas: &[f64], n_max: u32) -> Result<NonrelReport> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("D = {dim} must be >= 2")));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for n in 1..=n_max {
        for l in 0..n {
            let abs_kappa = abs_kappa_of(dim, l);
            let n_eff = f64::from(n) + (f64::from(dim) - 3.0) / 2.0;
            let mut prev: Option<(f64, f64)> = None;
            for &za in z_alphas {
                if za >= stability(dim) {
                    return Err(Error::Stability { dim, z_alpha: za, bound: stability(dim) });
                }
                let binding = binding_from_n_prime(za, abs_kappa, n - l - 1)?;
                let nonrel = -za * za / (2.0 * n_eff * n_eff);
                let dev = ((binding - nonrel) / nonrel).abs();
                rows.push(NonrelRow { n, l, z_alpha: za, binding, nonrel, rel_deviation: dev });
                if let Some((za_prev, dev_prev)) = prev {
                    ratios.push(NonrelRatio {
                        n,
                        l,
                        z_alpha_hi: za_prev,
                        z_alpha_lo: za,
                        ratio: dev_prev / dev,
                        expected: (za_prev / za).powi(2),
                    });
                }
                prev = Some((za, dev));
            }
        }
    }
    Ok(NonrelReport { dim, rows, ratios })
}

fn stability(dim: u32) -> f64 {
    crate::radial::stability_bound(dim)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterdimPair {
    pub sign: Sign,
    #[serde(serialize_with = "f17")]
    pub e_upper: f64,
    #[serde(serialize_with = "f17")]
    pub e_lower: f64,
    #[serde(serialize_with = "f17")]
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterdimReport {
    #[serde(rename = "D")]
    pub dim: u32,
    pub l: u32,
    #[serde(rename = "D_lower")]
    pub dim_lower: u32,
    pub l_lower: u32,
    pub n_prime: u32,
    pub abs_kappa: f64,
    pub pairs: Vec<InterdimPair>,
    pub mechanism: String,
}

impl InterdimReport {
    pub fn max_rel_diff(&self) -> f64 {
        self.pairs.iter().fold(0.0, |m, p| m.max(p.rel_diff))
    }
}

/// Compare level (D, l, n′) with (D−2, l+1, n′).
///
/// Only the coupling of `params` is used on the lower side; the stability
/// bound of D−2 concerns its l = 0 sector, which is not involved here.
pub fn interdimensional_check(params: &PhysParams, l: u32, n_prime: u32) -> Result<InterdimReport> {
    if params.dim < 4 {
        return Err(Error::InvalidLabel(format!("D = {} has no D - 2 >= 2 partner", params.dim)));
    }
    let lower = PhysParams { dim: params.dim - 2, ..*params };
    let mut pairs = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let (Ok(up), Ok(down)) = (
            LevelLabel::new(l + 1 + n_prime, l, sign),
            LevelLabel::new(l + 2 + n_prime, l + 1, sign),
        ) else {
            continue;
        };
        let e_upper = energy(params, &up)?;
        let e_lower = energy(&lower, &down)?;
        pairs.push(InterdimPair { sign, e_upper, e_lower, rel_diff: ((e_upper - e_lower) / e_upper).abs() });
    }
    let abs_kappa = abs_kappa_of(params.dim, l);
    Ok(InterdimReport {
        dim: params.dim,
        l,
        dim_lower: lower.dim,
        l_lower: l + 1,
        n_prime,
        abs_kappa,
        pairs,
        mechanism: format!(
            "|kappa| = {abs_kappa} and s are shared; n rises by 1 on the lower side while (D-3)/2 drops by 1, so n - |kappa| + (D-3)/2 = n' in both"
        ),
    })
}

/// One row of the level-scheme dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSchemeRow {
    pub id: usize,
    #[serde(rename = "D")]
    pub dim: u32,
    #[serde(rename = "tanh_D", serialize_with = "f17")]
    pub tanh_d: f64,
    #[serde(serialize_with = "f17")]
    pub kappa: f64,
    pub n: u32,
    pub l: u32,
    #[serde(rename = "E_over_m", serialize_with = "f17")]
    pub e_over_m: f64,
    /// 1 − E/m
    #[serde(serialize_with = "f17")]
    pub binding: f64,
    pub partner_id: Option<usize>,
    pub is_ladder_bottom: bool,
}

impl CsvRow for LevelSchemeRow {
    fn header() -> Vec<&'static str> {
        vec!["id", "D", "tanh_D", "kappa", "n", "l", "E_over_m", "binding", "partner_id", "is_ladder_bottom"]
    }

    fn fields(&self) -> Vec<String> {
        use crate::export::fmt17;
        vec![
            self.id.to_string(),
            self.dim.to_string(),
            fmt17(self.tanh_d),
            fmt17(self.kappa),
            self.n.to_string(),
            self.l.to_string(),
            fmt17(self.e_over_m),
            fmt17(self.binding),
            self.partner_id.map(|p| p.to_string()).unwrap_or_default(),
            self.is_ladder_bottom.to_string(),
        ]
    }
}

/// Level-scheme dataset plus the (D, l) ladders left out because
/// κ² ≤ (Zα)² there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelScheme {
    #[serde(serialize_with = "f17")]
    pub z_alpha: f64,
    pub rows: Vec<LevelSchemeRow>,
    pub skipped: Vec<(u32, u32)>,
}

pub fn level_scheme_export(z_alpha: f64, dims: &[u32], n_max: u32) -> Result<LevelScheme> {
    if dims.is_empty() {
        return Err(Error::InvalidInput("empty D range".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if !(z_alpha.is_finite() && z_alpha > 0.0) {
        return Err(Error::InvalidInput(format!("z_alpha = {z_alpha} must be positive")));
    }
    let mut rows: Vec<LevelSchemeRow> = Vec::new();
    let mut skipped = Vec::new();
    for &dim in dims {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("D = {dim} must be >= 2")));
        }
        let params = PhysParams { dim, z_alpha, m: 1.0 };
        for l in 0..n_max {
            if check_subcritical(z_alpha, abs_kappa_of(dim, l)).is_err() {
                skipped.push((dim, l));
                continue;
            }
            let start = rows.len();
            for n in l + 1..=n_max {
                for sign in [Sign::Plus, Sign::Minus] {
                    let Ok(label) = LevelLabel::new(n, l, sign) else { continue };
                    let sector = kappa_of(&params, l, sign)?;
                    let binding = -binding_from_n_prime(z_alpha, sector.abs_kappa(), label.n_prime)?;
                    rows.push(LevelSchemeRow {
                        id: rows.len(),
                        dim,
                        tanh_d: f64::from(dim).tanh(),
                        kappa: sector.kappa,
                        n,
                        l,
                        e_over_m: energy(&params, &label)?,
                        binding,
                        partner_id: None,
                        is_ladder_bottom: label.is_ladder_bottom(),
                    });
                }
            }
            // + and − rows of one (n, l) are adjacent
            for i in start..rows.len() {
                if !rows[i].is_ladder_bottom && rows[i].kappa > 0.0 {
                    rows[i].partner_id = Some(i + 1);
                    rows[i + 1].partner_id = Some(i);
                }
            }
        }
    }
    Ok(LevelScheme { z_alpha, rows, skipped })
}
