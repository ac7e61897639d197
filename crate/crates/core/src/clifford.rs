//! Exact gamma-matrix representations of the (D+1)-dimensional Clifford algebra.
//!
//! All entries are Gaussian integers drawn from {0, ±1, ±i}, so every identity
//! is checked with exact equality. Conventions:
//!
//! * `{γ^μ, γ^ν} = 2 g^{μν}` with `g = diag(+1, -1, …, -1)`;
//! * `γ⁰ = σ₃ ⊗ 1` (block `diag(+1, −1)`), `γ^i = iσ₂ ⊗ e_i` where `e_i` are the
//!   Jordan–Wigner generators of the Euclidean algebra Cl(D);
//! * `γ^{D+1}` is the phased product `γ⁰γ¹⋯γ^D` for odd D, and the extra
//!   anticommuting generator `σ₁ ⊗ 1` of the next-higher algebra for even D.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the spinor dimension (D ≤ 19).
pub const DEFAULT_SPINOR_CAP: usize = 1024;

/// Gaussian integer `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }
}

impl Add for GaussInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussInt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for GaussInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}i"),
            (r, i) if i < 0 => write!(f, "{r}{i}i"),
            (r, i) => write!(f, "{r}+{i}i"),
        }
    }
}

/// Dense square matrix over the Gaussian integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussMatrix {
    dim: usize,
    data: Vec<GaussInt>,
}

impl GaussMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![GaussInt::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = GaussInt::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[GaussInt]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, c: GaussInt) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&v| v * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = self.dim * other.dim;
        let mut out = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `self·other + other·self`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_anti_hermitian(&self) -> bool {
        *self == self.adjoint().scale(-GaussInt::ONE)
    }

    /// Row-major entries as `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[i64; 2]>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect()
    }

    /// Entries as `(re, im)` floats, row-major.
    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| (v.re as f64, v.im as f64)).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for GaussMatrix {
    type Output = GaussInt;
    fn index(&self, (i, j): (usize, usize)) -> &GaussInt {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GaussMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussInt {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &GaussMatrix {
    type Output = GaussMatrix;
    fn mul(self, rhs: &GaussMatrix) -> GaussMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = GaussMatrix::zeros(n);
        // gamma products are monomial, so skipping zeros makes this O(n²) in practice
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] = out.data[i * n + j] + a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &GaussMatrix {
    type Output = GaussMatrix;
    fn add(self, rhs: &GaussMatrix) -> GaussMatrix {
        assert_eq!(self.dim, rhs.dim);
        GaussMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &GaussMatrix {
    type Output = GaussMatrix;
    fn sub(self, rhs: &GaussMatrix) -> GaussMatrix {
        assert_eq!(self.dim, rhs.dim);
        GaussMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Floating-point complex matrix, row-major `(re, im)` entries.
///
/// Used for operators with dyadic entries such as the spin generators, where
/// every value and every product is exactly representable in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<(f64, f64)>,
}

impl ComplexMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        self.data[i * self.dim + j]
    }

    pub fn scale(&self, re: f64, im: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&(a, b)| (a * re - b * im, a * im + b * re)).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut data = vec![(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = self.data[i * n + k];
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (br, bi) = rhs.data[k * n + j];
                    let e = &mut data[i * n + j];
                    e.0 += ar * br - ai * bi;
                    e.1 += ar * bi + ai * br;
                }
            }
        }
        Self { dim: n, data }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| (a.0 + b.0, a.1 + b.1)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| (a.0 - b.0, a.1 - b.1)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let (re, im) = self.data[i * n + j];
                data[j * n + i] = (re, -im);
            }
        }
        Self { dim: n, data }
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = (1.0, 0.0);
        }
        Self { dim, data }
    }
}

/// Gamma-matrix representation for D spatial dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaRep {
    dim: u32,
    gammas: Vec<GaussMatrix>,
    gamma_chir: GaussMatrix,
}

fn pauli(k: u8) -> GaussMatrix {
    use GaussInt as G;
    match k {
        0 => GaussMatrix::identity(2),
        1 => GaussMatrix::from_rows(&[&[G::ZERO, G::ONE], &[G::ONE, G::ZERO]]),
        2 => GaussMatrix::from_rows(&[&[G::ZERO, -G::I], &[G::I, G::ZERO]]),
        3 => GaussMatrix::from_rows(&[&[G::ONE, G::ZERO], &[G::ZERO, -G::ONE]]),
        _ => unreachable!("pauli index"),
    }
}

fn kron_chain(factors: &[GaussMatrix]) -> GaussMatrix {
    factors
        .iter()
        .fold(GaussMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Jordan–Wigner generators of the Euclidean algebra Cl(d): d mutually
/// anticommuting Hermitian involutions of size 2^⌊d/2⌋.
fn euclidean_generators(d: u32) -> Vec<GaussMatrix> {
    let k = (d / 2) as usize;
    let mut out = Vec::with_capacity(d as usize);
    for j in 0..k {
        for p in [1u8, 2] {
            let mut factors = Vec::with_capacity(k);
            factors.extend(std::iter::repeat_with(|| pauli(3)).take(j));
            factors.push(pauli(p));
            factors.extend(std::iter::repeat_with(|| pauli(0)).take(k - j - 1));
            out.push(kron_chain(&factors));
        }
    }
    if d % 2 == 1 {
        let factors: Vec<_> = std::iter::repeat_with(|| pauli(3)).take(k).collect();
        out.push(kron_chain(&factors));
    }
    out
}

/// Spinor dimension `2^⌈(D+1)/2⌉`.
pub fn spinor_dim_for(dim: u32) -> usize {
    1usize << (dim + 1).div_ceil(2)
}

/// Build the representation with the default spinor-dimension cap.
pub fn build_gamma_rep(dim: u32) -> Result<GammaRep> {
    build_gamma_rep_capped(dim, DEFAULT_SPINOR_CAP)
}

pub fn build_gamma_rep_capped(dim: u32, spinor_cap: usize) -> Result<GammaRep> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("spatial dimension D = {dim} must be >= 2")));
    }
    if dim > 62 || spinor_dim_for(dim) > spinor_cap {
        return Err(Error::InvalidInput(format!(
            "D = {dim} needs spinor dimension 2^{} above the cap {spinor_cap}",
            (dim + 1).div_ceil(2)
        )));
    }

    let euclid = euclidean_generators(dim);
    let inner = euclid[0].dim();
    let one = GaussMatrix::identity(inner);

    let mut gammas = Vec::with_capacity(dim as usize + 1);
    gammas.push(pauli(3).kron(&one));
    let i_sigma2 = pauli(2).scale(GaussInt::I);
    for e in &euclid {
        gammas.push(i_sigma2.kron(e));
    }

    let gamma_chir = if dim % 2 == 1 {
        let product = gammas[1..].iter().fold(gammas[0].clone(), |acc, g| &acc * g);
        let sq = &product * &product;
        let phased = if sq == GaussMatrix::identity(sq.dim()) {
            product
        } else {
            product.scale(GaussInt::I)
        };
        debug_assert!(phased.is_hermitian());
        phased
    } else {
        pauli(1).kron(&one)
    };

    Ok(GammaRep { dim, gammas, gamma_chir })
}

impl GammaRep {
    /// Assemble from raw parts without checking; for negative controls.
    pub fn from_parts_unchecked(dim: u32, gammas: Vec<GaussMatrix>, gamma_chir: GaussMatrix) -> Self {
        Self { dim, gammas, gamma_chir }
    }

    pub fn spatial_dim(&self) -> u32 {
        self.dim
    }

    pub fn spinor_dim(&self) -> usize {
        self.gamma_chir.dim()
    }

    /// γ⁰…γ^D.
    pub fn gammas(&self) -> &[GaussMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, mu: usize) -> &GaussMatrix {
        &self.gammas[mu]
    }

    /// γ^{D+1}.
    pub fn gamma_chir(&self) -> &GaussMatrix {
        &self.gamma_chir
    }

    /// Metric signature entry g^{μμ}.
    pub fn metric(&self, mu: usize) -> i64 {
        if mu == 0 {
            1
        } else {
            -1
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Export {
            #[serde(rename = "D")]
            dim: u32,
            spinor_dim: usize,
            gammas: Vec<Vec<Vec<[i64; 2]>>>,
            gamma_chir: Vec<Vec<[i64; 2]>>,
        }
        serde_json::to_value(Export {
            dim: self.dim,
            spinor_dim: self.spinor_dim(),
            gammas: self.gammas.iter().map(GaussMatrix::to_pairs).collect(),
            gamma_chir: self.gamma_chir.to_pairs(),
        })
        .expect("gamma export is plain data")
    }
}

fn check_spatial_index(rep: &GammaRep, i: u32, what: &str) -> Result<()> {
    if i == 0 || i > rep.dim {
        return Err(Error::IndexOutOfRange(format!("{what} = {i} outside 1..={}", rep.dim)));
    }
    Ok(())
}

/// Doubled spin generator `2Σ_ab = iγ^aγ^b`, exact.
pub fn spin_generator_doubled(rep: &GammaRep, a: u32, b: u32) -> Result<GaussMatrix> {
    check_spatial_index(rep, a, "a")?;
    check_spatial_index(rep, b, "b")?;
    if a >= b {
        return Err(Error::IndexOutOfRange(format!("need a < b, got a = {a}, b = {b}")));
    }
    Ok((rep.gamma(a as usize) * rep.gamma(b as usize)).scale(GaussInt::I))
}

/// Spin part of the angular momentum, `Σ_ab = (i/2)γ^aγ^b`.
pub fn spin_generator(rep: &GammaRep, a: u32, b: u32) -> Result<ComplexMatrix> {
    Ok(spin_generator_doubled(rep, a, b)?.to_complex().scale(0.5, 0.0))
}

/// `σ^i = γ^{D+1}γ⁰γ^i`.
pub fn spin_operator(rep: &GammaRep, i: u32) -> Result<GaussMatrix> {
    check_spatial_index(rep, i, "i")?;
    Ok(&(&rep.gamma_chir * rep.gamma(0)) * rep.gamma(i as usize))
}

/// One identity of a verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordReport {
    #[serde(rename = "D")]
    pub dim: u32,
    pub spinor_dim: usize,
    pub checks: Vec<IdentityCheck>,
}

impl CliffordReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Exhaustively check every invariant of a representation with exact equality.
pub fn verify_clifford(rep: &GammaRep) -> CliffordReport {
    let n = rep.spinor_dim();
    let id = GaussMatrix::identity(n);
    let mut checks = Vec::new();
    let mut push = |name: String, pass: bool| checks.push(IdentityCheck { name, pass });

    push(
        format!("spinor_dim == 2^ceil((D+1)/2) = {}", spinor_dim_for(rep.dim)),
        n == spinor_dim_for(rep.dim) && rep.gammas.len() == rep.dim as usize + 1,
    );

    for mu in 0..rep.gammas.len() {
        for nu in mu..rep.gammas.len() {
            let ac = rep.gammas[mu].anticommutator(&rep.gammas[nu]);
            let expected = if mu == nu {
                id.scale(GaussInt::new(2 * rep.metric(mu), 0))
            } else {
                GaussMatrix::zeros(n)
            };
            push(format!("{{g{mu}, g{nu}}} = 2 g^({mu}{nu})"), ac == expected);
        }
    }

    let chir = &rep.gamma_chir;
    push("(g_chir)^2 = 1".into(), &(chir * chir) == &id);
    push("g_chir hermitian".into(), chir.is_hermitian());
    push(
        "{g_chir, g_mu} = 0 for all mu".into(),
        rep.gammas.iter().all(|g| chir.anticommutator(g).is_zero()),
    );

    push("g0 hermitian".into(), rep.gammas[0].is_hermitian());
    for (i, g) in rep.gammas.iter().enumerate().skip(1) {
        push(format!("g{i} anti-hermitian"), g.is_anti_hermitian());
    }

    CliffordReport { dim: rep.dim, spinor_dim: n, checks }
}

/// Check `[Σ_ab, Σ_cd] = i(δ_bc Σ_ad − δ_ac Σ_bd − δ_bd Σ_ac + δ_ad Σ_bc)` for
/// every index quadruple, using the doubled generators so the check is exact.
pub fn verify_so_algebra(rep: &GammaRep) -> Result<bool> {
    let d = rep.dim;
    let n = rep.spinor_dim();
    // generators keyed by (a, b) with a < b; antisymmetry covers the rest
    let sigma = |a: u32, b: u32| -> Result<GaussMatrix> {
        if a == b {
            Ok(GaussMatrix::zeros(n))
        } else if a < b {
            spin_generator_doubled(rep, a, b)
        } else {
            Ok(spin_generator_doubled(rep, b, a)?.scale(-GaussInt::ONE))
        }
    };
    let delta = |x: u32, y: u32| if x == y { 1 } else { 0 };
    for a in 1..=d {
        for b in a + 1..=d {
            let s_ab = sigma(a, b)?;
            for c in 1..=d {
                for e in c + 1..=d {
                    let lhs = s_ab.commutator(&sigma(c, e)?);
                    // [2Σ_ab, 2Σ_cd] = 2i(g_bc 2Σ_ad − g_ac 2Σ_bd − g_bd 2Σ_ac + g_ad 2Σ_bc), g_ij = −δ_ij
                    let mut rhs = GaussMatrix::zeros(n);
                    for (coef, m) in [
                        (delta(b, c), sigma(a, e)?),
                        (-delta(a, c), sigma(b, e)?),
                        (-delta(b, e), sigma(a, c)?),
                        (delta(a, e), sigma(b, c)?),
                    ] {
                        if coef != 0 {
                            rhs = &rhs + &m.scale(GaussInt::new(coef, 0));
                        }
                    }
                    if lhs != rhs.scale(GaussInt::new(0, -2)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigen_signature(m: &ComplexMatrix) -> (usize, usize) {
        // Σ with Σ² = 1/4 has eigenvalues ±1/2; the trace fixes the split
        let n = m.dim();
        let trace: f64 = (0..n).map(|i| m.get(i, i).0).sum();
        let plus = ((n as f64 + 2.0 * trace) / 2.0).round() as usize;
        (plus, n - plus)
    }

    #[test]
    fn spinor_dims_follow_ceiling_rule() {
        assert_eq!(build_gamma_rep(3).unwrap().spinor_dim(), 4);
        assert_eq!(build_gamma_rep(2).unwrap().spinor_dim(), 4);
        assert_eq!(build_gamma_rep(5).unwrap().spinor_dim(), 8);
        for d in 2..=12 {
            assert_eq!(build_gamma_rep(d).unwrap().spinor_dim(), 1 << (d + 1).div_ceil(2));
        }
    }

    #[test]
    fn rejects_small_and_oversized_dimensions() {
        assert!(matches!(build_gamma_rep(1), Err(Error::InvalidInput(_))));
        assert!(build_gamma_rep(19).is_ok());
        assert!(matches!(build_gamma_rep(20), Err(Error::InvalidInput(_))));
        assert!(build_gamma_rep_capped(5, 4).is_err());
    }

    #[test]
    fn gamma0_is_block_diagonal() {
        let rep = build_gamma_rep(3).unwrap();
        let g0 = rep.gamma(0);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i != j {
                    GaussInt::ZERO
                } else if i < 2 {
                    GaussInt::ONE
                } else {
                    -GaussInt::ONE
                };
                assert_eq!(g0[(i, j)], expected);
            }
        }
    }

    #[test]
    fn d3_and_d8_pass_every_identity() {
        for d in [3, 8] {
            let report = verify_clifford(&build_gamma_rep(d).unwrap());
            assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn corrupted_rep_fails_the_matching_identity() {
        let rep = build_gamma_rep(3).unwrap();
        let mut gammas = rep.gammas().to_vec();
        gammas[2] = gammas[1].clone();
        let bad = GammaRep::from_parts_unchecked(3, gammas, rep.gamma_chir().clone());
        let report = verify_clifford(&bad);
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"{g1, g2} = 2 g^(12)"));
        assert!(!failed.contains(&"{g0, g3} = 2 g^(03)"));
    }

    #[test]
    fn spin_generator_d3_has_half_integer_spectrum() {
        let rep = build_gamma_rep(3).unwrap();
        let s12 = spin_generator(&rep, 1, 2).unwrap();
        assert!(s12.is_hermitian());
        let sq = s12.matmul(&s12);
        assert_eq!(sq, ComplexMatrix::identity(4).scale(0.25, 0.0));
        assert_eq!(eigen_signature(&s12), (2, 2));
    }

    #[test]
    fn so3_commutator_closes() {
        let rep = build_gamma_rep(3).unwrap();
        let s12 = spin_generator(&rep, 1, 2).unwrap();
        let s23 = spin_generator(&rep, 2, 3).unwrap();
        let s13 = spin_generator(&rep, 1, 3).unwrap();
        let lhs = s12.matmul(&s23).sub(&s23.matmul(&s12));
        assert_eq!(lhs, s13.scale(0.0, -1.0));
        assert!(verify_so_algebra(&rep).unwrap());
    }

    #[test]
    fn d2_spin_generator_squares_to_quarter() {
        let rep = build_gamma_rep(2).unwrap();
        let s = spin_generator(&rep, 1, 2).unwrap();
        assert!(s.is_hermitian());
        assert_eq!(s.matmul(&s), ComplexMatrix::identity(4).scale(0.25, 0.0));
    }

    #[test]
    fn spin_operators_are_hermitian_involutions() {
        for (d, i) in [(3, 3), (4, 1)] {
            let rep = build_gamma_rep(d).unwrap();
            let s = spin_operator(&rep, i).unwrap();
            assert!(s.is_hermitian());
            assert_eq!(&s * &s, GaussMatrix::identity(rep.spinor_dim()));
        }
    }

    #[test]
    fn sigma1_sigma2_relates_to_spin_generator() {
        // σ¹σ² = γ⁰γ¹γ⁰γ² (γ^{D+1} squares away) = −(γ⁰)²γ¹γ² = −γ¹γ² = i·(2Σ₁₂)
        let rep = build_gamma_rep(3).unwrap();
        let s1 = spin_operator(&rep, 1).unwrap();
        let s2 = spin_operator(&rep, 2).unwrap();
        let two_sigma12 = spin_generator_doubled(&rep, 1, 2).unwrap();
        assert_eq!(&s1 * &s2, two_sigma12.scale(GaussInt::I));
    }

    #[test]
    fn index_errors() {
        let rep = build_gamma_rep(3).unwrap();
        assert!(matches!(spin_generator(&rep, 0, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(spin_generator(&rep, 2, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(spin_generator(&rep, 1, 4), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(spin_operator(&rep, 4), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn json_export_shape() {
        let rep = build_gamma_rep(2).unwrap();
        let v = rep.to_json_value();
        assert_eq!(v["D"], 2);
        assert_eq!(v["spinor_dim"], 4);
        assert_eq!(v["gammas"].as_array().unwrap().len(), 3);
        assert_eq!(v["gamma_chir"][0].as_array().unwrap().len(), 4);
        assert_eq!(v["gamma_chir"][0][0].as_array().unwrap().len(), 2);
    }
}
