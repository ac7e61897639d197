//! Eigenpairs of the symmetric tridiagonal pencil `L v = E W v`, W diagonal
//! and positive.

use crate::error::{Error, Result};

/// Bisection steps per eigenvalue; far more than needed to reach the
/// rounding floor from an interval of width m.
pub const DEFAULT_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    /// Diagonal of L.
    pub diag: Vec<f64>,
    /// Off-diagonal of L, length `diag.len() − 1`.
    pub off: Vec<f64>,
    /// Diagonal of W.
    pub weights: Vec<f64>,
}

impl Pencil {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`, from the inertia of `L − xW`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for k in 0..self.len() {
            let mut next = self.diag[k] - x * self.weights[k];
            if k > 0 {
                next -= self.off[k - 1] * self.off[k - 1] / q;
            }
            if next == 0.0 {
                next = -tiny;
            }
            if next < 0.0 {
                count += 1;
            }
            q = next;
        }
        count
    }

    /// Eigenvalues inside `(lo, hi)`, ascending, at most `max_count` of them.
    pub fn eigenvalues_between(&self, lo: f64, hi: f64, max_count: usize) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!("empty window ({lo}, {hi})")));
        }
        let n_lo = self.count_below(lo);
        let n_hi = self.count_below(hi);
        let wanted = (n_hi - n_lo).min(max_count);
        let mut out = Vec::with_capacity(wanted);
        let mut floor = lo;
        for idx in n_lo..n_lo + wanted {
            let (mut a, mut b) = (floor, hi);
            let mut steps = 0;
            while b - a > 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                if steps == DEFAULT_BISECTION_STEPS {
                    return Err(Error::Convergence(format!("bisection for eigenvalue {idx} stalled in [{a}, {b}]")));
                }
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) > idx {
                    b = mid;
                } else {
                    a = mid;
                }
                steps += 1;
            }
            let e = 0.5 * (a + b);
            floor = a;
            out.push(e);
        }
        Ok(out)
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration, scaled so
    /// that `Σ w v² = 1` and its largest entry is positive.
    pub fn eigenvector(&self, energy: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let shifted: Vec<f64> = (0..n).map(|k| self.diag[k] - energy * self.weights[k]).collect();
        let lu = TridiagLu::factor(&self.off, &shifted, &self.off);
        let mut v: Vec<f64> = self.weights.iter().map(|w| w.sqrt()).collect();
        for _ in 0..4 {
            let rhs: Vec<f64> = v.iter().zip(&self.weights).map(|(x, w)| x * w).collect();
            v = lu.solve(rhs);
            let norm = weighted_norm(&v, &self.weights);
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Convergence(format!("inverse iteration broke down at E = {energy}")));
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let peak = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if peak < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(v)
    }

    /// `L v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut y = self.diag[k] * v[k];
                if k > 0 {
                    y += self.off[k - 1] * v[k - 1];
                }
                if k + 1 < n {
                    y += self.off[k] * v[k + 1];
                }
                y
            })
            .collect()
    }

    /// `vᵀLv / vᵀWv`
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let lv = self.apply(v);
        let num: f64 = v.iter().zip(&lv).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().zip(&self.weights).map(|(a, w)| a * a * w).sum();
        num / den
    }
}

pub(crate) fn weighted_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

/// LU factorization of a general tridiagonal matrix with partial pivoting.
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        // a singular pivot means the shift hit the eigenvalue to the last bit
        let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for x in &mut d {
            if *x == 0.0 {
                *x = f64::EPSILON * scale;
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut x = b[i];
            if i + 1 < n {
                x -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                x -= self.du2[i] * b[i + 2];
            }
            b[i] = x / self.d[i];
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> Pencil {
        Pencil { diag: vec![2.0; n], off: vec![-1.0; n - 1], weights: vec![1.0; n] }
    }

    #[test]
    fn sturm_count_matches_closed_form() {
        let n = 20;
        let p = laplacian(n);
        let exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        assert_eq!(p.count_below(1.0), exact.iter().filter(|&&e| e < 1.0).count());
        let ev = p.eigenvalues_between(0.0, 4.0, n).unwrap();
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn max_count_truncates() {
        let ev = laplacian(10).eigenvalues_between(0.0, 4.0, 3).unwrap();
        assert_eq!(ev.len(), 3);
    }

    #[test]
    fn weighted_pencil_eigenvector() {
        let mut p = laplacian(30);
        p.weights = (0..30).map(|k| 1.0 + 0.1 * k as f64).collect();
        let e = p.eigenvalues_between(0.0, 10.0, 1).unwrap()[0];
        let v = p.eigenvector(e).unwrap();
        assert!((weighted_norm(&v, &p.weights) - 1.0).abs() < 1e-14);
        assert!((p.rayleigh_quotient(&v) - e).abs() < 1e-13);
        let lv = p.apply(&v);
        let res: f64 = lv.iter().zip(&v).zip(&p.weights).map(|((l, x), w)| (l - e * w * x).abs()).fold(0.0, f64::max);
        assert!(res < 1e-12);
    }

    #[test]
    fn pivoting_solver_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] x = [2, 3]
        let lu = TridiagLu::factor(&[1.0], &[0.0, 0.0], &[1.0]);
        assert_eq!(lu.solve(vec![2.0, 3.0]), vec![3.0, 2.0]);
    }
}
