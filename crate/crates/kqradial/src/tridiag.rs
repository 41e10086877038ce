//! Symmetric tridiagonal eigensolver (Sturm-count bisection plus inverse
//! iteration with Rayleigh-quotient refinement) and tridiagonal linear
//! solvers. Everything here is deterministic: no randomized starts, no
//! platform-dependent reductions, so repeated runs order and reproduce
//! eigenpairs identically.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n−1.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    fn inf_norm(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                self.diag[i].abs()
                    + if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { self.off[i].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        let max_e2 = self.off.iter().map(|e| e * e).fold(1.0, f64::max);
        f64::MIN_POSITIVE * max_e2
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the
    /// pivoted LDLᵀ recurrence).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d <= 0.0 {
            count += 1;
        }
        for i in 1..self.n() {
            d = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d <= 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `count` smallest eigenvalues, ascending, by bisection.
    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        assert!(count <= self.n());
        let (glo, ghi) = self.gershgorin();
        let mut out = Vec::with_capacity(count);
        for j in 1..=count {
            let mut lo = if let Some(&prev) = out.last() { prev } else { glo };
            let mut hi = ghi;
            // bisect until the interval is at floating-point resolution
            for _ in 0..120 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) >= j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }

    /// Eigenvector for the approximate eigenvalue `lambda` by inverse
    /// iteration, orthogonalized against `prev` (ℓ²-orthonormal) vectors.
    /// Returns the Rayleigh-quotient-refined eigenvalue and the unit vector.
    pub fn eigenpair(&self, lambda: f64, prev: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
        let n = self.n();
        let scale = self.inf_norm().max(1.0);
        // deterministic quasi-random start breaks symmetry without an RNG dep
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.7511).sin())
            .collect();
        normalize(&mut v);
        let mut refined = lambda;
        for iter in 0..8 {
            orthogonalize(&mut v, prev);
            let mut w = solve_shifted(&self.diag, &self.off, lambda, &v)?;
            orthogonalize(&mut w, prev);
            normalize(&mut w);
            v = w;
            // Rayleigh quotient: exact to rounding once v is converged
            let tv = self.apply(&v);
            refined = dot(&v, &tv);
            let res = residual_norm(&tv, refined, &v);
            if res <= 1e-10 * scale && iter >= 1 {
                return Ok((refined, v));
            }
        }
        let tv = self.apply(&v);
        let res = residual_norm(&tv, refined, &v);
        if res <= 1e-10 * scale {
            Ok((refined, v))
        } else {
            Err(Error::Convergence(format!(
                "inverse iteration residual {:.3e} above 1e-10·‖T‖ = {:.3e} at λ ≈ {lambda}",
                res,
                1e-10 * scale
            )))
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

fn orthogonalize(v: &mut [f64], prev: &[Vec<f64>]) {
    for p in prev {
        let c = dot(v, p);
        for (x, y) in v.iter_mut().zip(p) {
            *x -= c * y;
        }
    }
}

fn residual_norm(tv: &[f64], lambda: f64, v: &[f64]) -> f64 {
    tv.iter()
        .zip(v)
        .map(|(t, x)| (t - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Solves `(T − σI) x = b` for symmetric tridiagonal `T`.
pub fn solve_shifted(diag: &[f64], off: &[f64], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    let shifted: Vec<f64> = diag.iter().map(|x| x - sigma).collect();
    solve_tridiag_pivot(off, &shifted, off, b)
}

/// Solves a general (row-form) tridiagonal system with partial pivoting;
/// safe on the nearly singular shifts of inverse iteration. Gaussian
/// elimination with adjacent-row swaps fills one extra superdiagonal.
pub fn solve_tridiag_pivot(sub: &[f64], diag: &[f64], sup: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d: Vec<f64> = diag.to_vec();
    let mut c = vec![0.0; n]; // superdiagonal of row i (col i+1)
    let mut a = vec![0.0; n]; // subdiagonal entry of row i+1 (col i)
    let mut e = vec![0.0; n]; // second superdiagonal fill-in (col i+2)
    for i in 0..n - 1 {
        c[i] = sup[i];
        a[i] = sub[i];
    }
    let mut x = b.to_vec();
    // zero pivots (exactly singular shift) are replaced by a tiny value on
    // the matrix scale; inverse iteration only needs the direction
    let tiny = f64::EPSILON
        * d.iter()
            .chain(sub.iter())
            .chain(sup.iter())
            .fold(1.0f64, |m, v| m.max(v.abs()));

    for i in 0..n - 1 {
        if a[i].abs() > d[i].abs() {
            // swap rows i and i+1 (band layout: (d,c,e) over columns i,i+1,i+2)
            let (di, ci, ei) = (d[i], c[i], e[i]);
            d[i] = a[i];
            c[i] = d[i + 1];
            e[i] = c[i + 1];
            a[i] = di;
            d[i + 1] = ci;
            c[i + 1] = ei;
            x.swap(i, i + 1);
        }
        if d[i] == 0.0 {
            d[i] = tiny;
        }
        let factor = a[i] / d[i];
        d[i + 1] -= factor * c[i];
        c[i + 1] -= factor * e[i];
        x[i + 1] -= factor * x[i];
    }

    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        let i = n - 2;
        x[i] = (x[i] - c[i] * x[i + 1]) / d[i];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - c[i] * x[i + 1] - e[i] * x[i + 2]) / d[i];
        if !x[i].is_finite() {
            return Err(Error::Numerics("tridiagonal solve produced non-finite values".into()));
        }
    }
    Ok(x)
}

/// Thomas algorithm for a general (row-wise) tridiagonal system without
/// pivoting; only used on diagonally dominant matrices such as the
/// Crank–Nicolson left-hand side.
pub fn solve_thomas(sub: &[f64], diag: &[f64], sup: &[f64], b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    x[0] = b[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / denom;
        }
        x[i] = (b[i] - sub[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}
