//! Finite-volume discretization of the radial generator in flux form.
//!
//! With face densities `D_j = density(j·h)` and cell weights `w_i`,
//!
//! ```text
//! (Au)_i = [ D_{i+1}(u_{i+1} − u_i)/h − D_i(u_i − u_{i−1})/h ] / w_i,
//! ```
//!
//! i.e. the net face flux per unit of cell measure (`w_i ≈ density·h`, so
//! this is the `(ρ u′)′/ρ` form of the generator),
//!
//! which is symmetric in the `w`-weighted inner product by construction.
//! The left face sits at `r = 0` where the density vanishes, so no boundary
//! condition is needed there; the right face carries either a Dirichlet
//! ghost value 0 or a zero-flux (closed) condition.

use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::tridiag::SymTridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Absorbing wall at `r = R`: ghost value 0 past the last cell.
    Dirichlet,
    /// Zero flux at `r = R`; only meaningful when the density vanishes
    /// there, i.e. `k > 0` and `R = π/(2√k)`.
    Closed,
}

impl std::fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryMode::Dirichlet => write!(f, "dirichlet"),
            BoundaryMode::Closed => write!(f, "closed"),
        }
    }
}

/// Discretized generator `A ≈ L` acting on per-cell values.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    grid: Grid,
    mode: BoundaryMode,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl RadialOperator {
    pub fn new(grid: Grid, mode: BoundaryMode) -> Self {
        let n = grid.n();
        let h = grid.h();
        let faces = grid.face_density();
        let w = grid.weights();
        let mut sub = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n - 1];
        for i in 0..n {
            let d_left = faces[i];
            let d_right = if i + 1 == n {
                match mode {
                    BoundaryMode::Closed => 0.0,
                    // antisymmetric ghost u_{n} = −u_{n−1} pins u = 0 at the
                    // face r = R itself; a plain zero ghost value would move
                    // the wall to R + h/2 and cost an O(h) eigenvalue shift
                    BoundaryMode::Dirichlet => 2.0 * faces[i + 1],
                }
            } else {
                faces[i + 1]
            };
            diag[i] = -(d_left + d_right) / (w[i] * h);
            if i > 0 {
                sub[i - 1] = d_left / (w[i] * h);
            }
            if i + 1 < n {
                sup[i] = d_right / (w[i] * h);
            }
        }
        RadialOperator {
            grid,
            mode,
            sub,
            diag,
            sup,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Applies `A` (the generator, negative semidefinite).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * u[i];
            if i > 0 {
                s += self.sub[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * u[i + 1];
            }
            out[i] = s;
        }
        out
    }

    /// Row bands of `A` for time steppers.
    pub fn bands(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.sub, &self.diag, &self.sup)
    }

    /// `−A` conjugated by `W^{1/2}`: a genuinely symmetric tridiagonal
    /// matrix whose ℓ²-orthonormal eigenvectors map to `w`-orthonormal
    /// eigenfunctions via division by `√w_i`.
    pub fn sym_tridiag(&self) -> SymTridiag {
        let n = self.n();
        let w = self.grid.weights();
        let mut off = vec![0.0; n - 1];
        for i in 0..n - 1 {
            off[i] = -self.sup[i] * (w[i] / w[i + 1]).sqrt();
        }
        SymTridiag {
            diag: self.diag.iter().map(|d| -d).collect(),
            off,
        }
    }

    /// `⟨u, v⟩_w = Σ w_i u_i v_i`.
    pub fn weighted_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }
}
