//! Uniform cell-centered grid on `[0, R]` with measure-weighted cells.
//!
//! Centers sit at `(i+½)h` so the singular drift at `r = 0` is never
//! evaluated; the cell weights are `∫_cell density` by Gauss–Legendre
//! quadrature and double as the discrete invariant measure.

use crate::error::{Error, Result};
use crate::geometry::RadialLaw;

/// 5-point Gauss–Legendre rule on [−1, 1]; exact through degree 9, which is
/// far beyond what the smooth densities need per cell.
const GL_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    law: RadialLaw,
    r_max: f64,
    h: f64,
    centers: Vec<f64>,
    weights: Vec<f64>,
    face_density: Vec<f64>,
}

impl Grid {
    /// Builds the grid for `law` on `[0, r_max]` with `n ≥ 16` cells.
    pub fn build(law: &RadialLaw, r_max: f64, n: usize) -> Result<Grid> {
        law.spec().check_radius(r_max)?;
        if n < 16 {
            return Err(Error::config(format!("grid needs at least 16 cells, got {n}")));
        }
        let h = r_max / n as f64;
        let mut centers = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut face_density = Vec::with_capacity(n + 1);
        let dm = law.domain_max();
        for i in 0..=n {
            let face = (i as f64 * h).min(dm);
            face_density.push(law.density_unchecked(face));
        }
        for i in 0..n {
            let lo = i as f64 * h;
            let mid = lo + 0.5 * h;
            centers.push(mid);
            let mut w = 0.0;
            for (x, gw) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                let r = (mid + 0.5 * h * x).min(dm);
                w += gw * law.density_unchecked(r);
            }
            w *= 0.5 * h;
            if !(w > 0.0) {
                return Err(Error::Numerics(format!(
                    "nonpositive cell weight {w} in cell {i}"
                )));
            }
            weights.push(w);
        }
        Ok(Grid {
            law: *law,
            r_max,
            h,
            centers,
            weights,
            face_density,
        })
    }

    pub fn law(&self) -> &RadialLaw {
        &self.law
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Density evaluated at the cell faces `0, h, 2h, …, R` (length n+1).
    pub fn face_density(&self) -> &[f64] {
        &self.face_density
    }

    /// Total measure of `[0, R]`.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Index of the cell containing `r` (clamped to the grid).
    pub fn cell_of(&self, r: f64) -> usize {
        ((r / self.h) as usize).min(self.n() - 1)
    }

    /// Linear interpolation of per-cell values at `r ∈ [0, R]`, with even
    /// extension at 0 and, in Dirichlet problems, a zero value at `R`
    /// supplied by the caller via `right_value`.
    pub fn interpolate(&self, values: &[f64], r: f64, right_value: Option<f64>) -> f64 {
        let n = self.n();
        debug_assert_eq!(values.len(), n);
        let first = self.centers[0];
        if r <= first {
            // even extension across 0: constant on [0, h/2]
            return values[0];
        }
        let last = self.centers[n - 1];
        if r >= last {
            return match right_value {
                Some(v_at_r_max) => {
                    let t = (r - last) / (self.r_max - last);
                    values[n - 1] * (1.0 - t) + v_at_r_max * t
                }
                None => values[n - 1],
            };
        }
        let x = (r - first) / self.h;
        let i = (x as usize).min(n - 2);
        let t = x - i as f64;
        values[i] * (1.0 - t) + values[i + 1] * t
    }
}
