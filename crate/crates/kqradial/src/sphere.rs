//! Brownian motion on the unit spheres `S^{2m+1}` and `S^{4m+3}` (generator
//! equal to the full Laplace–Beltrami operator) with the radial projections
//! onto the compact models: `r = arctan(√(1−|z|²)/|z|)` where `z` is the last
//! complex (resp. quaternionic) coordinate. This gives a geometry-level
//! oracle for the one-dimensional radial laws that never touches the
//! eigensolver, the PDE stepper, or the radial SDE.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ModelFamily;
use crate::rng::CounterRng;

/// A point on the unit sphere together with elapsed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereState {
    pub point: Vec<f64>,
    pub time: f64,
}

impl SphereState {
    /// North pole: last coordinate 1. For the Kähler model over `S^{2m+1}`
    /// use `ambient_dim = 2m+2`; quaternionic, `4m+4`.
    pub fn north_pole(ambient_dim: usize) -> Self {
        let mut point = vec![0.0; ambient_dim];
        point[ambient_dim - 1] = 1.0;
        SphereState { point, time: 0.0 }
    }

    /// A unit point at distance-parameter `r0` from the pole, tilted toward
    /// the ambient axis `axis` (must not hit the last block).
    pub fn tilted(ambient_dim: usize, block: usize, r0: f64, axis: usize) -> Self {
        let mut point = vec![0.0; ambient_dim];
        // |z_{m+1}| = cos r0 on the last block's real axis
        point[ambient_dim - 1] = r0.cos();
        assert!(axis < ambient_dim - block);
        point[axis] = r0.sin();
        SphereState { point, time: 0.0 }
    }

    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    pub fn norm(&self) -> f64 {
        self.point.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// One tangential Euler step: project `√(2dt)·noise` onto the tangent space
/// at the current point, move, renormalize. The `2dt` variance matches the
/// generator-Δ convention; renormalization supplies the curvature drift to
/// weak order one.
pub fn sphere_bm_step(state: &SphereState, dt: f64, noise: &[f64]) -> SphereState {
    assert_eq!(noise.len(), state.ambient_dim());
    let scale = (2.0 * dt).sqrt();
    let radial: f64 = state
        .point
        .iter()
        .zip(noise)
        .map(|(p, n)| p * n * scale)
        .sum();
    let mut moved: Vec<f64> = state
        .point
        .iter()
        .zip(noise)
        .map(|(p, n)| p + (n * scale - radial * p))
        .collect();
    let norm = moved.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in moved.iter_mut() {
        *x /= norm;
    }
    SphereState {
        point: moved,
        time: state.time + dt,
    }
}

fn project_radial(state: &SphereState, block: usize) -> f64 {
    let dim = state.ambient_dim();
    let q: f64 = state.point[dim - block..].iter().map(|x| x * x).sum();
    let z_norm = q.min(1.0).sqrt();
    if z_norm < 1e-14 {
        return std::f64::consts::FRAC_PI_2 - 1e-12;
    }
    ((1.0 - q).max(0.0).sqrt()).atan2(z_norm)
}

/// Distance to the pole in the Kähler compact model: the last *complex*
/// coordinate occupies the final two real slots.
pub fn project_radial_kahler(state: &SphereState) -> f64 {
    project_radial(state, 2)
}

/// Quaternionic analogue: the last coordinate occupies four real slots.
pub fn project_radial_quaternion(state: &SphereState) -> f64 {
    project_radial(state, 4)
}

/// Parameters for an ensemble of sphere paths.
#[derive(Debug, Clone, Copy)]
pub struct AmbientConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub dt: f64,
    pub t_final: f64,
}

/// Ambient dimension of the sphere over the compact model.
pub fn ambient_dim(family: ModelFamily, m: u32) -> usize {
    match family {
        ModelFamily::Kahler => 2 * m as usize + 2,
        ModelFamily::QuaternionKahler => 4 * m as usize + 4,
    }
}

/// Runs `n_paths` independent sphere Brownian motions from `start` and
/// returns the projected radial positions at `t_final`. Draw indices are
/// keyed by `(path, step, slot)`, so parallel scheduling cannot change the
/// result.
pub fn sample_radial(
    family: ModelFamily,
    m: u32,
    start: &SphereState,
    config: &AmbientConfig,
) -> Result<Vec<f64>> {
    let dim = ambient_dim(family, m);
    if start.ambient_dim() != dim {
        return Err(Error::config(format!(
            "start point has dimension {}, the {family} model over m = {m} needs {dim}",
            start.ambient_dim()
        )));
    }
    if (start.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::config("start point must lie on the unit sphere"));
    }
    if !(config.dt > 0.0) || config.dt > config.t_final || config.n_paths < 1 {
        return Err(Error::config("need n_paths ≥ 1 and 0 < dt ≤ t_final"));
    }
    let steps = (config.t_final / config.dt).round().max(1.0) as u64;
    let blocks = (dim / 2) as u64;
    let rng = CounterRng::new(config.seed);
    let project = match family {
        ModelFamily::Kahler => project_radial_kahler,
        ModelFamily::QuaternionKahler => project_radial_quaternion,
    };
    let samples: Vec<f64> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut state = start.clone();
            let mut noise = vec![0.0; dim];
            for step in 0..steps {
                for slot in 0..blocks {
                    let (a, b) = rng.normal_pair(path, step * blocks + slot);
                    noise[2 * slot as usize] = a;
                    noise[2 * slot as usize + 1] = b;
                }
                state = sphere_bm_step(&state, config.dt, &noise);
            }
            project(&state)
        })
        .collect();
    Ok(samples)
}
