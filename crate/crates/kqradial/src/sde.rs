//! Monte Carlo simulation of the radial comparison diffusion
//!
//! ```text
//! dρ_t = drift(ρ_t) dt + √2 dβ_t,    ρ_0 = r0,
//! ```
//!
//! absorbed at the level `R`. The Euler–Maruyama step uses a per-step normal
//! from the counter-based generator, a Brownian-bridge correction for
//! crossings the discrete chain misses, and a reflecting guard at the
//! origin. Paths are embarrassingly parallel and reproduce the sequential
//! ensemble exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialLaw;
use crate::rng::CounterRng;

/// Simulation parameters; `absorb_at` is the level whose hitting time is
/// recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub dt: f64,
    pub t_final: f64,
    pub absorb_at: f64,
}

/// What became of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathOutcome {
    /// Hit the absorbing level at this time.
    Absorbed { time: f64 },
    /// Still alive at `t_final`, at this position.
    Alive { position: f64 },
}

#[derive(Debug, Clone)]
pub struct PathEnsemble {
    config: SimConfig,
    law: RadialLaw,
    r0: f64,
    outcomes: Vec<PathOutcome>,
}

/// Simulates the ensemble. Origin guard: the drift is evaluated no closer to
/// 0 than `max(1e−8, ½√(2dt))` — with a fixed floor alone, a path started at
/// the origin would see `drift·dt ~ (2m−1)·dt/1e−8` and jump across the whole
/// domain in one step — and any step landing at or below 0 is reflected.
pub fn simulate_radial(law: &RadialLaw, r0: f64, config: &SimConfig) -> Result<PathEnsemble> {
    validate(law, r0, config)?;
    let steps = (config.t_final / config.dt).round().max(1.0) as u64;
    let rng = CounterRng::new(config.seed);
    let law_copy = *law;
    let cfg = *config;
    let outcomes: Vec<PathOutcome> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|path| simulate_one(&law_copy, r0, &cfg, steps, &rng, path))
        .collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble {
        config: cfg,
        law: law_copy,
        r0,
        outcomes,
    })
}

fn validate(law: &RadialLaw, r0: f64, config: &SimConfig) -> Result<()> {
    if config.n_paths < 1 {
        return Err(Error::config("need at least one path"));
    }
    if !(config.dt > 0.0) || config.dt > config.t_final {
        return Err(Error::config(format!(
            "need 0 < dt ≤ t_final, got dt = {}, t_final = {}",
            config.dt, config.t_final
        )));
    }
    if config.absorb_at > law.domain_max() * (1.0 + 1e-12) {
        return Err(Error::config(format!(
            "absorbing level {} exceeds the domain end {}",
            config.absorb_at,
            law.domain_max()
        )));
    }
    if !(0.0..config.absorb_at).contains(&r0) {
        return Err(Error::config(format!(
            "start r0 = {r0} must lie in [0, {})",
            config.absorb_at
        )));
    }
    Ok(())
}

fn simulate_one(
    law: &RadialLaw,
    r0: f64,
    config: &SimConfig,
    steps: u64,
    rng: &CounterRng,
    path: u64,
) -> Result<PathOutcome> {
    let dt = config.dt;
    let level = config.absorb_at;
    let noise_scale = (2.0 * dt).sqrt();
    let origin_floor = 1e-8f64.max(0.5 * noise_scale);
    let cap = if law.spec().k > 0.0 {
        law.domain_max() - 1e-8
    } else {
        f64::INFINITY
    };
    let mut rho = r0;
    for step in 0..steps {
        let z = rng.normal(path, 2 * step);
        let x = rho;
        let drift = law.drift_unchecked(x.max(origin_floor).min(cap));
        let mut y = x + drift * dt + noise_scale * z;
        if !y.is_finite() {
            return Err(Error::Numerics(format!(
                "path {path} blew up at step {step} (state {x})"
            )));
        }
        if y <= 0.0 {
            y = -y;
        }
        if y >= level {
            return Ok(PathOutcome::Absorbed {
                time: (step + 1) as f64 * dt,
            });
        }
        // Brownian bridge with variance 2dt: crossing probability
        // exp(−2(R−x)(R−y)/(2dt)) = exp(−(R−x)(R−y)/dt)
        let exponent = (level - x) * (level - y) / dt;
        if exponent < 40.0 && rng.uniform(path, 2 * step + 1) < (-exponent).exp() {
            return Ok(PathOutcome::Absorbed {
                time: (step + 1) as f64 * dt,
            });
        }
        rho = y.min(cap);
    }
    Ok(PathOutcome::Alive { position: rho })
}

impl PathEnsemble {
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn law(&self) -> &RadialLaw {
        &self.law
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn outcomes(&self) -> &[PathOutcome] {
        &self.outcomes
    }

    pub fn n_paths(&self) -> usize {
        self.outcomes.len()
    }

    /// Fraction of paths absorbed by time `t` (clamped to `t_final`), with
    /// binomial standard error. `t = 0` is exactly `(0, 0)`; a degenerate
    /// all-or-nothing sample reports the conservative bound `0.5/√N`.
    pub fn exit_probability(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        let n = self.n_paths() as f64;
        let hits = self
            .outcomes
            .iter()
            .filter(|o| matches!(o, PathOutcome::Absorbed { time } if *time <= t))
            .count() as f64;
        let p = hits / n;
        (p, binomial_se(p, n))
    }

    /// Joint probability estimate `P(ρ_t < s, still alive at t_final)` from
    /// the recorded final positions, with binomial standard error.
    pub fn empirical_cdf(&self, s: f64) -> (f64, f64) {
        let n = self.n_paths() as f64;
        let hits = self
            .outcomes
            .iter()
            .filter(|o| matches!(o, PathOutcome::Alive { position } if *position < s))
            .count() as f64;
        let p = hits / n;
        (p, binomial_se(p, n))
    }

    /// Fraction of paths alive at `t_final`.
    pub fn alive_fraction(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, PathOutcome::Alive { .. }))
            .count() as f64
            / self.n_paths() as f64
    }

    /// Mean absorption time and its standard error; paths still alive at
    /// `t_final` contribute `t_final` (choose `t_final` large enough that
    /// the survivor fraction is negligible when estimating `E[τ]`).
    pub fn mean_absorption_time(&self) -> (f64, f64) {
        let n = self.n_paths() as f64;
        let times: Vec<f64> = self
            .outcomes
            .iter()
            .map(|o| match o {
                PathOutcome::Absorbed { time } => *time,
                PathOutcome::Alive { .. } => self.config.t_final,
            })
            .collect();
        let mean = times.iter().sum::<f64>() / n;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }

    /// CSV rows `(path_id, absorption_time, final_position)`; the field that
    /// does not apply is left empty. 17 significant digits throughout.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path_id,absorption_time,final_position\n");
        for (i, o) in self.outcomes.iter().enumerate() {
            match o {
                PathOutcome::Absorbed { time } => {
                    out.push_str(&format!("{i},{:.16e},\n", time));
                }
                PathOutcome::Alive { position } => {
                    out.push_str(&format!("{i},,{:.16e}\n", position));
                }
            }
        }
        out
    }
}

fn binomial_se(p: f64, n: f64) -> f64 {
    let v = p * (1.0 - p);
    if v == 0.0 {
        0.5 / n.sqrt()
    } else {
        (v / n).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelFamily, ModelSpec};
    use crate::operator::BoundaryMode;
    use crate::pde;
    use crate::spectral::SpectralDecomposition;

    fn law(family: ModelFamily, m: u32, k: f64) -> RadialLaw {
        RadialLaw::new(ModelSpec::new(family, m, k).unwrap())
    }

    fn config(seed: u64, n_paths: usize, dt: f64, t_final: f64, level: f64) -> SimConfig {
        SimConfig {
            seed,
            n_paths,
            dt,
            t_final,
            absorb_at: level,
        }
    }

    #[test]
    fn short_horizon_keeps_paths_near_start() {
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let e = simulate_radial(&l, 0.0, &config(1, 500, 1e-5, 1e-4, 1.0)).unwrap();
        assert_eq!(e.exit_probability(1e-4).0, 0.0);
        let mut sum = 0.0;
        for o in e.outcomes() {
            match o {
                // r.m.s. scale is √(4t) = 0.02; 0.12 is a ~6σ envelope
                PathOutcome::Alive { position } => {
                    assert!(*position < 0.12);
                    sum += position;
                }
                PathOutcome::Absorbed { .. } => panic!("absorbed on a vanishing horizon"),
            }
        }
        assert!(sum / (e.n_paths() as f64) < 0.03);
    }

    #[test]
    fn identical_seeds_reproduce_ensembles() {
        let l = law(ModelFamily::Kahler, 2, 1.0);
        let cfg = config(1234, 2000, 1e-3, 0.5, 1.0);
        let a = simulate_radial(&l, 0.2, &cfg).unwrap();
        let b = simulate_radial(&l, 0.2, &cfg).unwrap();
        assert_eq!(a.outcomes(), b.outcomes());
        assert_eq!(a.to_csv(), b.to_csv());
        let mut cfg2 = cfg;
        cfg2.seed = 1235;
        let c = simulate_radial(&l, 0.2, &cfg2).unwrap();
        assert_ne!(a.outcomes(), c.outcomes());
    }

    #[test]
    fn config_validation() {
        let l = law(ModelFamily::Kahler, 1, 1.0);
        assert!(simulate_radial(&l, 0.0, &config(1, 0, 1e-3, 1.0, 1.0)).is_err());
        assert!(simulate_radial(&l, 0.0, &config(1, 10, 2.0, 1.0, 1.0)).is_err());
        assert!(simulate_radial(&l, 0.0, &config(1, 10, 1e-3, 1.0, 2.0)).is_err());
        assert!(simulate_radial(&l, 1.0, &config(1, 10, 1e-3, 1.0, 1.0)).is_err());
    }

    #[test]
    fn flat_mean_exit_matches_closed_form() {
        // E[τ] from the center of the unit disk law is R²/(4m) = 1/4
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let e = simulate_radial(&l, 0.0, &config(9, 20_000, 1e-4, 3.0, 1.0)).unwrap();
        let (mean, se) = e.mean_absorption_time();
        assert!(
            (mean - 0.25).abs() <= 3.0 * se,
            "mean {mean} ± {se} vs 0.25"
        );
    }

    #[test]
    fn exit_probability_tends_to_one() {
        let l = law(ModelFamily::QuaternionKahler, 1, 0.0);
        let e = simulate_radial(&l, 0.0, &config(5, 5000, 1e-4, 2.0, 0.8)).unwrap();
        let (p, se) = e.exit_probability(2.0);
        assert!(p > 1.0 - 3.0 * se.max(1e-4), "p = {p}");
    }

    #[test]
    fn exit_probability_matches_pde_survival() {
        let l = law(ModelFamily::Kahler, 2, 1.0);
        let e = simulate_radial(&l, 0.2, &config(21, 20_000, 1e-4, 0.3, 1.0)).unwrap();
        let (p, se) = e.exit_probability(0.3);
        let survival = pde::survival_probability(&l, 1.0, 2048, 0.2, 0.3, 1e-4).unwrap();
        assert!(
            (p - (1.0 - survival)).abs() <= 3.0 * se,
            "MC {p} ± {se} vs PDE {}",
            1.0 - survival
        );
    }

    #[test]
    fn empirical_cdf_edges() {
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let e = simulate_radial(&l, 0.0, &config(3, 4000, 1e-4, 0.1, 1.0)).unwrap();
        assert_eq!(e.empirical_cdf(0.0).0, 0.0);
        let (at_wall, _) = e.empirical_cdf(1.0);
        assert_eq!(at_wall, e.alive_fraction());
        // monotone in s
        let mut prev = 0.0;
        for i in 1..=10 {
            let (p, _) = e.empirical_cdf(i as f64 * 0.1);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn empirical_cdf_matches_spectral_mass() {
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let t = 0.1;
        let e = simulate_radial(&l, 0.0, &config(11, 40_000, 1e-4, t, 1.0)).unwrap();
        let d = SpectralDecomposition::compute(&l, 1.0, 2048, 48, BoundaryMode::Dirichlet).unwrap();
        let cdf = d.kernel_cdf(t);
        for s in [0.2, 0.4, 0.6, 0.8] {
            let (p, se) = e.empirical_cdf(s);
            let oracle = cdf.at(s);
            assert!(
                (p - oracle).abs() <= 3.0 * se.max(1e-4),
                "s={s}: MC {p} ± {se} vs spectral {oracle}"
            );
        }
    }

    #[test]
    fn absorbed_fraction_monotone_in_level_and_time() {
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let e_small = simulate_radial(&l, 0.0, &config(8, 4000, 1e-4, 0.4, 0.6)).unwrap();
        let e_large = simulate_radial(&l, 0.0, &config(8, 4000, 1e-4, 0.4, 1.0)).unwrap();
        assert!(e_small.exit_probability(0.4).0 >= e_large.exit_probability(0.4).0);
        assert!(e_large.exit_probability(0.2).0 <= e_large.exit_probability(0.4).0);
    }

    #[test]
    fn halving_dt_moves_estimates_within_noise() {
        let l = law(ModelFamily::QuaternionKahler, 1, 1.0);
        let t = 0.25;
        let coarse = simulate_radial(&l, 0.1, &config(17, 40_000, 2e-4, t, 1.0)).unwrap();
        let fine = simulate_radial(&l, 0.1, &config(18, 40_000, 1e-4, t, 1.0)).unwrap();
        let (pc, sec) = coarse.exit_probability(t);
        let (pf, sef) = fine.exit_probability(t);
        let combined = (sec * sec + sef * sef).sqrt();
        assert!(
            (pc - pf).abs() <= 2.0 * combined,
            "dt bias: {pc} vs {pf} (2σ = {})",
            2.0 * combined
        );
    }

    #[test]
    fn csv_shape_and_single_path_se() {
        let l = law(ModelFamily::Kahler, 1, 0.0);
        let e = simulate_radial(&l, 0.0, &config(2, 1, 1e-3, 0.01, 1.0)).unwrap();
        let (_, se) = e.exit_probability(0.01);
        assert_eq!(se, 0.5);
        let csv = e.to_csv();
        assert!(csv.starts_with("path_id,absorption_time,final_position\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
