//! The consistency suite: every sharpness and cross-route statement the
//! toolkit certifies, run end to end with pinned tolerances and a seed.
//!
//! `Full` runs the production parameters; `Quick` reduces grid sizes and
//! path counts (tolerances loosened accordingly, documented per check) so a
//! fresh checkout can be validated in a couple of minutes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{model_spectrum, ModelFamily, ModelSpec, RadialLaw};
use crate::grid::Grid;
use crate::operator::BoundaryMode;
use crate::pde;
use crate::sde::{simulate_radial, SimConfig};
use crate::spectral::{cheng_lambda1_with, extrapolated_eigenvalue, SpectralDecomposition};
use crate::sphere::{ambient_dim, sample_radial, AmbientConfig, SphereState};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Quick => write!(f, "quick"),
            Level::Full => write!(f, "full"),
        }
    }
}

/// One named check: what was targeted, how far off the measurement was, and
/// the tolerance it had to meet.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub target: String,
    pub measured_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn from_error(name: &str, tolerance: f64, measured_error: f64, target: String) -> Self {
        Check {
            name: name.to_string(),
            target,
            measured_error,
            tolerance,
            pass: measured_error.is_finite() && measured_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub toolkit_version: String,
    pub seed: u64,
    pub level: Level,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn overall_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))
    }

    /// Human-readable rendering, one line per check.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "validation suite v{} level={} seed={}\n",
            self.toolkit_version, self.level, self.seed
        );
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {:<34} err={:<12.4e} tol={:<10.3e} {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured_error,
                c.tolerance,
                c.target
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

struct Params {
    eig_n: usize,
    eig_tol_l1: f64,
    eig_tol_l23: f64,
    bessel_n: usize,
    bessel_tol: f64,
    rescale_n: usize,
    heat_n: usize,
    heat_dt: f64,
    heat_tol: f64,
    exit_paths: usize,
    exit_dt: f64,
    mean_paths: usize,
    mean_dt: f64,
    sphere_paths: usize,
    sphere_dt: f64,
}

impl Params {
    fn for_level(level: Level) -> Self {
        match level {
            Level::Full => Params {
                eig_n: 4096,
                eig_tol_l1: 1e-4,
                eig_tol_l23: 5e-4,
                bessel_n: 4096,
                bessel_tol: 1e-5,
                rescale_n: 2048,
                heat_n: 4096,
                heat_dt: 1e-4,
                heat_tol: 1e-3,
                exit_paths: 100_000,
                exit_dt: 1e-4,
                mean_paths: 100_000,
                mean_dt: 1e-4,
                sphere_paths: 100_000,
                sphere_dt: 1e-4,
            },
            // reduced resolution and path counts; tolerances widened where
            // the coarser grids bite (spectra, kernels), and the 3σ Monte
            // Carlo bounds widen automatically with fewer paths
            Level::Quick => Params {
                eig_n: 512,
                eig_tol_l1: 1e-3,
                eig_tol_l23: 2e-3,
                bessel_n: 1024,
                bessel_tol: 1e-4,
                rescale_n: 512,
                heat_n: 1024,
                heat_dt: 2e-4,
                heat_tol: 2e-3,
                exit_paths: 5_000,
                exit_dt: 2e-4,
                mean_paths: 10_000,
                mean_dt: 2e-4,
                sphere_paths: 20_000,
                sphere_dt: 2e-4,
            },
        }
    }
}

/// Runs the whole suite. Failures are recorded per check; only structural
/// errors (a solver refusing to run) abort.
pub fn run_suite(level: Level, seed: u64) -> Result<ValidationReport> {
    let p = Params::for_level(level);
    let mut checks = Vec::new();

    compact_spectra_checks(&p, &mut checks)?;
    checks.push(flat_lambda1_check(&p)?);
    checks.push(rescaling_check(&p)?);
    checks.push(duality_check());
    heat_kernel_checks(&p, &mut checks)?;
    mean_exit_checks(&p, seed, &mut checks)?;
    exit_probability_checks(&p, seed, &mut checks)?;
    sphere_checks(&p, seed, &mut checks)?;
    checks.push(small_ball_check(1.0));

    Ok(ValidationReport {
        toolkit_version: crate::VERSION.to_string(),
        seed,
        level,
        checks,
    })
}

fn law(family: ModelFamily, m: u32, k: f64) -> RadialLaw {
    RadialLaw::new(ModelSpec { family, m, k })
}

// ---------------------------------------------------------------- spectra

fn compact_spectra_checks(p: &Params, checks: &mut Vec<Check>) -> Result<()> {
    let cases = [
        (ModelFamily::Kahler, 1u32),
        (ModelFamily::Kahler, 2),
        (ModelFamily::Kahler, 3),
        (ModelFamily::QuaternionKahler, 1),
        (ModelFamily::QuaternionKahler, 2),
    ];
    for (family, m) in cases {
        let l = law(family, m, 1.0);
        let r = l.domain_max();
        // level index into the closed spectrum: 0 is the constant mode
        let mut worst_l1 = 0.0f64;
        let mut worst_l23 = 0.0f64;
        for level in 1..=3usize {
            let got = extrapolated_eigenvalue(&l, r, p.eig_n, level, BoundaryMode::Closed)?;
            let want = model_spectrum(family, m, level as u32)?;
            let rel = (got.value / want - 1.0).abs();
            if level == 1 {
                worst_l1 = rel;
            } else {
                worst_l23 = worst_l23.max(rel);
            }
        }
        checks.push(Check::from_error(
            &format!("spectrum-level1-{family}-m{m}"),
            p.eig_tol_l1,
            worst_l1,
            format!(
                "closed-mode eigenvalue vs exact {} (n = {}, Richardson)",
                model_spectrum(family, m, 1)?,
                p.eig_n
            ),
        ));
        checks.push(Check::from_error(
            &format!("spectrum-levels23-{family}-m{m}"),
            p.eig_tol_l23,
            worst_l23,
            format!("closed-mode levels 2–3 vs exact spectrum (n = {})", p.eig_n),
        ));
    }
    Ok(())
}

/// J₀ power series; independent of everything in `spectral`.
fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for j in 1..60 {
        term *= -q / ((j * j) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(lo) * bessel_j0(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn flat_lambda1_check(p: &Params) -> Result<Check> {
    let j01 = bessel_j0_first_zero();
    let want = j01 * j01;
    let got = cheng_lambda1_with(&law(ModelFamily::Kahler, 1, 0.0), 1.0, p.bessel_n)?;
    Ok(Check::from_error(
        "flat-lambda1-bessel",
        p.bessel_tol,
        (got.value / want - 1.0).abs(),
        format!("λ₁(m=1,k=0,R=1) vs j₀₁² = {want:.12} from the series root-finder"),
    ))
}

fn rescaling_check(p: &Params) -> Result<Check> {
    let cases = [(2u32, 4.0, 0.3), (2, -9.0, 0.4), (1, 0.25, 1.0)];
    let mut worst = 0.0f64;
    for (m, k, r) in cases {
        let spec = ModelSpec {
            family: ModelFamily::Kahler,
            m,
            k,
        };
        let (unit, scale) = crate::geometry::rescale(&spec)?;
        let lhs = cheng_lambda1_with(&RadialLaw::new(spec), r, p.rescale_n)?.value;
        let rhs = k.abs() * cheng_lambda1_with(&RadialLaw::new(unit), scale * r, p.rescale_n)?.value;
        worst = worst.max((lhs / rhs - 1.0).abs());
    }
    Ok(Check::from_error(
        "rescaling-law",
        1e-6,
        worst,
        format!(
            "λ₁(m,k,R) = |k|·λ₁(m,±1,√|k|R) on three (m,k,R) cases (n = {})",
            p.rescale_n
        ),
    ))
}

fn duality_check() -> Check {
    let mut worst = 0.0f64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        for k in [-1.0, 0.0, 1.0] {
            for m in 1..=3u32 {
                let l = law(family, m, k);
                let top = if k > 0.0 { l.domain_max() } else { 1.5 };
                for i in 0..=60 {
                    let r = top * (0.05 + 0.9 * i as f64 / 60.0);
                    let h = 1e-5;
                    let g = |x: f64| l.density(x).unwrap().ln();
                    let fd =
                        (8.0 * (g(r + h) - g(r - h)) - (g(r + 2.0 * h) - g(r - 2.0 * h)))
                            / (12.0 * h);
                    worst = worst.max((l.drift(r).unwrap() - fd).abs());
                }
            }
        }
    }
    Check::from_error(
        "drift-measure-duality",
        1e-8,
        worst,
        "sup |drift − (log density)'| on 0.05R..0.95R, all families, k ∈ {−1,0,1}, m ≤ 3".into(),
    )
}

// ------------------------------------------------------------ heat kernels

fn heat_kernel_checks(p: &Params, checks: &mut Vec<Check>) -> Result<()> {
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        let mut worst = 0.0f64;
        for k in [-1.0, 0.0, 1.0] {
            let l = law(family, 2, k);
            let d = SpectralDecomposition::compute(&l, 1.0, p.heat_n, 48, BoundaryMode::Dirichlet)?;
            for t in [0.1, 0.5] {
                let fd = pde::heat_kernel_fd(&l, 1.0, p.heat_n, t, 0.0, p.heat_dt)?;
                let spectral = d.kernel_column(t, d.grid().centers()[0]);
                let sup = spectral.iter().fold(0.0f64, |a, q| a.max(q.abs()));
                let gap = fd
                    .values
                    .iter()
                    .zip(&spectral)
                    .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                worst = worst.max(gap / sup);
            }
        }
        checks.push(Check::from_error(
            &format!("heat-kernel-dual-route-{family}"),
            p.heat_tol,
            worst,
            format!(
                "sup-norm relative gap, series vs time stepping, m=2, k ∈ {{−1,0,1}}, t ∈ {{0.1,0.5}} (n = {}, dt = {})",
                p.heat_n, p.heat_dt
            ),
        ));
    }
    Ok(())
}

// -------------------------------------------------------------- exit times

fn mean_exit_checks(p: &Params, seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    // flat closed forms R²/(4m), R²/(8m)
    let flat_cases = [
        (ModelFamily::Kahler, "kahler-flat", 0.25),
        (ModelFamily::QuaternionKahler, "quaternion-flat", 0.125),
    ];
    for (i, (family, tag, want)) in flat_cases.into_iter().enumerate() {
        let l = law(family, 1, 0.0);
        let e = simulate_radial(
            &l,
            0.0,
            &SimConfig {
                seed: seed.wrapping_add(1000 + i as u64),
                n_paths: p.mean_paths,
                dt: p.mean_dt,
                t_final: 3.0,
                absorb_at: 1.0,
            },
        )?;
        let (mean, se) = e.mean_absorption_time();
        checks.push(Check::from_error(
            &format!("mean-exit-{tag}"),
            3.0 * se,
            (mean - want).abs(),
            format!("MC mean absorption from 0 vs closed form {want} ({} paths)", p.mean_paths),
        ));
    }
    // curved cases against the PDE survival integral
    for (i, k) in [1.0, -1.0].into_iter().enumerate() {
        let l = law(ModelFamily::Kahler, 1, k);
        let lambda1 = cheng_lambda1_with(&l, 1.0, 1024)?.value;
        let target = pde::mean_exit_time(&l, 1.0, 2048, 0.0, p.mean_dt, 8.0 / lambda1, lambda1)?;
        let e = simulate_radial(
            &l,
            0.0,
            &SimConfig {
                seed: seed.wrapping_add(1100 + i as u64),
                n_paths: p.mean_paths,
                dt: p.mean_dt,
                t_final: 3.0,
                absorb_at: 1.0,
            },
        )?;
        let (mean, se) = e.mean_absorption_time();
        checks.push(Check::from_error(
            &format!("mean-exit-kahler-k{}", if k > 0.0 { "+1" } else { "-1" }),
            3.0 * se,
            (mean - target).abs(),
            format!("MC mean absorption vs PDE survival integral {target:.6}"),
        ));
    }
    Ok(())
}

fn exit_probability_checks(p: &Params, seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    let r0 = 0.2;
    let mut stream = 2000u64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        let mut worst_sigma = 0.0f64;
        for k in [-1.0, 0.0, 1.0] {
            for m in [1u32, 2] {
                let l = law(family, m, k);
                stream += 1;
                let e = simulate_radial(
                    &l,
                    r0,
                    &SimConfig {
                        seed: seed.wrapping_add(stream),
                        n_paths: p.exit_paths,
                        dt: p.exit_dt,
                        t_final: 0.3,
                        absorb_at: 1.0,
                    },
                )?;
                for t in [0.1, 0.3] {
                    let (mc, se) = e.exit_probability(t);
                    let survival = pde::survival_probability(&l, 1.0, 2048, r0, t, p.exit_dt)?;
                    let sigmas = (mc - (1.0 - survival)).abs() / se.max(1e-12);
                    worst_sigma = worst_sigma.max(sigmas);
                }
            }
        }
        checks.push(Check::from_error(
            &format!("exit-probability-vs-pde-{family}"),
            3.0,
            worst_sigma,
            format!(
                "worst |MC − (1 − survival)| in σ units over k ∈ {{−1,0,1}}, m ∈ {{1,2}}, t ∈ {{0.1,0.3}} ({} paths)",
                p.exit_paths
            ),
        ));
    }
    Ok(())
}

// ------------------------------------------------------------------ sphere

fn sphere_checks(p: &Params, seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    let cases = [
        (ModelFamily::Kahler, 1u32),
        (ModelFamily::Kahler, 2),
        (ModelFamily::QuaternionKahler, 1),
    ];
    let t = 0.2;
    for (i, (family, m)) in cases.into_iter().enumerate() {
        let l = law(family, m, 1.0);
        let d = SpectralDecomposition::compute(&l, l.domain_max(), 2048, 40, BoundaryMode::Closed)?;
        let cdf = d.kernel_cdf(t);
        let mut worst = 0.0f64;
        for (j, dt) in [p.sphere_dt, 0.5 * p.sphere_dt].into_iter().enumerate() {
            let cfg = AmbientConfig {
                seed: seed.wrapping_add(3000 + 10 * i as u64 + j as u64),
                n_paths: p.sphere_paths,
                dt,
                t_final: t,
            };
            let start = SphereState::north_pole(ambient_dim(family, m));
            let mut samples = sample_radial(family, m, &start, &cfg)?;
            let stat = stats::ks_statistic(&mut samples, |s| cdf.at(s));
            worst = worst.max(stat / stats::ks_critical_1pct(p.sphere_paths));
        }
        checks.push(Check::from_error(
            &format!("sphere-radial-law-{family}-m{m}"),
            1.0,
            worst,
            format!(
                "KS vs 1-D law at t = {t} in units of the 1% critical value ({} paths, dt and dt/2)",
                p.sphere_paths
            ),
        ));
    }
    Ok(())
}

// -------------------------------------------------------------- small ball

/// Small-ball normalization `μ_k([0,s]) / (flat ball mass)` → 1; `scale`
/// perturbs the density and exists so tests can show that a tampered
/// normalization constant is caught.
fn small_ball_check(scale: f64) -> Check {
    let s = 1e-3;
    let mut worst = 0.0f64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        for m in 1..=3u32 {
            for k in [-1.0, 0.0, 1.0] {
                let l = law(family, m, k);
                let grid = Grid::build(&l, s, 64).expect("small-ball grid");
                let ratio = scale * grid.total_mass() / l.small_ball_mass(s);
                worst = worst.max((ratio - 1.0).abs());
            }
        }
    }
    Check::from_error(
        "small-ball-normalization",
        1e-4,
        worst,
        "μ([0,s]) vs flat ball mass at s = 1e−3, all families, k ∈ {−1,0,1}, m ≤ 3".into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ball_check_passes_and_catches_tampering() {
        assert!(small_ball_check(1.0).pass);
        let tampered = small_ball_check(1.001);
        assert!(!tampered.pass, "tampered normalization not caught");
    }

    #[test]
    fn report_json_roundtrip() {
        let report = ValidationReport {
            toolkit_version: crate::VERSION.to_string(),
            seed: 7,
            level: Level::Quick,
            checks: vec![Check::from_error("probe", 1e-3, 5e-4, "probe target".into())],
        };
        let json = report.to_json();
        let back = ValidationReport::from_json(&json).unwrap();
        assert_eq!(report, back);
        assert_eq!(json, back.to_json());
        assert!(report.overall_pass());
    }

    #[test]
    fn failed_check_fails_report() {
        let c = Check::from_error("probe", 1e-6, 1.0, "must fail".into());
        assert!(!c.pass);
        let report = ValidationReport {
            toolkit_version: crate::VERSION.to_string(),
            seed: 0,
            level: Level::Quick,
            checks: vec![c],
        };
        assert!(!report.overall_pass());
        assert!(report.render_text().contains("FAIL"));
    }

    #[test]
    fn duality_and_bessel_cells_pass() {
        assert!(duality_check().pass);
        let p = Params::for_level(Level::Quick);
        assert!(flat_lambda1_check(&p).unwrap().pass);
    }
}
