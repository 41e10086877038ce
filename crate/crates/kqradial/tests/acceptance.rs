//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured error, the pinned tolerance, and the elapsed time.
//! Oracles (Bessel zeros, closed-form spectra, KS critical values) live in
//! this file and are independent of the library's solvers.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

/// The Monte Carlo criteria saturate every core through rayon; letting the
/// test harness run two of them at once would double-book the machine and
/// make the per-criterion runtime budgets meaningless.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy_lock() -> MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|e| e.into_inner())
}

use kqradial::geometry::{rescale, ModelFamily, ModelSpec, RadialLaw};
use kqradial::grid::Grid;
use kqradial::operator::BoundaryMode;
use kqradial::pde;
use kqradial::sde::{simulate_radial, SimConfig};
use kqradial::spectral::{cheng_lambda1_with, extrapolated_eigenvalue, SpectralDecomposition};
use kqradial::sphere::{ambient_dim, sample_radial, AmbientConfig, SphereState};
use kqradial::stats;

fn law(family: ModelFamily, m: u32, k: f64) -> RadialLaw {
    RadialLaw::new(ModelSpec::new(family, m, k).unwrap())
}

fn report(criterion: &str, pass: bool, detail: &str, elapsed: f64) {
    println!(
        "acceptance {criterion}: {} ({detail}, runtime {elapsed:.1}s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

// ---------------------------------------------------------------- oracles

/// J₀ power series (machine precision for |x| ≤ 12); test-local oracle.
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

/// Closed-form compact spectra, written out independently of the library.
fn exact_spectrum(family: ModelFamily, m: u32, level: u32) -> f64 {
    let (l, m) = (f64::from(level), f64::from(m));
    match family {
        ModelFamily::Kahler => 4.0 * l * (l + m),
        ModelFamily::QuaternionKahler => 4.0 * l * (l + 2.0 * m + 1.0),
    }
}

// ------------------------------------------------- criteria 1 & 2 (shared)

struct SpectrumRuns {
    /// (family, m, level, relative error)
    rows: Vec<(ModelFamily, u32, u32, f64)>,
    elapsed: f64,
}

fn spectrum_runs() -> &'static SpectrumRuns {
    static RUNS: OnceLock<SpectrumRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let mut rows = Vec::new();
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
            for level in 1..=3u32 {
                let got =
                    extrapolated_eigenvalue(&l, r, 4096, level as usize, BoundaryMode::Closed)
                        .unwrap();
                let want = exact_spectrum(family, m, level);
                rows.push((family, m, level, (got.value / want - 1.0).abs()));
            }
        }
        SpectrumRuns {
            rows,
            elapsed: start.elapsed().as_secs_f64(),
        }
    })
}

#[test]
fn criterion_01_compact_spectra_level1() {
    let _machine = heavy_lock();
    let runs = spectrum_runs();
    let worst = runs
        .rows
        .iter()
        .filter(|(_, _, level, _)| *level == 1)
        .map(|(_, _, _, e)| *e)
        .fold(0.0f64, f64::max);
    let pass = worst <= 1e-4 && runs.elapsed <= 30.0;
    report(
        "01 compact-spectra-level-1",
        pass,
        &format!("worst rel err {worst:.2e} vs 1e-4 over 5 models"),
        runs.elapsed,
    );
}

#[test]
fn criterion_02_compact_spectra_levels_2_3() {
    let runs = spectrum_runs();
    let worst = runs
        .rows
        .iter()
        .filter(|(_, _, level, _)| *level >= 2)
        .map(|(_, _, _, e)| *e)
        .fold(0.0f64, f64::max);
    report(
        "02 compact-spectra-levels-2-3",
        worst <= 5e-4,
        &format!("worst rel err {worst:.2e} vs 5e-4 (same runs as criterion 1)"),
        0.0,
    );
}

#[test]
fn criterion_03_flat_dirichlet_eigenvalue() {
    let start = Instant::now();
    let j01 = bessel_j0_first_zero();
    let want = j01 * j01;
    let got = cheng_lambda1_with(&law(ModelFamily::Kahler, 1, 0.0), 1.0, 4096).unwrap();
    let rel = (got.value / want - 1.0).abs();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "03 flat-lambda1-vs-bessel-zero",
        rel <= 1e-5 && elapsed <= 5.0,
        &format!("λ₁ = {:.9} vs j₀₁² = {want:.9}, rel err {rel:.2e} vs 1e-5", got.value),
        elapsed,
    );
}

#[test]
fn criterion_04_rescaling_law() {
    let start = Instant::now();
    let cases = [(2u32, 4.0, 0.3), (2, -9.0, 0.4), (1, 0.25, 1.0)];
    let mut worst = 0.0f64;
    for (m, k, r) in cases {
        let spec = ModelSpec::kahler(m, k).unwrap();
        let (unit, scale) = rescale(&spec).unwrap();
        let lhs = cheng_lambda1_with(&RadialLaw::new(spec), r, 2048).unwrap().value;
        let rhs = k.abs()
            * cheng_lambda1_with(&RadialLaw::new(unit), scale * r, 2048)
                .unwrap()
                .value;
        worst = worst.max((lhs / rhs - 1.0).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "04 rescaling-law",
        worst <= 1e-6 && elapsed <= 10.0,
        &format!("worst rel gap {worst:.2e} vs 1e-6 on three (m,k,R) cases"),
        elapsed,
    );
}

#[test]
fn criterion_05_drift_measure_duality() {
    let start = Instant::now();
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
                    let fd = (8.0 * (g(r + h) - g(r - h)) - (g(r + 2.0 * h) - g(r - 2.0 * h)))
                        / (12.0 * h);
                    worst = worst.max((l.drift(r).unwrap() - fd).abs());
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "05 drift-measure-duality",
        worst <= 1e-8 && elapsed <= 1.0,
        &format!("sup |drift − (log density)'| = {worst:.2e} vs 1e-8"),
        elapsed,
    );
}

#[test]
fn criterion_06_dual_route_heat_kernel() {
    let _machine = heavy_lock();
    let start = Instant::now();
    let n = 4096;
    let dt = 1e-4;
    let mut worst = 0.0f64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        for k in [-1.0, 0.0, 1.0] {
            let l = law(family, 2, k);
            let d = SpectralDecomposition::compute(&l, 1.0, n, 48, BoundaryMode::Dirichlet)
                .unwrap();
            for t in [0.1, 0.5] {
                assert!(d.tail_ok(t), "truncation tail not resolved at t = {t}");
                let fd = pde::heat_kernel_fd(&l, 1.0, n, t, 0.0, dt).unwrap();
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
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "06 dual-route-heat-kernel",
        worst <= 1e-3 && elapsed <= 120.0,
        &format!("worst sup-norm relative gap {worst:.2e} vs 1e-3 over 12 kernels"),
        elapsed,
    );
}

#[test]
fn criterion_07_mean_exit_times() {
    let _machine = heavy_lock();
    let start = Instant::now();
    let paths = 100_000;
    let dt = 1e-4;
    let mut detail = String::new();
    let mut pass = true;

    // flat closed forms R²/(4m) and R²/(8m)
    let flat = [
        (ModelFamily::Kahler, 0.25, 0xACC0u64),
        (ModelFamily::QuaternionKahler, 0.125, 0xACC1),
    ];
    for (family, want, seed) in flat {
        let l = law(family, 1, 0.0);
        let e = simulate_radial(
            &l,
            0.0,
            &SimConfig {
                seed,
                n_paths: paths,
                dt,
                t_final: 3.0,
                absorb_at: 1.0,
            },
        )
        .unwrap();
        let (mean, se) = e.mean_absorption_time();
        let ok = (mean - want).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!("{family} flat: {mean:.5}±{se:.1e} vs {want}; "));
    }

    // curved cases against the PDE survival integral
    for (k, seed) in [(1.0, 0xACC2u64), (-1.0, 0xACC3)] {
        let l = law(ModelFamily::Kahler, 1, k);
        let lambda1 = cheng_lambda1_with(&l, 1.0, 1024).unwrap().value;
        let target = pde::mean_exit_time(&l, 1.0, 2048, 0.0, dt, 8.0 / lambda1, lambda1).unwrap();
        let e = simulate_radial(
            &l,
            0.0,
            &SimConfig {
                seed,
                n_paths: paths,
                dt,
                t_final: 3.0,
                absorb_at: 1.0,
            },
        )
        .unwrap();
        let (mean, se) = e.mean_absorption_time();
        let ok = (mean - target).abs() <= 3.0 * se;
        pass &= ok;
        detail.push_str(&format!("k={k}: {mean:.5}±{se:.1e} vs PDE {target:.5}; "));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "07 mean-exit-times",
        pass && elapsed <= 180.0,
        detail.trim_end_matches("; "),
        elapsed,
    );
}

#[test]
fn criterion_08_exit_probabilities() {
    let _machine = heavy_lock();
    let start = Instant::now();
    let paths = 100_000;
    let dt = 1e-4;
    let r0 = 0.2;
    let mut worst_sigma = 0.0f64;
    let mut seed = 0xE817u64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        for k in [-1.0, 0.0, 1.0] {
            for m in [1u32, 2] {
                let l = law(family, m, k);
                seed += 1;
                let e = simulate_radial(
                    &l,
                    r0,
                    &SimConfig {
                        seed,
                        n_paths: paths,
                        dt,
                        t_final: 0.3,
                        absorb_at: 1.0,
                    },
                )
                .unwrap();
                for t in [0.1, 0.3] {
                    let (mc, se) = e.exit_probability(t);
                    let pde_exit =
                        1.0 - pde::survival_probability(&l, 1.0, 2048, r0, t, dt).unwrap();
                    worst_sigma = worst_sigma.max((mc - pde_exit).abs() / se.max(1e-12));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "08 exit-probabilities-mc-vs-pde",
        worst_sigma <= 3.0 && elapsed <= 240.0,
        &format!("worst |MC − PDE| = {worst_sigma:.2}σ vs 3σ over 12 models × 2 times"),
        elapsed,
    );
}

#[test]
fn criterion_09_geometry_oracle_ks() {
    let _machine = heavy_lock();
    let start = Instant::now();
    let paths = 100_000;
    let t = 0.2;
    let critical = 1.6276236115189502 / (paths as f64).sqrt(); // 1% Kolmogorov
    let cases = [
        (ModelFamily::Kahler, 1u32, 0x5EA0u64),
        (ModelFamily::Kahler, 2, 0x5EA1),
        (ModelFamily::QuaternionKahler, 1, 0x5EA2),
    ];
    let mut worst = 0.0f64;
    for (family, m, seed) in cases {
        let l = law(family, m, 1.0);
        let d = SpectralDecomposition::compute(&l, l.domain_max(), 2048, 40, BoundaryMode::Closed)
            .unwrap();
        let cdf = d.kernel_cdf(t);
        for (j, dt) in [1e-4, 5e-5].into_iter().enumerate() {
            let cfg = AmbientConfig {
                seed: seed + j as u64,
                n_paths: paths,
                dt,
                t_final: t,
            };
            let start_state = SphereState::north_pole(ambient_dim(family, m));
            let mut samples = sample_radial(family, m, &start_state, &cfg).unwrap();
            let stat = stats::ks_statistic(&mut samples, |s| cdf.at(s));
            worst = worst.max(stat / critical);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "09 geometry-oracle-ks",
        worst <= 1.0 && elapsed <= 300.0,
        &format!("worst KS / (1% critical) = {worst:.2} over 3 models × 2 step sizes"),
        elapsed,
    );
}

#[test]
fn criterion_10_small_ball_normalization() {
    let start = Instant::now();
    let s = 1e-3;
    let mut worst = 0.0f64;
    for family in [ModelFamily::Kahler, ModelFamily::QuaternionKahler] {
        for m in 1..=3u32 {
            for k in [-1.0, 0.0, 1.0] {
                let l = law(family, m, k);
                let grid = Grid::build(&l, s, 64).unwrap();
                let ratio = grid.total_mass() / l.small_ball_mass(s);
                worst = worst.max((ratio - 1.0).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "10 small-ball-normalization",
        worst <= 1e-4 && elapsed <= 1.0,
        &format!("worst |μ([0,s])/flat − 1| = {worst:.2e} vs 1e-4, s = {s}"),
        elapsed,
    );
}
