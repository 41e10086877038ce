//! Closed-form layer: the comparison function, radial drifts, invariant
//! measure densities, curvature constants, and exact spectra of the six
//! model spaces.
//!
//! A model space is identified by a [`ModelSpec`]: a family (Kähler or
//! quaternion-Kähler), a dimension `m` (complex resp. quaternionic), and a
//! real curvature parameter `k`. The radial part of Brownian motion on the
//! model is a one-dimensional diffusion on `[0, domain_max)` with generator
//!
//! ```text
//! L = d²/dr² + drift(r) d/dr,
//! ```
//!
//! where the drift is a combination of the comparison function
//! [`comparison_f`]:
//!
//! * Kähler:            `(2m−2) F(k,r) + 2 F(k,2r)`
//! * quaternion-Kähler: `(4m−4) F(k,r) + 6 F(k,2r)`
//!
//! `L` is symmetric with respect to an explicit radial measure whose density
//! [`RadialLaw::density`] integrates to the volume of the model ball; the
//! identity `drift = (log density)'` is what ties the two together and is
//! enforced by the tests.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The two geometry families covered by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Kahler,
    QuaternionKahler,
}

impl ModelFamily {
    /// Real dimension of the model with complex/quaternionic dimension `m`.
    pub fn real_dimension(self, m: u32) -> u32 {
        match self {
            ModelFamily::Kahler => 2 * m,
            ModelFamily::QuaternionKahler => 4 * m,
        }
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelFamily::Kahler => write!(f, "kahler"),
            ModelFamily::QuaternionKahler => write!(f, "quaternion"),
        }
    }
}

/// Identity card of a model space: family, dimension, curvature parameter.
///
/// Every computation in the toolkit keys on one of these. For `k > 0` the
/// radial variable lives on `[0, π/(2√k)]` (distance to the cut locus); for
/// `k ≤ 0` it is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub m: u32,
    pub k: f64,
}

impl ModelSpec {
    pub fn new(family: ModelFamily, m: u32, k: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::domain("dimension m must be at least 1"));
        }
        if !k.is_finite() {
            return Err(Error::domain("curvature parameter k must be finite"));
        }
        Ok(ModelSpec { family, m, k })
    }

    pub fn kahler(m: u32, k: f64) -> Result<Self> {
        Self::new(ModelFamily::Kahler, m, k)
    }

    pub fn quaternion(m: u32, k: f64) -> Result<Self> {
        Self::new(ModelFamily::QuaternionKahler, m, k)
    }

    pub fn real_dimension(&self) -> u32 {
        self.family.real_dimension(self.m)
    }

    /// Upper end of the radial domain: `π/(2√k)` for `k > 0`, `+∞` otherwise.
    pub fn domain_max(&self) -> f64 {
        if self.k > 0.0 {
            0.5 * PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Checks that a ball radius fits inside the radial domain.
    pub fn check_radius(&self, r_max: f64) -> Result<()> {
        if !(r_max > 0.0) {
            return Err(Error::domain(format!("radius {r_max} must be positive")));
        }
        let dm = self.domain_max();
        if r_max > dm * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "radius {r_max} exceeds the cut distance {dm}"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} m={} k={}", self.family, self.m, self.k)
    }
}

/// The comparison function
///
/// ```text
///           ⎧ √k  cot(√k r)     k > 0   (r < π/√k)
/// F(k, r) = ⎨ 1/r               k = 0
///           ⎩ √|k| coth(√|k| r) k < 0
/// ```
///
/// All three branches share the expansion `1/r − kr/3 − k²r³/45 − …`, which
/// is used near `r = 0` and near `k = 0` so that `F` is continuous across
/// branches in floating point.
pub fn comparison_f(k: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("comparison function needs r > 0, got {r}")));
    }
    if k > 0.0 && r >= PI / k.sqrt() {
        return Err(Error::domain(format!(
            "comparison function needs r < π/√k = {}, got {r}",
            PI / k.sqrt()
        )));
    }
    Ok(comparison_f_unchecked(k, r))
}

/// Series cutoff: below this the trig/hyperbolic branches lose digits, so the
/// Laurent expansion is used instead (it is also what makes F continuous in k
/// at k = 0).
#[inline]
pub(crate) fn comparison_f_unchecked(k: f64, r: f64) -> f64 {
    let ka = k.abs();
    if r < 1e-4 / ka.max(1.0).sqrt() || ka * r * r < 1e-12 {
        let kr2 = k * r * r;
        return (1.0 - kr2 / 3.0 - kr2 * kr2 / 45.0) / r;
    }
    if k > 0.0 {
        let x = k.sqrt() * r;
        k.sqrt() * x.cos() / x.sin()
    } else if k < 0.0 {
        let s = (-k).sqrt();
        s / (s * r).tanh()
    } else {
        1.0 / r
    }
}

/// Law of a radial comparison diffusion: drift, invariant measure density,
/// and domain. Thin wrapper over a [`ModelSpec`]; both callables are pure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialLaw {
    spec: ModelSpec,
}

impl RadialLaw {
    pub fn new(spec: ModelSpec) -> Self {
        RadialLaw { spec }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn domain_max(&self) -> f64 {
        self.spec.domain_max()
    }

    /// Drift of the radial generator at `r ∈ (0, domain_max)`.
    pub fn drift(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r >= self.domain_max() {
            return Err(Error::domain(format!(
                "drift needs 0 < r < {}, got {r}",
                self.domain_max()
            )));
        }
        Ok(self.drift_unchecked(r))
    }

    #[inline]
    pub(crate) fn drift_unchecked(&self, r: f64) -> f64 {
        let k = self.spec.k;
        let m = f64::from(self.spec.m);
        match self.spec.family {
            ModelFamily::Kahler => {
                (2.0 * m - 2.0) * comparison_f_unchecked(k, r)
                    + 2.0 * comparison_f_unchecked(k, 2.0 * r)
            }
            ModelFamily::QuaternionKahler => {
                (4.0 * m - 4.0) * comparison_f_unchecked(k, r)
                    + 6.0 * comparison_f_unchecked(k, 2.0 * r)
            }
        }
    }

    /// Density of the invariant radial measure at `r ∈ [0, domain_max]`,
    /// with the normalization that makes small balls have the flat volume
    /// `(π^m/m!) s^{2m}` (resp. `(π^{2m}/(2m)!) s^{4m}`) for every `k`.
    pub fn density(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || r > self.domain_max() * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "measure density needs 0 ≤ r ≤ {}, got {r}",
                self.domain_max()
            )));
        }
        Ok(self.density_unchecked(r))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, r: f64) -> f64 {
        let k = self.spec.k;
        let m = self.spec.m;
        match self.spec.family {
            ModelFamily::Kahler => {
                // 2 π^m/(m−1)! r^{2m−1} at k = 0; sin/sinh analogues rescaled
                // by k^{m−1/2} so the k → 0 limit is exact.
                let base = PI.powi(m as i32) / factorial(m - 1);
                if k > 0.0 {
                    let s = k.sqrt();
                    base / k.powf(m as f64 - 0.5)
                        * (s * r).sin().powi(2 * m as i32 - 2)
                        * (2.0 * s * r).sin()
                } else if k < 0.0 {
                    let a = -k;
                    let s = a.sqrt();
                    base / a.powf(m as f64 - 0.5)
                        * (s * r).sinh().powi(2 * m as i32 - 2)
                        * (2.0 * s * r).sinh()
                } else {
                    2.0 * base * r.powi(2 * m as i32 - 1)
                }
            }
            ModelFamily::QuaternionKahler => {
                let base = PI.powi(2 * m as i32) / factorial(2 * m - 1);
                if k > 0.0 {
                    let s = k.sqrt();
                    base / (4.0 * k.powf(2.0 * m as f64 - 0.5))
                        * (s * r).sin().powi(4 * m as i32 - 4)
                        * (2.0 * s * r).sin().powi(3)
                } else if k < 0.0 {
                    let a = -k;
                    let s = a.sqrt();
                    base / (4.0 * a.powf(2.0 * m as f64 - 0.5))
                        * (s * r).sinh().powi(4 * m as i32 - 4)
                        * (2.0 * s * r).sinh().powi(3)
                } else {
                    2.0 * base * r.powi(4 * m as i32 - 1)
                }
            }
        }
    }

    /// Flat-space small-ball mass `(π^m/m!) s^{2m}` resp.
    /// `(π^{2m}/(2m)!) s^{4m}` that `∫₀^s density` approaches as `s → 0`.
    pub fn small_ball_mass(&self, s: f64) -> f64 {
        let m = self.spec.m;
        match self.spec.family {
            ModelFamily::Kahler => PI.powi(m as i32) / factorial(m) * s.powi(2 * m as i32),
            ModelFamily::QuaternionKahler => {
                PI.powi(2 * m as i32) / factorial(2 * m) * s.powi(4 * m as i32)
            }
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Drift of the radial generator; free-function form of [`RadialLaw::drift`].
pub fn radial_drift(spec: &ModelSpec, r: f64) -> Result<f64> {
    RadialLaw::new(*spec).drift(r)
}

/// Invariant measure density; free-function form of [`RadialLaw::density`].
pub fn measure_density(spec: &ModelSpec, r: f64) -> Result<f64> {
    RadialLaw::new(*spec).density(r)
}

/// Nonzero Laplace spectrum of the `k = 1` compact models:
/// `4·level·(level+m)` for ℂP^m and `4·level·(level+2m+1)` for ℍP^m.
pub fn model_spectrum(family: ModelFamily, m: u32, level: u32) -> Result<f64> {
    if level < 1 {
        return Err(Error::domain("spectrum level must be at least 1"));
    }
    if m < 1 {
        return Err(Error::domain("dimension m must be at least 1"));
    }
    let l = f64::from(level);
    let m = f64::from(m);
    Ok(match family {
        ModelFamily::Kahler => 4.0 * l * (l + m),
        ModelFamily::QuaternionKahler => 4.0 * l * (l + 2.0 * m + 1.0),
    })
}

/// Curvature constants of the unit-curvature models, `k ∈ {−1, 0, 1}`:
/// `(H, Ric⊥) = (4k, (2m−2)k)` for Kähler, `(Q, Ric⊥) = (12k, (4m−4)k)`
/// for quaternion-Kähler.
pub fn curvature_constants(spec: &ModelSpec) -> Result<(f64, f64)> {
    if spec.k != -1.0 && spec.k != 0.0 && spec.k != 1.0 {
        return Err(Error::domain(format!(
            "curvature constants are tabulated for k in {{-1,0,1}}, got {}",
            spec.k
        )));
    }
    let m = f64::from(spec.m);
    Ok(match spec.family {
        ModelFamily::Kahler => (4.0 * spec.k, (2.0 * m - 2.0) * spec.k),
        ModelFamily::QuaternionKahler => (12.0 * spec.k, (4.0 * m - 4.0) * spec.k),
    })
}

/// Reduces `k ≠ 0` to the sign-normalized model: returns the unit spec
/// (`k = ±1`) and the length scale `s = √|k|` with
/// `drift_spec(r) = s · drift_unit(s·r)` and
/// `λ(spec, R) = |k| · λ(unit, s·R)`.
pub fn rescale(spec: &ModelSpec) -> Result<(ModelSpec, f64)> {
    if spec.k == 0.0 {
        return Err(Error::domain("rescaling is undefined for k = 0"));
    }
    let scale = spec.k.abs().sqrt();
    let unit = ModelSpec {
        family: spec.family,
        m: spec.m,
        k: spec.k.signum(),
    };
    Ok((unit, scale))
}
