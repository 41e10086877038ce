//! Radial diffusions on Kähler and quaternion-Kähler model spaces.
//!
//! The six model geometries (flat, positively curved, negatively curved — in
//! each of the two families) all have radial Brownian parts that are
//! one-dimensional diffusions with explicit drifts and invariant measures.
//! This crate computes everything downstream of that fact along three
//! independent routes and cross-checks them against each other and against
//! the closed-form spectra of the compact models:
//!
//! * [`geometry`] — drifts, measure densities, curvature constants, exact
//!   spectra, and the `√|k|` rescaling structure, all in closed form;
//! * [`spectral`] — Dirichlet/closed eigen-decompositions of the
//!   discretized generator and the eigenfunction-series heat kernel;
//! * [`pde`] — Crank–Nicolson evolution of the same operator (heat kernel
//!   columns, survival probabilities, mean exit times);
//! * [`sde`] — Euler–Maruyama ensembles of the comparison diffusion with
//!   bridge-corrected absorption;
//! * [`sphere`] — Brownian motion on the ambient unit spheres projected to
//!   the compact-model radial laws;
//! * [`validate`] — the consistency suite wiring the routes together.
//!
//! Everything that consumes randomness is keyed by counters
//! ([`rng::CounterRng`]), so every ensemble is reproducible bit for bit
//! regardless of thread scheduling.
//!
//! ```
//! use kqradial::geometry::{comparison_f, ModelSpec, RadialLaw};
//!
//! // flat-model drift (2m−1)/r at m = 3
//! let law = RadialLaw::new(ModelSpec::kahler(3, 0.0)?);
//! assert!((law.drift(2.0)? - 2.5).abs() < 1e-14);
//! // the k = 0 branch of the comparison function is 1/r
//! assert_eq!(comparison_f(0.0, 2.0)?, 0.5);
//! # Ok::<(), kqradial::Error>(())
//! ```

pub mod error;
pub mod geometry;
pub mod grid;
pub mod operator;
pub mod pde;
pub mod rng;
pub mod sde;
pub mod spectral;
pub mod sphere;
pub mod stats;
pub mod tridiag;
pub mod validate;

pub use error::{Error, Result};
pub use geometry::{ModelFamily, ModelSpec, RadialLaw};
pub use operator::BoundaryMode;
pub use spectral::SpectralDecomposition;

/// Version string stamped into validation reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
