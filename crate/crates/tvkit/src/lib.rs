//! # tvkit
//!
//! Total-variation distances between pushforward measures of polynomial
//! and trigonometric maps, with certified shift-modulus constants and
//! the smoothing-decomposition bound pipeline.
//!
//! The library answers questions of the form: if X has law P and f, g
//! are two nearby maps, how far apart are the laws of f(X) and g(X) in
//! total variation? The toolkit computes
//!
//! - exact pushforward densities q = density of P f^{-1} for piecewise
//!   monotone maps ([`measures`]),
//! - TV distances and shift moduli delta(u) = || P f^{-1} - (P f^{-1})
//!   shifted by u ||_var by singularity-aware quadrature plus an
//!   independent Monte Carlo histogram oracle ([`tvmetrics`]),
//! - certified constants (alpha, C) with delta(u) <= C u^alpha built
//!   from a monotone-piece partition and Gaussian tail summation
//!   ([`besov`]),
//! - the smoothing bound TV <= C ||f - g||_1^{alpha/(alpha+1)} with its
//!   delta_1/delta_2/delta_3 diagnostic split, directional gradient
//!   norms, exponent experiments for trigonometric and radial maps, and
//!   an exact big-integer Vandermonde system check ([`bounds`]).
//!
//! TV convention: ||mu||_var = integral of |density| d nu, which is
//! twice the probabilist's total-variation distance; differences of
//! probability measures range over [0, 2].
//!
//! ## Quick start
//!
//! ```
//! use tvkit::funcspace::Polynomial;
//! use tvkit::measures::{DensityModel, Pushforward};
//! use tvkit::tvmetrics::shift_modulus;
//!
//! // law of X^2 for standard Gaussian X is chi-squared with 1 dof
//! let f = Polynomial::monomial(1.0, 2);
//! let model = DensityModel::standard_gaussian();
//! let q = Pushforward::new(f.clone(), model.clone()).unwrap();
//! let at_one = q.eval(1.0); // = phi(1)
//! assert!((at_one - 0.2419707245191434).abs() < 1e-12);
//!
//! // shift modulus of the chi-squared law scales like sqrt(u)
//! let d = shift_modulus(&f, &model, 0.01, 1e-9).unwrap();
//! assert!((d.value - 2.0 * (2.0 * 0.5398278372770290 - 1.0)).abs() < 1e-6);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; the `tvkit` binary exposes
//! the same operations as subcommands (`pushforward`, `tv`, `modulus`,
//! `certify`, `bound`, `experiment`).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` rejects NaN

pub mod besov;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod funcspace;
pub mod measures;
pub mod quad;
pub mod rng;
pub mod tvmetrics;

pub use error::{Error, Result};
