//! Numerical toolkit for synthetic Lorentzian geometry on model spacetimes.
//!
//! The crate is organised bottom-up:
//!
//! * [`coefficients`]: distortion coefficients `σ`, `τ` and the isoperimetric
//!   profile `𝔇_{K,N}`.
//! * [`spacetimes`]: analytic model spacetimes (Minkowski, truncated cones,
//!   warped products, the Schwarzschild interior) with exact time separation,
//!   geodesics, volume densities and achronal set descriptors.
//! * [`sampler`]: Poisson sprinkling of regions, volume estimation and
//!   causal samples with precomputed `τ`/causal matrices.
//! * [`transport`]: discrete `ℓ_p` optimal transport with forbidden
//!   (non-causal) arcs, cyclical monotonicity audits and displacement.
//! * [`localization`]: ray decompositions of `I^±(V)`, 1D density checks and
//!   zero-mean localization.
//! * [`content`]: timelike Minkowski content estimators.
//! * [`verify`]: end-to-end inequality checks producing
//!   [`VerificationReport`](verify::VerificationReport)s.
//! * [`config`]: run configuration and report emission used by the
//!   `timelike` binary.
//!
//! Coordinates put the time coordinate last (`(x_1, …, x_n, t)`) for the
//! Minkowski, cone and warped charts; the Schwarzschild interior chart uses the
//! standard `(t, r, θ, φ)` ordering, with `r` the time function.

pub mod coefficients;
pub mod config;
pub mod content;
mod error;
pub mod localization;
pub mod quadrature;
pub mod sampler;
mod serde_ext;
pub mod spacetimes;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
