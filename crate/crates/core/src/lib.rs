//! Exactly solvable model of adiabatic breakdown for a harmonic oscillator
//! whose frequency is switched off and on again.
//!
//! The microscopic-time problem
//!
//! ```text
//! i ∂ₜ v = -½ ∂ₓ² v + V(εt, x) v,    v(-(L+1)/ε, x) = π^{-1/4} e^{-x²/2}
//! ```
//!
//! keeps Gaussian form `m(t) e^{-l(t) x²/2}`. The width obeys the Riccati
//! equation `l' + i l² = i ε² t²`, which is solved in closed form with Bessel
//! functions of order ±1/4, ±3/4 ([`riccati`]); the amplitude follows from a
//! continuously tracked square root ([`amplitude`]). [`scenario`] chains the
//! pieces into the L = 0 and L > 0 pipelines, and [`oracle`] provides
//! independent ODE, PDE and quadrature checks.

pub mod amplitude;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod riccati;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
