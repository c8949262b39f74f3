//! Bessel functions of fractional order on the real half-line, the entire
//! series `M_ν`, and the Gamma constants used by the closed forms.
//!
//! Evaluation switches from the power series (x ≤ [`SERIES_MAX_ARG`]) to the
//! Hankel expansion above it. The series is summed in double-double so that
//! cancellation near the crossover does not eat into f64 precision.

mod asymptotic;
mod dd;
mod gamma;
mod selftest;
mod series;
mod zeros;

use std::f64::consts::PI;

pub use asymptotic::{hankel_asymptotic_j, hankel_phase, MAX_CORRECTION_TERMS};
pub use gamma::{gamma, GammaConstants, GAMMA_1_4, GAMMA_3_4};
pub use selftest::{self_test, wronskian_residual, SelfTestCheck, SelfTestReport};
pub use series::{bessel_j_series, series_m, series_m_complex, series_m_detailed, SeriesResult};
pub use zeros::bessel_j_zeros;

use crate::error::{Error, Result};

/// Upper end of the power-series regime.
pub const SERIES_MAX_ARG: f64 = 20.0;

/// Beyond this argument the double-double series is no longer trusted.
const SERIES_HARD_LIMIT: f64 = 60.0;

/// Order ν of a Bessel function.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub const QUARTER: Self = Self(0.25);
    pub const MINUS_QUARTER: Self = Self(-0.25);
    pub const THREE_QUARTERS: Self = Self(0.75);
    pub const MINUS_THREE_QUARTERS: Self = Self(-0.75);

    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() {
            Ok(Self(nu))
        } else {
            Err(Error::Domain(format!(
                "Bessel order must be finite, got {nu}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.fract() == 0.0
    }

    /// Orders for which the series/Hankel switch at x = 20 is calibrated.
    pub fn is_fast_path(self) -> bool {
        self.0.abs() < 2.0
    }
}

impl From<f64> for BesselOrder {
    fn from(nu: f64) -> Self {
        Self(nu)
    }
}

/// J_ν(x) for x ≥ 0 (principal branch).
pub fn bessel_j(nu: impl Into<BesselOrder>, x: f64) -> Result<f64> {
    let nu = BesselOrder::new(nu.into().value())?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "bessel_j requires finite x ≥ 0, got {x}"
        )));
    }
    let v = nu.value();
    if x <= SERIES_MAX_ARG {
        return bessel_j_series(v, x).map(|r| r.value);
    }
    if v < 0.0 && nu.is_integer() {
        let sign = if (v as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return bessel_j(-v, x).map(|j| sign * j);
    }
    let (value, omitted) = asymptotic::bessel_j_asymptotic(v, x);
    if nu.is_fast_path() || omitted < 1e-15 {
        return Ok(value);
    }
    if x <= SERIES_HARD_LIMIT {
        return bessel_j_series(v, x).map(|r| r.value);
    }
    if omitted < 1e-10 {
        return Ok(value);
    }
    Err(Error::Accuracy(format!(
        "no accurate evaluation path for J_ν(x) with ν = {v}, x = {x}"
    )))
}

/// Y_ν(x) = (J_ν(x) cos νπ − J_{−ν}(x)) / sin νπ for non-integer ν, x > 0.
pub fn bessel_y(nu: impl Into<BesselOrder>, x: f64) -> Result<f64> {
    let nu = BesselOrder::new(nu.into().value())?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_y requires finite x > 0, got {x}"
        )));
    }
    if nu.is_integer() {
        return Err(Error::Unsupported(format!(
            "integer-order Y_ν (ν = {}) is not implemented",
            nu.value()
        )));
    }
    let v = nu.value();
    let (s, c) = sin_cos_pi(v);
    Ok((bessel_j(v, x)? * c - bessel_j(-v, x)?) / s)
}

/// J'_ν(x) = J_{ν−1}(x) − (ν/x) J_ν(x), x > 0.
pub fn bessel_j_derivative(nu: impl Into<BesselOrder>, x: f64) -> Result<f64> {
    let v = BesselOrder::new(nu.into().value())?.value();
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "bessel_j_derivative requires x > 0, got {x}"
        )));
    }
    Ok(bessel_j(v - 1.0, x)? - v / x * bessel_j(v, x)?)
}

/// (sin νπ, cos νπ) with exact zeros at integers and half-integers.
fn sin_cos_pi(nu: f64) -> (f64, f64) {
    let r = nu.rem_euclid(2.0);
    if r.fract() == 0.0 || (2.0 * r).fract() == 0.0 {
        let quarter_turns = (2.0 * r) as i32;
        return match quarter_turns {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    (r * PI).sin_cos()
}
