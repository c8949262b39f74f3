//! Power-series kernels: `M_ν(s) = Σ (-s)^k / (k! Γ(ν+k+1))` and
//! `J_ν(x) = (x/2)^ν M_ν(x²/4)`.

use num_complex::Complex64;

use super::dd::DoubleDouble;
use super::gamma::gamma;
use crate::error::{Error, Result};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 200;

/// Summation stops once a term drops below this fraction of the partial sum.
const DD_TOLERANCE: f64 = 1e-32;

/// A series evaluation together with its bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub est_rel_error: f64,
}

/// Negative integer orders are routed through M_{-n}(s) = (-s)^n M_n(s).
fn negative_integer_order(nu: f64) -> Option<i32> {
    (nu < 0.0 && nu.fract() == 0.0).then_some(-nu as i32)
}

/// `Σ_k q^k / (k! (ν+1)_k)` in double-double, with q = -s.
fn pochhammer_sum(nu: f64, q: DoubleDouble) -> Result<(DoubleDouble, usize, f64)> {
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    let mut max_term = 1.0_f64;
    let q_abs = q.to_f64().abs();
    for k in 0..MAX_TERMS {
        let k1 = (k + 1) as f64;
        let denom = DoubleDouble::sum_of(nu, k1).mul_f64(k1);
        term = term * q / denom;
        sum = sum + term;
        let t = term.to_f64().abs();
        max_term = max_term.max(t);
        let decreasing = k1 * (nu + k1 + 1.0).abs() > q_abs;
        if decreasing && t <= DD_TOLERANCE * sum.abs().to_f64().max(f64::MIN_POSITIVE) {
            let cancellation = max_term / sum.abs().to_f64().max(f64::MIN_POSITIVE);
            return Ok((sum, k + 2, cancellation));
        }
    }
    Err(Error::Convergence(format!(
        "entire series for ν = {nu} did not converge in {MAX_TERMS} terms (|s| = {q_abs})"
    )))
}

fn finish(sum: DoubleDouble, terms: usize, cancellation: f64, scale: f64) -> SeriesResult {
    // Double-double rounding amplified by cancellation, plus the final
    // conversion and the Γ(ν+1) factor.
    let est = cancellation * 1e-31 * terms as f64 + 3.0 * f64::EPSILON;
    SeriesResult {
        value: sum.to_f64() * scale,
        terms_used: terms,
        est_rel_error: est,
    }
}

/// `M_ν(s)` for real s, with term count and error estimate.
pub fn series_m_detailed(nu: f64, s: f64) -> Result<SeriesResult> {
    if !nu.is_finite() || !s.is_finite() {
        return Err(Error::Domain(format!(
            "series_m: non-finite input (ν = {nu}, s = {s})"
        )));
    }
    if let Some(n) = negative_integer_order(nu) {
        let inner = series_m_detailed(n as f64, s)?;
        return Ok(SeriesResult {
            value: (-s).powi(n) * inner.value,
            ..inner
        });
    }
    let (sum, terms, cancellation) = pochhammer_sum(nu, DoubleDouble::from_f64(-s))?;
    Ok(finish(sum, terms, cancellation, 1.0 / gamma(nu + 1.0)))
}

/// `M_ν(s) = Σ_{k≥0} (-1)^k s^k / (k! Γ(ν+k+1))`, an entire function of s.
pub fn series_m(nu: f64, s: f64) -> Result<f64> {
    series_m_detailed(nu, s).map(|r| r.value)
}

/// `M_ν(s)` for complex s (compensated f64 summation).
pub fn series_m_complex(nu: f64, s: Complex64) -> Result<Complex64> {
    if !nu.is_finite() || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain("series_m: non-finite input".into()));
    }
    if s.im == 0.0 {
        return series_m(nu, s.re).map(Complex64::from);
    }
    if let Some(n) = negative_integer_order(nu) {
        return Ok((-s).powi(n) * series_m_complex(n as f64, s)?);
    }
    let q = -s;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut comp = Complex64::new(0.0, 0.0);
    for k in 0..MAX_TERMS {
        let k1 = (k + 1) as f64;
        term = term * q / (k1 * (nu + k1));
        // Kahan step
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let decreasing = k1 * (nu + k1 + 1.0).abs() > q.norm();
        if decreasing && term.norm() <= 1e-17 * sum.norm() {
            return Ok(sum / gamma(nu + 1.0));
        }
    }
    Err(Error::Convergence(format!(
        "complex entire series for ν = {nu} did not converge (|s| = {})",
        s.norm()
    )))
}

/// `J_ν(x)` by direct summation of the power series, x ≥ 0.
pub fn bessel_j_series(nu: f64, x: f64) -> Result<SeriesResult> {
    if !(x >= 0.0) || !x.is_finite() || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_j: invalid argument x = {x}, ν = {nu}"
        )));
    }
    if let Some(n) = negative_integer_order(nu) {
        let inner = bessel_j_series(n as f64, x)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(SeriesResult {
            value: sign * inner.value,
            ..inner
        });
    }
    let half = 0.5 * x;
    if x == 0.0 {
        let value = if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            return Err(Error::Domain(format!(
                "J_ν(0) is unbounded for ν = {nu} < 0"
            )));
        };
        return Ok(SeriesResult {
            value,
            terms_used: 1,
            est_rel_error: 0.0,
        });
    }
    let q = -DoubleDouble::product_of(half, half);
    let (sum, terms, cancellation) = pochhammer_sum(nu, q)?;
    Ok(finish(
        sum,
        terms,
        cancellation,
        half.powf(nu) / gamma(nu + 1.0),
    ))
}
