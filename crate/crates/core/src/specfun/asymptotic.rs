//! Large-argument (Hankel) expansion of J_ν.
//!
//! `J_ν(x) ≈ √(2/(πx)) (P cos ω − Q sin ω)`, ω = x − νπ/2 − π/4, where
//! `P = Σ (−1)^k a_{2k}/x^{2k}`, `Q = Σ (−1)^k a_{2k+1}/x^{2k+1}` and
//! `a_k(ν) = ∏_{j=1..k} (4ν² − (2j−1)²) / (k! 8^k)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Cap on the number of correction terms used by the automatic evaluation.
pub const MAX_CORRECTION_TERMS: usize = 20;

/// `t_k = a_k(ν) / x^k` for k = 0..=n.
fn scaled_coefficients(nu: f64, x: f64, n: usize) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut terms = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    terms.push(t);
    for k in 1..=n {
        let odd = (2 * k - 1) as f64;
        t *= (mu - odd * odd) / (8.0 * k as f64 * x);
        terms.push(t);
    }
    terms
}

/// Index of the smallest correction term (the optimal truncation point), or
/// `None` when the expansion terminates (all terms past some k vanish).
fn optimal_index(terms: &[f64]) -> Option<usize> {
    for k in 1..terms.len() {
        if terms[k] == 0.0 {
            return None;
        }
        if k + 1 < terms.len() && terms[k + 1].abs() > terms[k].abs() {
            return Some(k);
        }
    }
    Some(terms.len() - 1)
}

fn combine(nu: f64, x: f64, terms: &[f64]) -> f64 {
    let (mut p, mut q) = (0.0, 0.0);
    for (k, t) in terms.iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    }
    // cos/sin of ω = x − φ, expanded so the large argument x is reduced by
    // the library sin/cos rather than by a lossy subtraction.
    let phi = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let cos_w = cx * cp + sx * sp;
    let sin_w = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w)
}

/// Hankel expansion of J_ν(x) through `order` correction terms.
///
/// `order = 1` is the classical two-term form
/// `√(2/(πx)) (cos ω − (4ν²−1)/(8x) sin ω)`. Requesting more terms than the
/// optimal truncation point for this x is an accuracy error.
pub fn hankel_asymptotic_j(nu: f64, x: f64, order: usize) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "hankel_asymptotic_j: x = {x}, ν = {nu}"
        )));
    }
    if order == 0 {
        return Err(Error::Domain(
            "hankel_asymptotic_j: order must be ≥ 1".into(),
        ));
    }
    let terms = scaled_coefficients(nu, x, order + 1);
    if let Some(best) = optimal_index(&terms) {
        if order > best {
            return Err(Error::Accuracy(format!(
                "order {order} exceeds the optimal truncation {best} at x = {x} (ν = {nu})"
            )));
        }
    }
    Ok(combine(nu, x, &terms[..=order]))
}

/// Automatic evaluation: optimal truncation capped at
/// [`MAX_CORRECTION_TERMS`]. Returns the value and the size of the first
/// omitted term relative to the leading one.
pub(crate) fn bessel_j_asymptotic(nu: f64, x: f64) -> (f64, f64) {
    let terms = scaled_coefficients(nu, x, MAX_CORRECTION_TERMS + 1);
    let n = optimal_index(&terms)
        .unwrap_or(MAX_CORRECTION_TERMS)
        .min(MAX_CORRECTION_TERMS);
    let omitted = terms.get(n + 1).map_or(0.0, |t| t.abs());
    (combine(nu, x, &terms[..=n]), omitted)
}

/// Leading-order phase ω = x − νπ/2 − π/4, exposed for tests and reports.
pub fn hankel_phase(nu: f64, x: f64) -> f64 {
    x - 0.5 * nu * PI - 0.5 * FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_is_two_term_form() {
        let (nu, x) = (0.25, 100.0);
        let w = hankel_phase(nu, x);
        let expected =
            (2.0 / (PI * x)).sqrt() * (w.cos() - (4.0 * nu * nu - 1.0) / (8.0 * x) * w.sin());
        let got = hankel_asymptotic_j(nu, x, 1).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn half_order_terminates() {
        let x = 10.0;
        let expected = (2.0 / (PI * x)).sqrt() * (x - FRAC_PI_2).cos();
        assert!((hankel_asymptotic_j(0.5, x, 1).unwrap() - expected).abs() < 1e-15);
        // terminating expansion never trips the truncation guard
        assert!(hankel_asymptotic_j(0.5, x, 40).is_ok());
    }

    #[test]
    fn over_truncation_is_rejected() {
        assert!(matches!(
            hankel_asymptotic_j(0.25, 2.0, 15),
            Err(Error::Accuracy(_))
        ));
    }
}
