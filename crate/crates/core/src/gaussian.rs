//! Gaussian states `m e^{−l x²/2}` and their closed-form integrals.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    pub m: Complex64,
    pub l: Complex64,
}

impl GaussianState {
    pub fn new(m: Complex64, l: Complex64) -> Self {
        Self { m, l }
    }

    /// The harmonic-oscillator ground state `π^{−1/4} e^{−x²/2}`.
    pub fn ground() -> Self {
        Self::new(PI.powf(-0.25).into(), 1.0.into())
    }

    pub fn value_at(&self, x: f64) -> Complex64 {
        self.m * (-0.5 * self.l * x * x).exp()
    }

    fn check_normalizable(&self) -> Result<()> {
        if self.l.re > 0.0 {
            Ok(())
        } else {
            Err(Error::NonNormalizable { re_l: self.l.re })
        }
    }
}

/// `∫ |m e^{−l x²/2}|² dx = |m|² √(π / Re l)`.
pub fn norm_squared(g: &GaussianState) -> Result<f64> {
    g.check_normalizable()?;
    Ok(g.m.norm_sqr() * (PI / g.l.re).sqrt())
}

/// Bilinear overlap `∫ φ₀ · g dx = √2 π^{1/4} m / (1 + l)^{1/2}`.
pub fn overlap_with_ground(g: &GaussianState) -> Result<Complex64> {
    let shifted = 1.0 + g.l;
    if shifted.re <= 0.0 {
        return Err(Error::Divergence(shifted.re));
    }
    Ok(SQRT_2 * PI.powf(0.25) * g.m / shifted.sqrt())
}

/// `|⟨φ₀, g⟩|² / ‖g‖²`.
pub fn survival_probability(g: &GaussianState) -> Result<f64> {
    let norm = norm_squared(g)?;
    Ok(overlap_with_ground(g)?.norm_sqr() / norm)
}

/// Exact free Schrödinger evolution for time `t`:
/// `l → l/(1 + i l t)`, `m → m/(1 + i l t)^{1/2}`.
///
/// For Re l > 0 the factor `1 + i l s` stays in the upper half-plane for all
/// s ∈ [0, t], so the principal root is the one continued from s = 0.
pub fn free_propagate(g: &GaussianState, t: f64) -> Result<GaussianState> {
    g.check_normalizable()?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "propagation time must be nonnegative, got {t}"
        )));
    }
    let factor = 1.0 + I * g.l * t;
    Ok(GaussianState::new(g.m / factor.sqrt(), g.l / factor))
}

/// Sesquilinear `∫ conj(a) b dx`.
pub fn inner_product(a: &GaussianState, b: &GaussianState) -> Result<Complex64> {
    let sum = a.l.conj() + b.l;
    if sum.re <= 0.0 {
        return Err(Error::Divergence(sum.re));
    }
    Ok(a.m.conj() * b.m * (2.0 * PI / sum).sqrt())
}

/// `‖a − b‖` in L².
pub fn l2_distance(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    let aa = norm_squared(a)?;
    let bb = norm_squared(b)?;
    let ab = inner_product(a, b)?;
    Ok((aa + bb - 2.0 * ab.re).max(0.0).sqrt())
}
