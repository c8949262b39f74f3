//! Closed-form solutions of the width equation `l' + i l² = i ε² t²`.
//!
//! Every solution is `l = −i w̃'/w̃` for the entire function
//!
//! ```text
//! w̃_ε(t, κ) = −M_{−1/4}(s) + (κ √ε t / 2) M_{1/4}(s),   s = ε² t⁴ / 16,
//! ```
//!
//! parametrised by a non-real projective constant κ. Near the origin the
//! `M_ν` series form is used; once the Bessel argument `ε t²/2` exceeds
//! [`SERIES_MAX_ARG`] the equivalent `J_{±1/4}, J_{±3/4}` form takes over.
//! Negative times are always mapped to positive ones with
//! `w̃(−t, κ) = w̃(t, −κ)` and `l(−t, κ) = −l(t, −κ)`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{bessel_j, series_m, GAMMA_1_4, GAMMA_3_4, SERIES_MAX_ARG};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// C₁ = Γ(3/4)/Γ(1/4).
pub const C1: f64 = GAMMA_3_4 / GAMMA_1_4;

/// Projective constant selecting one Riccati solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kappa {
    Finite(Complex64),
    /// κ = ∞: only the `J_{1/4}` part of w̃ survives.
    Infinity,
}

impl Kappa {
    fn negated(self) -> Self {
        match self {
            Kappa::Finite(k) => Kappa::Finite(-k),
            Kappa::Infinity => Kappa::Infinity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiccatiFamily {
    epsilon: f64,
    kappa: Kappa,
}

impl RiccatiFamily {
    /// Rejects ε ≤ 0 and real κ (w̃ would acquire real zeros).
    pub fn new(epsilon: f64, kappa: Kappa) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
        }
        if let Kappa::Finite(k) = kappa {
            if !k.re.is_finite() || !k.im.is_finite() || k.im == 0.0 {
                return Err(Error::Domain(format!("κ must be non-real, got {k}")));
            }
        }
        Ok(Self { epsilon, kappa })
    }

    pub fn with_kappa(epsilon: f64, kappa: Complex64) -> Result<Self> {
        Self::new(epsilon, Kappa::Finite(kappa))
    }

    /// The family through `l(−1/ε) = 1`.
    pub fn initial_value(epsilon: f64) -> Result<Self> {
        Self::with_kappa(epsilon, solve_kappa_eps(epsilon)?)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    fn reflected(&self) -> Self {
        Self {
            epsilon: self.epsilon,
            kappa: self.kappa.negated(),
        }
    }
}

/// `s = ε² t⁴ / 16` together with the time it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledArgument {
    pub t: f64,
    pub s: f64,
}

impl ScaledArgument {
    pub fn new(epsilon: f64, t: f64) -> Self {
        let half_z = 0.25 * epsilon * t * t;
        Self {
            t,
            s: half_z * half_z,
        }
    }

    /// The Bessel argument `2√s = ε t² / 2`.
    pub fn bessel_argument(&self) -> f64 {
        2.0 * self.s.sqrt()
    }

    fn in_series_regime(&self) -> bool {
        self.bessel_argument() <= SERIES_MAX_ARG
    }
}

/// `w̃_ε(t, κ)`, entire in t and zero-free on the real line for non-real κ.
pub fn w_tilde(fam: &RiccatiFamily, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return w_tilde(&fam.reflected(), -t);
    }
    let arg = ScaledArgument::new(fam.epsilon, t);
    if arg.in_series_regime() {
        w_tilde_series(fam, arg)
    } else {
        w_tilde_bessel(fam, arg)
    }
}

fn w_tilde_series(fam: &RiccatiFamily, arg: ScaledArgument) -> Result<Complex64> {
    let coef = 0.5 * fam.epsilon.sqrt() * arg.t * series_m(0.25, arg.s)?;
    Ok(match fam.kappa {
        Kappa::Finite(k) => k * coef - series_m(-0.25, arg.s)?,
        Kappa::Infinity => coef.into(),
    })
}

fn w_tilde_bessel(fam: &RiccatiFamily, arg: ScaledArgument) -> Result<Complex64> {
    let z = arg.bessel_argument();
    let scale = (0.5 * z).powf(0.25);
    let j_plus = bessel_j(0.25, z)?;
    Ok(match fam.kappa {
        Kappa::Finite(k) => scale * (k * j_plus - bessel_j(-0.25, z)?),
        Kappa::Infinity => (scale * j_plus).into(),
    })
}

/// `l_ε(t, κ) = −i w̃'/w̃`, evaluated without derivatives.
pub fn riccati_l(fam: &RiccatiFamily, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return riccati_l(&fam.reflected(), -t).map(|l| -l);
    }
    let arg = ScaledArgument::new(fam.epsilon, t);
    if arg.in_series_regime() {
        l_series(fam, arg)
    } else {
        l_bessel(fam, arg)
    }
}

fn l_series(fam: &RiccatiFamily, arg: ScaledArgument) -> Result<Complex64> {
    let (eps, t, s) = (fam.epsilon, arg.t, arg.s);
    let root_eps = eps.sqrt();
    let m_m34 = series_m(-0.75, s)?;
    let m_p14 = series_m(0.25, s)?;
    match fam.kappa {
        Kappa::Finite(k) => {
            let num = 8.0 * k * root_eps * m_m34 + eps * eps * t.powi(3) * series_m(0.75, s)?;
            let den = 2.0 * (k * root_eps * t * m_p14 - 2.0 * series_m(-0.25, s)?);
            Ok(-I * num / den)
        }
        Kappa::Infinity if t == 0.0 => {
            Err(Error::Degenerate("l(t, κ=∞) has a pole at t = 0".into()))
        }
        Kappa::Infinity => Ok(-I * 4.0 * m_m34 / (t * m_p14)),
    }
}

fn l_bessel(fam: &RiccatiFamily, arg: ScaledArgument) -> Result<Complex64> {
    let (eps, t) = (fam.epsilon, arg.t);
    let z = arg.bessel_argument();
    let j_m34 = bessel_j(-0.75, z)?;
    let j_p14 = bessel_j(0.25, z)?;
    Ok(match fam.kappa {
        Kappa::Finite(k) => {
            let num = k * j_m34 + bessel_j(0.75, z)?;
            let den = k * j_p14 - bessel_j(-0.25, z)?;
            -I * eps * t * num / den
        }
        Kappa::Infinity => -I * eps * t * j_m34 / j_p14,
    })
}

/// κ_ε: the constant for which `l_ε(−1/ε, κ_ε) = 1`.
///
/// `κ_ε = −(J_{−1/4} + i J_{3/4}) / (J_{1/4} − i J_{−3/4})` at `1/(2ε)`.
pub fn solve_kappa_eps(epsilon: f64) -> Result<Complex64> {
    check_epsilon(epsilon)?;
    let z = 0.5 / epsilon;
    let num = Complex64::new(bessel_j(-0.25, z)?, bessel_j(0.75, z)?);
    let den = Complex64::new(bessel_j(0.25, z)?, -bessel_j(-0.75, z)?);
    Ok(-num / den)
}

/// `l*_ε(t) = l_ε(t, κ_ε)`.
pub fn l_star(epsilon: f64, t: f64) -> Result<Complex64> {
    riccati_l(&RiccatiFamily::initial_value(epsilon)?, t)
}

/// `l*_ε(1/ε)` as a ratio of Bessel products at `1/(2ε)`, with κ_ε
/// eliminated analytically.
pub fn l_star_at_final(epsilon: f64) -> Result<Complex64> {
    check_epsilon(epsilon)?;
    let z = 0.5 / epsilon;
    let (jp14, jm14) = (bessel_j(0.25, z)?, bessel_j(-0.25, z)?);
    let (jp34, jm34) = (bessel_j(0.75, z)?, bessel_j(-0.75, z)?);
    let num = Complex64::new(2.0 * jp34 * jm34, jp34 * jp14 - jm14 * jm34);
    let den = Complex64::new(2.0 * jm14 * jp14, jp14 * jp34 - jm14 * jm34);
    Ok(num / den)
}

/// Leading oscillatory term of `l*_ε(1/ε)`:
/// `(1 − 2√2 i cos(1/ε)) / (3 + 2√2 sin(1/ε))`.
pub fn leading_l0(epsilon: f64) -> Complex64 {
    let (s, c) = (1.0 / epsilon).sin_cos();
    Complex64::new(1.0, -2.0 * SQRT_2 * c) / (3.0 + 2.0 * SQRT_2 * s)
}

/// `a = 2κ Γ(3/4)/Γ(1/4)`, so that `l(0, κ) = i a √ε`.
pub fn a_coefficient(kappa: Complex64) -> Complex64 {
    2.0 * C1 * kappa
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "ε must lie in (0, 1), got {epsilon}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn fam(eps: f64, k: Complex64) -> RiccatiFamily {
        RiccatiFamily::with_kappa(eps, k).unwrap()
    }

    /// Direct summation of the w̃ series, independent of `series_m`.
    fn w_tilde_by_summation(eps: f64, kappa: Complex64, t: f64, terms: usize) -> Complex64 {
        let s = eps * eps * t.powi(4) / 16.0;
        let sum = |nu: f64| {
            let mut term = 1.0 / crate::specfun::gamma(nu + 1.0);
            let mut acc = term;
            for k in 1..terms {
                term *= -s / (k as f64 * (nu + k as f64));
                acc += term;
            }
            acc
        };
        -sum(-0.25) + kappa * (eps.sqrt() * t / 2.0) * sum(0.25)
    }

    #[test]
    fn rejects_real_kappa_and_bad_epsilon() {
        assert!(RiccatiFamily::with_kappa(0.1, Complex64::new(1.0, 0.0)).is_err());
        assert!(RiccatiFamily::with_kappa(0.0, I).is_err());
        assert!(solve_kappa_eps(1.5).is_err());
    }

    #[test]
    fn w_tilde_at_origin() {
        for k in [I, Complex64::new(-0.7, -0.7), Complex64::new(3.0, 0.1)] {
            let w = w_tilde(&fam(0.3, k), 0.0).unwrap();
            assert!((w + 1.0 / GAMMA_3_4).norm() < 1e-15);
        }
    }

    #[test]
    fn w_tilde_reflection() {
        let k = Complex64::new(0.4, -1.3);
        for &t in &[0.5, 3.0, 12.0, 40.0] {
            let a = w_tilde(&fam(0.1, k), t).unwrap();
            let b = w_tilde(&fam(0.1, -k), -t).unwrap();
            assert!((a - b).norm() <= 1e-15 * a.norm());
        }
    }

    #[test]
    fn w_tilde_matches_truncated_sum() {
        let got = w_tilde(&fam(0.1, I), 2.0).unwrap();
        let reference = w_tilde_by_summation(0.1, I, 2.0, 120);
        assert!((got - reference).norm() <= 1e-13 * reference.norm());
    }

    #[test]
    fn w_tilde_regimes_join_continuously() {
        // ε t²/2 = 20 at t = √(40/ε)
        let eps: f64 = 0.1;
        let t = (40.0 / eps).sqrt();
        let f = fam(eps, Complex64::new(-0.7, -0.7));
        for t in [0.8 * t, t, 1.2 * t] {
            let arg = ScaledArgument::new(eps, t);
            let a = w_tilde_series(&f, arg).unwrap();
            let b = w_tilde_bessel(&f, arg).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm());
            let a = l_series(&f, arg).unwrap();
            let b = l_bessel(&f, arg).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn l_at_origin() {
        let k = Complex64::new(-0.6, -0.9);
        let eps = 0.04;
        let l0 = riccati_l(&fam(eps, k), 0.0).unwrap();
        let expected = I * a_coefficient(k) * eps.sqrt();
        assert!((l0 - expected).norm() < 1e-15);
    }

    #[test]
    fn small_t_expansion() {
        let k = Complex64::new(-0.6, -0.9);
        let eps = 0.04;
        let f = fam(eps, k);
        let a = a_coefficient(k) * eps.sqrt();
        for &t in &[1e-3, 1e-2, 5e-2] {
            let x = a * t;
            let series = I * a * (1.0 + x + x * x);
            let err = (riccati_l(&f, t).unwrap() - series).norm();
            assert!(err <= 5.0 * (eps.sqrt() * t).powi(3), "t={t} err={err}");
        }
    }

    #[test]
    fn reflection_of_l() {
        let k = Complex64::new(0.3, 0.8);
        for &t in &[0.2, 5.0, 30.0] {
            let a = riccati_l(&fam(0.1, k), -t).unwrap();
            let b = riccati_l(&fam(0.1, -k), t).unwrap();
            assert!((a + b).norm() <= 1e-14 * a.norm());
        }
    }

    #[test]
    fn infinity_kappa() {
        let f = RiccatiFamily::new(0.1, Kappa::Infinity).unwrap();
        assert!(matches!(riccati_l(&f, 0.0), Err(Error::Degenerate(_))));
        // near the origin only the J_{1/4} part survives: l ≈ −i/t
        let t = 1e-4;
        let l = riccati_l(&f, t).unwrap();
        assert!((l * t + I).norm() < 1e-6);
        let w = w_tilde(&f, 2.0).unwrap();
        let s = ScaledArgument::new(0.1, 2.0).s;
        assert!((w.re - 0.5 * 0.1_f64.sqrt() * 2.0 * series_m(0.25, s).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn kappa_eps_satisfies_initial_condition() {
        for &eps in &[0.2, 0.1, 0.05, 0.02] {
            let l = l_star(eps, -1.0 / eps).unwrap();
            assert!((l - 1.0).norm() <= 1e-12, "ε={eps}: l={l}");
        }
    }

    #[test]
    fn kappa_eps_limit() {
        let target = -Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((solve_kappa_eps(0.01).unwrap() - target).norm() <= 0.02);
        let k = solve_kappa_eps(0.001).unwrap();
        assert!((k - target).norm() <= 1e-3);
    }

    #[test]
    fn final_value_routes_agree() {
        for &eps in &[0.3, 0.1, 0.03, 0.01] {
            let direct = l_star(eps, 1.0 / eps).unwrap();
            let product_form = l_star_at_final(eps).unwrap();
            assert!((direct - product_form).norm() <= 1e-12 * direct.norm());
        }
    }

    #[test]
    fn leading_l0_special_points() {
        // 1/ε = π/2 + 2π·10
        let eps = 1.0 / (PI / 2.0 + 20.0 * PI);
        let l = leading_l0(eps);
        assert!((l.re - (3.0 - 2.0 * SQRT_2)).abs() < 1e-12);
        assert!(l.im.abs() < 1e-12);
        let eps = 1.0 / (20.0 * PI);
        let l = leading_l0(eps);
        assert!((l - Complex64::new(1.0, -2.0 * SQRT_2) / 3.0).norm() < 1e-12);
    }

    #[test]
    fn riccati_residual_is_second_order() {
        let residual = |f: &RiccatiFamily, t: f64, h: f64| {
            let eps = f.epsilon();
            let l = riccati_l(f, t).unwrap();
            let dl = (riccati_l(f, t + h).unwrap() - riccati_l(f, t - h).unwrap()) / (2.0 * h);
            (dl + I * l * l - I * eps * eps * t * t).norm()
        };
        for &eps in &[0.2, 0.1, 0.05] {
            let f = RiccatiFamily::initial_value(eps).unwrap();
            let h = 2e-3;
            let n = 400;
            for i in 0..=n {
                let t = -1.0 / eps + 2.0 / eps * i as f64 / n as f64;
                let coarse = residual(&f, t, h);
                assert!(coarse <= 2000.0 * h * h, "ε={eps} t={t} residual={coarse}");
                if coarse > 1e-8 {
                    let ratio = coarse / residual(&f, t, h / 2.0);
                    assert!((ratio - 4.0).abs() < 0.2, "ε={eps} t={t} ratio={ratio}");
                }
            }
        }
    }

    #[test]
    fn l_star_has_positive_real_part() {
        for &eps in &[0.3, 0.1, 0.05] {
            let f = RiccatiFamily::initial_value(eps).unwrap();
            for i in 0..=1000 {
                let t = -1.5 / eps + 3.0 / eps * i as f64 / 1000.0;
                assert!(riccati_l(&f, t).unwrap().re > 0.0);
                assert!(w_tilde(&f, t).unwrap().norm() > 0.0);
            }
        }
    }
}
