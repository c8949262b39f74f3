//! The amplitude `m_ε(t)` of the Gaussian, solving `i m' = m l / 2`.
//!
//! Along a solution of the width equation, `m = A · w̃^{−1/2}` for a constant
//! A. The square root is chosen by continuity: the argument of w̃ is unwrapped
//! along a walk from the reference time, so the amplitude is only defined
//! relative to a trajectory, never pointwise.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::riccati::{solve_kappa_eps, w_tilde, RiccatiFamily};
use crate::specfun::{bessel_j, GAMMA_3_4};

const MAX_BISECTIONS: u32 = 40;

/// π^{−1/4}, the ground-state amplitude.
pub fn ground_amplitude() -> f64 {
    PI.powf(-0.25)
}

/// Unwrapped argument of w̃ along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchTracker {
    last_argument: f64,
    last_t: f64,
    last_w: Complex64,
}

impl BranchTracker {
    pub fn new(t: f64, w: Complex64, argument: f64) -> Self {
        Self {
            last_argument: argument,
            last_t: t,
            last_w: w,
        }
    }

    /// Moves to `(t, w)`. Fails without changing state if the phase jump is
    /// π/2 or more, since continuity can no longer be trusted.
    pub fn advance(&mut self, t: f64, w: Complex64) -> Result<f64> {
        let delta = (w / self.last_w).arg();
        if delta.abs() >= FRAC_PI_2 {
            return Err(Error::BranchStep { t });
        }
        self.last_argument += delta;
        self.last_t = t;
        self.last_w = w;
        Ok(self.last_argument)
    }

    pub fn argument(&self) -> f64 {
        self.last_argument
    }

    pub fn t(&self) -> f64 {
        self.last_t
    }

    pub fn w(&self) -> Complex64 {
        self.last_w
    }
}

/// `m(t) = A |w̃|^{−1/2} e^{−iφ/2}`, φ unwrapped from a reference time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeSolution {
    family: RiccatiFamily,
    a_const: Complex64,
    t_ref: f64,
    w_ref: Complex64,
    phase_ref: f64,
    max_step: f64,
}

impl AmplitudeSolution {
    /// The physical solution: κ = κ_ε and `m(−1/ε) = π^{−1/4}`, with A_ε
    /// from [`amplitude_constant`].
    pub fn new(epsilon: f64) -> Result<Self> {
        let family = RiccatiFamily::initial_value(epsilon)?;
        let max_step = default_max_step(epsilon);
        let (w_ref, phase_ref) = phase_from_origin(&family, -1.0 / epsilon, max_step)?;
        Ok(Self {
            family,
            a_const: ground_amplitude()
                * Complex64::from_polar(w_ref.norm().sqrt(), 0.5 * phase_ref),
            t_ref: -1.0 / epsilon,
            w_ref,
            phase_ref,
            max_step,
        })
    }

    /// The solution of `family` with `m(t_ref) = m_ref`.
    pub fn with_reference(family: RiccatiFamily, t_ref: f64, m_ref: Complex64) -> Result<Self> {
        let w_ref = w_tilde(&family, t_ref)?;
        // adding +0 turns a signed-zero imaginary part positive, so a
        // negative real w̃ gets argument π rather than −π
        let w_ref = Complex64::new(w_ref.re, w_ref.im + 0.0);
        if w_ref.norm() == 0.0 || !w_ref.norm().is_finite() {
            return Err(Error::Degenerate(format!("w̃ degenerate at t = {t_ref}")));
        }
        let max_step = default_max_step(family.epsilon());
        Ok(Self {
            family,
            a_const: m_ref * w_ref.sqrt(),
            t_ref,
            w_ref,
            phase_ref: w_ref.arg(),
            max_step,
        })
    }

    /// Overrides the unwrapping step (default from [`default_grid_points`]).
    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn family(&self) -> &RiccatiFamily {
        &self.family
    }

    pub fn epsilon(&self) -> f64 {
        self.family.epsilon()
    }

    pub fn a_const(&self) -> Complex64 {
        self.a_const
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn amplitude_at(&self, t: f64) -> Result<Complex64> {
        Ok(self.sample(&[t])?[0])
    }

    /// Amplitudes at `times`, visited in order by one continuous walk.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<Complex64>> {
        let mut tracker = BranchTracker::new(self.t_ref, self.w_ref, self.phase_ref);
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            walk(&self.family, &mut tracker, target, self.max_step)?;
            out.push(self.from_tracker(&tracker));
        }
        Ok(out)
    }

    fn from_tracker(&self, tracker: &BranchTracker) -> Complex64 {
        let phase = Complex64::from_polar(tracker.w().norm().powf(-0.5), -0.5 * tracker.argument());
        self.a_const * phase
    }
}

/// Moves `tracker` to `target` in steps of at most `max_step`, bisecting
/// any step whose phase jump is too large.
fn walk(
    family: &RiccatiFamily,
    tracker: &mut BranchTracker,
    target: f64,
    max_step: f64,
) -> Result<()> {
    let start = tracker.t();
    let steps = ((target - start).abs() / max_step).ceil().max(1.0) as usize;
    for k in 1..=steps {
        let t = if k == steps {
            target
        } else {
            start + (target - start) * k as f64 / steps as f64
        };
        step_to(family, tracker, t, 0)?;
    }
    Ok(())
}

fn step_to(family: &RiccatiFamily, tracker: &mut BranchTracker, t: f64, depth: u32) -> Result<()> {
    let w = w_tilde(family, t)?;
    match tracker.advance(t, w) {
        Err(Error::BranchStep { .. }) if depth < MAX_BISECTIONS => {
            let mid = 0.5 * (tracker.t() + t);
            step_to(family, tracker, mid, depth + 1)?;
            step_to(family, tracker, t, depth + 1)
        }
        other => other.map(|_| ()),
    }
}

/// w̃ at `t` and its argument, continued from the principal value at t = 0.
fn phase_from_origin(family: &RiccatiFamily, t: f64, max_step: f64) -> Result<(Complex64, f64)> {
    // w̃(0) = −1/Γ(3/4); its imaginary part may be a signed zero
    let w0 = w_tilde(family, 0.0)?;
    let mut tracker = BranchTracker::new(0.0, w0, PI);
    walk(family, &mut tracker, t, max_step)?;
    Ok((tracker.w(), tracker.argument()))
}

/// Uniform unwrapping grid size on `[−1/ε, 1/ε]`.
pub fn default_grid_points(epsilon: f64) -> usize {
    ((40.0 / epsilon).ceil() as usize).max(4096)
}

fn default_max_step(epsilon: f64) -> f64 {
    2.0 / epsilon / (default_grid_points(epsilon) - 1) as f64
}

/// `A_ε = π^{−1/4} w̃_ε(−1/ε, κ_ε)^{1/2}`.
///
/// The root is continued from the principal one at t = 0, which makes
/// `m(0) = −i A_ε Γ(3/4)^{1/2}` hold for every ε. The principal root taken
/// at −1/ε itself flips sign as ε varies.
pub fn amplitude_constant(epsilon: f64, kappa_eps: Complex64) -> Result<Complex64> {
    let family = RiccatiFamily::with_kappa(epsilon, kappa_eps)?;
    let (w, phase) = phase_from_origin(&family, -1.0 / epsilon, default_max_step(epsilon))?;
    Ok(ground_amplitude() * Complex64::from_polar(w.norm().sqrt(), 0.5 * phase))
}

/// `m_ε(1/ε)` from the closed-form square, with the sign of the tracked walk.
pub fn amplitude_at_final(epsilon: f64) -> Result<Complex64> {
    let sol = AmplitudeSolution::new(epsilon)?;
    let tracked = sol.amplitude_at(1.0 / epsilon)?;
    let kappa = solve_kappa_eps(epsilon)?;
    let z = 0.5 / epsilon;
    let (jm14, jp14) = (bessel_j(-0.25, z)?, bessel_j(0.25, z)?);
    let square = (-jm14 - kappa * jp14) / (kappa * jp14 - jm14) / PI.sqrt();
    let root = square.sqrt();
    Ok(if (root - tracked).norm() <= (root + tracked).norm() {
        root
    } else {
        -root
    })
}

/// Leading term `π^{−1/4} (√2 e^{iθ} + i)^{−1/2}`, θ = 1/ε, with the root
/// continued in θ from the principal branch at θ = π/2.
pub fn leading_m0(epsilon: f64) -> Complex64 {
    let theta = 1.0 / epsilon;
    let base = Complex64::new(1.0, 0.0)
        + Complex64::new(0.0, FRAC_1_SQRT_2) * Complex64::from_polar(1.0, -theta);
    let g_norm = 2.0_f64.sqrt() * base.norm();
    let g_arg = theta + base.arg();
    Complex64::from_polar(ground_amplitude() * g_norm.powf(-0.5), -0.5 * g_arg)
}

/// Leading behaviour at the origin: `m(0) ≈ −i A Γ(3/4)^{1/2}`.
pub fn origin_amplitude_leading(a_const: Complex64) -> Complex64 {
    Complex64::new(0.0, -GAMMA_3_4.sqrt()) * a_const
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::{a_coefficient, l_star, leading_l0, riccati_l, C1};
    use proptest::prelude::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn initial_condition() {
        for &eps in &[0.2, 0.1, 0.05, 0.02] {
            let sol = AmplitudeSolution::new(eps).unwrap();
            let m = sol.amplitude_at(-1.0 / eps).unwrap();
            assert!((m - ground_amplitude()).norm() < 1e-14);
        }
    }

    #[test]
    fn modulus_matches_width() {
        let eps = 0.1;
        let sol = AmplitudeSolution::new(eps).unwrap();
        let times: Vec<f64> = (0..=60)
            .map(|i| -10.0 + i as f64 / 3.0)
            .chain([3.7])
            .collect();
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        for (t, m) in sorted.iter().zip(sol.sample(&sorted).unwrap()) {
            let re_l = l_star(eps, *t).unwrap().re;
            assert!((PI * m.norm().powi(4) - re_l).abs() <= 1e-10, "t={t}");
        }
    }

    #[test]
    fn satisfies_amplitude_equation() {
        let eps = 0.1;
        let sol = AmplitudeSolution::new(eps).unwrap();
        let f = sol.family();
        let h = 1e-3;
        for &t in &[-9.0, -4.0, 0.0, 2.5, 7.5, 10.0] {
            let m = sol.sample(&[t - h, t, t + h]).unwrap();
            let lhs = I * (m[2] - m[0]) / (2.0 * h);
            let rhs = 0.5 * m[1] * riccati_l(f, t).unwrap();
            assert!((lhs - rhs).norm() <= 1e-5, "t={t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn squared_amplitude_is_branch_free() {
        let eps = 0.05;
        let sol = AmplitudeSolution::new(eps).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| -20.0 + i as f64).collect();
        let a2 = sol.a_const() * sol.a_const();
        for (t, m) in times.iter().zip(sol.sample(&times).unwrap()) {
            let prod = m * m * w_tilde(sol.family(), *t).unwrap();
            assert!((prod - a2).norm() <= 1e-12 * a2.norm());
        }
    }

    #[test]
    fn phase_is_continuous_on_default_grid() {
        let eps = 0.05;
        let sol = AmplitudeSolution::new(eps).unwrap();
        let n = default_grid_points(eps);
        let times: Vec<f64> = (0..n)
            .map(|i| -1.0 / eps + 2.0 / eps * i as f64 / (n - 1) as f64)
            .collect();
        let m = sol.sample(&times).unwrap();
        for pair in m.windows(2) {
            assert!((pair[1] / pair[0]).arg().abs() < FRAC_PI_2);
        }
    }

    #[test]
    fn tracker_rejects_large_jumps() {
        let mut tracker = BranchTracker::new(0.0, Complex64::new(1.0, 0.0), 0.0);
        assert!(tracker.advance(1.0, Complex64::new(0.0, 1.0)).is_err());
        assert_eq!(tracker.t(), 0.0);
        assert!((tracker.advance(1.0, Complex64::new(1.0, 1.0)).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn amplitude_constant_modulus() {
        // |A_ε| = ε^{1/8} π^{−1/2} (1 + O(ε))
        let mut worst = 0.0_f64;
        for k in 0..7 {
            let eps = 0.1 / 2f64.powi(k);
            let a = amplitude_constant(eps, solve_kappa_eps(eps).unwrap()).unwrap();
            let lead = eps.powf(0.125) / PI.sqrt();
            worst = worst.max((a.norm() - lead).abs() / (lead * eps));
        }
        assert!(worst < 1.0, "fitted constant {worst}");
    }

    #[test]
    fn amplitude_constant_phase() {
        // A_ε² phase ≈ −2(1/(4ε) − 7π/16)
        for &eps in &[0.01, 0.005] {
            let a = amplitude_constant(eps, solve_kappa_eps(eps).unwrap()).unwrap();
            let expected = Complex64::from_polar(1.0, -2.0 * (0.25 / eps - 7.0 * PI / 16.0));
            let sol = AmplitudeSolution::new(eps).unwrap();
            assert!((sol.a_const() - a).norm() < 1e-14);
            assert!((a * a / (a * a).norm() - expected).norm() < 10.0 * eps);
        }
    }

    #[test]
    fn behaviour_near_origin() {
        for &eps in &[0.2, 0.05, 0.01] {
            let sol = AmplitudeSolution::new(eps).unwrap();
            let kappa = solve_kappa_eps(eps).unwrap();
            let m0 = origin_amplitude_leading(sol.a_const());
            let times = [0.0, 0.05, 0.2, 1.0];
            let m = sol.sample(&times).unwrap();
            assert!((m[0] - m0).norm() <= 1e-12 * m0.norm());
            let slope = 0.5 * a_coefficient(kappa) * eps.sqrt();
            assert!((slope - C1 * kappa * eps.sqrt()).norm() < 1e-15);
            for (t, mt) in times.iter().zip(&m).skip(1) {
                let err = (mt - m0 * (1.0 + slope * t)).norm() / m0.norm();
                assert!(err <= 0.5 * t * t, "ε={eps} t={t} err={err}");
            }
        }
    }

    #[test]
    fn final_amplitude_leading_behaviour() {
        let mut worst = 0.0_f64;
        for k in 0..7 {
            let eps = 0.1 / 2f64.powi(k);
            let m = amplitude_at_final(eps).unwrap();
            let m0 = leading_m0(eps);
            worst = worst.max((m - m0).norm() / eps);
            let s = (1.0 / eps).sin();
            let lead4 = 1.0 / (PI * (3.0 + 2.0 * 2f64.sqrt() * s));
            assert!((m.norm().powi(4) - lead4).abs() <= 10.0 * eps);
        }
        assert!(worst < 5.0, "fitted constant {worst}");
    }

    #[test]
    fn final_amplitude_matches_tracked_walk() {
        let eps = 0.05;
        let tracked = AmplitudeSolution::new(eps)
            .unwrap()
            .amplitude_at(1.0 / eps)
            .unwrap();
        assert!((amplitude_at_final(eps).unwrap() - tracked).norm() <= 1e-10);
    }

    #[test]
    fn leading_m0_special_point() {
        let eps = 1.0 / (1.5 * PI + 8.0 * PI);
        let m0 = leading_m0(eps);
        let expected = 1.0 / (PI * (3.0 - 2.0 * 2f64.sqrt()));
        assert!((m0.norm().powi(4) - expected).abs() < 1e-12);
        // anchor: principal root at θ = π/2
        let m = leading_m0(2.0 / PI);
        let g = Complex64::new(0.0, 2f64.sqrt() + 1.0);
        assert!((m - ground_amplitude() / g.sqrt()).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn leading_amplitude_and_width_agree(eps in 0.001f64..0.5) {
            let m0 = leading_m0(eps);
            prop_assert!((PI * m0.norm().powi(4) - leading_l0(eps).re).abs() < 1e-12);
            let g = 2f64.sqrt() * Complex64::from_polar(1.0, 1.0 / eps) + I;
            prop_assert!((m0 * m0 * g - 1.0 / PI.sqrt()).norm() < 1e-12);
        }
    }
}
