//! End-to-end runs: the direct quench (L = 0) and the quench through a free
//! interval of macroscopic half-length L > 0.
//!
//! For L > 0 the evolution splits into three stages. The incoming stage is
//! the L = 0 solution shifted in time and stopped at its midpoint, where
//! `l = 2iκ_ε C₁ √ε` and `m = −i A_ε Γ(3/4)^{1/2}`. The free stage propagates
//! that Gaussian for microscopic time 2L/ε. The outgoing stage is the Riccati
//! family through the resulting state, parametrised by (γ, B_ε).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::{amplitude_at_final, leading_m0, AmplitudeSolution};
use crate::error::{Error, Result};
use crate::gaussian::{free_propagate, l2_distance, survival_probability, GaussianState};
use crate::riccati::{
    a_coefficient, l_star_at_final, leading_l0, riccati_l, solve_kappa_eps, w_tilde, RiccatiFamily,
    C1,
};
use crate::specfun::{bessel_j, GAMMA_3_4};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the state at the end of the incoming stage is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// Walk the incoming solution to t = 0 and use the computed values.
    #[default]
    Exact,
    /// Use the closed-form midpoint values and the closed form for the final
    /// width in terms of κ_ε, L and Bessel functions at 1/(2ε).
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub delta: f64,
    pub c_excl: f64,
    pub n_max: usize,
    pub mode: ChainMode,
}

impl ScenarioConfig {
    pub fn new(epsilon: f64, big_l: f64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            big_l,
            delta: 0.5,
            c_excl: 1.0,
            n_max: default_n_max(epsilon),
            mode: ChainMode::Exact,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ε must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.big_l >= 0.0 && self.big_l.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "L must be nonnegative, got {}",
                self.big_l
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "δ must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.c_excl > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c_excl must be positive, got {}",
                self.c_excl
            )));
        }
        Ok(())
    }
}

/// Smallest n with ε(n)² below `eps_min`, plus one.
pub fn default_n_max(eps_min: f64) -> usize {
    let n = ((1.0 / eps_min - 1.25 * PI) / (2.0 * PI)).ceil().max(0.0);
    n as usize + 1
}

/// Constants that glue the outgoing stage to the free stage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchedConstants {
    pub kappa_eps: Complex64,
    pub a_eps: Complex64,
    pub gamma: Complex64,
    pub b_eps: Complex64,
    pub l1: f64,
    pub big_b: f64,
    pub rho: f64,
    pub beta: f64,
}

/// Final state and its comparison with the leading asymptotics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioResult {
    pub epsilon: f64,
    pub big_l: f64,
    pub final_state: GaussianState,
    pub survival: f64,
    pub leading_state: GaussianState,
    /// L² distance between the final state and the leading state.
    pub asymptotic_gap: f64,
    /// `|l − l_leading| / |l_leading|`.
    pub width_gap: f64,
    pub excluded: bool,
    pub matched: Option<MatchedConstants>,
}

/// The direct quench from `−1/ε` to `1/ε`.
pub fn run_l0(epsilon: f64) -> Result<ScenarioResult> {
    let final_state = GaussianState::new(amplitude_at_final(epsilon)?, l_star_at_final(epsilon)?);
    let leading_state = GaussianState::new(leading_m0(epsilon), leading_l0(epsilon));
    Ok(ScenarioResult {
        epsilon,
        big_l: 0.0,
        final_state,
        survival: survival_probability(&final_state)?,
        leading_state,
        asymptotic_gap: l2_distance(&final_state, &leading_state)?,
        width_gap: (final_state.l - leading_state.l).norm() / leading_state.l.norm(),
        excluded: false,
        matched: None,
    })
}

/// Dispatches on L.
pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    if cfg.big_l == 0.0 {
        run_l0(cfg.epsilon)
    } else {
        run_l_positive(cfg)
    }
}

/// γ, B_ε and the quantities entering the leading width for L > 0.
pub fn matched_constants(cfg: &ScenarioConfig) -> Result<MatchedConstants> {
    cfg.validate()?;
    let eps = cfg.epsilon;
    let root_eps = eps.sqrt();
    let kappa_eps = solve_kappa_eps(eps)?;
    let a_eps = a_coefficient(kappa_eps);
    let denom = -2.0 * a_eps * cfg.big_l + root_eps;
    if denom.norm() < 1e-14 {
        return Err(Error::Degenerate("−2aL + √ε vanishes".into()));
    }
    let gamma = root_eps * kappa_eps / denom;
    let incoming = AmplitudeSolution::new(eps)?;
    // (1 + i l T)^{−1/2} with l = i a √ε, T = 2L/ε, principal root
    let b_eps = incoming.a_const() * (root_eps / denom).sqrt();

    let target = I * eps * a_eps / denom;
    let at_origin = riccati_l(&RiccatiFamily::with_kappa(eps, gamma)?, 0.0)?;
    if (at_origin - target).norm() > 1e-12 * target.norm().max(1.0) {
        return Err(Error::Accuracy(format!(
            "outgoing width at 0 misses its target by {:e}",
            (at_origin - target).norm()
        )));
    }

    let l1 = -4.0 * C1 * cfg.big_l;
    let big_b = l1 - (2.0 * eps).sqrt();
    Ok(MatchedConstants {
        kappa_eps,
        a_eps,
        gamma,
        b_eps,
        l1,
        big_b,
        rho: 0.5 / eps - FRAC_PI_8,
        beta: ((2.0 * eps).sqrt() / big_b).atan(),
    })
}

/// `A(ε) = B² + ε + B² cos 2ρ − √(2ε) B sin 2ρ`.
pub fn denominator_a(epsilon: f64, mc: &MatchedConstants) -> f64 {
    let (s, c) = (2.0 * mc.rho).sin_cos();
    let b = mc.big_b;
    b * b + epsilon + b * b * c - (2.0 * epsilon).sqrt() * b * s
}

/// Leading form of the final width for L > 0:
/// `[ε + i(B² sin 2ρ + √(2ε) B cos 2ρ)] / A(ε)`.
pub fn leading_width_l_positive(epsilon: f64, mc: &MatchedConstants) -> Complex64 {
    let (s, c) = (2.0 * mc.rho).sin_cos();
    let b = mc.big_b;
    let numerator = Complex64::new(epsilon, b * b * s + (2.0 * epsilon).sqrt() * b * c);
    numerator / denominator_a(epsilon, mc)
}

/// The three-stage run for L > 0.
pub fn run_l_positive(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    if cfg.big_l <= 0.0 {
        return Err(Error::InvalidConfig("the staged run needs L > 0".into()));
    }
    let eps = cfg.epsilon;
    let mc = matched_constants(cfg)?;
    let at_origin = incoming_midpoint(eps, &mc, cfg.mode)?;
    let exiting = free_propagate(&at_origin, 2.0 * cfg.big_l / eps)?;

    let outgoing = RiccatiFamily::with_kappa(eps, mc.gamma)?;
    let sol = AmplitudeSolution::with_reference(outgoing, 0.0, exiting.m)?;
    let tracked_m = sol.amplitude_at(1.0 / eps)?;
    let (l_final, m_final) = match cfg.mode {
        ChainMode::Exact => (riccati_l(&outgoing, 1.0 / eps)?, tracked_m),
        ChainMode::Literal => {
            let (l, m_sq) = outgoing_closed_form(eps, cfg.big_l, &mc)?;
            let root = m_sq.sqrt();
            let m = if (root - tracked_m).norm() <= (root + tracked_m).norm() {
                root
            } else {
                -root
            };
            (l, m)
        }
    };
    let final_state = GaussianState::new(m_final, l_final);

    let l_lead = leading_width_l_positive(eps, &mc);
    let m_lead = if l_lead.re > 0.0 {
        Complex64::from_polar((l_lead.re / PI).powf(0.25), m_final.arg())
    } else {
        Complex64::new(f64::NAN, f64::NAN)
    };
    let leading_state = GaussianState::new(m_lead, l_lead);
    let asymptotic_gap = l2_distance(&final_state, &leading_state).unwrap_or(f64::NAN);
    Ok(ScenarioResult {
        epsilon: eps,
        big_l: cfg.big_l,
        final_state,
        survival: survival_probability(&final_state)?,
        leading_state,
        asymptotic_gap,
        width_gap: (l_final - l_lead).norm() / l_lead.norm(),
        excluded: is_excluded(cfg, eps),
        matched: Some(mc),
    })
}

fn incoming_midpoint(eps: f64, mc: &MatchedConstants, mode: ChainMode) -> Result<GaussianState> {
    let incoming = AmplitudeSolution::new(eps)?;
    Ok(match mode {
        ChainMode::Exact => GaussianState::new(
            incoming.amplitude_at(0.0)?,
            riccati_l(incoming.family(), 0.0)?,
        ),
        ChainMode::Literal => GaussianState::new(
            -I * incoming.a_const() * GAMMA_3_4.sqrt(),
            I * mc.a_eps * eps.sqrt(),
        ),
    })
}

/// Final width and squared amplitude of the outgoing stage with γ
/// eliminated in favour of κ_ε.
fn outgoing_closed_form(
    eps: f64,
    big_l: f64,
    mc: &MatchedConstants,
) -> Result<(Complex64, Complex64)> {
    let z = 0.5 / eps;
    let (jm14, jp14) = (bessel_j(-0.25, z)?, bessel_j(0.25, z)?);
    let (jm34, jp34) = (bessel_j(-0.75, z)?, bessel_j(0.75, z)?);
    let k = mc.kappa_eps;
    let root_eps = eps.sqrt();
    let four_k_c1_l = 4.0 * k * C1 * big_l;
    let num = -four_k_c1_l * jp34 + root_eps * (k * jm34 + jp34);
    let den = -four_k_c1_l * jm14 - root_eps * (k * jp14 - jm14);
    let l = I * num / den;
    let w_final = (0.5 * z).powf(0.25) * (mc.gamma * jp14 - jm14);
    Ok((l, mc.b_eps * mc.b_eps / w_final))
}

/// `ε(n) = (π/4 + (2n+1)π)^{−1/2}`.
pub fn epsilon_n(n: usize) -> f64 {
    (FRAC_PI_4 + (2 * n + 1) as f64 * PI).powf(-0.5)
}

/// One interval of the excluded-set covering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExcludedInterval {
    pub n: usize,
    pub center: f64,
    pub radius: f64,
}

impl ExcludedInterval {
    pub fn contains(&self, epsilon: f64) -> bool {
        (epsilon - self.center).abs() < self.radius
    }
}

/// Intervals centred at `1/(π/4 − 2ε(n)/L₁ + (2n+1)π)` with radius
/// `c n^{−(5−δ)/2}` (radius c for n = 0), for n up to `n_max`.
pub fn excluded_set(cfg: &ScenarioConfig) -> Vec<ExcludedInterval> {
    let l1 = -4.0 * C1 * cfg.big_l;
    (0..=cfg.n_max)
        .map(|n| {
            let radius = if n == 0 {
                cfg.c_excl
            } else {
                cfg.c_excl * (n as f64).powf(-(5.0 - cfg.delta) / 2.0)
            };
            let center = 1.0 / (FRAC_PI_4 - 2.0 * epsilon_n(n) / l1 + (2 * n + 1) as f64 * PI);
            ExcludedInterval { n, center, radius }
        })
        .collect()
}

/// `cos(2ρ + β)` at ε for the configured L.
pub fn exclusion_cosine(cfg: &ScenarioConfig, epsilon: f64) -> f64 {
    let l1 = -4.0 * C1 * cfg.big_l;
    let big_b = l1 - (2.0 * epsilon).sqrt();
    let beta = ((2.0 * epsilon).sqrt() / big_b).atan();
    (2.0 * (0.5 / epsilon - FRAC_PI_8) + beta).cos()
}

/// The direct condition `cos(2ρ + β) ≤ −1 + c ε^{1−δ}`.
pub fn is_excluded(cfg: &ScenarioConfig, epsilon: f64) -> bool {
    exclusion_cosine(cfg, epsilon) <= -1.0 + cfg.c_excl * epsilon.powf(1.0 - cfg.delta)
}

/// Whether ε lies in one of the covering intervals with n ≥ 1.
pub fn in_covering(cfg: &ScenarioConfig, epsilon: f64) -> bool {
    excluded_set(cfg)
        .iter()
        .skip(1)
        .any(|iv| iv.contains(epsilon))
}

/// Total length of the covering intervals (n ≥ 1) clipped to `(0, eps0)`.
pub fn covering_measure(cfg: &ScenarioConfig, eps0: f64) -> f64 {
    excluded_set(cfg)
        .iter()
        .skip(1)
        .map(|iv| ((iv.center + iv.radius).min(eps0) - (iv.center - iv.radius).max(0.0)).max(0.0))
        .sum()
}

/// One sample of the width and amplitude along the full evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub l: Complex64,
    pub m: Complex64,
}

/// `n_samples` equally spaced points on `[−(L+1)/ε, (L+1)/ε]` in microscopic
/// time.
pub fn trajectory(cfg: &ScenarioConfig, n_samples: usize) -> Result<Vec<TrajectoryPoint>> {
    cfg.validate()?;
    if n_samples < 2 {
        return Err(Error::InvalidConfig("need at least two samples".into()));
    }
    let eps = cfg.epsilon;
    let shift = cfg.big_l / eps;
    let t_end = 1.0 / eps + shift;
    let times: Vec<f64> = (0..n_samples)
        .map(|i| -t_end + 2.0 * t_end * i as f64 / (n_samples - 1) as f64)
        .collect();

    let incoming = AmplitudeSolution::new(eps)?;
    let incoming_times: Vec<f64> = times
        .iter()
        .filter(|&&t| t <= -shift)
        .map(|t| t + shift)
        .collect();
    let mut points = Vec::with_capacity(n_samples);
    for (s, m) in incoming_times.iter().zip(incoming.sample(&incoming_times)?) {
        points.push(TrajectoryPoint {
            t: s - shift,
            l: riccati_l(incoming.family(), *s)?,
            m,
        });
    }
    if cfg.big_l == 0.0 {
        let rest: Vec<f64> = times[points.len()..].to_vec();
        for (t, m) in rest.iter().zip(incoming.sample(&rest)?) {
            points.push(TrajectoryPoint {
                t: *t,
                l: riccati_l(incoming.family(), *t)?,
                m,
            });
        }
        return Ok(points);
    }

    let mc = matched_constants(cfg)?;
    let midpoint = incoming_midpoint(eps, &mc, cfg.mode)?;
    for &t in times.iter().filter(|&&t| t > -shift && t <= shift) {
        let g = free_propagate(&midpoint, t + shift)?;
        points.push(TrajectoryPoint { t, l: g.l, m: g.m });
    }
    let exiting = free_propagate(&midpoint, 2.0 * shift)?;
    let outgoing = RiccatiFamily::with_kappa(eps, mc.gamma)?;
    let sol = AmplitudeSolution::with_reference(outgoing, 0.0, exiting.m)?;
    let outgoing_times: Vec<f64> = times
        .iter()
        .filter(|&&t| t > shift)
        .map(|t| t - shift)
        .collect();
    for (s, m) in outgoing_times.iter().zip(sol.sample(&outgoing_times)?) {
        points.push(TrajectoryPoint {
            t: s + shift,
            l: riccati_l(&outgoing, *s)?,
            m,
        });
    }
    Ok(points)
}

/// `|w̃(0, γ)|`-based check that the outgoing amplitude starts where the free
/// stage ended.
pub fn outgoing_amplitude_at_origin(cfg: &ScenarioConfig) -> Result<Complex64> {
    let mc = matched_constants(cfg)?;
    let outgoing = RiccatiFamily::with_kappa(cfg.epsilon, mc.gamma)?;
    let w0 = w_tilde(&outgoing, 0.0)?;
    Ok(mc.b_eps / Complex64::new(w0.re, w0.im + 0.0).sqrt())
}

/// 1/√2, the limiting survival probability for L = 0.
pub const LIMIT_SURVIVAL: f64 = FRAC_1_SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_n_values() {
        assert!((epsilon_n(0) - 0.504627).abs() < 1e-6);
        assert!((epsilon_n(10) - 0.122390).abs() < 1e-6);
        assert!((1..50).all(|n| epsilon_n(n) < epsilon_n(n - 1)));
    }

    #[test]
    fn l0_leading_survival_is_exact() {
        for &eps in &[0.3, 0.1, 0.0123, 0.004] {
            let r = run_l0(eps).unwrap();
            let p = survival_probability(&r.leading_state).unwrap();
            assert!((p - LIMIT_SURVIVAL).abs() < 1e-12);
        }
        let r = run_l0(0.01).unwrap();
        assert!((r.survival - LIMIT_SURVIVAL).abs() < 0.05);
    }

    #[test]
    fn l0_gap_scales_with_epsilon() {
        let worst = (0..7)
            .map(|k| {
                let eps = 0.1 / 2f64.powi(k);
                run_l0(eps).unwrap().asymptotic_gap / eps
            })
            .fold(0.0, f64::max);
        assert!(worst < 5.0, "fitted constant {worst}");
    }

    #[test]
    fn matching_reduces_to_identity_at_zero_length() {
        let mut cfg = ScenarioConfig::new(0.05, 0.0).unwrap();
        let mc = matched_constants(&cfg).unwrap();
        let sol = AmplitudeSolution::new(0.05).unwrap();
        assert!((mc.gamma - mc.kappa_eps).norm() < 1e-15);
        assert!((mc.b_eps - sol.a_const()).norm() < 1e-15);
        cfg.big_l = 1.0;
        let mc = matched_constants(&cfg).unwrap();
        assert!((mc.l1 + 4.0 * C1).abs() < 1e-15);
        assert!((mc.l1 + 1.3522).abs() < 1e-3);
        assert!(mc.big_b < 0.0 && mc.beta < 0.0);
    }

    #[test]
    fn beta_expansion() {
        let mut worst = 0.0_f64;
        for k in 0..6 {
            let eps = 0.01 / 2f64.powi(k);
            let mc = matched_constants(&ScenarioConfig::new(eps, 1.0).unwrap()).unwrap();
            worst = worst.max((mc.beta - (2.0 * eps).sqrt() / mc.l1).abs() / eps);
        }
        assert!(worst < 2.0, "fitted constant {worst}");
    }

    #[test]
    fn outgoing_stage_starts_from_free_stage() {
        for mode in [ChainMode::Exact, ChainMode::Literal] {
            let mut cfg = ScenarioConfig::new(0.05, 0.7).unwrap();
            cfg.mode = mode;
            let mc = matched_constants(&cfg).unwrap();
            let mid = incoming_midpoint(0.05, &mc, mode).unwrap();
            let exiting = free_propagate(&mid, 2.0 * 0.7 / 0.05).unwrap();
            let outgoing = RiccatiFamily::with_kappa(0.05, mc.gamma).unwrap();
            assert!((riccati_l(&outgoing, 0.0).unwrap() - exiting.l).norm() < 1e-12);
            let m0 = outgoing_amplitude_at_origin(&cfg).unwrap();
            assert!((m0 - exiting.m).norm() < 1e-12 * exiting.m.norm());
        }
    }

    #[test]
    fn chain_modes_agree() {
        let mut cfg = ScenarioConfig::new(0.02, 1.0).unwrap();
        let exact = run_l_positive(&cfg).unwrap();
        cfg.mode = ChainMode::Literal;
        let literal = run_l_positive(&cfg).unwrap();
        let fs = (exact.final_state, literal.final_state);
        assert!((fs.0.l - fs.1.l).norm() < 1e-10 * fs.0.l.norm());
        assert!((fs.0.m - fs.1.m).norm() < 1e-10 * fs.0.m.norm());
    }

    #[test]
    fn small_length_approaches_direct_quench() {
        let cfg = ScenarioConfig::new(0.05, 1e-12).unwrap();
        let staged = run_l_positive(&cfg).unwrap();
        let direct = run_l0(0.05).unwrap();
        assert!((staged.final_state.l - direct.final_state.l).norm() < 1e-6);
        assert!((staged.final_state.m.norm() - direct.final_state.m.norm()).abs() < 1e-6);
        assert!((staged.final_state.m - direct.final_state.m).norm() < 1e-6);
    }

    #[test]
    fn final_state_is_normalized() {
        let r = run_l_positive(&ScenarioConfig::new(0.03, 1.0).unwrap()).unwrap();
        let g = r.final_state;
        assert!((PI * g.m.norm().powi(4) - g.l.re).abs() < 1e-10);
        assert!((0.0..=1.0).contains(&r.survival));
    }

    #[test]
    fn excluded_intervals() {
        let cfg = ScenarioConfig::new(0.01, 1.0).unwrap();
        let set = excluded_set(&cfg);
        assert_eq!(set.len(), cfg.n_max + 1);
        assert_eq!(set[0].radius, 1.0);
        for iv in &set[1..] {
            assert!((iv.radius - (iv.n as f64).powf(-2.25)).abs() < 1e-15);
            let ratio = iv.center * (2 * iv.n + 1) as f64 * PI;
            assert!((ratio - 1.0).abs() < 0.2 / iv.n as f64);
            assert!(in_covering(&cfg, iv.center));
        }
        assert!(epsilon_n(cfg.n_max).powi(2) < 0.01);
        assert!(covering_measure(&cfg, 0.02) < covering_measure(&cfg, 0.1));
    }

    #[test]
    fn direct_condition_extremes() {
        let cfg = ScenarioConfig::new(0.01, 1.0).unwrap();
        // scan for the largest and smallest cosine near ε = 0.01
        let grid: Vec<f64> = (0..20_000)
            .map(|i| 0.0095 + 1e-3 * i as f64 / 20_000.0)
            .collect();
        let max = grid
            .iter()
            .copied()
            .max_by(|a, b| exclusion_cosine(&cfg, *a).total_cmp(&exclusion_cosine(&cfg, *b)))
            .unwrap();
        let min = grid
            .iter()
            .copied()
            .min_by(|a, b| exclusion_cosine(&cfg, *a).total_cmp(&exclusion_cosine(&cfg, *b)))
            .unwrap();
        assert!(!is_excluded(&cfg, max));
        assert!(is_excluded(&cfg, min));
        assert!(in_covering(&cfg, min));
    }

    #[test]
    fn covering_contains_direct_exclusions() {
        let mut cfg = ScenarioConfig::new(0.002, 1.0).unwrap();
        cfg.n_max = default_n_max(0.002);
        let mut excluded = 0;
        for i in 0..200_000 {
            let eps = 0.002 + 0.048 * i as f64 / 200_000.0;
            if is_excluded(&cfg, eps) {
                excluded += 1;
                assert!(in_covering(&cfg, eps), "ε = {eps}");
            }
        }
        assert!(excluded > 0);
    }

    #[test]
    fn rejects_invalid_config() {
        assert!(ScenarioConfig::new(1.5, 0.0).is_err());
        assert!(ScenarioConfig::new(0.1, -1.0).is_err());
        let mut cfg = ScenarioConfig::new(0.1, 1.0).unwrap();
        cfg.delta = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn trajectory_endpoints() {
        for big_l in [0.0, 0.5] {
            let cfg = ScenarioConfig::new(0.1, big_l).unwrap();
            let pts = trajectory(&cfg, 101).unwrap();
            assert_eq!(pts.len(), 101);
            assert!((pts[0].l - 1.0).norm() < 1e-12);
            assert!((pts[0].m - PI.powf(-0.25)).norm() < 1e-12);
            for p in &pts {
                assert!(
                    (PI * p.m.norm().powi(4) - p.l.re).abs() < 1e-10,
                    "t={}",
                    p.t
                );
            }
            let r = run(&cfg).unwrap();
            let last = pts.last().unwrap();
            assert!((last.l - r.final_state.l).norm() < 1e-10);
            assert!((last.m - r.final_state.m).norm() < 1e-10);
        }
    }
}
