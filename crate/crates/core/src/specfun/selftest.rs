use std::f64::consts::PI;

use serde::Serialize;

use super::asymptotic::bessel_j_asymptotic;
use super::series::{bessel_j_series, series_m};
use super::{bessel_j, bessel_j_derivative, bessel_j_zeros, GammaConstants, SERIES_MAX_ARG};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub passed: bool,
    /// Worst observed residual (or a count, for structural checks).
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<SelfTestCheck>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        let (passed, value) = match value {
            Ok(v) => (v <= tolerance, v),
            Err(_) => (false, f64::NAN),
        };
        self.checks.push(SelfTestCheck {
            name: name.to_string(),
            passed,
            value,
            tolerance,
        });
    }
}

/// Wronskian residual for J_{±ν}, relative to 2/(πz):
/// `|J_ν J'_{−ν} − J'_ν J_{−ν} + 2 sin(νπ)/(πz)| / (2/(πz))`.
pub fn wronskian_residual(nu: f64, z: f64) -> Result<f64> {
    let w = bessel_j(nu, z)? * bessel_j_derivative(-nu, z)?
        - bessel_j_derivative(nu, z)? * bessel_j(-nu, z)?;
    let scale = 2.0 / (PI * z);
    Ok((w + scale * (nu * PI).sin()).abs() / scale)
}

fn max_wronskian(nu: f64) -> Result<f64> {
    let (lo, hi) = (0.1_f64.ln(), 500.0_f64.ln());
    let mut worst = 0.0_f64;
    for i in 0..200 {
        let z = (lo + (hi - lo) * i as f64 / 199.0).exp();
        worst = worst.max(wronskian_residual(nu, z)?);
    }
    Ok(worst)
}

/// Number of interlacing violations among the first `n` zeros of J_{±1/4}.
fn interlacing_violations(n: usize) -> Result<f64> {
    let plus = bessel_j_zeros(0.25, n)?;
    let minus = bessel_j_zeros(-0.25, n)?;
    let mut merged: Vec<(f64, bool)> = plus.iter().map(|&z| (z, true)).collect();
    merged.extend(minus.iter().map(|&z| (z, false)));
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bad = merged
        .windows(2)
        .filter(|w| w[0].1 == w[1].1 || w[1].0 <= w[0].0)
        .count();
    Ok(bad as f64)
}

fn crossover_mismatch() -> Result<f64> {
    let mut worst = 0.0_f64;
    for &nu in &[0.25, -0.25, 0.75, -0.75] {
        let s = bessel_j_series(nu, SERIES_MAX_ARG)?.value;
        let (a, _) = bessel_j_asymptotic(nu, SERIES_MAX_ARG);
        worst = worst.max((s - a).abs() / s.abs());
    }
    Ok(worst)
}

fn entire_series_mismatch() -> Result<f64> {
    let mut worst = 0.0_f64;
    for &nu in &[0.25, -0.25, 0.75, -0.75] {
        for i in 1..=100 {
            let s = i as f64;
            let j = bessel_j(nu, 2.0 * s.sqrt())?;
            let m = s.powf(0.5 * nu) * series_m(nu, s)?;
            worst = worst.max((j - m).abs() / j.abs().max(1e-300));
        }
    }
    Ok(worst)
}

/// Internal consistency report for the special-function kernel.
///
/// `constants` is checked against the reflection identity; the remaining
/// checks exercise the evaluation paths themselves.
pub fn self_test(constants: &GammaConstants) -> SelfTestReport {
    let mut report = SelfTestReport::default();
    report.push(
        "gamma_reflection",
        Ok(constants.reflection_residual()),
        4.0 * f64::EPSILON,
    );
    report.push(
        "gamma_c_approx",
        Ok((2.0 * constants.c1 - 0.676).abs()),
        1e-3,
    );
    report.push("wronskian_nu_1_4", max_wronskian(0.25), 1e-10);
    report.push("wronskian_nu_3_4", max_wronskian(0.75), 1e-10);
    report.push("zeros_interlace_20", interlacing_violations(20), 0.0);
    report.push("series_asymptotic_crossover", crossover_mismatch(), 1e-11);
    report.push("entire_series_consistency", entire_series_mismatch(), 1e-12);
    report
}
