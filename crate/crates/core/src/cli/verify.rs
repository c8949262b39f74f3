//! `verify`: special-function self-test, invariant checks and oracle
//! comparisons, reported as one JSON verdict per check.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::{open_output, CommonArgs, Resolved, SCHEMA_VERSION};
use crate::amplitude::leading_m0;
use crate::error::{Error, Result};
use crate::gaussian::{survival_probability, GaussianState};
use crate::oracle::ode::{amplitude_by_quadrature, integrate_scenario, OdeOptions};
use crate::oracle::pde::PdeSettings;
use crate::oracle::{ode_final_state, pde_survival};
use crate::riccati::{l_star, leading_l0};
use crate::scenario::{run, run_l0, run_l_positive, trajectory, ScenarioConfig};
use crate::specfun::{self_test, GammaConstants};
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Everything except the grid solver; well under a minute.
    Fast,
    /// Adds the grid solver at ε = 0.1 and 0.05.
    Full,
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Self::Fast),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidConfig(format!(
                "verify mode must be fast or full, got {s}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub profile: Profile,
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
}

struct Collector {
    checks: Vec<VerifyCheck>,
}

impl Collector {
    fn check(&mut self, suite: &str, name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        let start = Instant::now();
        let (value, error) = match f() {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        self.checks.push(VerifyCheck {
            suite: suite.into(),
            name: name.into(),
            passed: error.is_none() && value <= tolerance,
            value,
            tolerance,
            error,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }
}

fn leading_exactness() -> Result<f64> {
    let mut worst = 0.0_f64;
    for k in 0..100 {
        let eps = 0.001 + 0.499 * k as f64 / 99.0;
        let g = GaussianState::new(leading_m0(eps), leading_l0(eps));
        worst = worst.max((survival_probability(&g)? - FRAC_1_SQRT_2).abs());
    }
    Ok(worst)
}

fn survival_constant() -> Result<f64> {
    [0.02, 0.01, 0.005, 0.002]
        .iter()
        .map(|&eps| Ok((run_l0(eps)?.survival - FRAC_1_SQRT_2).abs() / eps))
        .try_fold(0.0_f64, |acc, v: Result<f64>| Ok(acc.max(v?)))
}

fn unit_norm_on_trajectories() -> Result<f64> {
    let mut worst = 0.0_f64;
    for (eps, big_l) in [(0.2, 0.0), (0.1, 0.0), (0.05, 0.0), (0.1, 1.0)] {
        for p in trajectory(&ScenarioConfig::new(eps, big_l)?, 401)? {
            worst = worst.max((PI * p.m.norm().powi(4) - p.l.re).abs());
        }
    }
    Ok(worst)
}

fn small_length_continuity() -> Result<f64> {
    let mut worst = 0.0_f64;
    for eps in [0.1, 0.05] {
        let a = run_l_positive(&ScenarioConfig::new(eps, 1e-12)?)?.final_state;
        let b = run_l0(eps)?.final_state;
        worst = worst
            .max((a.l - b.l).norm())
            .max((a.m.norm() - b.m.norm()).abs());
    }
    Ok(worst)
}

fn ode_along_run(eps: f64) -> Result<f64> {
    let times: Vec<f64> = (1..=200)
        .map(|i| -1.0 / eps + 2.0 / eps * i as f64 / 200.0)
        .collect();
    let traj = integrate_scenario(
        eps,
        0.0,
        -1.0 / eps,
        Complex64::new(1.0, 0.0),
        &times,
        OdeOptions::default(),
    )?;
    let ls = traj.l_values();
    let ms = amplitude_by_quadrature(&traj, PI.powf(-0.25).into());
    let closed = trajectory(&ScenarioConfig::new(eps, 0.0)?, 201)?;
    let mut worst = 0.0_f64;
    for p in &closed[1..] {
        let k = traj
            .index_of(p.t)
            .ok_or_else(|| Error::Accuracy("sample time missing".into()))?;
        worst = worst
            .max((ls[k] - l_star(eps, p.t)?).norm())
            .max((ls[k] - p.l).norm())
            .max((ms[k] - p.m).norm());
    }
    Ok(worst)
}

fn ode_final(eps: f64, big_l: f64) -> Result<f64> {
    let closed = run(&ScenarioConfig::new(eps, big_l)?)?.final_state;
    let opts = OdeOptions {
        h_max: 0.01,
        ..OdeOptions::default()
    };
    let oracle = ode_final_state(eps, big_l, opts)?;
    Ok((closed.l - oracle.l)
        .norm()
        .max((closed.m - oracle.m).norm()))
}

fn pde_deviation(eps: f64) -> Result<f64> {
    let closed = run_l0(eps)?.survival;
    Ok((pde_survival(eps, 0.0, PdeSettings::for_epsilon(eps))? - closed).abs())
}

/// Runs every check of `profile`; `constants` feeds the special-function
/// self-test.
pub fn run_verify(profile: Profile, constants: &GammaConstants) -> VerifyReport {
    let mut c = Collector { checks: Vec::new() };
    for check in self_test(constants).checks {
        c.check("specfun", &check.name, check.tolerance, || {
            if check.value.is_nan() {
                Err(Error::Accuracy("evaluation failed".into()))
            } else {
                Ok(check.value)
            }
        });
    }
    c.check(
        "invariants",
        "leading_survival_exact",
        1e-12,
        leading_exactness,
    );
    c.check("invariants", "survival_constant", 5.0, survival_constant);
    c.check(
        "invariants",
        "unit_norm_identity",
        1e-10,
        unit_norm_on_trajectories,
    );
    c.check(
        "invariants",
        "small_length_continuity",
        1e-6,
        small_length_continuity,
    );
    for eps in [0.2, 0.1, 0.05] {
        c.check("oracle_ode", &format!("trajectory_eps_{eps}"), 1e-6, || {
            ode_along_run(eps)
        });
    }
    c.check("oracle_ode", "final_state_eps_0.1_L_0.5", 1e-6, || {
        ode_final(0.1, 0.5)
    });
    if profile == Profile::Full {
        for eps in [0.1, 0.05] {
            c.check("oracle_pde", &format!("survival_eps_{eps}"), 1e-3, || {
                pde_deviation(eps)
            });
        }
    }
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        profile,
        passed: c.checks.iter().all(|k| k.passed),
        checks: c.checks,
    }
}

pub(super) fn command(args: &CommonArgs) -> Result<bool> {
    let res = Resolved::new(args)?;
    let profile = res.mode(Profile::Fast)?;
    let report = run_verify(profile, &GammaConstants::STANDARD);
    let path = res.json_path()?.or(res.out()?);
    let mut out = open_output(path.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    for check in report.checks.iter().filter(|k| !k.passed) {
        eprintln!(
            "FAIL {}/{}: {} > {}",
            check.suite, check.name, check.value, check.tolerance
        );
    }
    Ok(report.passed)
}
