use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_epsilons, fmt_real, open_output, write_json, ExcludedArgs, Report, Resolved, Spacing,
    SurvivalArgs, SweepMode, SweepSpec, TrajectoryArgs, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::oracle::ode::{amplitude_by_quadrature, integrate_scenario, OdeOptions};
use crate::oracle::pde::PdeSettings;
use crate::oracle::{ode_survival, pde_survival};
use crate::scenario::{
    covering_measure, default_n_max, denominator_a, excluded_set, exclusion_cosine, in_covering,
    is_excluded, run, trajectory as closed_trajectory, ChainMode, ScenarioConfig, TrajectoryPoint,
};

fn parse_chain(text: Option<String>) -> Result<ChainMode> {
    match text.as_deref() {
        None | Some("exact") => Ok(ChainMode::Exact),
        Some("literal") => Ok(ChainMode::Literal),
        Some(other) => Err(Error::InvalidConfig(format!(
            "chain must be exact or literal, got {other}"
        ))),
    }
}

fn scenario_config(
    eps: f64,
    big_l: f64,
    chain: ChainMode,
    delta: Option<f64>,
    c_excl: Option<f64>,
) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::new(eps, big_l)?;
    cfg.mode = chain;
    if let Some(d) = delta {
        cfg.delta = d;
    }
    if let Some(c) = c_excl {
        cfg.c_excl = c;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize)]
struct SurvivalRecord {
    epsilon: f64,
    #[serde(rename = "L")]
    big_l: f64,
    survival_closed: f64,
    survival_ode: Option<f64>,
    survival_pde: Option<f64>,
    re_l_final: f64,
    im_l_final: f64,
    abs_m_final: f64,
    gap: f64,
    width_gap: f64,
    /// `A(ε)/√ε`; only for L > 0.
    denominator_ratio: Option<f64>,
    excluded: bool,
    wall_time_s: f64,
}

impl SurvivalRecord {
    fn survival_oracle(&self) -> Option<f64> {
        self.survival_pde.or(self.survival_ode)
    }

    fn csv_row(&self) -> String {
        [
            fmt_real(self.epsilon),
            fmt_real(self.big_l),
            fmt_real(self.survival_closed),
            self.survival_oracle().map(fmt_real).unwrap_or_default(),
            fmt_real(self.re_l_final),
            fmt_real(self.im_l_final),
            fmt_real(self.abs_m_final),
            fmt_real(self.gap),
            self.excluded.to_string(),
        ]
        .join(",")
    }
}

const SURVIVAL_HEADER: &str =
    "epsilon,L,survival_closed,survival_oracle,re_l_final,im_l_final,abs_m_final,gap,excluded";

fn survival_record(cfg: &ScenarioConfig, mode: SweepMode) -> Result<SurvivalRecord> {
    let start = Instant::now();
    let r = run(cfg)?;
    let survival_ode = if mode.runs_ode() {
        Some(ode_survival(cfg.epsilon, cfg.big_l)?)
    } else {
        None
    };
    let survival_pde = if mode.runs_pde() {
        Some(pde_survival(
            cfg.epsilon,
            cfg.big_l,
            PdeSettings::for_epsilon(cfg.epsilon),
        )?)
    } else {
        None
    };
    Ok(SurvivalRecord {
        epsilon: cfg.epsilon,
        big_l: cfg.big_l,
        survival_closed: r.survival,
        survival_ode,
        survival_pde,
        re_l_final: r.final_state.l.re,
        im_l_final: r.final_state.l.im,
        abs_m_final: r.final_state.m.norm(),
        gap: r.asymptotic_gap,
        width_gap: r.width_gap,
        denominator_ratio: r
            .matched
            .map(|mc| denominator_a(cfg.epsilon, &mc) / cfg.epsilon.sqrt()),
        excluded: r.excluded,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Default, Serialize)]
struct SurvivalFits {
    /// max |P − 2^{−1/2}| / ε, for L = 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    survival_constant: Option<f64>,
    /// min A(ε)/√ε over admissible ε, for L > 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    denominator_lower: Option<f64>,
    /// max Re l(1/ε)/√ε over admissible ε, for L > 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    re_l_upper: Option<f64>,
    /// max relative width gap / √ε over admissible ε, for L > 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    width_gap_upper: Option<f64>,
    /// max |closed − oracle| survival difference.
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_deviation: Option<f64>,
}

fn fit(records: &[SurvivalRecord], big_l: f64) -> SurvivalFits {
    let max = |it: &mut dyn Iterator<Item = f64>| {
        it.fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
    };
    let mut fits = SurvivalFits::default();
    if big_l == 0.0 {
        fits.survival_constant = max(&mut records
            .iter()
            .map(|r| (r.survival_closed - FRAC_1_SQRT_2).abs() / r.epsilon));
    } else {
        let admissible: Vec<&SurvivalRecord> = records.iter().filter(|r| !r.excluded).collect();
        fits.denominator_lower = admissible
            .iter()
            .filter_map(|r| r.denominator_ratio)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        fits.re_l_upper = max(&mut admissible.iter().map(|r| r.re_l_final / r.epsilon.sqrt()));
        fits.width_gap_upper = max(&mut admissible.iter().map(|r| r.width_gap / r.epsilon.sqrt()));
    }
    fits.oracle_deviation = max(&mut records.iter().flat_map(|r| {
        [r.survival_ode, r.survival_pde]
            .into_iter()
            .flatten()
            .map(move |p| (p - r.survival_closed).abs())
    }));
    fits
}

pub(super) fn survival(args: &SurvivalArgs) -> Result<bool> {
    let res = Resolved::new(&args.common)?;
    let big_l = res.big_l()?;
    let mode = res.mode(SweepMode::ClosedForm)?;
    let chain = parse_chain(res.get(args.chain.clone(), "chain")?)?;
    let delta = res.get(args.delta, "delta")?;
    let c_excl = res.get(args.c_excl, "c_excl")?;
    let eps_values = match res.epsilon_list()? {
        Some(list) => list,
        None => res
            .range(&args.range, (0.002, 0.05, 20, Spacing::Log), false)?
            .ok_or_else(|| Error::InvalidConfig("give --epsilon or an ε range".into()))?,
    };
    check_epsilons(&eps_values)?;
    let configs = eps_values
        .iter()
        .map(|&eps| scenario_config(eps, big_l, chain, delta, c_excl))
        .collect::<Result<Vec<_>>>()?;
    let spec = SweepSpec {
        eps_values,
        big_l,
        mode,
    };

    let results: Vec<Result<SurvivalRecord>> = configs
        .par_iter()
        .map(|cfg| survival_record(cfg, mode))
        .collect();
    let mut out = open_output(res.out()?.as_deref())?;
    writeln!(out, "{SURVIVAL_HEADER}")?;
    let mut records = Vec::new();
    let mut error = None;
    for (cfg, result) in configs.iter().zip(results) {
        match result {
            Ok(rec) => {
                writeln!(out, "{}", rec.csv_row())?;
                records.push(rec);
            }
            Err(e) => {
                let msg = format!("epsilon = {}: {e}", cfg.epsilon);
                writeln!(out, "# error: {msg}")?;
                error = Some(msg);
                break;
            }
        }
    }
    out.flush()?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: serde_json::json!({ "sweep": spec, "chain": chain, "delta": delta, "c_excl": c_excl }),
        fits: fit(&records, big_l),
        records,
        error: error.clone(),
    };
    write_json(res.json_path()?.as_deref(), &report)?;
    if let Some(msg) = error {
        eprintln!("error: {msg}");
    }
    Ok(report.error.is_none())
}

fn trajectory_rows(points: &[TrajectoryPoint]) -> Vec<String> {
    points
        .iter()
        .map(|p| {
            [
                fmt_real(p.t),
                fmt_real(p.l.re),
                fmt_real(p.l.im),
                fmt_real(p.m.re),
                fmt_real(p.m.im),
                fmt_real(PI * p.m.norm().powi(4) - p.l.re),
            ]
            .join(",")
        })
        .collect()
}

/// Same sampling as the closed form, from the ODE integrator.
fn oracle_trajectory(cfg: &ScenarioConfig, n_samples: usize) -> Result<Vec<TrajectoryPoint>> {
    let t_end = (cfg.big_l + 1.0) / cfg.epsilon;
    let times: Vec<f64> = (0..n_samples)
        .map(|i| -t_end + 2.0 * t_end * i as f64 / (n_samples - 1) as f64)
        .collect();
    let opts = OdeOptions {
        h_max: 0.01,
        ..OdeOptions::default()
    };
    let traj = integrate_scenario(
        cfg.epsilon,
        cfg.big_l,
        -t_end,
        Complex64::new(1.0, 0.0),
        &times[1..],
        opts,
    )?;
    let ls = traj.l_values();
    let ms = amplitude_by_quadrature(&traj, PI.powf(-0.25).into());
    Ok(times
        .iter()
        .map(|&t| {
            let k = if t == -t_end {
                0
            } else {
                traj.index_of(t).expect("stop recorded")
            };
            TrajectoryPoint {
                t,
                l: ls[k],
                m: ms[k],
            }
        })
        .collect())
}

#[derive(Serialize)]
struct TrajectorySummary {
    n_samples: usize,
    max_unit_norm_residual: f64,
    abs_l_at_origin: Option<f64>,
}

pub(super) fn trajectory(args: &TrajectoryArgs) -> Result<bool> {
    let res = Resolved::new(&args.common)?;
    let eps = match res.epsilon_list()?.as_deref() {
        Some([eps]) => *eps,
        _ => {
            return Err(Error::InvalidConfig(
                "trajectory needs exactly one --epsilon".into(),
            ))
        }
    };
    check_epsilons(&[eps])?;
    let big_l = res.big_l()?;
    let mode = res.mode(SweepMode::ClosedForm)?;
    let chain = parse_chain(res.get(args.chain.clone(), "chain")?)?;
    let n_samples = res.get(args.n_samples, "n_samples")?.unwrap_or(201);
    if n_samples < 2 {
        return Err(Error::InvalidConfig("n_samples must be at least 2".into()));
    }
    let cfg = scenario_config(eps, big_l, chain, None, None)?;
    let points = match mode {
        SweepMode::ClosedForm => closed_trajectory(&cfg, n_samples)?,
        SweepMode::OracleOde => oracle_trajectory(&cfg, n_samples)?,
        _ => {
            return Err(Error::InvalidConfig(
                "trajectory mode must be closed_form or oracle_ode".into(),
            ))
        }
    };
    let mut out = open_output(res.out()?.as_deref())?;
    writeln!(out, "t,re_l,im_l,re_m,im_m,pi_m4_minus_re_l")?;
    for row in trajectory_rows(&points) {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    let summary = TrajectorySummary {
        n_samples,
        max_unit_norm_residual: points
            .iter()
            .map(|p| (PI * p.m.norm().powi(4) - p.l.re).abs())
            .fold(0.0, f64::max),
        abs_l_at_origin: points.iter().find(|p| p.t == 0.0).map(|p| p.l.norm()),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: serde_json::json!({ "epsilon": eps, "L": big_l, "mode": mode, "chain": chain }),
        records: Vec::<()>::new(),
        fits: summary,
        error: None,
    };
    write_json(res.json_path()?.as_deref(), &report)?;
    Ok(true)
}

#[derive(Serialize)]
struct ExcludedFits {
    covering_measure: f64,
    /// Covering length inside the scanned range divided by the range length.
    covering_fraction: f64,
    scan_points: usize,
    scan_excluded: usize,
    /// Directly excluded scan points outside every covering interval.
    scan_uncovered: usize,
}

pub(super) fn excluded(args: &ExcludedArgs) -> Result<bool> {
    let res = Resolved::new(&args.common)?;
    let big_l = res.get(args.common.big_l, "L")?.unwrap_or(1.0);
    if !(big_l > 0.0) {
        return Err(Error::InvalidConfig("excluded needs L > 0".into()));
    }
    let table = res
        .get::<String>(args.common.mode.clone(), "mode")?
        .unwrap_or_else(|| "intervals".into());
    if table != "intervals" && table != "scan" {
        return Err(Error::InvalidConfig(format!(
            "excluded mode must be intervals or scan, got {table}"
        )));
    }
    let grid = match res.epsilon_list()? {
        Some(list) => list,
        None => res
            .range(&args.range, (0.002, 0.05, 4000, Spacing::Linear), true)?
            .unwrap_or_default(),
    };
    check_epsilons(&grid)?;
    let eps_min = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let eps_max = grid.iter().copied().fold(0.0, f64::max);
    let mut cfg = scenario_config(
        eps_min,
        big_l,
        ChainMode::Exact,
        res.get(args.delta, "delta")?,
        res.get(args.c_excl, "c_excl")?,
    )?;
    cfg.n_max = res
        .get(args.n_max, "n_max")?
        .unwrap_or_else(|| default_n_max(eps_min));

    let intervals = excluded_set(&cfg);
    let scan: Vec<(f64, f64, f64, bool, bool)> = grid
        .iter()
        .map(|&eps| {
            let threshold = -1.0 + cfg.c_excl * eps.powf(1.0 - cfg.delta);
            (
                eps,
                exclusion_cosine(&cfg, eps),
                threshold,
                is_excluded(&cfg, eps),
                in_covering(&cfg, eps),
            )
        })
        .collect();

    let mut out = open_output(res.out()?.as_deref())?;
    if table == "intervals" {
        writeln!(out, "n,center,radius")?;
        for iv in &intervals {
            writeln!(
                out,
                "{},{},{}",
                iv.n,
                fmt_real(iv.center),
                fmt_real(iv.radius)
            )?;
        }
    } else {
        writeln!(
            out,
            "epsilon,cos_2rho_plus_beta,threshold,excluded,in_covering"
        )?;
        for (eps, cos, thr, ex, cov) in &scan {
            writeln!(
                out,
                "{},{},{},{ex},{cov}",
                fmt_real(*eps),
                fmt_real(*cos),
                fmt_real(*thr)
            )?;
        }
    }
    out.flush()?;

    let inside = covering_measure(&cfg, eps_max) - covering_measure(&cfg, eps_min);
    let fits = ExcludedFits {
        covering_measure: covering_measure(&cfg, eps_max),
        covering_fraction: if eps_max > eps_min {
            inside / (eps_max - eps_min)
        } else {
            0.0
        },
        scan_points: scan.len(),
        scan_excluded: scan.iter().filter(|s| s.3).count(),
        scan_uncovered: scan.iter().filter(|s| s.3 && !s.4).count(),
    };
    let ok = fits.scan_uncovered == 0;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: serde_json::json!({
            "L": big_l, "delta": cfg.delta, "c_excl": cfg.c_excl, "n_max": cfg.n_max,
            "eps_min": eps_min, "eps_max": eps_max, "mode": table,
        }),
        records: intervals,
        fits,
        error: None,
    };
    write_json(res.json_path()?.as_deref(), &report)?;
    Ok(ok)
}
