//! Command-line front end.
//!
//! Every subcommand takes `--epsilon`, `--L`, `--mode`, `--out` and
//! `--config`; values from the flags override values from the config file.
//! Exit codes: 0 success, 1 computational failure, 2 invalid configuration.

mod commands;
pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use config::{parse_list, ConfigFile};

/// Version tag carried by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "adiabatic-breakdown",
    version,
    about = "Closed-form quench runs, sweeps and oracle checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival probability of the ground state over an ε sweep.
    Survival(SurvivalArgs),
    /// Width and amplitude sampled along one run.
    Trajectory(TrajectoryArgs),
    /// Self-checks: special functions, invariants and oracle comparisons.
    Verify(CommonArgs),
    /// Excluded-interval table or a scan of the direct exclusion condition.
    Excluded(ExcludedArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Comma-separated ε values.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Macroscopic half-length of the free interval.
    #[arg(long = "L")]
    pub big_l: Option<f64>,
    #[arg(long)]
    pub mode: Option<String>,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path; defaults to the CSV path with a .json extension.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// linear, log or dyadic.
    #[arg(long)]
    pub spacing: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    /// exact or literal chaining of the stages for L > 0.
    #[arg(long)]
    pub chain: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c_excl: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub chain: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExcludedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c_excl: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

/// Pipelines run by `survival`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    ClosedForm,
    OracleOde,
    OraclePde,
    All,
}

impl SweepMode {
    pub fn runs_ode(self) -> bool {
        matches!(self, Self::OracleOde | Self::All)
    }

    pub fn runs_pde(self) -> bool {
        matches!(self, Self::OraclePde | Self::All)
    }
}

impl FromStr for SweepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Self::ClosedForm),
            "oracle_ode" => Ok(Self::OracleOde),
            "oracle_pde" => Ok(Self::OraclePde),
            "all" => Ok(Self::All),
            _ => Err(Error::InvalidConfig(format!(
                "mode must be closed_form, oracle_ode, oracle_pde or all, got {s}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
    /// `eps_max · 2^{−k}` for k = 0..count.
    Dyadic,
}

impl FromStr for Spacing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            "dyadic" => Ok(Self::Dyadic),
            _ => Err(Error::InvalidConfig(format!(
                "spacing must be linear, log or dyadic, got {s}"
            ))),
        }
    }
}

/// ε values of a sweep, either listed or generated from a range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub eps_values: Vec<f64>,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub mode: SweepMode,
}

pub fn generate_range(
    eps_min: f64,
    eps_max: f64,
    count: usize,
    spacing: Spacing,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    if spacing != Spacing::Dyadic && !(eps_min <= eps_max) {
        return Err(Error::InvalidConfig(
            "eps_min must not exceed eps_max".into(),
        ));
    }
    let frac = |k: usize| {
        if count == 1 {
            0.0
        } else {
            k as f64 / (count - 1) as f64
        }
    };
    Ok((0..count)
        .map(|k| match spacing {
            Spacing::Linear => eps_min + (eps_max - eps_min) * frac(k),
            Spacing::Log => (eps_min.ln() + (eps_max / eps_min).ln() * frac(k)).exp(),
            Spacing::Dyadic => eps_max / 2f64.powi(k as i32),
        })
        .collect())
}

pub fn check_epsilons(values: &[f64]) -> Result<()> {
    match values.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        Some(e) => Err(Error::InvalidConfig(format!(
            "ε must lie in (0, 1), got {e}"
        ))),
        None => Ok(()),
    }
}

/// Settings shared by every subcommand after merging flags and file.
pub(crate) struct Resolved {
    pub file: ConfigFile,
    pub common: CommonArgs,
}

impl Resolved {
    fn new(common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Ok(Self {
            file,
            common: common.clone(),
        })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        self.file.resolve(flag, key)
    }

    fn big_l(&self) -> Result<f64> {
        let l = self.get(self.common.big_l, "L")?.unwrap_or(0.0);
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "L must be nonnegative, got {l}"
            )));
        }
        Ok(l)
    }

    fn mode<T: FromStr<Err = Error>>(&self, default: T) -> Result<T> {
        match self.get::<String>(self.common.mode.clone(), "mode")? {
            Some(s) => s.parse(),
            None => Ok(default),
        }
    }

    fn epsilon_list(&self) -> Result<Option<Vec<f64>>> {
        self.get::<String>(self.common.epsilon.clone(), "epsilon")?
            .map(|s| parse_list(&s))
            .transpose()
    }

    /// The generated range, or `None` when no range key is set and
    /// `always` is false.
    fn range(
        &self,
        range: &RangeArgs,
        default: (f64, f64, usize, Spacing),
        always: bool,
    ) -> Result<Option<Vec<f64>>> {
        let eps_min = self.get(range.eps_min, "eps_min")?;
        let eps_max = self.get(range.eps_max, "eps_max")?;
        let count = self.get(range.count, "count")?;
        let spacing = match self.get::<String>(range.spacing.clone(), "spacing")? {
            Some(s) => Some(s.parse::<Spacing>()?),
            None => None,
        };
        let given = eps_min.is_some() || eps_max.is_some() || count.is_some() || spacing.is_some();
        if !given && !always {
            return Ok(None);
        }
        generate_range(
            eps_min.unwrap_or(default.0),
            eps_max.unwrap_or(default.1),
            count.unwrap_or(default.2),
            spacing.unwrap_or(default.3),
        )
        .map(Some)
    }

    fn out(&self) -> Result<Option<PathBuf>> {
        self.get(self.common.out.clone(), "out")
    }

    fn json_path(&self) -> Result<Option<PathBuf>> {
        Ok(match self.get(self.common.json.clone(), "json")? {
            Some(p) => Some(p),
            None => self.out()?.map(|p| p.with_extension("json")),
        })
    }
}

pub(crate) fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Fixed 17-significant-digit formatting for CSV cells.
pub(crate) fn fmt_real(x: f64) -> String {
    // fold −0 into 0
    format!("{:.16e}", x + 0.0)
}

#[derive(Serialize)]
pub(crate) struct Report<C: Serialize, R: Serialize, F: Serialize> {
    pub schema_version: u32,
    pub config: C,
    pub records: Vec<R>,
    pub fits: F,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub(crate) fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    if let Some(p) = path {
        let mut w = BufWriter::new(File::create(p)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

/// Runs the parsed command; `Ok(false)` means a check or record failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Survival(args) => commands::survival(args),
        Command::Trajectory(args) => commands::trajectory(args),
        Command::Verify(args) => verify::command(args),
        Command::Excluded(args) => commands::excluded(args),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let lin = generate_range(0.1, 0.3, 3, Spacing::Linear).unwrap();
        assert!((lin[1] - 0.2).abs() < 1e-15);
        let log = generate_range(0.001, 0.1, 3, Spacing::Log).unwrap();
        assert!((log[1] - 0.01).abs() < 1e-15);
        assert_eq!(
            generate_range(0.0, 0.1, 3, Spacing::Dyadic).unwrap(),
            vec![0.1, 0.05, 0.025]
        );
        assert!(generate_range(0.1, 0.2, 0, Spacing::Log).is_err());
        assert!(generate_range(0.3, 0.2, 2, Spacing::Linear).is_err());
    }

    #[test]
    fn mode_names() {
        assert_eq!(
            "oracle_pde".parse::<SweepMode>().unwrap(),
            SweepMode::OraclePde
        );
        assert!("pde".parse::<SweepMode>().is_err());
        assert!(SweepMode::All.runs_ode() && SweepMode::All.runs_pde());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run(["adiabatic-breakdown", "survival", "--epsilon", "1.5"]),
            2
        );
        assert_eq!(
            run([
                "adiabatic-breakdown",
                "survival",
                "--epsilon",
                "0.1",
                "--mode",
                "bogus"
            ]),
            2
        );
        assert_eq!(run(["adiabatic-breakdown", "nonsense"]), 2);
    }
}
