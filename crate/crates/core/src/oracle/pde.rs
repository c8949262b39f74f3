//! Split-step Fourier solver for `i ∂ₜ v = −½ ∂ₓ² v + ω²(t) x²/2 · v`.
//!
//! Strang splitting with the potential taken at the step midpoint, on a
//! periodic grid. The solver only sees ω², never the closed forms.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{omega_squared, switch_times};
use crate::error::{Error, Result};

/// Kinetic phase allowed per step on the occupied part of the spectrum.
pub const MAX_KINETIC_PHASE: f64 = 0.1;
/// Largest admissible |v| near the edge of the box.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
/// Allowed relative drift of the discrete L² norm over a run.
pub const NORM_TOLERANCE: f64 = 1e-8;

const EDGE_FRACTION: f64 = 0.02;
const OCCUPIED_THRESHOLD: f64 = 1e-10;
const CHECK_EVERY: usize = 16;

/// Samples of a wave function on `x_min + i·dx`, `i < n_points`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl GridState {
    /// Samples `f` on `[−half_width, half_width)`.
    pub fn from_fn<F: Fn(f64) -> Complex64>(
        half_width: f64,
        n_points: usize,
        time: f64,
        f: F,
    ) -> Self {
        let mut grid = Self {
            x_min: -half_width,
            x_max: half_width,
            n_points,
            values: Vec::new(),
            time,
        };
        grid.values = (0..n_points).map(|i| f(grid.x(i))).collect();
        grid
    }

    pub fn ground(half_width: f64, n_points: usize, time: f64) -> Self {
        let m = PI.powf(-0.25);
        Self::from_fn(half_width, n_points, time, |x| {
            (m * (-0.5 * x * x).exp()).into()
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx()
    }

    /// Largest |v| within `fraction` of the box length from either edge.
    pub fn boundary_max(&self, fraction: f64) -> f64 {
        let edge = ((self.n_points as f64 * fraction).ceil() as usize).max(1);
        self.values[..edge]
            .iter()
            .chain(&self.values[self.n_points - edge..])
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Rows `x,re,im` with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,re_v,im_v")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.x(i), v.re, v.im)?;
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 16 {
            return Err(Error::InvalidConfig(format!(
                "grid size must be a power of two ≥ 16, got {}",
                self.n_points
            )));
        }
        if self.values.len() != self.n_points || !(self.x_max > self.x_min) {
            return Err(Error::InvalidConfig("inconsistent grid".into()));
        }
        Ok(())
    }
}

/// Diagnostics of one evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeReport {
    pub steps: usize,
    pub norm_drift: f64,
    /// Largest `dt k²/2` seen on the occupied spectrum.
    pub max_kinetic_phase: f64,
    /// Smallest step actually used.
    pub min_dt: f64,
}

struct Stepper {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    probe: Vec<Complex64>,
    x_sq: Vec<f64>,
    k_sq: Vec<f64>,
    k_nyquist_sq: f64,
    kinetic: Vec<Complex64>,
    kinetic_dt: f64,
}

impl Stepper {
    fn new(grid: &GridState) -> Self {
        let n = grid.n_points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let dk = 2.0 * PI / (grid.x_max - grid.x_min);
        let k_sq = (0..n)
            .map(|j| {
                let idx = if j < n / 2 {
                    j as f64
                } else {
                    j as f64 - n as f64
                };
                (idx * dk).powi(2)
            })
            .collect();
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            probe: vec![Complex64::new(0.0, 0.0); n],
            x_sq: (0..n).map(|i| grid.x(i).powi(2)).collect(),
            k_sq,
            k_nyquist_sq: (dk * (n / 2) as f64).powi(2),
            kinetic: Vec::new(),
            kinetic_dt: f64::NAN,
        }
    }

    /// Largest k² carrying more than [`OCCUPIED_THRESHOLD`] of the peak
    /// spectral amplitude.
    fn occupied_k_sq(&mut self, values: &[Complex64]) -> Result<f64> {
        self.probe.copy_from_slice(values);
        self.forward
            .process_with_scratch(&mut self.probe, &mut self.scratch);
        let peak = self.probe.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let occupied = self
            .probe
            .iter()
            .zip(&self.k_sq)
            .filter(|(v, _)| v.norm() > OCCUPIED_THRESHOLD * peak)
            .map(|(_, &k2)| k2)
            .fold(0.0, f64::max);
        if occupied >= 0.81 * self.k_nyquist_sq {
            return Err(Error::Resolution(
                "spectrum reaches the Nyquist band".into(),
            ));
        }
        Ok(occupied)
    }

    fn step(&mut self, values: &mut [Complex64], omega_sq: f64, dt: f64) {
        if dt != self.kinetic_dt {
            let scale = 1.0 / values.len() as f64;
            self.kinetic = self
                .k_sq
                .iter()
                .map(|&k2| Complex64::from_polar(scale, -0.5 * k2 * dt))
                .collect();
            self.kinetic_dt = dt;
        }
        let half_potential = |values: &mut [Complex64], x_sq: &[f64]| {
            for (v, &x2) in values.iter_mut().zip(x_sq) {
                *v *= Complex64::from_polar(1.0, -0.25 * omega_sq * x2 * dt);
            }
        };
        half_potential(values, &self.x_sq);
        self.forward.process_with_scratch(values, &mut self.scratch);
        for (v, k) in values.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.inverse.process_with_scratch(values, &mut self.scratch);
        half_potential(values, &self.x_sq);
    }
}

/// Evolves `grid` to `t1` with steps no longer than `dt`, under an arbitrary
/// squared frequency. Kinks of ω² should be passed in `breaks` so no step
/// straddles them. Fails with a stability error once `dt k²/2` exceeds
/// [`MAX_KINETIC_PHASE`] on the occupied spectrum.
pub fn evolve<F: Fn(f64) -> f64>(
    grid: &GridState,
    omega_sq: F,
    breaks: &[f64],
    t1: f64,
    dt: f64,
) -> Result<(GridState, PdeReport)> {
    evolve_impl(grid, omega_sq, breaks, t1, dt, false)
}

/// As [`evolve`], but halves the step for the rest of the run instead of
/// failing when the kinetic-phase bound is hit.
pub fn evolve_adaptive<F: Fn(f64) -> f64>(
    grid: &GridState,
    omega_sq: F,
    breaks: &[f64],
    t1: f64,
    dt: f64,
) -> Result<(GridState, PdeReport)> {
    evolve_impl(grid, omega_sq, breaks, t1, dt, true)
}

fn evolve_impl<F: Fn(f64) -> f64>(
    grid: &GridState,
    omega_sq: F,
    breaks: &[f64],
    t1: f64,
    dt: f64,
    adaptive: bool,
) -> Result<(GridState, PdeReport)> {
    grid.validate()?;
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let t0 = grid.time;
    let mut nodes = vec![t0];
    nodes.extend(
        breaks
            .iter()
            .copied()
            .filter(|&b| (b - t0) * (t1 - b) > 0.0),
    );
    nodes.push(t1);
    if t1 < t0 {
        nodes[1..].sort_by(|a, b| b.total_cmp(a));
    } else {
        nodes[1..].sort_by(f64::total_cmp);
    }

    let mut state = grid.clone();
    let mut stepper = Stepper::new(grid);
    let norm0 = grid.norm_squared();
    let mut report = PdeReport {
        steps: 0,
        norm_drift: 0.0,
        max_kinetic_phase: 0.0,
        min_dt: dt,
    };
    let mut dt = dt;
    for pair in nodes.windows(2) {
        let (mut a, b) = (pair[0], pair[1]);
        'segment: loop {
            let n = ((b - a).abs() / dt).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            for k in 0..n {
                if report.steps % CHECK_EVERY == 0 {
                    let phase = 0.5 * stepper.occupied_k_sq(&state.values)? * h.abs();
                    if phase > MAX_KINETIC_PHASE {
                        if !adaptive {
                            return Err(Error::Stability(format!(
                                "dt k²/2 = {phase:.3} exceeds {MAX_KINETIC_PHASE}"
                            )));
                        }
                        dt = 0.5 * h.abs();
                        report.min_dt = report.min_dt.min(dt);
                        a += k as f64 * h;
                        continue 'segment;
                    }
                    report.max_kinetic_phase = report.max_kinetic_phase.max(phase);
                    state.time = a + k as f64 * h;
                    check_boundary(&state)?;
                }
                stepper.step(&mut state.values, omega_sq(a + (k as f64 + 0.5) * h), h);
                report.steps += 1;
            }
            break;
        }
    }
    state.time = t1;
    check_boundary(&state)?;
    report.norm_drift = (state.norm_squared() - norm0).abs() / norm0;
    if report.norm_drift > NORM_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "norm drift {:e}",
            report.norm_drift
        )));
    }
    Ok((state, report))
}

fn check_boundary(state: &GridState) -> Result<()> {
    let edge = state.boundary_max(EDGE_FRACTION);
    if edge > BOUNDARY_TOLERANCE {
        Err(Error::Resolution(format!(
            "|v| = {edge:e} at the box edge (t = {:.3})",
            state.time
        )))
    } else {
        Ok(())
    }
}

/// Evolution under the switched potential `V(εt, x)` from `t0` to `t1`.
pub fn evolve_pde(
    epsilon: f64,
    big_l: f64,
    grid: &GridState,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<GridState> {
    let mut start = grid.clone();
    start.time = t0;
    let (state, _) = evolve(
        &start,
        |t| omega_squared(epsilon, big_l, t),
        &switch_times(epsilon, big_l),
        t1,
        dt,
    )?;
    Ok(state)
}

/// Resolution settings for [`run_from_ground`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeSettings {
    pub half_width: f64,
    pub n_points: usize,
    pub dt: f64,
    /// How many times the box may be doubled before giving up.
    pub max_refinements: u32,
}

impl PdeSettings {
    /// `X = 12 max(1, (0.45 √ε)^{−1/2})` with 4096 points, and dt from the
    /// kinetic-phase bound on the initial ground state.
    pub fn for_epsilon(epsilon: f64) -> Self {
        let re_l_min = 0.45 * epsilon.sqrt();
        let occupied_k_sq = 2.0 * (1.0 / OCCUPIED_THRESHOLD).ln();
        Self {
            half_width: 12.0 * re_l_min.powf(-0.5).max(1.0),
            n_points: 4096,
            dt: MAX_KINETIC_PHASE / occupied_k_sq,
            max_refinements: 6,
        }
    }

    /// Twice the box and grid size and half the step.
    pub fn refined(&self) -> Self {
        Self {
            half_width: 2.0 * self.half_width,
            n_points: 2 * self.n_points,
            dt: 0.5 * self.dt,
            ..*self
        }
    }
}

/// Completed run with the settings that succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeRun {
    pub state: GridState,
    pub report: PdeReport,
    pub settings: PdeSettings,
}

/// Full evolution from the ground state at `−(L+1)/ε` to `(L+1)/ε`. A
/// boundary failure doubles the box and the grid; dt adapts within the run.
pub fn run_from_ground(epsilon: f64, big_l: f64, settings: PdeSettings) -> Result<PdeRun> {
    let t0 = -(big_l + 1.0) / epsilon;
    let mut current = settings;
    for _ in 0..=settings.max_refinements {
        let grid = GridState::ground(current.half_width, current.n_points, t0);
        let outcome = evolve_adaptive(
            &grid,
            |t| omega_squared(epsilon, big_l, t),
            &switch_times(epsilon, big_l),
            -t0,
            current.dt,
        );
        match outcome {
            Ok((state, report)) => {
                return Ok(PdeRun {
                    state,
                    report,
                    settings: current,
                })
            }
            Err(Error::Resolution(_)) => {
                current = PdeSettings {
                    half_width: 2.0 * current.half_width,
                    n_points: 2 * current.n_points,
                    ..current
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Resolution(format!(
        "no admissible grid after {} refinements",
        settings.max_refinements
    )))
}
