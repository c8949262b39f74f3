//! Adaptive Dormand–Prince 5(4) integration of `w'' = −ω²(t) w`.
//!
//! With `w(t0) = 1`, `w'(t0) = i l0` the width is recovered as
//! `l = −i w'/w`, and the amplitude either from the square root of
//! `w(t0)/w(t)` or by quadrature of `l/(2i)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::{omega_squared, switch_times};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_STEPS: usize = 50_000_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Caps the step so that the phase of w moves little between nodes.
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: 0.1,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

/// Accepted nodes of one integration.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub w_values: Vec<Complex64>,
    pub wprime_values: Vec<Complex64>,
    pub omega_sq_values: Vec<f64>,
    /// One-sided slopes `(backward, forward)` of ω² at each node.
    pub omega_sq_slopes: Vec<(f64, f64)>,
    /// Sum of the local error estimates over all accepted steps.
    pub est_error: f64,
}

impl OdeTrajectory {
    pub fn l_values(&self) -> Vec<Complex64> {
        self.w_values
            .iter()
            .zip(&self.wprime_values)
            .map(|(w, wp)| -I * wp / w)
            .collect()
    }

    /// Node index of a time passed as a stop.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| s == t)
    }

    /// `Im(w̄ w')` is constant for real ω²; returns its largest relative drift.
    pub fn wronskian_drift(&self) -> f64 {
        let invariant = |k: usize| (self.w_values[k].conj() * self.wprime_values[k]).im;
        let start = invariant(0);
        (0..self.times.len())
            .map(|k| (invariant(k) - start).abs())
            .fold(0.0, f64::max)
            / start.abs().max(f64::MIN_POSITIVE)
    }

    fn last(&self) -> (f64, [Complex64; 2]) {
        let k = self.times.len() - 1;
        (self.times[k], [self.w_values[k], self.wprime_values[k]])
    }

    fn push<F: Fn(f64) -> f64>(&mut self, t: f64, y: [Complex64; 2], omega_sq: &F) {
        let delta = 1e-6 * t.abs().max(1.0);
        let here = omega_sq(t);
        self.times.push(t);
        self.w_values.push(y[0]);
        self.wprime_values.push(y[1]);
        self.omega_sq_values.push(here);
        self.omega_sq_slopes.push((
            (here - omega_sq(t - delta)) / delta,
            (omega_sq(t + delta) - here) / delta,
        ));
    }
}

/// Integrates `(w, w')` from `t0` through every time in `stops`, which must be
/// monotone in one direction. Each stop is hit exactly and recorded as a node.
pub fn integrate_linear<F: Fn(f64) -> f64>(
    omega_sq: F,
    t0: f64,
    w0: Complex64,
    wprime0: Complex64,
    stops: &[f64],
    opts: OdeOptions,
) -> Result<OdeTrajectory> {
    if !(opts.rtol >= 1e-12 && opts.atol >= 1e-12) {
        return Err(Error::Domain("tolerance must be at least 1e-12".into()));
    }
    let direction = match stops.last() {
        Some(&end) if end > t0 => 1.0,
        Some(&end) if end < t0 => -1.0,
        _ => {
            return Err(Error::Domain(
                "integration needs a final time distinct from t0".into(),
            ))
        }
    };
    let mut previous = t0;
    for &s in stops {
        if (s - previous) * direction < 0.0 {
            return Err(Error::Domain("stops must be monotone".into()));
        }
        previous = s;
    }

    let rhs = |t: f64, y: &[Complex64; 2]| [y[1], -omega_sq(t) * y[0]];
    let mut traj = OdeTrajectory {
        times: Vec::new(),
        w_values: Vec::new(),
        wprime_values: Vec::new(),
        omega_sq_values: Vec::new(),
        omega_sq_slopes: Vec::new(),
        est_error: 0.0,
    };
    traj.push(t0, [w0, wprime0], &omega_sq);

    let mut h = (opts.h_max.min((stops.last().unwrap() - t0).abs()) * 0.01).max(1e-6);
    let mut err_prev = 1e-4_f64;
    let mut steps = 0usize;
    for &stop in stops {
        loop {
            let (t, y) = traj.last();
            let remaining = (stop - t) * direction;
            if remaining <= 0.0 {
                break;
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Convergence(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            h = h.min(opts.h_max);
            let h_trial = h;
            // stretch onto the stop rather than leave a sliver behind
            let last_step = 1.1 * h >= remaining;
            let step = if last_step { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last_step {
                return Err(Error::StepUnderflow { t, h: step });
            }
            let dt = direction * step;

            let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
            k[0] = rhs(t, &y);
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        ys[0] += dt * a * kj[0];
                        ys[1] += dt * a * kj[1];
                    }
                }
                k[s] = rhs(t + C[s] * dt, &ys);
                if s == 6 {
                    // the last row of A holds the fifth-order weights, so ys is the new point
                    let mut err = 0.0_f64;
                    let mut abs_err = 0.0_f64;
                    for c in 0..2 {
                        let e: Complex64 = (0..7).map(|j| E[j] * k[j][c]).sum::<Complex64>() * dt;
                        let scale = opts.atol + opts.rtol * y[c].norm().max(ys[c].norm());
                        err = err.max(e.norm() / scale);
                        abs_err = abs_err.max(e.norm());
                    }
                    if err <= 1.0 {
                        let t_new = if last_step { stop } else { t + dt };
                        traj.push(t_new, ys, &omega_sq);
                        traj.est_error += abs_err;
                        let err = err.max(1e-10);
                        let factor = 0.9 * err.powf(-0.14) * err_prev.powf(0.08);
                        let proposal = step * factor.clamp(0.2, 5.0);
                        // a step cut short by a stop says little about the next one
                        h = if last_step && step < h_trial {
                            proposal.max(h_trial)
                        } else {
                            proposal
                        };
                        err_prev = err;
                    } else {
                        h = step * (0.9 * err.powf(-0.2)).max(0.2);
                    }
                }
            }
        }
    }
    Ok(traj)
}

/// `l' + i l² = i ε² t²` through its linear companion, from `l(t0) = l0`.
pub fn integrate_riccati_linear(
    epsilon: f64,
    t0: f64,
    l0: Complex64,
    t1: f64,
    tol: f64,
) -> Result<OdeTrajectory> {
    integrate_scenario(epsilon, 0.0, t0, l0, &[t1], OdeOptions::with_tolerance(tol))
}

/// Same, for the switched potential with half-length `big_l`; the switch
/// times are inserted as extra nodes.
pub fn integrate_scenario(
    epsilon: f64,
    big_l: f64,
    t0: f64,
    l0: Complex64,
    stops: &[f64],
    opts: OdeOptions,
) -> Result<OdeTrajectory> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
    }
    let mut all: Vec<f64> = stops.to_vec();
    if big_l > 0.0 {
        let end = *stops.last().unwrap_or(&t0);
        for s in switch_times(epsilon, big_l) {
            if (s - t0) * (end - s) > 0.0 {
                all.push(s);
            }
        }
        if end >= t0 {
            all.sort_by(f64::total_cmp);
        } else {
            all.sort_by(|a, b| b.total_cmp(a));
        }
        all.dedup();
    }
    integrate_linear(
        |t| omega_squared(epsilon, big_l, t),
        t0,
        Complex64::new(1.0, 0.0),
        I * l0,
        &all,
        opts,
    )
}

/// `m = m0 (w(t0)/w(t))^{1/2}` with the argument of w unwrapped node by node.
pub fn amplitude_by_root(traj: &OdeTrajectory, m0: Complex64) -> Result<Vec<Complex64>> {
    let w0 = traj.w_values[0];
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(traj.times.len());
    out.push(m0);
    for k in 1..traj.times.len() {
        let delta = (traj.w_values[k] / traj.w_values[k - 1]).arg();
        if delta.abs() >= FRAC_PI_2 {
            return Err(Error::BranchStep { t: traj.times[k] });
        }
        phase += delta;
        let modulus = (w0.norm() / traj.w_values[k].norm()).sqrt();
        out.push(m0 * Complex64::from_polar(modulus, -0.5 * phase));
    }
    Ok(out)
}

/// `m = m0 exp(∫ l/(2i))`, integrated node to node with the endpoint-corrected
/// trapezoid rule
///
/// ```text
/// ∫ f ≈ h/2 (f_a + f_b) + h²/10 (f'_a − f'_b) + h³/120 (f''_a + f''_b),
/// ```
///
/// exact for quintics, so sixth order on non-uniform nodes. The derivatives
/// come from the Riccati equation: `f' = (ω² − l²)/2`,
/// `f'' = (ω²)'/2 − i l (ω² − l²)`, with the slope of ω² taken from inside
/// each interval.
pub fn amplitude_by_quadrature(traj: &OdeTrajectory, m0: Complex64) -> Vec<Complex64> {
    let l = traj.l_values();
    let f = |k: usize| -0.5 * I * l[k];
    let df = |k: usize| 0.5 * (traj.omega_sq_values[k] - l[k] * l[k]);
    let ddf =
        |k: usize, slope: f64| 0.5 * slope - I * l[k] * (traj.omega_sq_values[k] - l[k] * l[k]);
    let mut integral = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(l.len());
    out.push(m0);
    for k in 1..l.len() {
        let h = traj.times[k] - traj.times[k - 1];
        let (back_a, fwd_a) = traj.omega_sq_slopes[k - 1];
        let (back_b, fwd_b) = traj.omega_sq_slopes[k];
        let (slope_a, slope_b) = if h > 0.0 {
            (fwd_a, back_b)
        } else {
            (back_a, fwd_b)
        };
        integral += 0.5 * h * (f(k - 1) + f(k))
            + h * h / 10.0 * (df(k - 1) - df(k))
            + h.powi(3) / 120.0 * (ddf(k - 1, slope_a) + ddf(k, slope_b));
        out.push(m0 * integral.exp());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_motion() {
        let l0 = Complex64::new(1.0, 0.3);
        let traj = integrate_linear(
            |_| 0.0,
            -2.0,
            1.0.into(),
            I * l0,
            &[0.0, 3.0],
            OdeOptions::default(),
        )
        .unwrap();
        for (t, l) in traj.times.iter().zip(traj.l_values()) {
            let expected = l0 / (1.0 + I * l0 * (t + 2.0));
            assert!((l - expected).norm() < 1e-9, "t={t}");
        }
        assert!(traj.index_of(0.0).is_some());
        assert_eq!(*traj.times.last().unwrap(), 3.0);
    }

    #[test]
    fn stationary_ground_state() {
        let traj =
            integrate_linear(|_| 1.0, 0.0, 1.0.into(), I, &[10.0], OdeOptions::default()).unwrap();
        let m0 = Complex64::new(PI.powf(-0.25), 0.0);
        let root = amplitude_by_root(&traj, m0).unwrap();
        let quad = amplitude_by_quadrature(&traj, m0);
        for (k, &t) in traj.times.iter().enumerate() {
            let expected = m0 * Complex64::from_polar(1.0, -0.5 * t);
            assert!((traj.l_values()[k] - 1.0).norm() < 1e-9);
            assert!((root[k] - expected).norm() < 1e-9);
            assert!((quad[k] - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn backward_integration() {
        let l0 = Complex64::new(0.5, -0.2);
        let fwd = integrate_riccati_linear(0.1, -10.0, l0, 0.0, 1e-11).unwrap();
        let l_end = *fwd.l_values().last().unwrap();
        let back = integrate_riccati_linear(0.1, 0.0, l_end, -10.0, 1e-11).unwrap();
        assert!((back.l_values().last().unwrap() - l0).norm() < 1e-8);
    }

    #[test]
    fn wronskian_is_conserved() {
        let traj = integrate_riccati_linear(0.05, -20.0, 1.0.into(), 20.0, 1e-10).unwrap();
        assert!(traj.wronskian_drift() < 1e-7);
        assert!(traj.w_values.iter().all(|w| w.norm() > 0.0));
    }

    #[test]
    fn amplitude_routes_agree_and_match_width() {
        let traj = integrate_riccati_linear(0.1, -10.0, 1.0.into(), 10.0, 1e-11).unwrap();
        let m0 = Complex64::new(PI.powf(-0.25), 0.0);
        let root = amplitude_by_root(&traj, m0).unwrap();
        let quad = amplitude_by_quadrature(&traj, m0);
        for ((a, b), l) in root.iter().zip(&quad).zip(traj.l_values()) {
            assert!((a - b).norm() < 1e-7);
            assert!((PI * a.norm().powi(4) - l.re).abs() < 1e-7);
        }
    }

    #[test]
    fn switched_potential_inserts_switch_times() {
        let traj = integrate_scenario(0.1, 1.0, -20.0, 1.0.into(), &[20.0], OdeOptions::default())
            .unwrap();
        assert!(traj.index_of(-10.0).is_some());
        assert!(traj.index_of(10.0).is_some());
        let k = traj.index_of(-10.0).unwrap();
        let j = traj.index_of(10.0).unwrap();
        // free flight between the switches
        let l = traj.l_values();
        let expected = l[k] / (1.0 + I * l[k] * 20.0);
        assert!((l[j] - expected).norm() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate_riccati_linear(0.1, 0.0, 1.0.into(), 1.0, 1e-14).is_err());
        assert!(integrate_linear(
            |_| 0.0,
            0.0,
            1.0.into(),
            I,
            &[2.0, 1.0],
            OdeOptions::default()
        )
        .is_err());
    }

    #[test]
    fn dense_stops_with_short_max_step() {
        // stops that are not multiples of h_max used to leave tiny remainders
        let stops: Vec<f64> = (1..=120).map(|i| -15.0 + 0.25 * i as f64).collect();
        let opts = OdeOptions {
            h_max: 0.01,
            ..OdeOptions::default()
        };
        let traj = integrate_scenario(0.1, 0.5, -15.0, 1.0.into(), &stops, opts).unwrap();
        assert!(stops.iter().all(|&t| traj.index_of(t).is_some()));
        let min_step = traj
            .times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(min_step > 5e-5, "{min_step}");
    }
}
