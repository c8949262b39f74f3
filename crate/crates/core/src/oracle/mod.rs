//! Independent numerical checks of the closed forms.
//!
//! The ODE integrator never touches [`crate::specfun`] or [`crate::riccati`],
//! and the PDE solver sees only the potential. Both take the potential from
//! [`omega_squared`].

pub mod ode;
pub mod pde;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::gaussian::{survival_probability, GaussianState};
use ode::{amplitude_by_quadrature, integrate_scenario, OdeOptions};
use pde::{run_from_ground, PdeSettings};
use quadrature::{quadrature_overlap, Sampled};

/// Squared frequency of the well at microscopic time `t`.
///
/// In macroscopic time τ = εt the frequency is `τ + L` before `−L`, zero on
/// `[−L, L]` and `τ − L` afterwards; with `L = 0` this is `ε² t²`.
pub fn omega_squared(epsilon: f64, big_l: f64, t: f64) -> f64 {
    let tau = epsilon * t;
    if tau < -big_l {
        (tau + big_l).powi(2)
    } else if tau > big_l {
        (tau - big_l).powi(2)
    } else {
        0.0
    }
}

/// Microscopic times at which the potential switches off and on.
pub fn switch_times(epsilon: f64, big_l: f64) -> [f64; 2] {
    [-big_l / epsilon, big_l / epsilon]
}

/// Final Gaussian from the ODE integrator, with the amplitude by quadrature.
pub fn ode_final_state(epsilon: f64, big_l: f64, opts: OdeOptions) -> Result<GaussianState> {
    let t_end = (big_l + 1.0) / epsilon;
    let traj = integrate_scenario(
        epsilon,
        big_l,
        -t_end,
        Complex64::new(1.0, 0.0),
        &[t_end],
        opts,
    )?;
    let l = *traj.l_values().last().expect("nonempty trajectory");
    let m = *amplitude_by_quadrature(&traj, PI.powf(-0.25).into())
        .last()
        .expect("nonempty trajectory");
    Ok(GaussianState::new(m, l))
}

pub fn ode_survival(epsilon: f64, big_l: f64) -> Result<f64> {
    survival_probability(&ode_final_state(epsilon, big_l, OdeOptions::default())?)
}

/// Survival probability from the grid solver, computed by summation over the
/// grid against the ground state.
pub fn pde_survival(epsilon: f64, big_l: f64, settings: PdeSettings) -> Result<f64> {
    let run = run_from_ground(epsilon, big_l, settings)?;
    let overlap = quadrature_overlap(Sampled::Grid(&run.state), &GaussianState::ground())?;
    Ok(overlap.norm_sqr() / run.state.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::run_l0;

    #[test]
    fn ode_survival_matches_closed_form() {
        let closed = run_l0(0.1).unwrap().survival;
        assert!((ode_survival(0.1, 0.0).unwrap() - closed).abs() < 1e-8);
    }

    #[test]
    fn potential_shape() {
        assert_eq!(omega_squared(0.1, 0.0, -10.0), 1.0);
        assert!((omega_squared(0.1, 0.0, 3.0) - 0.09).abs() < 1e-15);
        assert_eq!(omega_squared(0.1, 1.0, 5.0), 0.0);
        assert!((omega_squared(0.1, 1.0, -20.0) - 1.0).abs() < 1e-15);
        assert!((omega_squared(0.1, 1.0, 20.0) - 1.0).abs() < 1e-15);
    }
}
