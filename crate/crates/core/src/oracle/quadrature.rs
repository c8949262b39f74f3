//! Brute-force overlap integrals.

use num_complex::Complex64;

use super::pde::GridState;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Midpoint rule for `∫ f g` on `[a, b]` with `n` cells.
pub fn integrate_bilinear<F, G>(f: F, g: G, a: f64, b: f64, n: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let x = a + (i as f64 + 0.5) * h;
            f(x) * g(x)
        })
        .sum::<Complex64>()
        * h
}

/// Midpoint rule for `∫ conj(f) g`.
pub fn integrate_sesquilinear<F, G>(f: F, g: G, a: f64, b: f64, n: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    integrate_bilinear(|x| f(x).conj(), g, a, b, n)
}

/// Left operand of [`quadrature_overlap`].
#[derive(Clone, Copy, Debug)]
pub enum Sampled<'a> {
    Grid(&'a GridState),
    Gaussian(&'a GaussianState),
}

/// Bilinear `∫ a · b` by direct summation: on the grid's own nodes for a grid
/// state (the periodic trapezoid rule), else by the midpoint rule on a window
/// wide enough that the integrand has decayed below 1e−17.
pub fn quadrature_overlap(a: Sampled<'_>, b: &GaussianState) -> Result<Complex64> {
    match a {
        Sampled::Grid(grid) => {
            let edge = grid.boundary_max(0.02);
            if edge > 1e-10 {
                return Err(Error::Resolution(format!(
                    "state reaches the grid edge ({edge:e})"
                )));
            }
            let dx = grid.dx();
            Ok((0..grid.n_points)
                .map(|i| grid.values[i] * b.value_at(grid.x(i)))
                .sum::<Complex64>()
                * dx)
        }
        Sampled::Gaussian(g) => {
            let decay = (g.l + b.l).re;
            if decay <= 0.0 {
                return Err(Error::Divergence(decay));
            }
            let half_width = (80.0 / decay).sqrt();
            Ok(integrate_bilinear(
                |x| g.value_at(x),
                |x| b.value_at(x),
                -half_width,
                half_width,
                200_000,
            ))
        }
    }
}
