use super::bessel_j;
use crate::error::{Error, Result};

const SCAN_LIMIT: f64 = 1000.0;
const TOLERANCE: f64 = 1e-10;

/// First `count` positive zeros of J_ν, |ν| ≤ 1, count ≤ 100.
///
/// Sign-change scan (step 0.05 below x = 2, unit step beyond) followed by
/// bisection down to 1e−10.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    if !(nu.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "bessel_j_zeros supports |ν| ≤ 1, got {nu}"
        )));
    }
    if count == 0 || count > 100 {
        return Err(Error::Domain(format!(
            "bessel_j_zeros: count must be in 1..=100, got {count}"
        )));
    }
    let mut zeros = Vec::with_capacity(count);
    let mut a = 1e-3;
    let mut fa = bessel_j(nu, a)?;
    while zeros.len() < count {
        let step = if a < 2.0 { 0.05 } else { 1.0 };
        let b = a + step;
        if b > SCAN_LIMIT {
            return Err(Error::Convergence(format!(
                "found only {} zeros of J_{nu} below x = {SCAN_LIMIT}",
                zeros.len()
            )));
        }
        let fb = bessel_j(nu, b)?;
        if fb == 0.0 {
            zeros.push(b);
        } else if fa.signum() != fb.signum() && fa != 0.0 {
            zeros.push(bisect(nu, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn bisect(nu: f64, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    while b - a > TOLERANCE {
        let mid = 0.5 * (a + b);
        let fm = bessel_j(nu, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let z = bessel_j_zeros(0.5, 3).unwrap();
        for (k, x) in z.iter().enumerate() {
            assert!((x - (k + 1) as f64 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn quarter_orders_interlace() {
        let a = bessel_j_zeros(0.25, 5).unwrap();
        let b = bessel_j_zeros(-0.25, 5).unwrap();
        for k in 0..5 {
            assert!(b[k] < a[k]);
            if k + 1 < 5 {
                assert!(a[k] < b[k + 1]);
            }
        }
    }

    #[test]
    fn first_zero_of_three_quarters_in_range() {
        let z = bessel_j_zeros(0.75, 1).unwrap();
        assert!(z[0] > 2.0 && z[0] < 4.0);
        assert!(bessel_j(0.75, z[0]).unwrap().abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_requests() {
        assert!(bessel_j_zeros(1.5, 3).is_err());
        assert!(bessel_j_zeros(0.25, 0).is_err());
        assert!(bessel_j_zeros(0.25, 101).is_err());
    }
}
