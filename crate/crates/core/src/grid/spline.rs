//! Cubic-spline second derivatives on a uniform grid.
//!
//! On `[x_r, x_{r+1}]` the spline is
//! `A y_r + B y_{r+1} + ((A³ - A) M_r + (B³ - B) M_{r+1}) h² / 6`
//! with `A = (x_{r+1} - x) / h`, `B = 1 - A`; only the `M_r` are stored.

use num_complex::Complex64;

use super::fourier;

type C = Complex64;

/// Second derivatives `M_r` of the interpolating cubic spline: periodic when
/// `periodic`, natural (`M = 0` at both ends) otherwise.
pub fn second_derivatives(y: &[C], h: f64, periodic: bool) -> Vec<C> {
    let n = y.len();
    let rhs: Vec<C> = (0..n)
        .map(|r| {
            if periodic {
                (y[(r + 1) % n] - 2.0 * y[r] + y[(r + n - 1) % n]) * (6.0 / (h * h))
            } else if r == 0 || r == n - 1 {
                C::new(0.0, 0.0)
            } else {
                (y[r + 1] - 2.0 * y[r] + y[r - 1]) * (6.0 / (h * h))
            }
        })
        .collect();
    if periodic {
        // circulant system M_{r-1} + 4 M_r + M_{r+1} = rhs_r
        let mut coeffs = fourier::forward(&rhs);
        for (m, c) in coeffs.iter_mut().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            *c /= 4.0 + 2.0 * theta.cos();
        }
        fourier::inverse(&coeffs)
    } else {
        thomas_natural(&rhs)
    }
}

// Tridiagonal (1, 4, 1) for interior rows with M_0 = M_{n-1} = 0.
fn thomas_natural(rhs: &[C]) -> Vec<C> {
    let n = rhs.len();
    let mut m = vec![C::new(0.0, 0.0); n];
    if n < 3 {
        return m;
    }
    let inner = n - 2;
    let mut cp = vec![0.0; inner];
    let mut dp = vec![C::new(0.0, 0.0); inner];
    for i in 0..inner {
        let denom = 4.0 - if i > 0 { cp[i - 1] } else { 0.0 };
        cp[i] = 1.0 / denom;
        let prev = if i > 0 { dp[i - 1] } else { C::new(0.0, 0.0) };
        dp[i] = (rhs[i + 1] - prev) / denom;
    }
    for i in (0..inner).rev() {
        let next = if i + 1 < inner { m[i + 2] } else { C::new(0.0, 0.0) };
        m[i + 1] = dp[i] - cp[i] * next;
    }
    m
}

/// Evaluate the spline on interval `r` at local coordinate `b = (x - x_r)/h`.
#[cfg(test)]
pub fn eval(y: &[C], m: &[C], h: f64, r: usize, b: f64) -> C {
    let n = y.len();
    let r1 = (r + 1) % n;
    let a = 1.0 - b;
    a * y[r] + b * y[r1] + ((a * a * a - a) * m[r] + (b * b * b - b) * m[r1]) * (h * h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_spline_reproduces_lines_exactly() {
        let h = 0.3;
        let y: Vec<C> = (0..10).map(|j| C::new(1.0 + 2.0 * j as f64 * h, -(j as f64))).collect();
        let m = second_derivatives(&y, h, false);
        assert!(m.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn periodic_spline_interpolates_smooth_data_to_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let y: Vec<C> = (0..n).map(|j| C::new((j as f64 * h).sin(), 0.0)).collect();
            let m = second_derivatives(&y, h, true);
            (0..n)
                .map(|r| {
                    let x = (r as f64 + 0.5) * h;
                    (eval(&y, &m, h, r, 0.5).re - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let order = (err(32) / err(64)).log2();
        assert!((order - 4.0).abs() < 0.3, "order {order}");
        assert!(err(64) < 1e-6);
    }

    #[test]
    fn spline_is_continuous_in_first_derivative() {
        let h = 0.1;
        let y: Vec<C> = (0..20).map(|j| C::new(((j as f64) * h).powi(3).cos(), 0.0)).collect();
        let m = second_derivatives(&y, h, false);
        let eps = 1e-6;
        for r in 1..18 {
            let left = (eval(&y, &m, h, r - 1, 1.0) - eval(&y, &m, h, r - 1, 1.0 - eps)) / (eps * h);
            let right = (eval(&y, &m, h, r, eps) - eval(&y, &m, h, r, 0.0)) / (eps * h);
            assert!((left - right).norm() < 1e-4, "knot {r}");
        }
    }
}
