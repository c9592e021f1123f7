//! Ordinary derivatives on the grid: spectral on periodic domains, fourth-order
//! finite differences (one-sided at the ends) otherwise.

use num_complex::Complex64;

use super::{fourier, GridFunction};

type C = Complex64;

pub fn first(f: &GridFunction) -> GridFunction {
    let d = f.domain();
    let values = if d.is_periodic() {
        let sym = fourier::symbol(d, |k| C::new(0.0, k));
        fourier::apply_symbol(f.values(), &sym)
    } else {
        fd_first(f.values(), d.h())
    };
    GridFunction::from_parts(*d, values)
}

pub fn second(f: &GridFunction) -> GridFunction {
    let d = f.domain();
    let values = if d.is_periodic() {
        let sym = fourier::symbol(d, |k| C::new(-k * k, 0.0));
        fourier::apply_symbol(f.values(), &sym)
    } else {
        fd_second(f.values(), d.h())
    };
    GridFunction::from_parts(*d, values)
}

/// `order`-th derivative for `order` in {0, 1, 2}.
pub fn nth(f: &GridFunction, order: u32) -> GridFunction {
    match order {
        0 => f.clone(),
        1 => first(f),
        2 => second(f),
        _ => unreachable!("derivatives above second order are not used"),
    }
}

fn fd_first(y: &[C], h: f64) -> Vec<C> {
    let n = y.len();
    let s = 1.0 / (12.0 * h);
    let mut out = vec![C::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        out[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) * s;
    }
    out[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s;
    out[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s;
    out[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) * s;
    out[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * s;
    out
}

fn fd_second(y: &[C], h: f64) -> Vec<C> {
    let n = y.len();
    let s = 1.0 / (12.0 * h * h);
    let mut out = vec![C::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        out[i] = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2]) * s;
    }
    let left = |o: usize, c: [f64; 6]| -> C { (0..6).map(|k| c[k] * y[o + k]).sum::<C>() * s };
    let right = |o: usize, c: [f64; 6]| -> C { (0..6).map(|k| c[k] * y[o - k]).sum::<C>() * s };
    const END: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    const NEAR: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    out[0] = left(0, END);
    out[1] = left(0, NEAR);
    out[n - 1] = right(n - 1, END);
    out[n - 2] = right(n - 1, NEAR);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, Domain, FunctionSpec};

    #[test]
    fn finite_differences_are_exact_on_quartics() {
        let d = Domain::bounded(-1.0, 2.0, 20).unwrap();
        let spec = FunctionSpec::Polynomial { coeffs: vec![0.3, -1.0, 2.0, 0.5, -0.25] };
        let f = sample(&spec, &d).unwrap();
        let d1 = first(&f);
        let d2 = second(&f);
        for j in 0..d.n() {
            let x = d.x(j);
            assert!((d1[j] - spec.derivative(x, 1).unwrap()).norm() < 1e-11, "first at {j}");
            assert!((d2[j] - spec.derivative(x, 2).unwrap()).norm() < 1e-9, "second at {j}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let spec = FunctionSpec::gaussian(0.2, 0.5);
        let err = |n: usize| {
            let d = Domain::bounded(-3.0, 3.0, n).unwrap();
            let f = sample(&spec, &d).unwrap();
            let d1 = first(&f);
            (0..n).map(|j| (d1[j] - spec.derivative(d.x(j), 1).unwrap()).norm()).fold(0.0, f64::max)
        };
        let order = (err(200) / err(400)).log2();
        assert!((order - 4.0).abs() < 0.5, "order {order}");
    }

    #[test]
    fn spectral_derivative_of_plane_wave() {
        let d = Domain::periodic(-std::f64::consts::PI, std::f64::consts::PI, 16).unwrap();
        let f = sample(&FunctionSpec::PlaneWave { k: 3.0 }, &d).unwrap();
        let d1 = first(&f);
        let d2 = second(&f);
        for j in 0..16 {
            assert!((d1[j] - C::new(0.0, 3.0) * f[j]).norm() < 1e-12);
            assert!((d2[j] + 9.0 * f[j]).norm() < 1e-11);
        }
    }
}
