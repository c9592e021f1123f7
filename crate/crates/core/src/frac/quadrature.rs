//! Product integration of weakly singular kernels against cubic splines.
//!
//! For a kernel `K(u) = u^{-a} φ(u)` on `u > 0` with `0 ≤ a < 1` and smooth
//! `φ`, this evaluates `∫_0^∞ K(u) g(x_i ∓ u) du` where `g` is the cubic
//! spline through the samples. The spline is integrated exactly against the
//! kernel moments of each knot interval; the moments of the first interval
//! come from panels graded as `h (k/P)^grading`, each integrated in the
//! variable `u^{1-a}`, which removes the singularity.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::grunwald::{oriented, reflect};
use super::{FracOrder, Side};
use crate::error::{Error, Result};
use crate::grid::{derivative, fourier, spline, GridFunction};
use crate::special::{gamma, hurwitz_zeta, GaussLegendre};

type C = Complex64;

const MAX_DOUBLINGS: u32 = 10;
const MOMENT_TOL: f64 = 1e-11;

/// Panel layout of the first knot interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub panels: usize,
    pub grading: f64,
}

/// A kernel `u^{-a} φ(u)` on `u > 0`.
pub trait Kernel: Sync {
    /// Singular exponent `a` at the origin.
    fn exponent(&self) -> f64;
    /// Smooth factor `φ(u) = u^a K(u)`.
    fn smooth(&self, u: f64) -> f64;
    /// Identifies the kernel for moment caching.
    fn key(&self) -> Vec<u64>;

    fn eval(&self, u: f64) -> f64 {
        u.powf(-self.exponent()) * self.smooth(u)
    }
}

/// `u^{-s}`, optionally periodized over `period` through the Hurwitz zeta
/// function (the regularized sum differs from the divergent one by a constant,
/// which integrates to zero against derivatives of periodic data).
#[derive(Debug, Clone, Copy)]
pub struct PowerKernel {
    pub s: f64,
    pub period: Option<f64>,
}

impl Kernel for PowerKernel {
    fn exponent(&self) -> f64 {
        self.s
    }

    fn smooth(&self, u: f64) -> f64 {
        match self.period {
            None => 1.0,
            Some(l) => 1.0 + u.powf(self.s) * l.powf(-self.s) * hurwitz_zeta(self.s, 1.0 + u / l),
        }
    }

    fn key(&self) -> Vec<u64> {
        vec![0, self.s.to_bits(), self.period.map_or(0, f64::to_bits)]
    }
}

/// Kernel moments of the spline basis over knot intervals `[jh, (j+1)h]`,
/// with `t = (u - jh)/h`: `a = ∫K t`, `b = ∫K (1-t)`,
/// `c = ∫K (t³-t) h²/6`, `d = ∫K ((1-t)³-(1-t)) h²/6`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

fn basis(t: f64, h: f64) -> [f64; 4] {
    let s = 1.0 - t;
    let c = h * h / 6.0;
    [t, s, (t * t * t - t) * c, (s * s * s - s) * c]
}

fn interval_moments(kernel: &dyn Kernel, h: f64, j: usize) -> [f64; 4] {
    let lo = j as f64 * h;
    let gl = GaussLegendre::eight();
    let mut m = [0.0; 4];
    for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
        let u = lo + x * h;
        let k = kernel.eval(u) * w * h;
        let p = basis(x, h);
        for r in 0..4 {
            m[r] += k * p[r];
        }
    }
    m
}

fn first_interval(kernel: &dyn Kernel, h: f64, panels: usize, grading: f64) -> [f64; 4] {
    // On every panel `v = u^{1-a}` turns `u^{-a} du` into `β dv`.
    let a = kernel.exponent();
    let beta = 1.0 / (1.0 - a);
    let gl = GaussLegendre::eight();
    let edge = |k: usize| (h * (k as f64 / panels as f64).powf(grading)).powf(1.0 - a);
    let mut m = [0.0; 4];
    for panel in 0..panels {
        let (lo, hi) = (edge(panel), edge(panel + 1));
        for (&x, &wt) in gl.nodes.iter().zip(&gl.weights) {
            let u = (lo + x * (hi - lo)).powf(beta);
            let k = beta * kernel.smooth(u) * wt * (hi - lo);
            let p = basis(u / h, h);
            for r in 0..4 {
                m[r] += k * p[r];
            }
        }
    }
    m
}

fn converged_first_interval(kernel: &dyn Kernel, h: f64, grading: Grading) -> Result<[f64; 4]> {
    let mut panels = grading.panels;
    let mut prev = first_interval(kernel, h, panels, grading.grading);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = first_interval(kernel, h, panels, grading.grading);
        let scale = next.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let change = next.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if !scale.is_finite() {
            break;
        }
        if change <= MOMENT_TOL * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure(format!(
        "first-interval moments unconverged after {panels} panels (exponent {})",
        kernel.exponent()
    )))
}

type CacheKey = (Vec<u64>, u64, usize, usize, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Moments>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Moments>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Moments for `count` knot intervals of width `h`, memoized per kernel and
/// grid.
pub fn moments(kernel: &dyn Kernel, h: f64, count: usize, grading: Grading) -> Result<Arc<Moments>> {
    let key = (kernel.key(), h.to_bits(), count, grading.panels, grading.grading.to_bits());
    if let Some(m) = cache().lock().expect("moment cache poisoned").get(&key) {
        return Ok(Arc::clone(m));
    }
    let first = converged_first_interval(kernel, h, grading)?;
    let mut m = Moments { a: vec![first[0]], b: vec![first[1]], c: vec![first[2]], d: vec![first[3]] };
    for j in 1..count {
        let v = interval_moments(kernel, h, j);
        m.a.push(v[0]);
        m.b.push(v[1]);
        m.c.push(v[2]);
        m.d.push(v[3]);
    }
    if m.a.iter().chain(&m.b).chain(&m.c).chain(&m.d).any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure("non-finite kernel moment".into()));
    }
    let m = Arc::new(m);
    cache().lock().expect("moment cache poisoned").insert(key, Arc::clone(&m));
    Ok(m)
}

/// `∫_0^∞ K(u) g(x_i - u) du` (left) or `∫_0^∞ K(u) g(x_i + u) du` (right),
/// with `g` the cubic spline of `y`; periodic data wraps, otherwise `g`
/// vanishes outside the grid.
pub fn product_integrate(y: &[C], h: f64, periodic: bool, side: Side, m: &Moments) -> Vec<C> {
    let n = y.len();
    let curv = spline::second_derivatives(y, h, periodic);
    let y = oriented(y, side, periodic);
    let curv = oriented(&curv, side, periodic);
    let mut ky = vec![C::new(0.0, 0.0); n];
    let mut km = vec![C::new(0.0, 0.0); n];
    for j in 0..n.min(m.a.len()) {
        ky[j] += m.b[j];
        km[j] += m.d[j];
        let next = j + 1;
        if next < n {
            ky[next] += m.a[j];
            km[next] += m.c[j];
        } else if periodic {
            ky[next % n] += m.a[j];
            km[next % n] += m.c[j];
        }
    }
    let out: Vec<C> = if periodic {
        let a = fourier::circular_convolve(&y, &ky);
        let b = fourier::circular_convolve(&curv, &km);
        a.iter().zip(&b).map(|(x, z)| x + z).collect()
    } else {
        let a = fourier::causal_convolve(&y, &ky);
        let b = fourier::causal_convolve(&curv, &km);
        a.iter().zip(&b).map(|(x, z)| x + z).collect()
    };
    match side {
        Side::Left => out,
        Side::Right => reflect(&out, periodic),
    }
}

/// Liouville or Weyl derivative of non-integer order by product integration of
/// `u^{m-α-1} / Γ(m-α)` against `∂^m f` (Weyl carries `(-1)^m`).
pub fn fractional(f: &GridFunction, order: FracOrder, side: Side, grading: Grading) -> Result<GridFunction> {
    let d = *f.domain();
    let m = order.m();
    let s = order.alpha() + 1.0 - m as f64;
    let kernel = PowerKernel { s, period: d.is_periodic().then(|| d.length()) };
    let moments = moments(&kernel, d.h(), d.n(), grading)?;
    let g = derivative::nth(f, m);
    let mut norm = 1.0 / gamma(1.0 - s);
    if side == Side::Right && m % 2 == 1 {
        norm = -norm;
    }
    let out = product_integrate(g.values(), d.h(), d.is_periodic(), side, &moments);
    GridFunction::new(d, out.into_iter().map(|v| v * norm).collect())
}
