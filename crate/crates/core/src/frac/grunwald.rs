//! Grünwald–Letnikov sums `h^{-α} Σ_{j≤J} (-1)^j C(α, j) f(x ∓ jh)`.
//!
//! Periodic domains wrap the shifts; the weights then sum to zero over the
//! full series, so the constant mode is removed exactly before the truncated
//! sum is applied. Non-periodic domains extend `f` by zero.

use num_complex::Complex64;

use super::Side;
use crate::grid::{fourier, GridFunction};
use crate::special::grunwald_weights;

type C = Complex64;

pub(super) fn apply(f: &GridFunction, alpha: f64, side: Side, truncation: usize) -> GridFunction {
    let d = *f.domain();
    let n = d.n();
    let scale = d.h().powf(-alpha);
    let weights = grunwald_weights(alpha, truncation);
    let input = oriented(f.values(), side, d.is_periodic());
    let out = if d.is_periodic() {
        let mut kernel = vec![C::new(0.0, 0.0); n];
        for (j, w) in weights.iter().enumerate() {
            kernel[j % n] += w;
        }
        let mean = input.iter().sum::<C>() / n as f64;
        let centered: Vec<C> = input.iter().map(|v| v - mean).collect();
        fourier::circular_convolve(&centered, &kernel)
    } else {
        let kernel: Vec<C> = weights.iter().take(n).map(|&w| C::new(w, 0.0)).collect();
        fourier::causal_convolve(&input, &kernel)
    };
    let values = oriented(&out, side, d.is_periodic()).into_iter().map(|v| v * scale).collect();
    GridFunction::from_parts(d, values)
}

/// Identity for the left operator; the index reflection for the right one,
/// which turns the forward-shifted sum into a backward-shifted convolution.
pub(super) fn oriented(values: &[C], side: Side, periodic: bool) -> Vec<C> {
    match side {
        Side::Left => values.to_vec(),
        Side::Right => reflect(values, periodic),
    }
}

pub(super) fn reflect(values: &[C], periodic: bool) -> Vec<C> {
    let n = values.len();
    if periodic {
        (0..n).map(|i| values[(n - i) % n]).collect()
    } else {
        values.iter().rev().copied().collect()
    }
}
