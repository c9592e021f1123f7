//! Fourier-coefficient transforms on periodic domains.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::Domain;

/// Angular wavenumber carried by each FFT index; the Nyquist index (n/2)
/// reports `+π/h`.
pub fn wavenumbers(domain: &Domain) -> Vec<f64> {
    let n = domain.n();
    let k0 = 2.0 * PI / domain.length();
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            k0 * m
        })
        .collect()
}

/// Unnormalized forward DFT.
pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT including the `1/n` factor.
pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Discrete symbol of a Fourier multiplier `mu(k)`.
///
/// The Nyquist mode is shared by `±π/h`, so it gets the average
/// `(mu(K) + mu(-K)) / 2`: this keeps odd real multipliers anti-Hermitian and
/// makes `conj(mu)` the symbol of the flat-space adjoint.
pub fn symbol(domain: &Domain, mu: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let n = domain.n();
    wavenumbers(domain)
        .into_iter()
        .enumerate()
        .map(|(j, k)| if n.is_multiple_of(2) && j == n / 2 { 0.5 * (mu(k) + mu(-k)) } else { mu(k) })
        .collect()
}

/// Multiply the spectrum of `values` by a precomputed symbol.
pub fn apply_symbol(values: &[Complex64], symbol: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = forward(values);
    coeffs.iter_mut().zip(symbol).for_each(|(c, s)| *c *= s);
    inverse(&coeffs)
}

/// Circular convolution `out_i = Σ_j kernel_j values_{i-j}` via FFT.
pub fn circular_convolve(values: &[Complex64], kernel: &[Complex64]) -> Vec<Complex64> {
    let kh = forward(kernel);
    apply_symbol(values, &kh)
}

/// Linear convolution truncated to the first `values.len()` outputs:
/// `out_i = Σ_{j<=i} kernel_j values_{i-j}`.
pub fn causal_convolve(values: &[Complex64], kernel: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let size = (n + kernel.len()).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    a[..n].copy_from_slice(values);
    let kl = kernel.len().min(n);
    b[..kl].copy_from_slice(&kernel[..kl]);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut a);
    fft.process(&mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    planner.plan_fft_inverse(size).process(&mut a);
    let scale = 1.0 / size as f64;
    a.truncate(n);
    a.iter_mut().for_each(|v| *v *= scale);
    a
}
