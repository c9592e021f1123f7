use std::f64::consts::PI;

use num_complex::Complex64;

use super::Side;
use crate::error::{Error, Result};
use crate::grid::{fourier, GridFunction};

/// `(ik)^α` (left) or `(-ik)^α` (right) on the principal branch, for any real
/// order. The zero mode maps to 0 except at order 0, where it is kept.
pub fn power_symbol(alpha: f64, side: Side, k: f64) -> Complex64 {
    if alpha == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if k == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = match side {
        Side::Left => k.signum(),
        Side::Right => -k.signum(),
    };
    Complex64::from_polar(k.abs().powf(alpha), sign * PI * alpha / 2.0)
}

/// `c (ik)^α + c̄ (-ik)^α`.
pub fn combo_symbol(alpha: f64, c: Complex64, cbar: Complex64, k: f64) -> Complex64 {
    c * power_symbol(alpha, Side::Left, k) + cbar * power_symbol(alpha, Side::Right, k)
}

fn require_periodic(f: &GridFunction) -> Result<()> {
    if !f.domain().is_periodic() {
        return Err(Error::BackendDomainMismatch { backend: "spectral" });
    }
    Ok(())
}

/// Liouville (left) or Weyl (right) power of any real order by Fourier
/// multiplier; negative orders are repeated integrations on the non-zero
/// modes.
pub fn spectral_power(f: &GridFunction, alpha: f64, side: Side) -> Result<GridFunction> {
    require_periodic(f)?;
    let sym = fourier::symbol(f.domain(), |k| power_symbol(alpha, side, k));
    GridFunction::new(*f.domain(), fourier::apply_symbol(f.values(), &sym))
}

pub(super) fn apply_combo(f: &GridFunction, alpha: f64, c: Complex64, cbar: Complex64) -> Result<GridFunction> {
    require_periodic(f)?;
    let sym = fourier::symbol(f.domain(), |k| combo_symbol(alpha, c, cbar, k));
    GridFunction::new(*f.domain(), fourier::apply_symbol(f.values(), &sym))
}
