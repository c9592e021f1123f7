//! Liouville and Weyl fractional derivatives and their linear combinations.
//!
//! The Liouville derivative integrates from `-∞`, the Weyl derivative up to
//! `+∞`. On plane waves they act as the multipliers `(ik)^α` and `(-ik)^α`
//! (principal branch), so `∂̄¹ = -∂`.

mod grunwald;
pub mod quadrature;
mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{derivative, GridFunction};

pub use spectral::{combo_symbol, power_symbol, spectral_power};

/// Recommended lower bound on the Grünwald–Letnikov truncation.
pub const GL_MIN_RECOMMENDED: usize = 64;

fn default_truncation() -> usize {
    65536
}

fn default_panels() -> usize {
    16
}

fn default_grading() -> f64 {
    3.0
}

/// Discretization used for the fractional operators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FracBackend {
    /// Fourier multipliers; periodic domains only.
    #[default]
    Spectral,
    /// First-order shifted-sample sums truncated after `truncation` terms.
    GrunwaldLetnikov {
        #[serde(default = "default_truncation")]
        truncation: usize,
    },
    /// Product integration of the singular kernel against a cubic spline of
    /// `∂^m f`, with `panels` graded subintervals next to the singularity.
    SingularQuadrature {
        #[serde(default = "default_panels")]
        panels: usize,
        #[serde(default = "default_grading")]
        grading: f64,
    },
}

impl FracBackend {
    pub fn grunwald_letnikov() -> Self {
        Self::GrunwaldLetnikov { truncation: default_truncation() }
    }

    pub fn singular_quadrature() -> Self {
        Self::SingularQuadrature { panels: default_panels(), grading: default_grading() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectral => "spectral",
            Self::GrunwaldLetnikov { .. } => "grunwald_letnikov",
            Self::SingularQuadrature { .. } => "singular_quadrature",
        }
    }

    /// Truncations below [`GL_MIN_RECOMMENDED`] are accepted (they are how the
    /// truncation residual is demonstrated) and reported by [`Self::warning`].
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Spectral => Ok(()),
            Self::GrunwaldLetnikov { truncation: 0 } => {
                Err(Error::InvalidBackend("truncation must be at least 1".into()))
            }
            Self::GrunwaldLetnikov { .. } => Ok(()),
            Self::SingularQuadrature { panels, grading } => {
                if panels < 16 {
                    return Err(Error::InvalidBackend(format!("panels = {panels} below 16")));
                }
                if !(grading >= 1.0 && grading.is_finite()) {
                    return Err(Error::InvalidBackend(format!("grading = {grading} below 1")));
                }
                Ok(())
            }
        }
    }

    pub fn warning(&self) -> Option<String> {
        match *self {
            Self::GrunwaldLetnikov { truncation } if truncation < GL_MIN_RECOMMENDED => Some(format!(
                "Grünwald–Letnikov truncation {truncation} is below {GL_MIN_RECOMMENDED}; \
                 constant-annihilation residuals will be large"
            )),
            _ => None,
        }
    }
}

/// Order `α` with its integer ceiling index `m`, `m - 1 ≤ α < m`, `m ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    m: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::OrderOutOfRange { alpha, range: "(0, 2)" });
        }
        Ok(Self { alpha, m: alpha.floor() as u32 + 1 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        self.alpha.fract() == 0.0
    }
}

/// Which half-line the kernel integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Liouville, lower limit `-∞`.
    Left,
    /// Weyl, upper limit `+∞`.
    Right,
}

pub fn liouville(f: &GridFunction, order: FracOrder, backend: FracBackend) -> Result<GridFunction> {
    fractional(f, order, Side::Left, backend)
}

pub fn weyl(f: &GridFunction, order: FracOrder, backend: FracBackend) -> Result<GridFunction> {
    fractional(f, order, Side::Right, backend)
}

pub fn fractional(f: &GridFunction, order: FracOrder, side: Side, backend: FracBackend) -> Result<GridFunction> {
    backend.validate()?;
    if order.is_integer() {
        let d = derivative::first(f);
        return Ok(match side {
            Side::Left => d,
            Side::Right => d.scale(Complex64::new(-1.0, 0.0)),
        });
    }
    match backend {
        FracBackend::Spectral => spectral_power(f, order.alpha(), side),
        FracBackend::GrunwaldLetnikov { truncation } => Ok(grunwald::apply(f, order.alpha(), side, truncation)),
        FracBackend::SingularQuadrature { panels, grading } => {
            quadrature::fractional(f, order, side, quadrature::Grading { panels, grading })
        }
    }
}

/// `c ∂^α f + c̄ ∂̄^α f`.
pub fn combo(
    f: &GridFunction,
    order: FracOrder,
    c: Complex64,
    cbar: Complex64,
    backend: FracBackend,
) -> Result<GridFunction> {
    backend.validate()?;
    if let FracBackend::Spectral = backend {
        if !order.is_integer() {
            return spectral::apply_combo(f, order.alpha(), c, cbar);
        }
    }
    let l = liouville(f, order, backend)?;
    let w = weyl(f, order, backend)?;
    l.scale(c).add_scaled(cbar, &w)
}

/// The antisymmetric combination `∂̃^α = ½(∂^α - ∂̄^α)`, with multiplier
/// `i sin(πα/2) sgn(k) |k|^α`; `∂̃¹ = ∂`.
pub fn antisymmetric(f: &GridFunction, alpha: f64, backend: FracBackend) -> Result<GridFunction> {
    combo(f, FracOrder::new(alpha)?, Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0), backend)
}

/// `(∂^{2α} + ∂̄^{2α}) f` for `1/2 < α ≤ 1`; multiplier `2 cos(πα) |k|^{2α}`.
/// At `α = 1` this is exactly `2∂²`.
pub fn symmetric_m2(f: &GridFunction, alpha: f64, backend: FracBackend) -> Result<GridFunction> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::OrderOutOfRange { alpha, range: "(1/2, 1]" });
    }
    backend.validate()?;
    if alpha == 1.0 {
        return Ok(derivative::second(f).scale(Complex64::new(2.0, 0.0)));
    }
    let one = Complex64::new(1.0, 0.0);
    combo(f, FracOrder::new(2.0 * alpha)?, one, one, backend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, Domain, FunctionSpec};
    use std::f64::consts::PI;

    fn wave(k: f64) -> GridFunction {
        let d = Domain::periodic(-PI, PI, 64).unwrap();
        sample(&FunctionSpec::PlaneWave { k }, &d).unwrap()
    }

    fn factor(out: &GridFunction, f: &GridFunction) -> Complex64 {
        out[5] / f[5]
    }

    #[test]
    fn order_index() {
        assert_eq!(FracOrder::new(0.5).unwrap().m(), 1);
        assert_eq!(FracOrder::new(1.0).unwrap().m(), 2);
        assert_eq!(FracOrder::new(1.5).unwrap().m(), 2);
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(2.0).is_err());
    }

    #[test]
    fn plane_wave_multipliers() {
        let f = wave(1.0);
        let o = FracOrder::new(0.5).unwrap();
        let l = liouville(&f, o, FracBackend::Spectral).unwrap();
        let w = weyl(&f, o, FracBackend::Spectral).unwrap();
        let s = 0.5f64.sqrt();
        assert!((factor(&l, &f) - Complex64::new(s, s)).norm() < 1e-12);
        assert!((factor(&w, &f) - Complex64::new(s, -s)).norm() < 1e-12);
    }

    #[test]
    fn unit_order_is_the_ordinary_derivative() {
        let f = wave(2.0);
        let o = FracOrder::new(1.0).unwrap();
        for b in [FracBackend::Spectral, FracBackend::grunwald_letnikov(), FracBackend::singular_quadrature()] {
            let l = liouville(&f, o, b).unwrap();
            let w = weyl(&wave(1.0), o, b).unwrap();
            assert!((factor(&l, &f) - Complex64::new(0.0, 2.0)).norm() < 1e-12);
            assert!((factor(&w, &wave(1.0)) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn combinations_on_plane_waves() {
        let f = wave(1.0);
        let half = Complex64::new(0.5, 0.0);
        let anti = antisymmetric(&f, 0.5, FracBackend::Spectral).unwrap();
        let sym = combo(&f, FracOrder::new(0.5).unwrap(), half, half, FracBackend::Spectral).unwrap();
        let s = (PI / 4.0).sin();
        assert!((factor(&anti, &f) - Complex64::new(0.0, s)).norm() < 1e-12);
        assert!((factor(&sym, &f) - Complex64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_m2_multiplier() {
        let f = wave(2.0);
        let out = symmetric_m2(&f, 0.75, FracBackend::Spectral).unwrap();
        let expected = 2.0 * (0.75 * PI).cos() * 2f64.powf(1.5);
        assert!((factor(&out, &f) - Complex64::new(expected, 0.0)).norm() < 1e-12);
        assert!((expected + 4.0).abs() < 1e-12);
        let unit = symmetric_m2(&f, 1.0, FracBackend::Spectral).unwrap();
        assert!((factor(&unit, &f) - Complex64::new(-8.0, 0.0)).norm() < 1e-10);
        assert!(symmetric_m2(&f, 0.5, FracBackend::Spectral).is_err());
    }

    #[test]
    fn spectral_requires_periodic_domain() {
        let d = Domain::bounded(-1.0, 1.0, 32).unwrap();
        let f = sample(&FunctionSpec::gaussian(0.0, 0.2), &d).unwrap();
        let err = liouville(&f, FracOrder::new(0.5).unwrap(), FracBackend::Spectral).unwrap_err();
        assert_eq!(err, Error::BackendDomainMismatch { backend: "spectral" });
    }

    #[test]
    fn backend_validation() {
        assert!(FracBackend::GrunwaldLetnikov { truncation: 8 }.validate().is_ok());
        assert!(FracBackend::GrunwaldLetnikov { truncation: 8 }.warning().is_some());
        assert!(FracBackend::GrunwaldLetnikov { truncation: 0 }.validate().is_err());
        assert!(FracBackend::SingularQuadrature { panels: 8, grading: 2.0 }.validate().is_err());
        assert!(FracBackend::SingularQuadrature { panels: 16, grading: 0.5 }.validate().is_err());
    }

    #[test]
    fn backend_serde() {
        let b: FracBackend = toml::from_str("kind = \"grunwald_letnikov\"\ntruncation = 128\n").unwrap();
        assert_eq!(b, FracBackend::GrunwaldLetnikov { truncation: 128 });
        let q: FracBackend = toml::from_str("kind = \"singular_quadrature\"\n").unwrap();
        assert_eq!(q, FracBackend::singular_quadrature());
    }
}
