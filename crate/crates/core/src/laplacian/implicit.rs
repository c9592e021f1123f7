//! Operators whose kernel is `1/q(u)`, with the whole scale hierarchy of the
//! profile inside `q`.
//!
//! `left f(x) = ∫_0^∞ f'(x-u) / q(u) du` and
//! `right f(x) = -∫_0^∞ f'(x+u) / q(u) du`, the sign coming from the oddness
//! of `q`. No `1/Γ` normalization is applied. Integration always stops at the
//! domain edges.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frac::quadrature::{self, Grading, Kernel};
use crate::frac::Side;
use crate::grid::{derivative, positive_weight, GridFunction};
use crate::measure::{MeasureProfile, ProfileMode, Weight};

/// `1/q(u) = u^{-a} (u^a / q(u))` with `a` the smallest exponent.
struct ProfileKernel<'a> {
    profile: &'a MeasureProfile,
    a: f64,
}

impl Kernel for ProfileKernel<'_> {
    fn exponent(&self) -> f64 {
        self.a
    }

    fn smooth(&self, u: f64) -> f64 {
        u.powf(self.a) / self.profile.q(u)
    }

    fn key(&self) -> Vec<u64> {
        let mut key = vec![1, (self.profile.mode() == ProfileMode::Binomial) as u64];
        for t in self.profile.active_terms() {
            key.extend([t.alpha, t.ell, t.amp_cos, t.amp_sin, t.omega, t.ell_inf].map(f64::to_bits));
            key.push(t.keep_unit_offset as u64);
        }
        key
    }
}

fn check_profile(profile: &MeasureProfile) -> Result<f64> {
    if profile.is_oscillatory() {
        return Err(Error::OscillatoryProfileRejected);
    }
    let a = profile.min_alpha();
    if a >= 1.0 {
        return Err(Error::QuadratureFailure("1/q(u) is not integrable at u = 0 when every exponent equals 1".into()));
    }
    Ok(a)
}

pub fn implicit(f: &GridFunction, profile: &MeasureProfile, side: Side, grading: Grading) -> Result<GridFunction> {
    let a = check_profile(profile)?;
    let d = *f.domain();
    let kernel = ProfileKernel { profile, a };
    let moments = quadrature::moments(&kernel, d.h(), d.n(), grading)?;
    let g = derivative::first(f);
    let out = quadrature::product_integrate(g.values(), d.h(), false, side, &moments);
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    GridFunction::new(d, out.into_iter().map(|v| v * sign).collect())
}

/// `v^{-1/2} [½(left - right)]² (√v f)`.
pub fn implicit_kinetic(f: &GridFunction, profile: &MeasureProfile, grading: Grading) -> Result<GridFunction> {
    check_profile(profile)?;
    let root: Vec<f64> =
        positive_weight(f.domain(), &Weight::Profile(profile.clone()))?.into_iter().map(f64::sqrt).collect();
    let half_difference = |g: &GridFunction| -> Result<GridFunction> {
        let l = implicit(g, profile, Side::Left, grading)?;
        let r = implicit(g, profile, Side::Right, grading)?;
        Ok(l.sub(&r)?.scale(Complex64::new(0.5, 0.0)))
    };
    let lifted = f.values().iter().zip(&root).map(|(v, s)| v * s).collect();
    let lifted = GridFunction::new(*f.domain(), lifted)?;
    let out = half_difference(&half_difference(&lifted)?)?;
    GridFunction::new(*f.domain(), out.values().iter().zip(&root).map(|(v, s)| v / s).collect())
}
