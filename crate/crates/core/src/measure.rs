//! Multiscale geometric coordinate `q(x)` and its weight `v(x) = q'(x)`.
//!
//! A profile is a linear term plus a hierarchy of anomalous power laws, each
//! optionally modulated by log-periodic oscillations:
//!
//! ```text
//! q(x) = x + Σ_n (ℓ_n / α_n) sgn(x) |x/ℓ_n|^{α_n} F_n(x)
//! F_n(x) = c + A_n cos(ω_n ln|x/ℓ∞_n|) + B_n sin(ω_n ln|x/ℓ∞_n|),   c ∈ {0, 1}
//! ```
//!
//! Lengths carry no units; they are in whatever unit the caller picks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

/// One scale of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureTerm {
    pub alpha: f64,
    pub ell: f64,
    #[serde(default)]
    pub amp_cos: f64,
    #[serde(default)]
    pub amp_sin: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_one")]
    pub ell_inf: f64,
    /// Keep the leading `1` in the modulation factor.
    #[serde(default = "default_true")]
    pub keep_unit_offset: bool,
}

impl MeasureTerm {
    /// Non-oscillatory term `(ℓ/α) sgn(x)|x/ℓ|^α`.
    pub fn power_law(alpha: f64, ell: f64) -> Self {
        Self { alpha, ell, amp_cos: 0.0, amp_sin: 0.0, omega: 0.0, ell_inf: 1.0, keep_unit_offset: true }
    }

    pub fn with_oscillation(mut self, amp_cos: f64, amp_sin: f64, omega: f64, ell_inf: f64) -> Self {
        self.amp_cos = amp_cos;
        self.amp_sin = amp_sin;
        self.omega = omega;
        self.ell_inf = ell_inf;
        self
    }

    pub fn is_oscillatory(&self) -> bool {
        self.omega != 0.0 && (self.amp_cos != 0.0 || self.amp_sin != 0.0)
    }

    fn validate(&self) -> Result<()> {
        let finite =
            [self.alpha, self.ell, self.amp_cos, self.amp_sin, self.omega, self.ell_inf].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidProfile("non-finite term parameter".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidProfile(format!("alpha = {} not in (0, 1]", self.alpha)));
        }
        if self.ell <= 0.0 {
            return Err(Error::InvalidProfile(format!("ell = {} must be positive", self.ell)));
        }
        if self.ell_inf <= 0.0 {
            return Err(Error::InvalidProfile(format!("ell_inf = {} must be positive", self.ell_inf)));
        }
        Ok(())
    }

    /// Modulation at `|x| = r > 0`: `(F, x F', x (x F')')`.
    fn modulation(&self, r: f64) -> (f64, f64, f64) {
        let offset = if self.keep_unit_offset { 1.0 } else { 0.0 };
        if self.omega == 0.0 {
            let f = offset + self.amp_cos;
            return (f, 0.0, 0.0);
        }
        let phase = self.omega * (r / self.ell_inf).ln();
        let (s, c) = phase.sin_cos();
        let f = offset + self.amp_cos * c + self.amp_sin * s;
        let g = self.omega * (-self.amp_cos * s + self.amp_sin * c);
        let h = -self.omega * self.omega * (self.amp_cos * c + self.amp_sin * s);
        (f, g, h)
    }

    /// Value of the term at `r = |x| > 0` (before the sign).
    fn value(&self, r: f64) -> f64 {
        let (f, _, _) = self.modulation(r);
        self.ell / self.alpha * (r / self.ell).powf(self.alpha) * f
    }

    /// Derivative of the term at `r > 0`; even in `x`.
    fn slope(&self, r: f64) -> f64 {
        let (f, g, _) = self.modulation(r);
        (r / self.ell).powf(self.alpha - 1.0) * (f + g / self.alpha)
    }

    /// Second derivative at `r > 0`; odd in `x`.
    fn curvature(&self, r: f64) -> f64 {
        let (f, g, h) = self.modulation(r);
        let a = self.alpha;
        (r / self.ell).powf(a - 1.0) / r * ((a - 1.0) * (f + g / a) + g + h / a)
    }
}

/// Which part of the hierarchy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    #[default]
    Full,
    /// Keep only the first (largest) scale.
    Binomial,
}

/// Immutable scale hierarchy defining `q(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct MeasureProfile {
    terms: Vec<MeasureTerm>,
    mode: ProfileMode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(default)]
    mode: ProfileMode,
    terms: Vec<MeasureTerm>,
}

impl TryFrom<RawProfile> for MeasureProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        MeasureProfile::new(raw.terms, raw.mode)
    }
}

impl From<MeasureProfile> for RawProfile {
    fn from(p: MeasureProfile) -> Self {
        RawProfile { mode: p.mode, terms: p.terms }
    }
}

impl MeasureProfile {
    pub fn new(terms: Vec<MeasureTerm>, mode: ProfileMode) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProfile("profile needs at least one term".into()));
        }
        for t in &terms {
            t.validate()?;
        }
        if mode == ProfileMode::Full && terms.windows(2).any(|w| w[1].ell >= w[0].ell) {
            return Err(Error::InvalidProfile("scale lengths must be strictly decreasing".into()));
        }
        Ok(Self { terms, mode })
    }

    /// Single-scale profile with a pure power law.
    pub fn binomial(alpha: f64, ell: f64) -> Result<Self> {
        Self::new(vec![MeasureTerm::power_law(alpha, ell)], ProfileMode::Binomial)
    }

    pub fn mode(&self) -> ProfileMode {
        self.mode
    }

    /// Terms that actually enter the evaluation.
    pub fn active_terms(&self) -> &[MeasureTerm] {
        match self.mode {
            ProfileMode::Full => &self.terms,
            ProfileMode::Binomial => &self.terms[..1],
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.active_terms().iter().map(|t| t.alpha).collect()
    }

    pub fn is_oscillatory(&self) -> bool {
        self.active_terms().iter().any(MeasureTerm::is_oscillatory)
    }

    /// Smallest exponent; it controls the small-|x| behaviour `q ~ |x|^α`.
    pub fn min_alpha(&self) -> f64 {
        self.active_terms().iter().map(|t| t.alpha).fold(1.0, f64::min)
    }

    /// Geometric coordinate `q(x)`. Odd in `x`, with `q(0) = 0`.
    pub fn q(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let r = x.abs();
        let anomalous: f64 = self.active_terms().iter().map(|t| t.value(r)).sum();
        x + x.signum() * anomalous
    }

    /// Weight `v(x) = q'(x)`; singular at the origin when some `α < 1`.
    pub fn weight(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            if self.active_terms().iter().any(|t| t.alpha < 1.0) {
                return Err(Error::SingularPoint { x });
            }
            // α = 1 everywhere: F is constant only without oscillations
            if self.is_oscillatory() {
                return Err(Error::SingularPoint { x });
            }
            return Ok(1.0 + self.active_terms().iter().map(|t| t.slope(1.0)).sum::<f64>());
        }
        let r = x.abs();
        Ok(1.0 + self.active_terms().iter().map(|t| t.slope(r)).sum::<f64>())
    }

    /// `v'(x)`, odd in `x`.
    pub fn weight_derivative(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::SingularPoint { x });
        }
        let r = x.abs();
        Ok(x.signum() * self.active_terms().iter().map(|t| t.curvature(r)).sum::<f64>())
    }

    /// Effective exponent `x v(x) / q(x)`: runs from the smallest `α` in the
    /// ultraviolet to 1 in the infrared.
    pub fn local_scaling_exponent(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::SingularPoint { x });
        }
        Ok(x * self.weight(x)? / self.q(x))
    }
}

/// Integration weight used by inner products and weighted operators.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Weight {
    /// `v ≡ 1`.
    #[default]
    Flat,
    Profile(MeasureProfile),
}

impl Weight {
    pub fn at(&self, x: f64) -> Result<f64> {
        match self {
            Weight::Flat => Ok(1.0),
            Weight::Profile(p) => p.weight(x),
        }
    }

    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        match self {
            Weight::Flat => Ok(0.0),
            Weight::Profile(p) => p.weight_derivative(x),
        }
    }

    pub fn profile(&self) -> Option<&MeasureProfile> {
        match self {
            Weight::Flat => None,
            Weight::Profile(p) => Some(p),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Weight::Flat)
    }
}

impl From<MeasureProfile> for Weight {
    fn from(p: MeasureProfile) -> Self {
        Weight::Profile(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_profile() -> MeasureProfile {
        MeasureProfile::binomial(0.5, 1.0).unwrap()
    }

    fn oscillatory() -> MeasureProfile {
        let t = MeasureTerm::power_law(0.5, 1.0).with_oscillation(0.1, 0.0, 2.0, 1.0);
        MeasureProfile::new(vec![t], ProfileMode::Binomial).unwrap()
    }

    #[test]
    fn binomial_values() {
        let p = sqrt_profile();
        assert_eq!(p.q(0.0), 0.0);
        assert!((p.q(1.0) - 3.0).abs() < 1e-15);
        assert!((p.q(-1.0) + 3.0).abs() < 1e-15);
        assert!((p.weight(1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_value_matches_high_precision() {
        // x = 1 puts ln|x/ℓ∞| = 0, so F = 1 + A; x = 2.5 exercises the phase.
        let p = oscillatory();
        assert!((p.q(1.0) - 3.2).abs() < 1e-15);
        // 2.5 + 2 sqrt(2.5) (1 + 0.1 cos(2 ln 2.5)), 30-digit reference
        let want = 5.580_436_244_698_709_1;
        assert!((p.q(2.5) - want).abs() < 1e-13, "{}", p.q(2.5));
    }

    #[test]
    fn linear_profile_is_exactly_twice_x() {
        let p = MeasureProfile::binomial(1.0, 1.0).unwrap();
        for x in [-3.0, -0.1, 0.7, 42.0] {
            assert_eq!(p.q(x), 2.0 * x);
            assert_eq!(p.weight(x).unwrap(), 2.0);
            assert_eq!(p.local_scaling_exponent(x).unwrap(), 1.0);
        }
        assert_eq!(p.weight(0.0).unwrap(), 2.0);
    }

    #[test]
    fn weight_is_singular_at_origin() {
        assert_eq!(sqrt_profile().weight(0.0), Err(Error::SingularPoint { x: 0.0 }));
        assert!(sqrt_profile().local_scaling_exponent(0.0).is_err());
    }

    #[test]
    fn weight_matches_central_differences() {
        let h = 1e-6;
        for p in [sqrt_profile(), oscillatory()] {
            for x in [0.5, -0.5, 1.3, 7.0] {
                let fd = (p.q(x + h) - p.q(x - h)) / (2.0 * h);
                let v = p.weight(x).unwrap();
                assert!((fd - v).abs() < 1e-6 * v.abs(), "x={x}: {fd} vs {v}");
            }
        }
    }

    #[test]
    fn weight_derivative_matches_central_differences() {
        let h = 1e-5;
        for p in [sqrt_profile(), oscillatory()] {
            for x in [0.5, -0.8, 2.0] {
                let fd = (p.weight(x + h).unwrap() - p.weight(x - h).unwrap()) / (2.0 * h);
                let dv = p.weight_derivative(x).unwrap();
                assert!((fd - dv).abs() < 1e-6 * dv.abs().max(1.0), "x={x}: {fd} vs {dv}");
            }
        }
    }

    #[test]
    fn scaling_exponent_limits() {
        let p = sqrt_profile();
        assert!((p.local_scaling_exponent(1e-6).unwrap() - 0.5).abs() < 1e-3);
        assert!((p.local_scaling_exponent(1e6).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn profile_validation() {
        assert!(MeasureProfile::new(vec![], ProfileMode::Full).is_err());
        assert!(MeasureProfile::binomial(0.0, 1.0).is_err());
        assert!(MeasureProfile::binomial(1.2, 1.0).is_err());
        assert!(MeasureProfile::binomial(0.5, -1.0).is_err());
        let inc = vec![MeasureTerm::power_law(0.5, 1.0), MeasureTerm::power_law(0.3, 2.0)];
        assert!(MeasureProfile::new(inc.clone(), ProfileMode::Full).is_err());
        // binomial mode ignores the ordering of unused terms
        assert!(MeasureProfile::new(inc, ProfileMode::Binomial).is_ok());
    }

    #[test]
    fn unit_offset_flag() {
        let t = MeasureTerm { keep_unit_offset: false, ..MeasureTerm::power_law(0.5, 1.0) };
        let p = MeasureProfile::new(vec![t], ProfileMode::Full).unwrap();
        // F ≡ 0 leaves only the linear term
        assert_eq!(p.q(2.0), 2.0);
    }

    #[test]
    fn profile_round_trips_through_toml() {
        let p = oscillatory();
        let text = toml::to_string(&p).unwrap();
        let back: MeasureProfile = toml::from_str(&text).unwrap();
        assert_eq!(p, back);
        let bad = "mode = \"full\"\nterms = []\n";
        assert!(toml::from_str::<MeasureProfile>(bad).is_err());
    }
}
