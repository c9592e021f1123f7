//! Multiscale derivatives and kinetic operators.
//!
//! Every operator here is described declaratively by an [`OperatorSpec`] and
//! applied by double application where it is a square; nothing is expanded
//! into fractional pieces except in the formal [`symbolic`] module.

pub mod implicit;
pub mod symbolic;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac::{self, combo_symbol, power_symbol, quadrature::Grading, FracBackend, FracOrder, Side};
use crate::grid::{derivative, fourier, positive_weight, weight_values, DenseOperator, Domain, GridFunction};
use crate::measure::{MeasureProfile, Weight};

type C = Complex64;

fn one() -> C {
    C::new(1.0, 0.0)
}

/// One scale of an explicit multiscale sum: coefficient `g` and order `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub g: f64,
    pub alpha: f64,
}

impl Term {
    pub fn new(g: f64, alpha: f64) -> Self {
        Self { g, alpha }
    }
}

fn default_half() -> [f64; 2] {
    [0.5, 0.0]
}

fn default_minus_half() -> [f64; 2] {
    [-0.5, 0.0]
}

/// Which operator to apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorKind {
    Identity,
    /// Ordinary `∂`.
    Derivative,
    Liouville {
        alpha: f64,
    },
    Weyl {
        alpha: f64,
    },
    /// `c ∂^α + c̄ ∂̄^α`; coefficients as `[re, im]`.
    Combo {
        alpha: f64,
        #[serde(default = "default_half")]
        c: [f64; 2],
        #[serde(default = "default_minus_half")]
        cbar: [f64; 2],
    },
    SymmetricM2 {
        alpha: f64,
    },
    QDeriv,
    QLaplacian,
    WeightedFrac {
        alpha: f64,
    },
    /// `D^α D^α = v^{-1/2} ∂̃^α ∂̃^α (√v ·)`.
    KAlpha {
        alpha: f64,
    },
    ExplicitD {
        terms: Vec<Term>,
    },
    ExplicitKinetic {
        terms: Vec<Term>,
    },
    BarKinetic {
        terms: Vec<Term>,
    },
    ImplicitLeft,
    ImplicitRight,
    ImplicitKinetic,
    PlateauDiff {
        alpha: f64,
    },
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Derivative => "derivative",
            Self::Liouville { .. } => "liouville",
            Self::Weyl { .. } => "weyl",
            Self::Combo { .. } => "combo",
            Self::SymmetricM2 { .. } => "symmetric_m2",
            Self::QDeriv => "q_deriv",
            Self::QLaplacian => "q_laplacian",
            Self::WeightedFrac { .. } => "weighted_frac",
            Self::KAlpha { .. } => "k_alpha",
            Self::ExplicitD { .. } => "explicit_d",
            Self::ExplicitKinetic { .. } => "explicit_kinetic",
            Self::BarKinetic { .. } => "bar_kinetic",
            Self::ImplicitLeft => "implicit_left",
            Self::ImplicitRight => "implicit_right",
            Self::ImplicitKinetic => "implicit_kinetic",
            Self::PlateauDiff { .. } => "plateau_diff",
        }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, Self::ImplicitLeft | Self::ImplicitRight | Self::ImplicitKinetic)
    }

    /// First-order-type operators, for which the Leibniz defect is meaningful.
    pub fn is_first_order(&self) -> bool {
        matches!(
            self,
            Self::Derivative
                | Self::Liouville { .. }
                | Self::Weyl { .. }
                | Self::Combo { .. }
                | Self::QDeriv
                | Self::WeightedFrac { .. }
                | Self::ExplicitD { .. }
                | Self::ImplicitLeft
                | Self::ImplicitRight
                | Self::PlateauDiff { .. }
        )
    }
}

/// A fully specified operator: kind, measure weight and fractional backend.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub weight: Weight,
    pub backend: FracBackend,
    /// Require the fractional orders of explicit sums to equal the profile's
    /// exponents.
    pub cross_consistency: bool,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind) -> Self {
        Self { kind, weight: Weight::Flat, backend: FracBackend::Spectral, cross_consistency: true }
    }

    pub fn with_weight(mut self, weight: impl Into<Weight>) -> Self {
        self.weight = weight.into();
        self
    }

    pub fn with_backend(mut self, backend: FracBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_cross_consistency(mut self, on: bool) -> Self {
        self.cross_consistency = on;
        self
    }

    fn profile(&self, what: &'static str) -> Result<&MeasureProfile> {
        self.weight.profile().ok_or(Error::ProfileRequired(what))
    }

    fn grading(&self) -> Grading {
        match self.backend {
            FracBackend::SingularQuadrature { panels, grading } => Grading { panels, grading },
            _ => Grading { panels: 16, grading: 3.0 },
        }
    }

    /// Checks that do not depend on the input function.
    pub fn validate(&self) -> Result<()> {
        self.backend.validate()?;
        match &self.kind {
            OperatorKind::ExplicitD { terms } | OperatorKind::ExplicitKinetic { terms } => {
                validate_terms(terms, 0.0)?;
                self.check_hierarchy(terms)
            }
            OperatorKind::BarKinetic { terms } => {
                validate_terms(terms, 0.5)?;
                self.check_hierarchy(terms)
            }
            OperatorKind::ImplicitLeft | OperatorKind::ImplicitRight | OperatorKind::ImplicitKinetic => {
                let p = self.profile("implicit operators need a profile")?;
                if p.is_oscillatory() {
                    return Err(Error::OscillatoryProfileRejected);
                }
                Ok(())
            }
            OperatorKind::Liouville { alpha }
            | OperatorKind::Weyl { alpha }
            | OperatorKind::Combo { alpha, .. }
            | OperatorKind::WeightedFrac { alpha }
            | OperatorKind::KAlpha { alpha }
            | OperatorKind::PlateauDiff { alpha } => FracOrder::new(*alpha).map(|_| ()),
            OperatorKind::SymmetricM2 { alpha } => {
                if *alpha > 0.5 && *alpha <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::OrderOutOfRange { alpha: *alpha, range: "(1/2, 1]" })
                }
            }
            _ => Ok(()),
        }
    }

    fn check_hierarchy(&self, terms: &[Term]) -> Result<()> {
        let Some(p) = self.weight.profile() else { return Ok(()) };
        if !self.cross_consistency {
            return Ok(());
        }
        let mut fractional: Vec<f64> = terms.iter().map(|t| t.alpha).filter(|&a| a != 1.0).collect();
        let mut profile: Vec<f64> = p.alphas().into_iter().filter(|&a| a != 1.0).collect();
        fractional.sort_by(f64::total_cmp);
        profile.sort_by(f64::total_cmp);
        let same =
            fractional.len() == profile.len() && fractional.iter().zip(&profile).all(|(a, b)| (a - b).abs() <= 1e-12);
        if same {
            Ok(())
        } else {
            Err(Error::InconsistentHierarchy { terms: fractional, profile })
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.validate()?;
        let w = &self.weight;
        let b = self.backend;
        match &self.kind {
            OperatorKind::Identity => Ok(f.clone()),
            OperatorKind::Derivative => Ok(derivative::first(f)),
            OperatorKind::Liouville { alpha } => frac::liouville(f, FracOrder::new(*alpha)?, b),
            OperatorKind::Weyl { alpha } => frac::weyl(f, FracOrder::new(*alpha)?, b),
            OperatorKind::Combo { alpha, c, cbar } => {
                frac::combo(f, FracOrder::new(*alpha)?, C::new(c[0], c[1]), C::new(cbar[0], cbar[1]), b)
            }
            OperatorKind::SymmetricM2 { alpha } => frac::symmetric_m2(f, *alpha, b),
            OperatorKind::QDeriv => q_derivative(f, w),
            OperatorKind::QLaplacian => q_laplacian(f, w),
            OperatorKind::WeightedFrac { alpha } => weighted_frac(f, *alpha, w, b),
            OperatorKind::KAlpha { alpha } => weighted_frac(&weighted_frac(f, *alpha, w, b)?, *alpha, w, b),
            OperatorKind::ExplicitD { terms } => explicit_multiscale(f, terms, w, b),
            OperatorKind::ExplicitKinetic { terms } => explicit_kinetic(f, terms, w, b),
            OperatorKind::BarKinetic { terms } => bar_kinetic(f, terms, w, b),
            OperatorKind::ImplicitLeft => {
                implicit::implicit(f, self.profile("implicit_left")?, Side::Left, self.grading())
            }
            OperatorKind::ImplicitRight => {
                implicit::implicit(f, self.profile("implicit_right")?, Side::Right, self.grading())
            }
            OperatorKind::ImplicitKinetic => {
                implicit::implicit_kinetic(f, self.profile("implicit_kinetic")?, self.grading())
            }
            OperatorKind::PlateauDiff { alpha } => plateau_differential(f, *alpha, b),
        }
    }

    /// Dense matrix whose column `j` is the operator applied to the `j`-th basis
    /// vector.
    pub fn to_matrix(&self, domain: &Domain) -> Result<DenseOperator> {
        self.validate()?;
        DenseOperator::assemble(*domain, |e| self.apply(e))
    }

    /// Continuous multipliers of the stages whose product is the operator on
    /// plane waves with flat weight; `None` when the operator is not diagonal.
    fn stages(&self) -> Option<Vec<Box<dyn Fn(f64) -> C + '_>>> {
        if !self.weight.is_flat() || self.backend != FracBackend::Spectral {
            return None;
        }
        let anti = |alpha: f64| move |k: f64| combo_symbol(alpha, C::new(0.5, 0.0), C::new(-0.5, 0.0), k);
        let explicit = |terms: &[Term]| {
            let terms = terms.to_vec();
            move |k: f64| terms.iter().map(|t| t.g * anti(t.alpha)(k)).sum::<C>()
        };
        let ik = |k: f64| C::new(0.0, k);
        let stages: Vec<Box<dyn Fn(f64) -> C>> = match &self.kind {
            OperatorKind::Identity => vec![Box::new(|_| one())],
            OperatorKind::Derivative | OperatorKind::QDeriv => vec![Box::new(ik)],
            OperatorKind::QLaplacian => vec![Box::new(ik), Box::new(ik)],
            OperatorKind::Liouville { alpha } => {
                let a = *alpha;
                vec![Box::new(move |k| power_symbol(a, Side::Left, k))]
            }
            OperatorKind::Weyl { alpha } => {
                let a = *alpha;
                vec![Box::new(move |k| power_symbol(a, Side::Right, k))]
            }
            OperatorKind::Combo { alpha, c, cbar } => {
                let (a, c, cb) = (*alpha, C::new(c[0], c[1]), C::new(cbar[0], cbar[1]));
                vec![Box::new(move |k| combo_symbol(a, c, cb, k))]
            }
            OperatorKind::SymmetricM2 { alpha } => {
                let a = *alpha;
                vec![Box::new(move |k| combo_symbol(2.0 * a, one(), one(), k))]
            }
            OperatorKind::WeightedFrac { alpha } | OperatorKind::PlateauDiff { alpha } => {
                vec![Box::new(anti(*alpha))]
            }
            OperatorKind::KAlpha { alpha } => vec![Box::new(anti(*alpha)), Box::new(anti(*alpha))],
            OperatorKind::ExplicitD { terms } => vec![Box::new(explicit(terms))],
            OperatorKind::ExplicitKinetic { terms } => vec![Box::new(explicit(terms)), Box::new(explicit(terms))],
            OperatorKind::BarKinetic { terms } => {
                let terms = terms.clone();
                vec![Box::new(move |k| {
                    terms.iter().map(|t| t.g * 0.5 * combo_symbol(2.0 * t.alpha, one(), one(), k)).sum::<C>()
                })]
            }
            OperatorKind::ImplicitLeft | OperatorKind::ImplicitRight | OperatorKind::ImplicitKinetic => return None,
        };
        Some(stages)
    }

    fn not_diagonal(&self) -> Error {
        Error::NotDiagonalizable(format!(
            "{} with {} weight and {} backend",
            self.kind.name(),
            if self.weight.is_flat() { "flat" } else { "profile" },
            self.backend.name()
        ))
    }

    /// `μ(k)` with `K e^{ikx} = μ(k) e^{ikx}`.
    pub fn multiplier(&self, k: f64) -> Result<C> {
        self.validate()?;
        let stages = self.stages().ok_or_else(|| self.not_diagonal())?;
        Ok(stages.iter().map(|s| s(k)).product())
    }

    /// The exact grid symbol of [`Self::apply`] on a periodic domain, stage by
    /// stage with the Nyquist convention of the grid transforms.
    pub fn discrete_symbol(&self, domain: &Domain) -> Result<Vec<C>> {
        self.validate()?;
        if !domain.is_periodic() {
            return Err(Error::BackendDomainMismatch { backend: "spectral" });
        }
        let stages = self.stages().ok_or_else(|| self.not_diagonal())?;
        let mut total = vec![one(); domain.n()];
        for s in &stages {
            let sym = fourier::symbol(domain, s);
            total.iter_mut().zip(&sym).for_each(|(t, v)| *t *= v);
        }
        Ok(total)
    }
}

fn validate_terms(terms: &[Term], lower: f64) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::Config("explicit multiscale operators need at least one term".into()));
    }
    for t in terms {
        if !t.g.is_finite() {
            return Err(Error::Config(format!("non-finite coefficient g = {}", t.g)));
        }
        if !(t.alpha > lower && t.alpha <= 1.0) {
            let range = if lower == 0.0 { "(0, 1]" } else { "(1/2, 1]" };
            return Err(Error::OrderOutOfRange { alpha: t.alpha, range });
        }
    }
    Ok(())
}

/// `∂_q f = v^{-1} ∂f`.
pub fn q_derivative(f: &GridFunction, weight: &Weight) -> Result<GridFunction> {
    let v = weight_values(f.domain(), weight)?;
    let d = derivative::first(f);
    GridFunction::new(*f.domain(), d.values().iter().zip(&v).map(|(x, w)| x / w).collect())
}

/// `∂_q ∂_q f`.
pub fn q_laplacian(f: &GridFunction, weight: &Weight) -> Result<GridFunction> {
    q_derivative(&q_derivative(f, weight)?, weight)
}

fn conjugate(
    f: &GridFunction,
    weight: &Weight,
    op: impl FnOnce(&GridFunction) -> Result<GridFunction>,
) -> Result<GridFunction> {
    if weight.is_flat() {
        return op(f);
    }
    let root: Vec<f64> = positive_weight(f.domain(), weight)?.into_iter().map(f64::sqrt).collect();
    let lifted = GridFunction::new(*f.domain(), f.values().iter().zip(&root).map(|(v, s)| v * s).collect())?;
    let out = op(&lifted)?;
    GridFunction::new(*f.domain(), out.values().iter().zip(&root).map(|(v, s)| v / s).collect())
}

/// `D^α f = v^{-1/2} ∂̃^α (√v f)`.
pub fn weighted_frac(f: &GridFunction, alpha: f64, weight: &Weight, backend: FracBackend) -> Result<GridFunction> {
    conjugate(f, weight, |g| frac::antisymmetric(g, alpha, backend))
}

/// `Σ gₙ D^{αₙ} f`.
pub fn explicit_multiscale(
    f: &GridFunction,
    terms: &[Term],
    weight: &Weight,
    backend: FracBackend,
) -> Result<GridFunction> {
    validate_terms(terms, 0.0)?;
    conjugate(f, weight, |g| {
        let mut acc = GridFunction::zeros(*g.domain());
        for t in terms {
            if t.g != 0.0 {
                acc = acc.add_scaled(C::new(t.g, 0.0), &frac::antisymmetric(g, t.alpha, backend)?)?;
            }
        }
        Ok(acc)
    })
}

/// `𝒟² f`, by applying [`explicit_multiscale`] twice.
pub fn explicit_kinetic(
    f: &GridFunction,
    terms: &[Term],
    weight: &Weight,
    backend: FracBackend,
) -> Result<GridFunction> {
    explicit_multiscale(&explicit_multiscale(f, terms, weight, backend)?, terms, weight, backend)
}

/// `Σ gₙ v^{-1/2} ½(∂^{2αₙ} + ∂̄^{2αₙ})(√v f)`.
pub fn bar_kinetic(f: &GridFunction, terms: &[Term], weight: &Weight, backend: FracBackend) -> Result<GridFunction> {
    validate_terms(terms, 0.5)?;
    conjugate(f, weight, |g| {
        let mut acc = GridFunction::zeros(*g.domain());
        for t in terms {
            if t.g != 0.0 {
                acc = acc.add_scaled(C::new(0.5 * t.g, 0.0), &frac::symmetric_m2(g, t.alpha, backend)?)?;
            }
        }
        Ok(acc)
    })
}

pub fn implicit_left(f: &GridFunction, profile: &MeasureProfile) -> Result<GridFunction> {
    implicit::implicit(f, profile, Side::Left, Grading { panels: 16, grading: 3.0 })
}

pub fn implicit_right(f: &GridFunction, profile: &MeasureProfile) -> Result<GridFunction> {
    implicit::implicit(f, profile, Side::Right, Grading { panels: 16, grading: 3.0 })
}

pub fn implicit_kinetic(f: &GridFunction, profile: &MeasureProfile) -> Result<GridFunction> {
    implicit::implicit_kinetic(f, profile, Grading { panels: 16, grading: 3.0 })
}

/// The plateau limit of the multiscale differential, `∂̃^α`.
pub fn plateau_differential(f: &GridFunction, alpha: f64, backend: FracBackend) -> Result<GridFunction> {
    frac::antisymmetric(f, alpha, backend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{adjoint_defect, sample, FunctionSpec};
    use crate::measure::MeasureTerm;
    use std::f64::consts::PI;

    fn periodic() -> Domain {
        Domain::periodic(-PI, PI, 64).unwrap()
    }

    fn wave(k: f64) -> GridFunction {
        sample(&FunctionSpec::PlaneWave { k }, &periodic()).unwrap()
    }

    fn binomial() -> Weight {
        Weight::from(MeasureProfile::binomial(0.5, 1.0).unwrap())
    }

    #[test]
    fn flat_q_derivative_is_the_ordinary_derivative() {
        let f = wave(3.0);
        let q = q_derivative(&f, &Weight::Flat).unwrap();
        assert!(q.max_abs_diff(&derivative::first(&f)).unwrap() < 1e-12);
    }

    #[test]
    fn q_derivative_of_q_is_one() {
        let p = MeasureProfile::binomial(0.5, 1.0).unwrap();
        let d = Domain::bounded(0.5, 4.5, 400).unwrap();
        let f = GridFunction::from_fn(d, |x| C::new(p.q(x), 0.0));
        let out = q_derivative(&f, &Weight::from(p)).unwrap();
        for j in d.bulk(0.1) {
            assert!((out[j] - one()).norm() < 1e-8, "{}", out[j]);
        }
    }

    #[test]
    fn weight_singularity_is_reported() {
        let d = Domain::bounded(-1.0, 1.0, 8).unwrap().with_offset(0.0).unwrap();
        let f = GridFunction::zeros(d);
        assert!(matches!(q_derivative(&f, &binomial()), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn explicit_multiplier_algebra() {
        let g = 0.7;
        let alpha = 0.5;
        let terms = vec![Term::new(1.0, 1.0), Term::new(g, alpha)];
        let d = OperatorSpec::new(OperatorKind::ExplicitD { terms: terms.clone() });
        let k2 = OperatorSpec::new(OperatorKind::ExplicitKinetic { terms: terms.clone() });
        for k in [-2.0, 0.5, 1.0, 3.0] {
            let mu = C::new(0.0, k) + g * C::new(0.0, (PI * alpha / 2.0).sin() * k.signum() * k.abs().powf(alpha));
            assert!((d.multiplier(k).unwrap() - mu).norm() < 1e-14);
            assert!((k2.multiplier(k).unwrap() - mu * mu).norm() < 1e-13);
        }
        let f = wave(2.0);
        let out = d.apply(&f).unwrap();
        assert!(out.max_abs_diff(&f.scale(d.multiplier(2.0).unwrap())).unwrap() < 1e-12);
    }

    #[test]
    fn bar_kinetic_is_not_a_square() {
        let alpha = 0.75;
        let bar = OperatorSpec::new(OperatorKind::BarKinetic { terms: vec![Term::new(1.0, alpha)] });
        let sq = OperatorSpec::new(OperatorKind::KAlpha { alpha });
        let b = bar.multiplier(1.0).unwrap();
        let s = sq.multiplier(1.0).unwrap();
        assert!((b.re - (0.75 * PI).cos()).abs() < 1e-14);
        assert!((s.re + (0.375 * PI).sin().powi(2)).abs() < 1e-14);
        assert!((b - s).norm() > 0.1);
        let f = wave(1.0);
        assert!(bar.apply(&f).unwrap().max_abs_diff(&f.scale(b)).unwrap() < 1e-12);
    }

    #[test]
    fn k_alpha_is_self_adjoint_under_the_measure() {
        let d = Domain::periodic(-PI, PI, 64).unwrap();
        for w in [Weight::Flat, binomial()] {
            let m =
                OperatorSpec::new(OperatorKind::KAlpha { alpha: 0.5 }).with_weight(w.clone()).to_matrix(&d).unwrap();
            assert!(adjoint_defect(&m, &w).unwrap() < 1e-10);
        }
    }

    #[test]
    fn cross_consistency() {
        let w = binomial();
        let good = OperatorSpec::new(OperatorKind::ExplicitD { terms: vec![Term::new(1.0, 1.0), Term::new(0.3, 0.5)] })
            .with_weight(w.clone());
        assert!(good.validate().is_ok());
        let bad = OperatorSpec::new(OperatorKind::ExplicitD { terms: vec![Term::new(1.0, 1.0), Term::new(0.3, 0.6)] })
            .with_weight(w);
        assert!(matches!(bad.validate(), Err(Error::InconsistentHierarchy { .. })));
        assert!(bad.with_cross_consistency(false).validate().is_ok());
    }

    #[test]
    fn weighted_frac_rejects_non_positive_weight() {
        let t = MeasureTerm::power_law(0.5, 1.0).with_oscillation(3.0, 0.0, 4.0, 1.0);
        let p = MeasureProfile::new(vec![t], Default::default()).unwrap();
        let f = wave(1.0);
        let err = weighted_frac(&f, 0.5, &Weight::from(p), FracBackend::Spectral).unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { .. }));
    }

    #[test]
    fn implicit_operators_are_not_diagonal() {
        let op = OperatorSpec::new(OperatorKind::ImplicitLeft).with_weight(binomial());
        assert!(matches!(op.multiplier(1.0), Err(Error::NotDiagonalizable(_))));
    }

    #[test]
    fn discrete_symbol_reproduces_apply() {
        let d = periodic();
        let op =
            OperatorSpec::new(OperatorKind::ExplicitKinetic { terms: vec![Term::new(1.0, 1.0), Term::new(0.5, 0.6)] });
        let sym = op.discrete_symbol(&d).unwrap();
        let f = GridFunction::from_fn(d, |x| C::new((3.0 * x).sin() + (32.0 * x).cos(), x.cos()));
        let direct = op.apply(&f).unwrap();
        let via = fourier::apply_symbol(f.values(), &sym);
        for j in 0..d.n() {
            assert!((direct[j] - via[j]).norm() < 1e-9);
        }
    }
}
