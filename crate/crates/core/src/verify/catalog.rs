//! The fixed catalog of named checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bilinear_concomitant, leibniz_defect, PropertyCheck, SuiteConfig};
use crate::error::{Error, Result};
use crate::field::{self, NewtonOptions, PotentialSpec};
use crate::frac::{self, FracBackend, FracOrder, Side};
use crate::grid::{
    adjoint_defect, derivative, fourier, sample, weighted_inner, Domain, FourierMode, FunctionSpec, GridFunction,
};
use crate::laplacian::{symbolic, OperatorKind, OperatorSpec, Term};
use crate::measure::{MeasureProfile, MeasureTerm, ProfileMode, Weight};
use crate::special::{binomial_series, gamma};

type C = Complex64;

/// Grid sizes used across the catalog.
pub(super) const GRID_SIZES: &[usize] = &[64, 128, 256, 512, 1600, 4000];

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    rng: ChaCha8Rng,
}

struct Outcome {
    residual: f64,
    operator: String,
    inputs: Vec<String>,
    tolerance: Option<f64>,
    note: String,
}

impl Outcome {
    fn new(residual: f64, operator: impl Into<String>, inputs: &[&str]) -> Self {
        Self {
            residual,
            operator: operator.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            tolerance: None,
            note: String::new(),
        }
    }

    fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    fn note(mut self, note: String) -> Self {
        self.note = note;
        self
    }
}

struct Def {
    name: &'static str,
    anchor: &'static str,
    tolerance: f64,
    run: fn(&mut Ctx) -> Result<Outcome>,
}

macro_rules! def {
    ($name:literal, $anchor:literal, $tol:expr, $run:ident) => {
        Def { name: $name, anchor: $anchor, tolerance: $tol, run: $run }
    };
}

const CATALOG: &[Def] = &[
    def!("measure.oddness", "odd geometric coordinate", 1e-15, measure_oddness),
    def!("measure.weight_consistency", "weight is the derivative of q", 1e-6, measure_weight),
    def!("measure.monotone_flow", "monotone flow of the scaling exponent", 1e-12, measure_flow),
    def!("measure.binomial_mode", "binomial truncation", 0.0, measure_binomial),
    def!("grid.transform_roundtrip", "discrete Fourier round trip", 1e-12, grid_roundtrip),
    def!("grid.inner_symmetry", "conjugate symmetry of the weighted pairing", 1e-12, grid_inner),
    def!("grid.matrix_apply", "dense matrix equals operator", 1e-10, grid_matrix),
    def!("linearity.spectral", "linearity of fractional derivatives", 1e-12, linearity_spectral),
    def!("linearity.grunwald", "linearity of fractional derivatives", 1e-12, linearity_grunwald),
    def!("linearity.quadrature", "linearity of fractional derivatives", 1e-12, linearity_quadrature),
    def!("kernel.spectral", "trivial kernel", 1e-10, kernel_spectral),
    def!("kernel.grunwald", "trivial kernel", f64::NAN, kernel_grunwald),
    def!("kernel.quadrature", "trivial kernel", 1e-12, kernel_quadrature),
    def!("kernel.implicit", "trivial kernel", 1e-12, kernel_implicit),
    def!("semigroup.liouville", "fractional derivatives commute", 1e-10, semigroup_liouville),
    def!("semigroup.weyl", "fractional derivatives commute", 1e-10, semigroup_weyl),
    def!("duality.spectral", "Liouville and Weyl are adjoint", 1e-6, duality_spectral),
    def!("duality.quadrature", "Liouville and Weyl are adjoint", 1e-6, duality_quadrature),
    def!("antisymmetry.combo", "antisymmetric fractional derivative", 1e-8, antisymmetry_combo),
    def!("leibniz.fractional_series", "fractional Leibniz series", 1e-6, leibniz_series),
    def!("leibniz.series_monotone", "fractional Leibniz series", 1e-14, leibniz_series_monotone),
    def!("leibniz.antisymmetric_defect", "Leibniz defect of the fractional derivative", 1e-6, leibniz_antisymmetric),
    def!("leibniz.q_derivative", "exact product rule of the q-derivative", 1e-10, leibniz_q),
    def!("leibniz.ordinary", "classical product rule", 1e-10, leibniz_ordinary),
    def!("leibniz.trivial_kernel", "Leibniz defect with a constant", 1e-10, leibniz_kernel),
    def!("ibp.q_derivative", "integration by parts for the q-derivative", 1e-8, ibp_q),
    def!("composition.q_laplacian", "composition law of the q-derivative", 1e-8, composition_q),
    def!("composition.q_of_q", "q-derivative of q", 1e-8, composition_q_of_q),
    def!("self_adjoint.k_alpha", "self-adjoint weighted fractional Laplacian", 1e-8, self_adjoint_k),
    def!("self_adjoint.explicit_kinetic", "self-adjoint multiscale kinetic operator", 1e-6, self_adjoint_explicit),
    def!("concomitant.k_alpha", "bilinear concomitant", 1e-7, concomitant_k),
    def!("concomitant.antisymmetry", "bilinear concomitant", 0.0, concomitant_antisymmetry),
    def!("concomitant.periodic_derivative", "bilinear concomitant", 1e-10, concomitant_derivative),
    def!("reduction.flat_weight", "flat weight reduces to the fractional derivative", 1e-12, reduction_flat),
    def!("reduction.ordinary_term", "single ordinary term", 1e-12, reduction_ordinary),
    def!("reduction.plateau", "plateau differential", 1e-12, reduction_plateau),
    def!("limit.antisymmetric_unit", "antisymmetric derivative tends to the ordinary one", 2.0, limit_unit),
    def!("dispersion.explicit_square", "kinetic operator is a square", 1e-12, dispersion_square),
    def!("dispersion.bar_not_square", "kinetic operator is not quadratic", 1.0, dispersion_bar),
    def!("symbolic.seven_pieces", "seven pieces of the squared derivative", 0.0, symbolic_pieces),
    def!("implicit.small_scale", "implicit derivatives at small scales", 1e-2, implicit_small),
    def!("implicit.large_scale_trend", "implicit derivatives at large scales", 0.75, implicit_large_trend),
    def!("implicit.unit_limit", "implicit derivatives for unit exponent", 0.3, implicit_unit),
    def!("implicit.kinetic_small_scale", "implicit kinetic operator at small scales", 3e-2, implicit_kinetic_small),
    def!("solver.linear_residual", "equation of motion", 1e-9, solver_linear),
    def!("solver.dual_path", "equation of motion", 1e-10, solver_dual),
    def!("solver.newton_linear", "equation of motion", 1e-10, solver_newton_linear),
    def!("solver.newton_kink", "equation of motion", 1e-9, solver_kink),
    def!("solver.newton_iterations", "equation of motion", 8.0, solver_kink_iterations),
    def!("solver.newton_quadratic", "equation of motion", 10.0, solver_quadratic),
    def!("solver.perturbative", "equation of motion", 1.0, solver_perturbative),
];

pub fn check_names() -> Vec<&'static str> {
    CATALOG.iter().map(|d| d.name).collect()
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

pub(super) fn run(name: &str, cfg: &SuiteConfig) -> PropertyCheck {
    let def = CATALOG.iter().find(|d| d.name == name).expect("name taken from the catalog");
    let mut ctx = Ctx { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(name)) };
    let (outcome, error) = match (def.run)(&mut ctx) {
        Ok(o) => (o, None),
        Err(e) => (Outcome::new(f64::INFINITY, "", &[]), Some(e)),
    };
    let tolerance = cfg.tolerances.get(name).copied().or(outcome.tolerance).unwrap_or(def.tolerance);
    let residual = if outcome.residual.is_nan() { f64::INFINITY } else { outcome.residual.abs() };
    PropertyCheck {
        name: def.name.into(),
        anchor: def.anchor.into(),
        operator: outcome.operator,
        inputs: outcome.inputs,
        residual,
        tolerance,
        passed: residual <= tolerance,
        note: error.map(|e| e.to_string()).unwrap_or(outcome.note),
    }
}

// ---------------------------------------------------------------- helpers

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

fn periodic(half: f64, n: usize) -> Domain {
    Domain::periodic(-half, half, n).expect("valid domain")
}

fn binomial(alpha: f64) -> MeasureProfile {
    MeasureProfile::binomial(alpha, 1.0).expect("valid profile")
}

fn two_scale() -> MeasureProfile {
    let terms = vec![MeasureTerm::power_law(0.7, 10.0), MeasureTerm::power_law(0.4, 1.0)];
    MeasureProfile::new(terms, ProfileMode::Full).expect("valid profile")
}

fn oscillatory() -> MeasureProfile {
    let t = MeasureTerm::power_law(0.5, 1.0).with_oscillation(0.05, 0.0, 4.0, 1.0);
    MeasureProfile::new(vec![t], ProfileMode::Full).expect("valid profile")
}

fn rel(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.max_abs_diff(b)? / b.max_abs().max(f64::MIN_POSITIVE))
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Seeded band-limited sum of harmonics up to `max_harmonic`, real when asked.
fn random_fn(rng: &mut ChaCha8Rng, d: &Domain, max_harmonic: usize, real: bool) -> Result<GridFunction> {
    let k0 = 2.0 * PI / d.length();
    let mut modes = Vec::new();
    for _ in 0..6 {
        let m = rng.random_range(0..=max_harmonic) as f64;
        let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if real {
            modes.push(FourierMode { k: k0 * m, re: 0.5 * a, im: 0.5 * b });
            modes.push(FourierMode { k: -k0 * m, re: 0.5 * a, im: -0.5 * b });
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            modes.push(FourierMode { k: sign * k0 * m, re: a, im: b });
        }
    }
    sample(&FunctionSpec::FourierSum { modes }, d)
}

fn random_complex(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn spec(kind: OperatorKind) -> OperatorSpec {
    OperatorSpec::new(kind)
}

fn anti(alpha: f64) -> OperatorKind {
    OperatorKind::Combo { alpha, c: [0.5, 0.0], cbar: [-0.5, 0.0] }
}

/// `(±ik)^β` for any real `β`, zero at `k = 0`.
fn power(beta: f64, side: Side, k: f64) -> C {
    if k == 0.0 {
        return C::new(0.0, 0.0);
    }
    let s = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    C::new(0.0, s * k).powf(beta)
}

// ---------------------------------------------------------------- measure

fn measure_oddness(ctx: &mut Ctx) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        for _ in 0..1000 {
            let x: f64 = ctx.rng.random_range(-50.0..50.0);
            let q = p.q(x);
            worst = worst.max((p.q(-x) + q).abs() / q.abs().max(1.0));
        }
    }
    Ok(Outcome::new(worst, "q", &["binomial 0.5", "two-scale", "oscillatory", "1000 random x"]))
}

fn measure_weight(ctx: &mut Ctx) -> Result<Outcome> {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        for _ in 0..200 {
            let r = ctx.rng.random_range(0.1f64.ln()..50f64.ln()).exp();
            let x = if ctx.rng.random_bool(0.5) { r } else { -r };
            let fd = (p.q(x + h) - p.q(x - h)) / (2.0 * h);
            let v = p.weight(x)?;
            worst = worst.max((fd - v).abs() / v.abs());
        }
    }
    Ok(Outcome::new(worst, "v", &["binomial 0.5", "two-scale", "oscillatory", "0.1 <= |x| <= 50"]))
}

fn measure_flow(_: &mut Ctx) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for p in [binomial(0.3), binomial(0.5), binomial(0.8), two_scale()] {
        let lo = p.min_alpha();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..400 {
            let x = 10f64.powf(-4.0 + 8.0 * i as f64 / 399.0);
            let a = p.local_scaling_exponent(x)?;
            worst = worst.max(prev - a).max(lo - a).max(a - 1.0);
            prev = a;
        }
    }
    Ok(Outcome::new(worst, "local scaling exponent", &["binomial 0.3/0.5/0.8", "two-scale", "1e-4 <= x <= 1e4"]))
}

fn measure_binomial(_: &mut Ctx) -> Result<Outcome> {
    let t = two_scale();
    let first = t.active_terms()[0];
    let truncated = MeasureProfile::new(t.active_terms().to_vec(), ProfileMode::Binomial)?;
    let single = MeasureProfile::new(vec![first], ProfileMode::Full)?;
    let mut worst = 0.0f64;
    for i in 1..=200 {
        let x = 0.05 * i as f64 - 5.025;
        worst = worst.max((truncated.q(x) - single.q(x)).abs());
        worst = worst.max((truncated.weight(x)? - single.weight(x)?).abs());
    }
    Ok(Outcome::new(worst, "q, v", &["two-scale profile in binomial mode"]))
}

// ---------------------------------------------------------------- grid

fn grid_roundtrip(ctx: &mut Ctx) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for n in [64, 255, 256, 1000] {
        let v: Vec<C> = (0..n).map(|_| random_complex(&mut ctx.rng)).collect();
        let back = fourier::inverse(&fourier::forward(&v));
        let scale = max(v.iter().map(|z| z.norm()));
        worst = worst.max(max(v.iter().zip(&back).map(|(a, b)| (a - b).norm())) / scale);
    }
    Ok(Outcome::new(worst, "fourier transform", &["random complex samples"]))
}

fn grid_inner(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let w = Weight::Profile(binomial(0.5));
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random_fn(&mut ctx.rng, &d, 32, false)?;
        let g = random_fn(&mut ctx.rng, &d, 32, false)?;
        let fg = weighted_inner(&f, &g, &w)?;
        let gf = weighted_inner(&g, &f, &w)?;
        worst = worst.max((fg - gf.conj()).norm() / fg.norm().max(f64::MIN_POSITIVE));
    }
    Ok(Outcome::new(worst, "weighted inner product", &["binomial 0.5", "random band-limited"]))
}

fn grid_matrix(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 128);
    let op = spec(OperatorKind::KAlpha { alpha: 0.5 }).with_weight(binomial(0.5));
    let m = op.to_matrix(&d)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = GridFunction::new(d, (0..128).map(|_| random_complex(&mut ctx.rng)).collect())?;
        worst = worst.max(rel(&m.apply(&v)?, &op.apply(&v)?)?);
    }
    Ok(Outcome::new(worst, "k_alpha(0.5), binomial 0.5", &["100 random vectors"]))
}

// ---------------------------------------------------------------- fractional operators

fn linearity(ctx: &mut Ctx, backend: FracBackend) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 1.4] {
        let op = spec(OperatorKind::Liouville { alpha }).with_backend(backend);
        let f = random_fn(&mut ctx.rng, &d, 32, false)?;
        let g = random_fn(&mut ctx.rng, &d, 32, false)?;
        let (a, b) = (random_complex(&mut ctx.rng), random_complex(&mut ctx.rng));
        let lhs = op.apply(&f.scale(a).add_scaled(b, &g)?)?;
        let rhs = op.apply(&f)?.scale(a).add_scaled(b, &op.apply(&g)?)?;
        worst = worst.max(rel(&lhs, &rhs)?);
    }
    Ok(Outcome::new(worst, format!("liouville, {}", backend.name()), &["random a, b, f, g"]))
}

fn linearity_spectral(ctx: &mut Ctx) -> Result<Outcome> {
    linearity(ctx, FracBackend::Spectral)
}

fn linearity_grunwald(ctx: &mut Ctx) -> Result<Outcome> {
    let b = ctx.cfg.gl_backend();
    linearity(ctx, b)
}

fn linearity_quadrature(ctx: &mut Ctx) -> Result<Outcome> {
    let b = ctx.cfg.quadrature_backend();
    linearity(ctx, b)
}

fn kernel_spectral(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let two = [Term::new(1.0, 1.0), Term::new(0.5, 0.5)];
    let bar = [Term::new(1.0, 1.0), Term::new(0.5, 0.75)];
    let ops = vec![
        spec(OperatorKind::Derivative),
        spec(OperatorKind::Liouville { alpha: 0.5 }),
        spec(OperatorKind::Weyl { alpha: 0.5 }),
        spec(OperatorKind::Liouville { alpha: 1.5 }),
        spec(anti(0.5)),
        spec(OperatorKind::SymmetricM2 { alpha: 0.75 }),
        spec(OperatorKind::QDeriv),
        spec(OperatorKind::QDeriv).with_weight(binomial(0.5)),
        spec(OperatorKind::QLaplacian),
        spec(OperatorKind::QLaplacian).with_weight(binomial(0.5)),
        spec(OperatorKind::WeightedFrac { alpha: 0.5 }),
        spec(OperatorKind::KAlpha { alpha: 0.5 }),
        spec(OperatorKind::ExplicitD { terms: two.to_vec() }),
        spec(OperatorKind::ExplicitKinetic { terms: two.to_vec() }),
        spec(OperatorKind::BarKinetic { terms: bar.to_vec() }),
        spec(OperatorKind::PlateauDiff { alpha: 0.5 }),
    ];
    let mut worst = 0.0f64;
    for op in &ops {
        worst = worst.max(op.apply(&one)?.max_abs());
    }
    Ok(Outcome::new(worst, "all spectral operators", &["constant 1"]))
}

/// Largest truncated response to a constant, beyond the first `J` nodes where
/// the full stencil fits.
fn gl_constant_residual(alpha: f64, truncation: usize) -> Result<f64> {
    let n = 2 * truncation.max(1);
    let d = Domain::bounded(0.0, n as f64, n)?;
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let order = FracOrder::new(alpha)?;
    let backend = FracBackend::GrunwaldLetnikov { truncation };
    let left = frac::fractional(&one, order, Side::Left, backend)?;
    let right = frac::fractional(&one, order, Side::Right, backend)?;
    let j = truncation.min(n - 1);
    Ok(left.max_abs_in(j..n).max(right.max_abs_in(0..n - j)))
}

fn kernel_grunwald(ctx: &mut Ctx) -> Result<Outcome> {
    let alpha = 0.5;
    let fit: Vec<usize> = vec![64, 256, 1024, 4096];
    let mut log_c = 0.0;
    for &j in &fit {
        log_c += (gl_constant_residual(alpha, j)? * (j as f64).powf(alpha)).ln();
    }
    let c = (log_c / fit.len() as f64).exp();
    let reference = ctx.cfg.gl_reference_truncation;
    let tolerance = 2.0 * c * (reference as f64).powf(-alpha);
    let residual = gl_constant_residual(alpha, ctx.cfg.gl_truncation)?;
    Ok(Outcome::new(residual, format!("grunwald_letnikov(J = {}), alpha 0.5", ctx.cfg.gl_truncation), &["constant 1"])
        .tolerance(tolerance)
        .note(format!("fitted c = {c:.6}, bound 2 c J^-alpha at J = {reference}")))
}

fn kernel_quadrature(ctx: &mut Ctx) -> Result<Outcome> {
    let b = ctx.cfg.quadrature_backend();
    let mut worst = 0.0f64;
    for d in [periodic(PI, 256), Domain::bounded(-PI, PI, 256)?] {
        let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
        for alpha in [0.3, 0.5, 1.4] {
            let order = FracOrder::new(alpha)?;
            for side in [Side::Left, Side::Right] {
                worst = worst.max(frac::fractional(&one, order, side, b)?.max_abs());
            }
        }
    }
    Ok(Outcome::new(worst, "liouville, weyl; singular_quadrature", &["constant 1"]))
}

fn kernel_implicit(ctx: &mut Ctx) -> Result<Outcome> {
    let d = Domain::bounded(-4.0, 4.0, 256)?;
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let mut worst = 0.0f64;
    for kind in [OperatorKind::ImplicitLeft, OperatorKind::ImplicitRight] {
        for p in [binomial(0.5), two_scale()] {
            let op = spec(kind.clone()).with_weight(p).with_backend(ctx.cfg.quadrature_backend());
            worst = worst.max(op.apply(&one)?.max_abs());
        }
    }
    Ok(Outcome::new(worst, "implicit_left, implicit_right", &["constant 1", "binomial 0.5", "two-scale"]))
}

fn semigroup(side: Side) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, 4.0, -3.0] {
        let f = sample(&FunctionSpec::PlaneWave { k }, &d)?;
        for (a, b) in [(0.3, 0.4), (0.3, 0.7), (0.5, 0.9), (0.7, 1.2)] {
            let step = |g: &GridFunction, x: f64| frac::fractional(g, FracOrder::new(x)?, side, FracBackend::Spectral);
            let twice = step(&step(&f, a)?, b)?;
            worst = worst.max(rel(&twice, &step(&f, a + b)?)?);
        }
    }
    let name = if side == Side::Left { "liouville" } else { "weyl" };
    Ok(Outcome::new(worst, name, &["plane waves k = 1, 2, 4, -3"]))
}

fn semigroup_liouville(_: &mut Ctx) -> Result<Outcome> {
    semigroup(Side::Left)
}

fn semigroup_weyl(_: &mut Ctx) -> Result<Outcome> {
    semigroup(Side::Right)
}

const GAUSSIAN_PAIRS: [(f64, f64, f64, f64); 3] = [(0.0, 1.0, 0.0, 1.5), (-2.0, 1.0, 1.0, 0.8), (3.0, 2.0, -1.0, 1.0)];

fn duality(d: &Domain, backend: FracBackend, alphas: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (c1, s1, c2, s2) in GAUSSIAN_PAIRS {
        let f = sample(&FunctionSpec::gaussian(c1, s1), d)?;
        let g = sample(&FunctionSpec::gaussian(c2, s2), d)?;
        for &alpha in alphas {
            let order = FracOrder::new(alpha)?;
            let lhs = weighted_inner(&f, &frac::liouville(&g, order, backend)?, &Weight::Flat)?;
            let rhs = weighted_inner(&frac::weyl(&f, order, backend)?, &g, &Weight::Flat)?;
            worst = worst.max((lhs - rhs).norm() / lhs.norm());
        }
    }
    Ok(worst)
}

fn duality_spectral(_: &mut Ctx) -> Result<Outcome> {
    let r = duality(&periodic(20.0, 512), FracBackend::Spectral, &[0.3, 0.5, 0.9, 1.4])?;
    Ok(Outcome::new(r, "liouville vs weyl, spectral", &["Gaussian pairs on [-20, 20)"]))
}

fn duality_quadrature(ctx: &mut Ctx) -> Result<Outcome> {
    let d = Domain::bounded(-20.0, 20.0, 1600)?;
    let r = duality(&d, ctx.cfg.quadrature_backend(), &[0.3, 0.5, 0.9])?;
    Ok(Outcome::new(r, "liouville vs weyl, singular_quadrature", &["Gaussian pairs on [-20, 20]"]))
}

fn antisymmetry_combo(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 0.9] {
        worst = worst.max(spec(anti(alpha)).to_matrix(&d)?.antisymmetry_defect());
    }
    Ok(Outcome::new(worst, "combo (1/2, -1/2)", &["alpha = 0.3, 0.5, 0.9", "n = 256"]))
}

// ---------------------------------------------------------------- Leibniz rules

/// Plane waves `e^{iκx}`, `e^{ikx}` on a grid that holds both exactly.
fn leibniz_waves() -> Result<(GridFunction, GridFunction, f64, f64)> {
    let (kappa, k) = (0.25, 1.0);
    let d = periodic(4.0 * PI, 256);
    Ok((sample(&FunctionSpec::PlaneWave { k: kappa }, &d)?, sample(&FunctionSpec::PlaneWave { k }, &d)?, kappa, k))
}

/// `Σ_{lo ≤ j ≤ J} C(α,j) (∂^j f)(∂^{α-j} g)` for plane waves `f = e^{iκx}`,
/// `g = e^{ikx}`, every factor taken from its multiplier.
fn leibniz_partial(
    fg: &GridFunction,
    kappa: f64,
    k: f64,
    alpha: f64,
    side: Side,
    lo: usize,
    count: usize,
) -> GridFunction {
    let coeffs = binomial_series(alpha, count + 1);
    let total: C = coeffs
        .iter()
        .enumerate()
        .skip(lo)
        .map(|(j, c)| c * power(j as f64, side, kappa) * power(alpha - j as f64, side, k))
        .sum();
    fg.scale(total)
}

fn series_residuals(max_terms: usize) -> Result<Vec<f64>> {
    let (f, g, kappa, k) = leibniz_waves()?;
    let alpha = 0.5;
    let fg = f.mul(&g)?;
    let exact = frac::liouville(&fg, FracOrder::new(alpha)?, FracBackend::Spectral)?;
    (0..=max_terms).map(|j| leibniz_partial(&fg, kappa, k, alpha, Side::Left, 0, j).max_abs_diff(&exact)).collect()
}

fn leibniz_series(_: &mut Ctx) -> Result<Outcome> {
    let r = series_residuals(40)?;
    Ok(Outcome::new(r[40], "liouville(0.5)", &["kappa = 0.25", "k = 1", "J = 40"]))
}

fn leibniz_series_monotone(_: &mut Ctx) -> Result<Outcome> {
    let r = series_residuals(40)?;
    let worst = max((2..40).filter(|&j| r[j] > 1e-13).map(|j| r[j + 1] - r[j]));
    Ok(Outcome::new(worst, "liouville(0.5)", &["kappa = 0.25", "k = 1", "2 <= J <= 40"])
        .note("largest increase of the series residual above the rounding floor".into()))
}

fn leibniz_antisymmetric(_: &mut Ctx) -> Result<Outcome> {
    let (f, g, kappa, k) = leibniz_waves()?;
    let alpha = 0.5;
    let op = spec(anti(alpha));
    let direct = leibniz_defect(&op, &f, &g)?;
    let fg = f.mul(&g)?;
    let left = leibniz_partial(&fg, kappa, k, alpha, Side::Left, 1, 40);
    let right = leibniz_partial(&fg, kappa, k, alpha, Side::Right, 1, 40);
    let series = left.sub(&right)?.scale(re(0.5)).sub(&op.apply(&f)?.mul(&g)?)?;
    Ok(Outcome::new(
        direct.max_abs_diff(&series)?,
        "combo (1/2, -1/2), alpha 0.5",
        &["kappa = 0.25", "k = 1", "J = 40"],
    ))
}

fn leibniz_q(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        let op = spec(OperatorKind::QDeriv).with_weight(p);
        let f = random_fn(&mut ctx.rng, &d, 32, false)?;
        let g = random_fn(&mut ctx.rng, &d, 32, false)?;
        worst = worst.max(leibniz_defect(&op, &f, &g)?.max_abs());
    }
    Ok(Outcome::new(worst, "q_deriv", &["binomial 0.5", "two-scale", "oscillatory", "random band-limited"]))
}

fn leibniz_ordinary(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    let g = random_fn(&mut ctx.rng, &d, 32, false)?;
    let x = leibniz_defect(&spec(OperatorKind::Derivative), &f, &g)?;
    Ok(Outcome::new(x.max_abs(), "derivative", &["random band-limited"]))
}

fn leibniz_kernel(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let ops = [
        spec(OperatorKind::Derivative),
        spec(OperatorKind::QDeriv).with_weight(binomial(0.5)),
        spec(anti(0.5)),
        spec(OperatorKind::ExplicitD { terms: vec![Term::new(1.0, 1.0), Term::new(0.4, 0.6)] }),
        spec(OperatorKind::PlateauDiff { alpha: 0.7 }),
    ];
    let mut worst = 0.0f64;
    for op in &ops {
        worst = worst.max(leibniz_defect(op, &f, &one)?.max_abs());
        worst = worst.max(leibniz_defect(op, &one, &f)?.max_abs());
    }
    Ok(Outcome::new(worst, "derivative, q_deriv, combo, explicit_d, plateau_diff", &["X(f, 1)", "X(1, f)"]))
}

// ---------------------------------------------------------------- q-derivative

fn ibp_q(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        let w = Weight::Profile(p);
        let op = spec(OperatorKind::QDeriv).with_weight(w.clone());
        let f = random_fn(&mut ctx.rng, &d, 32, false)?;
        let g = random_fn(&mut ctx.rng, &d, 32, false)?;
        let a = weighted_inner(&f, &op.apply(&g)?, &w)?;
        let b = weighted_inner(&op.apply(&f)?, &g, &w)?;
        worst = worst.max((a + b).norm());
    }
    Ok(Outcome::new(worst, "q_deriv", &["binomial 0.5", "two-scale", "oscillatory", "random band-limited"]))
}

fn composition_domain() -> Result<Domain> {
    Domain::bounded(0.5, 4.5, 4000)
}

fn composition_q(ctx: &mut Ctx) -> Result<Outcome> {
    let d = composition_domain()?;
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        let w = Weight::Profile(p.clone());
        let k0 = 2.0 * PI / d.length();
        let modes = (0..4)
            .map(|_| FourierMode {
                k: k0 * ctx.rng.random_range(-2..=2) as f64,
                re: ctx.rng.random_range(-1.0..1.0),
                im: ctx.rng.random_range(-1.0..1.0),
            })
            .collect();
        let fs = FunctionSpec::FourierSum { modes };
        let f = sample(&fs, &d)?;
        let twice = spec(OperatorKind::QLaplacian).with_weight(w).apply(&f)?;
        let mut expected = Vec::with_capacity(d.n());
        for x in d.nodes() {
            let (v, dv) = (p.weight(x)?, p.weight_derivative(x)?);
            expected.push(fs.derivative(x, 2)? / (v * v) - fs.derivative(x, 1)? * dv / (v * v * v));
        }
        let expected = GridFunction::new(d, expected)?;
        let bulk = d.bulk(0.05);
        let err = twice.sub(&expected)?.max_abs_in(bulk.clone());
        worst = worst.max(err / expected.max_abs_in(bulk));
    }
    Ok(Outcome::new(worst, "q_laplacian", &["binomial 0.5", "two-scale", "oscillatory", "random smooth on [0.5, 4.5]"]))
}

fn composition_q_of_q(_: &mut Ctx) -> Result<Outcome> {
    let d = composition_domain()?;
    let mut worst = 0.0f64;
    for p in [binomial(0.5), two_scale(), oscillatory()] {
        let q = GridFunction::from_fn(d, |x| re(p.q(x)));
        let dq = spec(OperatorKind::QDeriv).with_weight(p).apply(&q)?;
        worst = worst.max(dq.values()[d.bulk(0.05)].iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max));
    }
    Ok(Outcome::new(worst, "q_deriv", &["samples of q", "bulk of [0.5, 4.5]"]))
}

// ---------------------------------------------------------------- self-adjointness

fn self_adjoint_k(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 512);
    let mut worst = 0.0f64;
    for w in [Weight::Flat, Weight::Profile(binomial(0.5)), Weight::Profile(oscillatory())] {
        let m = spec(OperatorKind::KAlpha { alpha: 0.5 }).with_weight(w.clone()).to_matrix(&d)?;
        worst = worst.max(adjoint_defect(&m, &w)?);
    }
    Ok(Outcome::new(worst, "k_alpha(0.5)", &["flat", "binomial 0.5", "oscillatory A = 0.05", "n = 512"]))
}

fn self_adjoint_explicit(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let w = Weight::Profile(binomial(0.5));
    let terms = vec![Term::new(1.0, 1.0), Term::new(0.3, 0.5)];
    let m = spec(OperatorKind::ExplicitKinetic { terms }).with_weight(w.clone()).to_matrix(&d)?;
    Ok(Outcome::new(adjoint_defect(&m, &w)?, "explicit_kinetic [(1, 1), (0.3, 0.5)]", &["binomial 0.5", "n = 256"]))
}

fn concomitant_k(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let mut worst = 0.0f64;
    for p in [binomial(0.5), oscillatory()] {
        let w = Weight::Profile(p);
        let op = spec(OperatorKind::WeightedFrac { alpha: 0.5 }).with_weight(w.clone());
        let f = random_fn(&mut ctx.rng, &d, 32, true)?;
        let h = random_fn(&mut ctx.rng, &d, 32, true)?;
        worst = worst.max(weighted_inner(&one, &bilinear_concomitant(&op, &f, &h)?, &w)?.norm());
    }
    Ok(Outcome::new(worst, "weighted_frac(0.5) squared", &["binomial 0.5", "oscillatory", "random real"]))
}

fn concomitant_antisymmetry(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let op = spec(OperatorKind::WeightedFrac { alpha: 0.5 }).with_weight(binomial(0.5));
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    Ok(Outcome::new(bilinear_concomitant(&op, &f, &f)?.max_abs(), "weighted_frac(0.5)", &["f = h"]))
}

fn concomitant_derivative(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d)?;
    let f = random_fn(&mut ctx.rng, &d, 8, false)?;
    let h = random_fn(&mut ctx.rng, &d, 8, false)?;
    let y = bilinear_concomitant(&spec(OperatorKind::Derivative), &f, &h)?;
    Ok(Outcome::new(weighted_inner(&one, &y, &Weight::Flat)?.norm(), "derivative", &["random band-limited"]))
}

// ---------------------------------------------------------------- reductions and limits

fn reduction_flat(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 0.9] {
        let weighted = spec(OperatorKind::WeightedFrac { alpha }).apply(&f)?;
        worst = worst.max(rel(&weighted, &spec(anti(alpha)).apply(&f)?)?);
    }
    Ok(Outcome::new(worst, "weighted_frac vs combo", &["flat weight"]))
}

fn reduction_ordinary(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    let df = derivative::first(&f);
    let single = spec(OperatorKind::ExplicitD { terms: vec![Term::new(1.0, 1.0)] }).apply(&f)?;
    let zero = spec(OperatorKind::ExplicitD { terms: vec![Term::new(1.0, 1.0), Term::new(0.0, 0.6)] }).apply(&f)?;
    let kinetic = spec(OperatorKind::ExplicitKinetic { terms: vec![Term::new(1.0, 1.0)] }).apply(&f)?;
    let worst = rel(&single, &df)?.max(rel(&zero, &df)?).max(rel(&kinetic, &derivative::first(&df))?);
    Ok(Outcome::new(worst, "explicit_d, explicit_kinetic", &["[(1, 1)]", "[(1, 1), (0, 0.6)]"]))
}

fn reduction_plateau(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let f = random_fn(&mut ctx.rng, &d, 32, false)?;
    let unit = spec(OperatorKind::PlateauDiff { alpha: 1.0 }).apply(&f)?;
    let mut worst = rel(&unit, &derivative::first(&f))?;
    let wave = sample(&FunctionSpec::PlaneWave { k: 1.0 }, &d)?;
    let half = spec(OperatorKind::PlateauDiff { alpha: 0.5 }).apply(&wave)?;
    worst = worst.max(rel(&half, &wave.scale(C::new(0.0, (PI / 4.0).sin())))?);
    Ok(Outcome::new(worst, "plateau_diff", &["alpha = 1 vs derivative", "alpha = 0.5 on a plane wave"]))
}

fn limit_unit(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let alpha = 0.999;
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, 4.0] {
        let wave = sample(&FunctionSpec::PlaneWave { k }, &d)?;
        worst = worst.max(rel(&spec(anti(alpha)).apply(&wave)?, &derivative::first(&wave))?);
    }
    Ok(Outcome::new(worst / (1.0 - alpha), "combo (1/2, -1/2), alpha = 0.999", &["plane waves k = 1, 2, 4"])
        .note("relative error divided by 1 - alpha".into()))
}

// ---------------------------------------------------------------- dispersion and structure

fn dispersion_square(_: &mut Ctx) -> Result<Outcome> {
    let terms = vec![Term::new(1.0, 1.0), Term::new(0.7, 0.6)];
    let d = spec(OperatorKind::ExplicitD { terms: terms.clone() });
    let kin = spec(OperatorKind::ExplicitKinetic { terms });
    let mut worst = 0.0f64;
    for i in 0..20 {
        let k = -4.75 + 0.5 * i as f64;
        let (mk, md) = (field::dispersion(&kin, k)?, field::dispersion(&d, k)?);
        worst = worst.max((mk - md * md).norm() / mk.norm().max(1.0));
    }
    Ok(Outcome::new(worst, "explicit_kinetic vs explicit_d", &["20 values of k"]))
}

fn dispersion_bar(_: &mut Ctx) -> Result<Outcome> {
    let alpha = 0.75;
    let bar = field::dispersion(&spec(OperatorKind::BarKinetic { terms: vec![Term::new(1.0, alpha)] }), 1.0)?;
    let single = field::dispersion(&spec(OperatorKind::WeightedFrac { alpha }), 1.0)?;
    let gap = (bar - single * single).norm();
    Ok(Outcome::new(0.1 / gap, "bar_kinetic vs weighted_frac squared", &["alpha = 0.75", "k = 1"])
        .note(format!("gap {gap:.4}; residual 0.1/gap")))
}

fn symbolic_pieces(_: &mut Ctx) -> Result<Outcome> {
    let n = symbolic::two_term_square().len();
    Ok(Outcome::new((n as f64 - 7.0).abs(), "symbolic square", &["two-term derivative"]).note(format!("{n} pieces")))
}

// ---------------------------------------------------------------- implicit operators

/// Least-squares constant `c` with `a ≈ c b` on `range` and the relative
/// deviation `max |a - c b| / max |c b|`.
fn fitted(a: &GridFunction, b: &GridFunction, range: std::ops::Range<usize>) -> (C, f64) {
    let dot: C = range.clone().map(|j| b[j].conj() * a[j]).sum();
    let norm: f64 = range.clone().map(|j| b[j].norm_sqr()).sum();
    let c = dot / norm;
    let num = range.clone().map(|j| (a[j] - c * b[j]).norm()).fold(0.0, f64::max);
    let den = range.map(|j| (c * b[j]).norm()).fold(0.0, f64::max);
    (c, num / den)
}

/// Deviation of `implicit` from `α Γ(1 − α)` times the fractional derivative
/// of the same side, for a Gaussian of width `sigma` with `ℓ = 1`.
pub(crate) fn implicit_small_scale(alpha: f64, sigma: f64, n: usize, grading: FracBackend) -> Result<f64> {
    let p = binomial(alpha);
    let d = Domain::bounded(-10.0 * sigma, 10.0 * sigma, n)?;
    let f = sample(&FunctionSpec::gaussian(0.0, sigma), &d)?;
    let c = alpha * gamma(1.0 - alpha);
    let mut worst = 0.0f64;
    for (kind, side) in [(OperatorKind::ImplicitLeft, Side::Left), (OperatorKind::ImplicitRight, Side::Right)] {
        let imp = spec(kind).with_weight(p.clone()).with_backend(grading).apply(&f)?;
        let frac = frac::fractional(&f, FracOrder::new(alpha)?, side, grading)?.scale(re(c));
        let bulk = d.bulk(0.3);
        worst = worst.max(imp.sub(&frac)?.max_abs_in(bulk.clone()) / frac.max_abs_in(bulk));
    }
    Ok(worst)
}

/// Deviation of `implicit_left` from the best multiple of `∂f` in the bulk,
/// for a Gaussian of width `sigma` with `ℓ = 1`.
pub(crate) fn implicit_large_scale(alpha: f64, sigma: f64, grading: FracBackend) -> Result<f64> {
    let p = binomial(alpha);
    let d = Domain::bounded(-10.0 * sigma, 10.0 * sigma, 2048)?;
    let f = sample(&FunctionSpec::gaussian(0.0, sigma), &d)?;
    let df = derivative::first(&f);
    let mut worst = 0.0f64;
    for kind in [OperatorKind::ImplicitLeft, OperatorKind::ImplicitRight] {
        let imp = spec(kind).with_weight(p.clone()).with_backend(grading).apply(&f)?;
        worst = worst.max(fitted(&imp, &df, d.bulk(0.2)).1);
    }
    Ok(worst)
}

fn implicit_small(ctx: &mut Ctx) -> Result<Outcome> {
    let r = implicit_small_scale(0.4, 1e-3, 512, ctx.cfg.quadrature_backend())?;
    Ok(Outcome::new(r, "implicit_left, implicit_right; binomial 0.4", &["Gaussian sigma = 1e-3"]))
}

fn implicit_large_trend(ctx: &mut Ctx) -> Result<Outcome> {
    let b = ctx.cfg.quadrature_backend();
    let near = implicit_large_scale(0.4, 1e2, b)?;
    let far = implicit_large_scale(0.4, 1e4, b)?;
    Ok(Outcome::new(far / near, "implicit_left, implicit_right; binomial 0.4", &["sigma = 1e2", "sigma = 1e4"])
        .note(format!("deviation from a multiple of the derivative {near:.3} -> {far:.3}")))
}

/// Fitted order `p` of the deviation `~ |1 − α|^p` at `α = 0.9, 0.99`.
pub(crate) fn implicit_unit_order(grading: FracBackend) -> Result<(f64, f64, f64)> {
    let e1 = implicit_large_scale(0.9, 1.0, grading)?;
    let e2 = implicit_large_scale(0.99, 1.0, grading)?;
    Ok(((e1 / e2).log10(), e1, e2))
}

fn implicit_unit(ctx: &mut Ctx) -> Result<Outcome> {
    let (order, e1, e2) = implicit_unit_order(ctx.cfg.quadrature_backend())?;
    Ok(Outcome::new(order - 1.0, "implicit_left, implicit_right", &["alpha = 0.9, 0.99", "sigma = 1"])
        .note(format!("errors {e1:.4}, {e2:.4}; fitted order {order:.3}")))
}

fn implicit_kinetic_small(ctx: &mut Ctx) -> Result<Outcome> {
    let alpha = 0.4;
    let sigma = 1e-3;
    let b = ctx.cfg.quadrature_backend();
    let p = binomial(alpha);
    let d = Domain::bounded(0.5 - 10.0 * sigma, 0.5 + 10.0 * sigma, 512)?;
    let f = sample(&FunctionSpec::gaussian(0.5, sigma), &d)?;
    let imp = spec(OperatorKind::ImplicitKinetic).with_weight(p.clone()).with_backend(b).apply(&f)?;
    let k = spec(OperatorKind::KAlpha { alpha }).with_weight(p).with_backend(b).apply(&f)?;
    let c = alpha * gamma(1.0 - alpha);
    let k = k.scale(re(c * c));
    let bulk = d.bulk(0.3);
    let r = imp.sub(&k)?.max_abs_in(bulk.clone()) / k.max_abs_in(bulk);
    Ok(Outcome::new(r, "implicit_kinetic vs k_alpha; binomial 0.4", &["Gaussian sigma = 1e-3 at x = 0.5"]))
}

// ---------------------------------------------------------------- field solver

fn two_term_kinetic() -> OperatorSpec {
    spec(OperatorKind::ExplicitKinetic { terms: vec![Term::new(1.0, 1.0), Term::new(0.5, 0.6)] })
}

fn solver_linear(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 256);
    let mut worst = 0.0f64;
    for (op, m2) in [(two_term_kinetic(), 1.0), (spec(OperatorKind::KAlpha { alpha: 0.5 }), 2.0)] {
        let j = random_fn(&mut ctx.rng, &d, 32, false)?;
        let res = field::solve_linear_spectral(&op, &PotentialSpec::new(m2, 0.0).with_source(j), &d)?;
        worst = worst.max(res.residual_norm);
    }
    Ok(Outcome::new(worst, "explicit_kinetic, k_alpha", &["random band-limited source"]))
}

fn solver_dual(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 128);
    let op = two_term_kinetic();
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let j = random_fn(&mut ctx.rng, &d, 16, false)?;
        let pot = PotentialSpec::new(1.5, 0.0).with_source(j);
        let a = field::solve_linear_spectral(&op, &pot, &d)?;
        let b = field::solve_linear_dense(&op, &pot, &d)?;
        worst = worst.max(a.phi.max_abs_diff(&b.phi)?);
    }
    Ok(Outcome::new(worst, "explicit_kinetic [(1, 1), (0.5, 0.6)]", &["random band-limited source", "n = 128"]))
}

fn solver_newton_linear(ctx: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 128);
    let op = two_term_kinetic();
    let j = random_fn(&mut ctx.rng, &d, 16, false)?;
    let pot = PotentialSpec::new(1.5, 0.0).with_source(j);
    let lin = field::solve_linear(&op, &pot, &d)?;
    let opts = NewtonOptions { tol: 1e-300, max_iter: 1, pinned_ends: false };
    let newton = field::solve_nonlinear(&op, &pot, &GridFunction::zeros(d), opts)?;
    Ok(Outcome::new(newton.phi.max_abs_diff(&lin.phi)?, "explicit_kinetic", &["lambda = 0", "one Newton step"]))
}

/// The documented quartic regression case: `φ'' = φ³ − φ` on `[−10, 10]`
/// with pinned ends, started from `tanh(x)`.
pub fn kink_problem() -> Result<(OperatorSpec, PotentialSpec, GridFunction)> {
    let d = Domain::bounded(-10.0, 10.0, 256)?;
    let op = spec(OperatorKind::ExplicitKinetic { terms: vec![Term::new(1.0, 1.0)] });
    let guess = sample(&FunctionSpec::Tanh { center: 0.0, width: 1.0 }, &d)?;
    Ok((op, PotentialSpec::new(-1.0, 1.0), guess))
}

pub fn kink_options() -> NewtonOptions {
    NewtonOptions { tol: 1e-10, max_iter: 20, pinned_ends: true }
}

fn solver_kink(_: &mut Ctx) -> Result<Outcome> {
    let (op, pot, guess) = kink_problem()?;
    let res = field::solve_nonlinear(&op, &pot, &guess, kink_options())?;
    Ok(Outcome::new(res.residual_norm, "explicit_kinetic [(1, 1)]", &["m2 = -1", "lambda = 1", "tanh guess"])
        .note(format!("{} iterations", res.iterations)))
}

fn solver_kink_iterations(_: &mut Ctx) -> Result<Outcome> {
    let (op, pot, guess) = kink_problem()?;
    let res = field::solve_nonlinear(&op, &pot, &guess, kink_options())?;
    let it = if res.converged { res.iterations as f64 } else { f64::INFINITY };
    Ok(Outcome::new(it, "explicit_kinetic [(1, 1)]", &["m2 = -1", "lambda = 1", "tanh guess"]))
}

fn solver_quadratic(_: &mut Ctx) -> Result<Outcome> {
    let (op, pot, guess) = kink_problem()?;
    let res = field::solve_nonlinear(&op, &pot, &guess, kink_options())?;
    if !res.converged {
        return Err(Error::SingularJacobian { iteration: res.iterations });
    }
    let h = &res.history;
    let ratios = (1..h.len()).filter(|&i| h[i] > 1e-12).map(|i| h[i] / (h[i - 1] * h[i - 1]));
    let worst = max(ratios);
    Ok(Outcome::new(worst, "explicit_kinetic [(1, 1)]", &["kink problem"])
        .note(format!("residual history {:?}", h.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>())))
}

fn solver_perturbative(_: &mut Ctx) -> Result<Outcome> {
    let d = periodic(PI, 128);
    let op = two_term_kinetic();
    let j = sample(&FunctionSpec::PlaneWave { k: 2.0 }, &d)?.scale(re(0.1));
    let lambda = 1e-3;
    let m2 = 1.0;
    let lin = field::solve_linear(&op, &PotentialSpec::new(m2, 0.0).with_source(j.clone()), &d)?;
    let opts = NewtonOptions { tol: 1e-12, max_iter: 20, pinned_ends: false };
    let full =
        field::solve_nonlinear(&op, &PotentialSpec::new(m2, lambda).with_source(j), &GridFunction::zeros(d), opts)?;
    let gap = op.discrete_symbol(&d)?.iter().map(|mu| (mu - m2).norm()).fold(f64::INFINITY, f64::min);
    let bound = lambda * lin.phi.max_abs().powi(3) / gap;
    Ok(Outcome::new(
        full.phi.max_abs_diff(&lin.phi)? / bound,
        "explicit_kinetic",
        &["lambda = 1e-3", "source 0.1 e^{2ix}"],
    )
    .note("deviation over lambda max|phi|^3 / min|mu - m2|".into()))
}
