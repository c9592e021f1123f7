//! Named numerical checks of the algebraic properties of every operator,
//! aggregated into a deterministic report.

mod catalog;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac::FracBackend;
use crate::grid::GridFunction;
use crate::laplacian::OperatorSpec;

pub use catalog::{check_names, kink_options, kink_problem};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    /// Short label of the property being checked.
    pub anchor: String,
    pub operator: String,
    pub inputs: Vec<String>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

/// Description of the numerical setup of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub grid_sizes: Vec<usize>,
    pub backends: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<PropertyCheck>,
    pub environment: Environment,
    pub passed: usize,
    pub total: usize,
}

fn default_seed() -> u64 {
    20240917
}

fn default_truncation() -> usize {
    65536
}

fn default_panels() -> usize {
    16
}

fn default_grading() -> f64 {
    3.0
}

/// Suite configuration. `checks` holds glob patterns over check names; when
/// absent every check runs, when empty none does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    /// Truncation used by every Grünwald–Letnikov check.
    #[serde(default = "default_truncation")]
    pub gl_truncation: usize,
    /// Truncation at which the kernel bound of the Grünwald–Letnikov scheme is
    /// calibrated.
    #[serde(default = "default_truncation")]
    pub gl_reference_truncation: usize,
    #[serde(default = "default_panels")]
    pub quadrature_panels: usize,
    #[serde(default = "default_grading")]
    pub quadrature_grading: f64,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            checks: None,
            gl_truncation: default_truncation(),
            gl_reference_truncation: default_truncation(),
            quadrature_panels: default_panels(),
            quadrature_grading: default_grading(),
            tolerances: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn with_checks(mut self, patterns: &[&str]) -> Self {
        self.checks = Some(patterns.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn gl_backend(&self) -> FracBackend {
        FracBackend::GrunwaldLetnikov { truncation: self.gl_truncation }
    }

    pub fn quadrature_backend(&self) -> FracBackend {
        FracBackend::SingularQuadrature { panels: self.quadrature_panels, grading: self.quadrature_grading }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.gl_reference_truncation == 0 {
            return cfg("suite.gl_reference_truncation must be at least 1".into());
        }
        self.gl_backend().validate().map_err(|e| Error::Config(format!("suite.gl_truncation: {e}")))?;
        self.quadrature_backend().validate().map_err(|e| Error::Config(format!("suite.quadrature: {e}")))?;
        let names = check_names();
        for (name, tol) in &self.tolerances {
            if !names.contains(&name.as_str()) {
                return cfg(format!("suite.tolerances: unknown check '{name}'"));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                return cfg(format!("suite.tolerances.{name}: tolerance must be finite and non-negative"));
            }
        }
        self.patterns()?;
        Ok(())
    }

    fn patterns(&self) -> Result<Option<Vec<glob::Pattern>>> {
        self.checks
            .as_ref()
            .map(|list| {
                list.iter()
                    .map(|p| glob::Pattern::new(p).map_err(|e| Error::Config(format!("suite.checks: '{p}': {e}"))))
                    .collect()
            })
            .transpose()
    }

    /// Names of the selected checks, in catalog order.
    pub fn selected(&self) -> Result<Vec<&'static str>> {
        let patterns = self.patterns()?;
        Ok(check_names()
            .into_iter()
            .filter(|name| patterns.as_ref().is_none_or(|ps| ps.iter().any(|p| p.matches(name))))
            .collect())
    }
}

/// `X = 𝒟(fg) − (𝒟f)g − f(𝒟g)`.
pub fn leibniz_defect(op: &OperatorSpec, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_domain(g)?;
    if !op.kind.is_first_order() {
        return Err(Error::Config(format!("Leibniz defect needs a first-order operator, got {}", op.kind.name())));
    }
    let fg = op.apply(&f.mul(g)?)?;
    let dfg = op.apply(f)?.mul(g)?;
    let fdg = f.mul(&op.apply(g)?)?;
    fg.sub(&dfg)?.sub(&fdg)
}

/// `Y = f·𝒟²h − (𝒟²f)·h` with `𝒟²` by double application.
pub fn bilinear_concomitant(op: &OperatorSpec, f: &GridFunction, h: &GridFunction) -> Result<GridFunction> {
    f.ensure_same_domain(h)?;
    let op2 = |x: &GridFunction| op.apply(&op.apply(x)?);
    f.mul(&op2(h)?)?.sub(&op2(f)?.mul(h)?)
}

/// Run the selected checks concurrently; results keep catalog order.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let selected = config.selected()?;
    let checks: Vec<PropertyCheck> = selected.par_iter().map(|name| catalog::run(name, config)).collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    let total = checks.len();
    let environment = Environment {
        seed: config.seed,
        grid_sizes: catalog::GRID_SIZES.to_vec(),
        backends: vec![
            FracBackend::Spectral.name().to_string(),
            format!("{} (J = {})", config.gl_backend().name(), config.gl_truncation),
            format!(
                "{} (panels = {}, grading = {})",
                config.quadrature_backend().name(),
                config.quadrature_panels,
                config.quadrature_grading
            ),
        ],
    };
    Ok(VerificationReport { checks, environment, passed, total })
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_name", "paper_anchor", "residual", "tolerance", "passed"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                c.anchor.clone(),
                format!("{:e}", c.residual),
                format!("{:e}", c.tolerance),
                c.passed.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "seed {}; grids {:?}", self.environment.seed, self.environment.grid_sizes);
        let _ = writeln!(out, "backends: {}", self.environment.backends.join(", "));
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}  result", "check", "residual", "tolerance");
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = write!(out, "{:<width$}  {:>10.3e}  {:>10.3e}  {verdict}", c.name, c.residual, c.tolerance);
            if !c.note.is_empty() {
                let _ = write!(out, "  ({})", c.note);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{}/{} checks passed", self.passed, self.total);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, Domain, FunctionSpec};
    use crate::laplacian::OperatorKind;

    #[test]
    fn empty_selection_gives_empty_report() {
        let report = run_suite(&SuiteConfig::default().with_checks(&[])).unwrap();
        assert_eq!((report.passed, report.total), (0, 0));
        assert!(report.to_table().ends_with("0/0 checks passed\n"));
    }

    #[test]
    fn filter_keeps_catalog_order() {
        let cfg = SuiteConfig::default().with_checks(&["leibniz*"]);
        let names = cfg.selected().unwrap();
        assert!(names.len() >= 4);
        assert!(names.iter().all(|n| n.starts_with("leibniz")));
        let all = check_names();
        let positions: Vec<usize> = names.iter().map(|n| all.iter().position(|m| m == n).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn check_names_are_unique() {
        let mut names = check_names();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn unknown_tolerance_key_is_a_config_error() {
        let mut cfg = SuiteConfig::default();
        cfg.tolerances.insert("no.such.check".into(), 1.0);
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn concomitant_vanishes_for_equal_arguments() {
        let d = Domain::periodic(-3.0, 3.0, 64).unwrap();
        let f = sample(&FunctionSpec::gaussian(0.2, 0.7), &d).unwrap();
        let op = OperatorSpec::new(OperatorKind::KAlpha { alpha: 0.6 });
        assert_eq!(bilinear_concomitant(&op, &f, &f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn leibniz_defect_of_derivative_vanishes() {
        let d = Domain::periodic(-3.0, 3.0, 64).unwrap();
        let f = sample(&FunctionSpec::PlaneWave { k: 2.0 * std::f64::consts::PI / 6.0 }, &d).unwrap();
        let op = OperatorSpec::new(OperatorKind::Derivative);
        assert!(leibniz_defect(&op, &f, &f).unwrap().max_abs() < 1e-12);
        let sq = OperatorSpec::new(OperatorKind::QLaplacian);
        assert!(leibniz_defect(&sq, &f, &f).is_err());
    }
}
