//! Declarative run configuration, read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::PotentialSpec;
use crate::frac::{FracBackend, FracOrder, Side};
use crate::grid::{sample, Domain, FunctionSpec};
use crate::laplacian::{OperatorKind, OperatorSpec};
use crate::measure::{MeasureProfile, Weight};
use crate::verify::SuiteConfig;

/// Which weight an operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightChoice {
    Flat,
    Profile,
}

/// A named operator: the operator fields plus `weight`, `backend` and
/// `cross_consistency`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "toml::Table")]
pub struct OperatorEntry {
    pub kind: OperatorKind,
    pub weight: Option<WeightChoice>,
    pub backend: FracBackend,
    pub cross_consistency: bool,
}

impl TryFrom<toml::Table> for OperatorEntry {
    type Error = String;

    fn try_from(mut t: toml::Table) -> std::result::Result<Self, String> {
        let weight =
            t.remove("weight").map(|v| v.try_into::<WeightChoice>()).transpose().map_err(|e| format!("weight: {e}"))?;
        let backend = t
            .remove("backend")
            .map(|v| v.try_into::<FracBackend>())
            .transpose()
            .map_err(|e| format!("backend: {e}"))?;
        let cross = t
            .remove("cross_consistency")
            .map(|v| v.try_into::<bool>())
            .transpose()
            .map_err(|e| format!("cross_consistency: {e}"))?;
        let kind: OperatorKind =
            toml::Value::Table(t).try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
        Ok(Self { kind, weight, backend: backend.unwrap_or_default(), cross_consistency: cross.unwrap_or(true) })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    pub operator: Option<String>,
    pub mass2: f64,
    #[serde(default)]
    pub quartic: f64,
    pub source: Option<FunctionSpec>,
    pub guess: Option<FunctionSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub pinned_ends: bool,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    20
}

fn default_bench_function() -> FunctionSpec {
    FunctionSpec::gaussian(0.0, 0.5)
}

fn default_bench_alpha() -> f64 {
    0.5
}

fn default_bench_sizes() -> Vec<usize> {
    vec![256, 512, 1024]
}

fn default_bench_backends() -> Vec<FracBackend> {
    vec![FracBackend::Spectral, FracBackend::grunwald_letnikov(), FracBackend::singular_quadrature()]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchBlock {
    #[serde(default = "default_bench_function")]
    pub function: FunctionSpec,
    #[serde(default = "default_bench_alpha")]
    pub alpha: f64,
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default = "default_bench_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_bench_backends")]
    pub backends: Vec<FracBackend>,
}

fn default_side() -> Side {
    Side::Left
}

impl Default for BenchBlock {
    fn default() -> Self {
        Self {
            function: default_bench_function(),
            alpha: default_bench_alpha(),
            side: default_side(),
            sizes: default_bench_sizes(),
            backends: default_bench_backends(),
        }
    }
}

/// Output formats a command may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Txt,
    Json,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Txt, Format::Json]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

impl OutputBlock {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: Option<MeasureProfile>,
    pub domain: Option<Domain>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorEntry>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default)]
    pub suite: SuiteConfig,
    pub solve: Option<SolveBlock>,
    #[serde(default)]
    pub bench: BenchBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Structural checks: names resolve and required blocks exist.
    pub fn validate(&self) -> Result<()> {
        for (name, entry) in &self.operators {
            if entry.weight == Some(WeightChoice::Profile) && self.profile.is_none() {
                return Err(Error::Config(format!("operators.{name}.weight = \"profile\" needs a [profile] block")));
            }
            entry.backend.validate().map_err(|e| Error::Config(format!("operators.{name}.backend: {e}")))?;
        }
        if let Some(solve) = &self.solve {
            if let Some(op) = &solve.operator {
                self.operator(op)?;
            }
            if !(solve.tol > 0.0) {
                return Err(Error::Config("solve.tol must be positive".into()));
            }
            PotentialSpec::new(solve.mass2, solve.quartic).validate()?;
        }
        FracOrder::new(self.bench.alpha).map_err(|e| Error::Config(format!("bench.alpha: {e}")))?;
        for b in &self.bench.backends {
            b.validate().map_err(|e| Error::Config(format!("bench.backends: {e}")))?;
        }
        self.suite.validate()
    }

    pub fn domain(&self) -> Result<Domain> {
        self.domain.ok_or_else(|| Error::Config("missing [domain] block".into()))
    }

    pub fn profile(&self) -> Result<&MeasureProfile> {
        self.profile.as_ref().ok_or_else(|| Error::Config("missing [profile] block".into()))
    }

    /// Resolve a named operator into a full [`OperatorSpec`]. Without an
    /// explicit `weight` the profile is used when one is configured.
    pub fn operator(&self, name: &str) -> Result<OperatorSpec> {
        let entry = self.operators.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.operators.keys().map(String::as_str).collect();
            Error::Config(format!("unknown operator '{name}' (defined: {})", known.join(", ")))
        })?;
        let weight = match (entry.weight, &self.profile) {
            (Some(WeightChoice::Flat), _) | (None, None) => Weight::Flat,
            (_, Some(p)) => Weight::Profile(p.clone()),
            (Some(WeightChoice::Profile), None) => {
                return Err(Error::Config(format!("operators.{name}.weight = \"profile\" needs a [profile] block")))
            }
        };
        Ok(OperatorSpec::new(entry.kind.clone())
            .with_weight(weight)
            .with_backend(entry.backend)
            .with_cross_consistency(entry.cross_consistency))
    }

    /// A named function from `[functions]` or an inline spec such as
    /// `gaussian sigma=0.5`.
    pub fn function(&self, spec: &str) -> Result<FunctionSpec> {
        match self.functions.get(spec) {
            Some(f) => Ok(f.clone()),
            None => spec.parse().map_err(|e| Error::Config(format!("--function '{spec}': {e}"))),
        }
    }

    /// The potential of the solve block sampled on the configured domain.
    pub fn potential(&self) -> Result<PotentialSpec> {
        let solve = self.solve.as_ref().ok_or_else(|| Error::Config("missing [solve] block".into()))?;
        let mut pot = PotentialSpec::new(solve.mass2, solve.quartic);
        if let Some(src) = &solve.source {
            pot = pot.with_source(sample(src, &self.domain()?)?);
        }
        Ok(pot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[profile]
mode = "binomial"
terms = [{ alpha = 0.5, ell = 1.0 }]

[domain]
a = -3.141592653589793
b = 3.141592653589793
n = 128
periodic = true

[operators.dt]
kind = "combo"
alpha = 0.5
weight = "flat"

[operators.left]
kind = "implicit_left"
backend = { kind = "singular_quadrature", panels = 32 }

[solve]
operator = "dt"
mass2 = 1.0
source = { kind = "plane_wave", k = 1.0 }
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = RunConfig::from_toml(SAMPLE).unwrap();
        let dt = cfg.operator("dt").unwrap();
        assert!(dt.weight.is_flat());
        let left = cfg.operator("left").unwrap();
        assert!(!left.weight.is_flat());
        assert_eq!(left.backend, FracBackend::SingularQuadrature { panels: 32, grading: 3.0 });
        assert_eq!(cfg.domain().unwrap().n(), 128);
        assert!(cfg.potential().unwrap().source.is_some());
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::from_toml("[domain]\na = 0\nb = 1\nn = 8\nperiodic = true\nwidth = 3\n").unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
        let err = RunConfig::from_toml("[operators.x]\nkind = \"combo\"\nalpah = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("alpah") || err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn unresolved_operator_name() {
        let err = RunConfig::from_toml("[solve]\noperator = \"nope\"\nmass2 = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("nope"));
    }
}
