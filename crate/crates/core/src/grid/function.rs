use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};

/// Declarative description of a test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `e^{ikx}`
    PlaneWave {
        k: f64,
    },
    /// `exp(-(x - center)^2 / (2 sigma^2))`
    Gaussian {
        #[serde(default)]
        center: f64,
        sigma: f64,
    },
    Constant {
        c: f64,
    },
    /// `Σ c_i x^i`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `tanh((x - center) / width)`
    Tanh {
        #[serde(default)]
        center: f64,
        width: f64,
    },
    /// `Σ (re + i im) e^{ikx}`
    FourierSum {
        modes: Vec<FourierMode>,
    },
    /// Piecewise-linear interpolation of tabulated samples.
    Table {
        x: Vec<f64>,
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: f64,
    pub re: f64,
    pub im: f64,
}

impl FunctionSpec {
    pub fn gaussian(center: f64, sigma: f64) -> Self {
        FunctionSpec::Gaussian { center, sigma }
    }

    /// Seeded band-limited sum of `count` modes with integer multiples of the
    /// fundamental frequency of `domain`, at most `max_harmonic`.
    pub fn random_fourier<R: Rng>(rng: &mut R, domain: &Domain, count: usize, max_harmonic: usize) -> Self {
        let k0 = 2.0 * std::f64::consts::PI / domain.length();
        let modes = (0..count)
            .map(|_| {
                let m = rng.random_range(-(max_harmonic as i64)..=max_harmonic as i64);
                FourierMode { k: k0 * m as f64, re: rng.random_range(-1.0..1.0), im: rng.random_range(-1.0..1.0) }
            })
            .collect();
        FunctionSpec::FourierSum { modes }
    }

    /// Evaluate the function at `x`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.derivative(x, 0)
    }

    /// Closed-form `order`-th derivative at `x`. Used as an independent oracle.
    pub fn derivative(&self, x: f64, order: u32) -> Result<Complex64> {
        let i = Complex64::i();
        Ok(match self {
            FunctionSpec::PlaneWave { k } => (i * k).powu(order) * (i * k * x).exp(),
            FunctionSpec::Constant { c } => {
                if order == 0 {
                    Complex64::new(*c, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            FunctionSpec::Gaussian { center, sigma } => {
                // d^n/dx^n e^{-t^2/2} = (-1)^n He_n(t) e^{-t^2/2} / sigma^n
                let t = (x - center) / sigma;
                let (mut he0, mut he1) = (1.0, t);
                let he = match order {
                    0 => 1.0,
                    1 => t,
                    _ => {
                        for m in 1..order {
                            let next = t * he1 - m as f64 * he0;
                            he0 = he1;
                            he1 = next;
                        }
                        he1
                    }
                };
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                Complex64::new(sign * he * (-0.5 * t * t).exp() / sigma.powi(order as i32), 0.0)
            }
            FunctionSpec::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (p, c) in coeffs.iter().enumerate().rev() {
                    if (p as u32) < order {
                        continue;
                    }
                    let falling: f64 = (0..order).map(|m| (p as u32 - m) as f64).product();
                    acc += c * falling * x.powi((p as u32 - order) as i32);
                }
                Complex64::new(acc, 0.0)
            }
            FunctionSpec::Tanh { center, width } => {
                let t = ((x - center) / width).tanh();
                let s = 1.0 - t * t;
                let v = match order {
                    0 => t,
                    1 => s / width,
                    2 => -2.0 * t * s / (width * width),
                    3 => (-2.0 * s * s + 4.0 * t * t * s) / width.powi(3),
                    _ => return Err(Error::UnknownSpec(format!("tanh derivative of order {order}"))),
                };
                Complex64::new(v, 0.0)
            }
            FunctionSpec::FourierSum { modes } => {
                modes.iter().map(|m| Complex64::new(m.re, m.im) * (i * m.k).powu(order) * (i * m.k * x).exp()).sum()
            }
            FunctionSpec::Table { x: xs, re, im } => {
                if order != 0 {
                    return Err(Error::UnknownSpec("tabulated functions have no closed-form derivative".into()));
                }
                interpolate(xs, re, im, x)?
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Gaussian { sigma, .. } if *sigma <= 0.0 => {
                Err(Error::UnknownSpec(format!("gaussian sigma = {sigma} must be positive")))
            }
            FunctionSpec::Tanh { width, .. } if *width <= 0.0 => {
                Err(Error::UnknownSpec(format!("tanh width = {width} must be positive")))
            }
            FunctionSpec::Table { x, re, im } => {
                if x.len() < 2 || re.len() != x.len() || !(im.is_empty() || im.len() == x.len()) {
                    return Err(Error::UnknownSpec("table columns must have equal length >= 2".into()));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::UnknownSpec("table abscissae must increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Load a table from CSV with columns `x, re[, im]`; `#` lines are comments.
    pub fn table_from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let (mut x, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i).unwrap_or("0").parse::<f64>().map_err(|e| Error::UnknownSpec(format!("table entry: {e}")))
            };
            x.push(field(0)?);
            re.push(field(1)?);
            im.push(if rec.len() > 2 { field(2)? } else { 0.0 });
        }
        let spec = FunctionSpec::Table { x, re, im };
        spec.validate()?;
        Ok(spec)
    }
}

fn interpolate(xs: &[f64], re: &[f64], im: &[f64], x: f64) -> Result<Complex64> {
    let last = xs.len() - 1;
    if x < xs[0] || x > xs[last] {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, last);
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    let im_at = |k: usize| im.get(k).copied().unwrap_or(0.0);
    Ok(Complex64::new(re[j - 1] + t * (re[j] - re[j - 1]), im_at(j - 1) + t * (im_at(j) - im_at(j - 1))))
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::PlaneWave { k } => write!(f, "plane_wave k={k}"),
            FunctionSpec::Gaussian { center, sigma } => write!(f, "gaussian center={center} sigma={sigma}"),
            FunctionSpec::Constant { c } => write!(f, "constant c={c}"),
            FunctionSpec::Polynomial { coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(f64::to_string).collect();
                write!(f, "polynomial coeffs={}", cs.join(","))
            }
            FunctionSpec::Tanh { center, width } => write!(f, "tanh center={center} width={width}"),
            FunctionSpec::FourierSum { modes } => write!(f, "fourier_sum modes={}", modes.len()),
            FunctionSpec::Table { x, .. } => write!(f, "table points={}", x.len()),
        }
    }
}

/// Parses the compact `name key=value ...` syntax used on the command line,
/// e.g. `gaussian sigma=1 center=0` or `polynomial coeffs=1,0,2`.
impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let name = words.next().ok_or_else(|| Error::UnknownSpec("empty function spec".into()))?;
        let mut params = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) =
                w.split_once('=').ok_or_else(|| Error::UnknownSpec(format!("expected key=value, got `{w}`")))?;
            params.insert(k.to_string(), v.to_string());
        }
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.get(key) {
                Some(v) => v.parse().map_err(|_| Error::UnknownSpec(format!("`{key}` is not a number: {v}"))),
                None => default.ok_or_else(|| Error::UnknownSpec(format!("{name} needs `{key}`"))),
            }
        };
        let spec = match name {
            "plane_wave" => FunctionSpec::PlaneWave { k: num("k", None)? },
            "gaussian" => FunctionSpec::Gaussian { center: num("center", Some(0.0))?, sigma: num("sigma", Some(1.0))? },
            "constant" => FunctionSpec::Constant { c: num("c", Some(1.0))? },
            "zero" => FunctionSpec::Constant { c: 0.0 },
            "tanh" => FunctionSpec::Tanh { center: num("center", Some(0.0))?, width: num("width", Some(1.0))? },
            "polynomial" => {
                let raw = params.get("coeffs").ok_or_else(|| Error::UnknownSpec("polynomial needs `coeffs`".into()))?;
                let coeffs = raw
                    .split(',')
                    .map(|c| c.parse::<f64>().map_err(|_| Error::UnknownSpec(format!("bad coefficient `{c}`"))))
                    .collect::<Result<Vec<_>>>()?;
                FunctionSpec::Polynomial { coeffs }
            }
            "table" => {
                let path = params.get("path").ok_or_else(|| Error::UnknownSpec("table needs `path`".into()))?;
                let file = std::fs::File::open(path).map_err(|e| Error::UnknownSpec(format!("{path}: {e}")))?;
                FunctionSpec::table_from_csv(file)?
            }
            other => return Err(Error::UnknownSpec(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Complex samples of a function on a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: Domain,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.n() {
            return Err(Error::InvalidDomain(format!("{} samples for n = {}", values.len(), domain.n())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite sample".into()));
        }
        Ok(Self { domain, values })
    }

    /// Internal constructor for operator outputs; callers guarantee the length.
    pub(crate) fn from_parts(domain: Domain, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), domain.n());
        Self { domain, values }
    }

    pub fn from_real(domain: Domain, values: &[f64]) -> Result<Self> {
        Self::new(domain, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(domain: Domain, f: impl Fn(f64) -> Complex64) -> Self {
        let values = domain.nodes().into_iter().map(f).collect();
        Self { domain, values }
    }

    pub fn zeros(domain: Domain) -> Self {
        Self { domain, values: vec![Complex64::new(0.0, 0.0); domain.n()] }
    }

    pub fn basis(domain: Domain, j: usize) -> Self {
        let mut g = Self::zeros(domain);
        g.values[j] = Complex64::new(1.0, 0.0);
        g
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ensure_same_domain(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { domain: self.domain, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise `f(x_j, value_j)`.
    pub fn map_with_x(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(j, &v)| f(self.domain.x(j), v)).collect();
        Self { domain: self.domain, values }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: Complex64, other: &GridFunction) -> Result<Self> {
        self.ensure_same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + c * b).collect();
        Ok(Self { domain: self.domain, values })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.add_scaled(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.ensure_same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Ok(Self { domain: self.domain, values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max abs over an index range.
    pub fn max_abs_in(&self, range: std::ops::Range<usize>) -> f64 {
        self.values[range].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_domain(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Write `x, re, im` CSV with a `#` header line naming the source.
    pub fn write_csv<W: Write>(&self, writer: W, header: &str) -> Result<()> {
        let mut writer = writer;
        for line in header.lines() {
            writeln!(writer, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "re", "im"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record(&[format_real(self.domain.x(j)), format_real(v.re), format_real(v.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl std::ops::Index<usize> for GridFunction {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        &self.values[j]
    }
}

/// Shortest round-trip text of `x`, in exponent form outside `[1e-4, 1e15)`.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Sample `spec` at the nodes of `domain`.
pub fn sample(spec: &FunctionSpec, domain: &Domain) -> Result<GridFunction> {
    spec.validate()?;
    let values = domain.nodes().into_iter().map(|x| spec.eval(x)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(*domain, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_samples() {
        let d = Domain::bounded(-1.0, 2.0, 11).unwrap();
        let g = sample(&FunctionSpec::Constant { c: 1.0 }, &d).unwrap();
        assert!(g.values().iter().all(|&v| v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn plane_wave_samples() {
        let d = Domain::periodic(-PI, PI, 8).unwrap();
        let g = sample(&FunctionSpec::PlaneWave { k: 1.0 }, &d).unwrap();
        for j in 0..8 {
            let x = d.x(j);
            assert!((g[j] - Complex64::new(x.cos(), x.sin())).norm() < 1e-15);
        }
    }

    #[test]
    fn gaussian_samples() {
        let d = Domain::bounded(-5.0, 5.0, 40).unwrap();
        let g = sample(&FunctionSpec::gaussian(0.0, 1.0), &d).unwrap();
        for j in 0..40 {
            let x = d.x(j);
            assert!((g[j].re - (-x * x / 2.0).exp()).abs() < 1e-16);
        }
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let specs = [
            FunctionSpec::gaussian(0.3, 0.7),
            FunctionSpec::Polynomial { coeffs: vec![1.0, -2.0, 0.5, 0.25] },
            FunctionSpec::Tanh { center: 0.1, width: 1.3 },
            FunctionSpec::PlaneWave { k: 2.0 },
        ];
        let h = 1e-5;
        for spec in &specs {
            for order in 0..3 {
                for x in [-0.7, 0.2, 1.1] {
                    let fd =
                        (spec.derivative(x + h, order).unwrap() - spec.derivative(x - h, order).unwrap()) / (2.0 * h);
                    let exact = spec.derivative(x, order + 1).unwrap();
                    assert!((fd - exact).norm() < 1e-6 * exact.norm().max(1.0), "{spec} order {order} x {x}");
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let s: FunctionSpec = "gaussian sigma=2 center=1".parse().unwrap();
        assert_eq!(s, FunctionSpec::gaussian(1.0, 2.0));
        let p: FunctionSpec = "polynomial coeffs=1,0,2".parse().unwrap();
        assert_eq!(p.eval(2.0).unwrap().re, 9.0);
        let round: FunctionSpec = p.to_string().parse().unwrap();
        assert_eq!(round, p);
        assert!(matches!("sawtooth k=1".parse::<FunctionSpec>(), Err(Error::UnknownSpec(_))));
        assert!("gaussian sigma=-1".parse::<FunctionSpec>().is_err());
        assert!("plane_wave".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn table_interpolates_and_vanishes_outside() {
        let csv = "# sampled\nx,re,im\n0,0,1\n1,2,1\n";
        let t = FunctionSpec::table_from_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.eval(0.5).unwrap(), Complex64::new(1.0, 1.0));
        assert_eq!(t.eval(3.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn csv_export_has_header() {
        let d = Domain::bounded(0.0, 1.0, 8).unwrap();
        let g = sample(&FunctionSpec::Constant { c: 2.0 }, &d).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf, "constant c=2").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# constant c=2"));
        assert_eq!(lines.next(), Some("x,re,im"));
        assert_eq!(lines.next(), Some("0.0625,2,0"));
        // round trip through the table reader
        let back = FunctionSpec::table_from_csv(text.as_bytes()).unwrap();
        assert_eq!(back.eval(0.5).unwrap().re, 2.0);
    }

    #[test]
    fn length_and_finiteness_are_checked() {
        let d = Domain::bounded(0.0, 1.0, 8).unwrap();
        assert!(GridFunction::new(d, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(GridFunction::new(d, v).is_err());
    }
}
