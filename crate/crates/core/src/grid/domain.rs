use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_offset() -> f64 {
    0.5
}

/// Uniform 1-d sampling of `[a, b]`.
///
/// Nodes sit at `x_j = a + (j + offset) h` with `h = (b - a) / n`. The default
/// offset of one half keeps symmetric domains with even `n` from sampling
/// `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct Domain {
    a: f64,
    b: f64,
    n: usize,
    periodic: bool,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    a: f64,
    b: f64,
    n: usize,
    #[serde(default)]
    periodic: bool,
    #[serde(default = "default_offset")]
    offset: f64,
}

impl TryFrom<RawDomain> for Domain {
    type Error = Error;

    fn try_from(r: RawDomain) -> Result<Self> {
        Domain::new(r.a, r.b, r.n, r.periodic)?.with_offset(r.offset)
    }
}

impl From<Domain> for RawDomain {
    fn from(d: Domain) -> Self {
        RawDomain { a: d.a, b: d.b, n: d.n, periodic: d.periodic, offset: d.offset }
    }
}

impl Domain {
    pub fn new(a: f64, b: f64, n: usize, periodic: bool) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidDomain(format!("need finite a < b, got [{a}, {b}]")));
        }
        if n < 8 {
            return Err(Error::InvalidDomain(format!("n = {n} below the minimum of 8")));
        }
        if periodic && !n.is_power_of_two() {
            return Err(Error::InvalidDomain(format!("periodic n = {n} must be a power of two")));
        }
        Ok(Self { a, b, n, periodic, offset: 0.5 })
    }

    pub fn periodic(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(a, b, n, true)
    }

    pub fn bounded(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(a, b, n, false)
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&offset) {
            return Err(Error::InvalidDomain(format!("offset {offset} not in [0, 1)")));
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.a + (j as f64 + self.offset) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Quadrature weights for `∫_a^b dx`: uniform on periodic domains,
    /// trapezoidal with constant extrapolation over the two partial end cells
    /// otherwise (this reduces to the midpoint rule for offset 1/2).
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.n];
        if !self.periodic {
            w[0] = h * (0.5 + self.offset);
            w[self.n - 1] = h * (1.5 - self.offset);
        }
        w
    }

    /// Indices at least `fraction` of the domain away from either edge.
    pub fn bulk(&self, fraction: f64) -> std::ops::Range<usize> {
        let margin = (fraction * self.n as f64).ceil() as usize;
        margin.min(self.n / 2)..self.n.saturating_sub(margin).max(self.n / 2)
    }
}
