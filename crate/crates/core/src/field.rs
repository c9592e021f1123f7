//! Static solutions of `Kφ − V′(φ) + J = 0` for `V = ½m²φ² + ¼λφ⁴`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{fourier, Domain, GridFunction};
use crate::laplacian::OperatorSpec;

type C = Complex64;

/// Largest grid for the dense linear path.
pub const DENSE_SOLVE_LIMIT: usize = 2048;
/// Largest grid for the dense Newton Jacobian.
pub const NEWTON_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub mass2: f64,
    pub quartic: f64,
    pub source: Option<GridFunction>,
}

impl PotentialSpec {
    pub fn new(mass2: f64, quartic: f64) -> Self {
        Self { mass2, quartic, source: None }
    }

    pub fn with_source(mut self, source: GridFunction) -> Self {
        self.source = Some(source);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass2.is_finite() && self.quartic.is_finite()) {
            return Err(Error::Config("potential coefficients must be finite".into()));
        }
        Ok(())
    }

    fn source_on(&self, domain: &Domain) -> Result<GridFunction> {
        match &self.source {
            Some(j) if j.domain() == domain => Ok(j.clone()),
            Some(_) => Err(Error::DomainMismatch),
            None => Ok(GridFunction::zeros(*domain)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    #[serde(skip)]
    pub phi: GridFunction,
    /// `max |Kφ − m²φ − λφ³ + J|` over the equation rows.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm before each Newton update and after the last one.
    pub history: Vec<f64>,
}

/// Newton controls. `pinned_ends` replaces the first and last equations by
/// `φ = guess` there, which fixes the boundary values on bounded domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub pinned_ends: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 20, pinned_ends: false }
    }
}

fn reject_implicit(op: &OperatorSpec) -> Result<()> {
    if op.kind.is_implicit() {
        return Err(Error::NoSolvePath);
    }
    Ok(())
}

/// `μ(k)` with `K e^{ikx} = μ(k) e^{ikx}` (flat weight, spectral backend).
pub fn dispersion(op: &OperatorSpec, k: f64) -> Result<C> {
    op.multiplier(k)
}

/// `R(φ) = Kφ − m²φ − λφ³ + J`.
pub fn residual(op: &OperatorSpec, pot: &PotentialSpec, phi: &GridFunction) -> Result<GridFunction> {
    let j = pot.source_on(phi.domain())?;
    let k = op.apply(phi)?;
    let values = (0..phi.len())
        .map(|i| {
            let p = phi[i];
            k[i] - pot.mass2 * p - pot.quartic * p * p * p + j[i]
        })
        .collect();
    GridFunction::new(*phi.domain(), values)
}

fn linear_result(op: &OperatorSpec, pot: &PotentialSpec, phi: GridFunction) -> Result<SolveResult> {
    let r = residual(op, &PotentialSpec { quartic: 0.0, ..pot.clone() }, &phi)?.max_abs();
    Ok(SolveResult { phi, residual_norm: r, iterations: 1, converged: true, history: vec![r] })
}

/// Solve `(K − m²)φ = −J`: by division of Fourier coefficients on periodic
/// domains when `K` is diagonal there, densely otherwise.
pub fn solve_linear(op: &OperatorSpec, pot: &PotentialSpec, domain: &Domain) -> Result<SolveResult> {
    reject_implicit(op)?;
    if domain.is_periodic() && op.discrete_symbol(domain).is_ok() {
        solve_linear_spectral(op, pot, domain)
    } else {
        solve_linear_dense(op, pot, domain)
    }
}

pub fn solve_linear_spectral(op: &OperatorSpec, pot: &PotentialSpec, domain: &Domain) -> Result<SolveResult> {
    reject_implicit(op)?;
    pot.validate()?;
    let sym = op.discrete_symbol(domain)?;
    let j = pot.source_on(domain)?;
    let coeffs = fourier::forward(j.values());
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let ks = fourier::wavenumbers(domain);
    let mut out = Vec::with_capacity(coeffs.len());
    for (i, (c, mu)) in coeffs.iter().zip(&sym).enumerate() {
        let gap = mu - pot.mass2;
        let occupied = c.norm() > 1e-14 * scale.max(f64::MIN_POSITIVE);
        if gap.norm() < 1e-12 {
            if occupied {
                return Err(Error::ResonantMode { k: ks[i], gap: gap.norm() });
            }
            out.push(C::new(0.0, 0.0));
        } else {
            out.push(-c / gap);
        }
    }
    let phi = GridFunction::new(*domain, fourier::inverse(&out))?;
    linear_result(op, pot, phi)
}

pub fn solve_linear_dense(op: &OperatorSpec, pot: &PotentialSpec, domain: &Domain) -> Result<SolveResult> {
    reject_implicit(op)?;
    pot.validate()?;
    let n = domain.n();
    if n > DENSE_SOLVE_LIMIT {
        return Err(Error::TooLarge { n, limit: DENSE_SOLVE_LIMIT });
    }
    let mut a = op.to_matrix(domain)?.into_entries();
    for i in 0..n {
        a[(i, i)] -= pot.mass2;
    }
    let j = pot.source_on(domain)?;
    let rhs = DVector::from_iterator(n, j.values().iter().map(|v| -v));
    let x = a.lu().solve(&rhs).ok_or(Error::ResonantMode { k: f64::NAN, gap: 0.0 })?;
    let phi = GridFunction::new(*domain, x.as_slice().to_vec())?;
    linear_result(op, pot, phi)
}

fn equation_rows(n: usize, pinned: bool) -> std::ops::Range<usize> {
    if pinned {
        1..n - 1
    } else {
        0..n
    }
}

/// Newton iteration on `R(φ) = 0` with the exact dense Jacobian
/// `K − diag(m² + 3λφ²)`.
pub fn solve_nonlinear(
    op: &OperatorSpec,
    pot: &PotentialSpec,
    guess: &GridFunction,
    opts: NewtonOptions,
) -> Result<SolveResult> {
    reject_implicit(op)?;
    pot.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance {} must be positive", opts.tol)));
    }
    let domain = *guess.domain();
    let n = domain.n();
    if n > NEWTON_LIMIT {
        return Err(Error::TooLarge { n, limit: NEWTON_LIMIT });
    }
    let k = op.to_matrix(&domain)?.into_entries();
    let rows = equation_rows(n, opts.pinned_ends);
    let mut phi = guess.clone();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let mut r = residual(op, pot, &phi)?.into_values();
        if opts.pinned_ends {
            r[0] = phi[0] - guess[0];
            r[n - 1] = phi[n - 1] - guess[n - 1];
        }
        let norm = rows.clone().map(|i| r[i].norm()).fold(0.0, f64::max);
        history.push(norm);
        if !norm.is_finite() {
            return Ok(SolveResult { phi, residual_norm: norm, iterations, converged: false, history });
        }
        if norm <= opts.tol || iterations == opts.max_iter {
            let converged = norm <= opts.tol;
            return Ok(SolveResult { phi, residual_norm: norm, iterations, converged, history });
        }
        let mut jac: DMatrix<C> = k.clone();
        for i in 0..n {
            let p = phi[i];
            jac[(i, i)] -= pot.mass2 + 3.0 * pot.quartic * p * p;
        }
        if opts.pinned_ends {
            for i in [0, n - 1] {
                jac.row_mut(i).fill(C::new(0.0, 0.0));
                jac[(i, i)] = C::new(1.0, 0.0);
            }
        }
        let rhs = DVector::from_iterator(n, r.iter().map(|v| -v));
        let delta = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian { iteration: iterations })?;
        let next: Vec<C> = phi.values().iter().zip(delta.iter()).map(|(p, d)| p + d).collect();
        phi = GridFunction::new(domain, next).map_err(|_| Error::SingularJacobian { iteration: iterations })?;
        iterations += 1;
    }
}
