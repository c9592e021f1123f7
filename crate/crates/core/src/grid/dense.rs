use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{weight_values, Domain, GridFunction};
use crate::error::{Error, Result};
use crate::measure::Weight;

/// Largest grid for which dense materialization is allowed.
pub const DENSE_LIMIT: usize = 4096;

/// An operator materialized as an `n x n` complex matrix on a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    domain: Domain,
    entries: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(domain: Domain, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = domain.n();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::InvalidDomain(format!("{}x{} matrix for n = {n}", entries.nrows(), entries.ncols())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite matrix entry".into()));
        }
        Ok(Self { domain, entries })
    }

    pub fn identity(domain: Domain) -> Self {
        Self { domain, entries: DMatrix::identity(domain.n(), domain.n()) }
    }

    /// Column `j` is `apply` evaluated on the `j`-th coordinate basis vector.
    /// Columns are assembled in parallel; the result does not depend on the
    /// number of workers.
    pub fn assemble(domain: Domain, apply: impl Fn(&GridFunction) -> Result<GridFunction> + Sync) -> Result<Self> {
        let n = domain.n();
        if n > DENSE_LIMIT {
            return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
        }
        let columns = (0..n)
            .into_par_iter()
            .map(|j| apply(&GridFunction::basis(domain, j)).map(GridFunction::into_values))
            .collect::<Result<Vec<_>>>()?;
        let entries = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
        Self::new(domain, entries)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.domain() != &self.domain {
            return Err(Error::DomainMismatch);
        }
        let v = DVector::from_column_slice(f.values());
        let out = &self.entries * v;
        Ok(GridFunction::from_parts(self.domain, out.as_slice().to_vec()))
    }

    /// Product `self * other` (apply `other` first).
    pub fn compose(&self, other: &DenseOperator) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { domain: self.domain, entries: &self.entries * &other.entries })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖M + M†‖_max / ‖M‖_max` in the flat pairing.
    pub fn antisymmetry_defect(&self) -> f64 {
        let sum = &self.entries + self.entries.adjoint();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        sum.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
    }
}

/// `‖W M − M† W‖_max / ‖W M‖_max` with `W = diag(v(x_j))`; zero exactly when
/// `M` is self-adjoint under the weighted pairing.
pub fn adjoint_defect(m: &DenseOperator, weight: &Weight) -> Result<f64> {
    let w = weight_values(m.domain(), weight)?;
    let n = w.len();
    let e = m.entries();
    let mut top = 0.0f64;
    let mut bottom = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let wm = w[i] * e[(i, j)];
            let mw = e[(j, i)].conj() * w[j];
            top = top.max((wm - mw).norm());
            bottom = bottom.max(wm.norm());
        }
    }
    if bottom == 0.0 {
        return Ok(0.0);
    }
    Ok(top / bottom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{derivative, sample, FunctionSpec};
    use std::f64::consts::PI;

    #[test]
    fn spectral_derivative_matrix_has_plane_wave_eigenvector() {
        let d = Domain::periodic(-PI, PI, 8).unwrap();
        let m = DenseOperator::assemble(d, |f| Ok(derivative::first(f))).unwrap();
        let f = sample(&FunctionSpec::PlaneWave { k: 1.0 }, &d).unwrap();
        let out = m.apply(&f).unwrap();
        assert!(out.max_abs_diff(&f.scale(Complex64::new(0.0, 1.0))).unwrap() < 1e-12);
        assert!((adjoint_defect(&m, &Weight::Flat).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn identity_has_zero_defect() {
        let d = Domain::bounded(0.5, 3.0, 16).unwrap();
        assert_eq!(adjoint_defect(&DenseOperator::identity(d), &Weight::Flat).unwrap(), 0.0);
    }

    #[test]
    fn too_large_is_rejected() {
        let d = Domain::periodic(0.0, 1.0, 8192).unwrap();
        let err = DenseOperator::assemble(d, |f| Ok(f.clone())).unwrap_err();
        assert_eq!(err, Error::TooLarge { n: 8192, limit: DENSE_LIMIT });
    }
}
