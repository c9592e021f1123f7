//! Uniform grids, sampled functions, transforms and dense operators.

pub mod dense;
pub mod derivative;
mod domain;
pub mod fourier;
mod function;
pub mod spline;

pub use dense::{adjoint_defect, DenseOperator, DENSE_LIMIT};
pub use domain::Domain;
pub use function::{format_real, sample, FourierMode, FunctionSpec, GridFunction};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::Weight;

/// Weight `v(x_j)` at every node.
pub fn weight_values(domain: &Domain, weight: &Weight) -> Result<Vec<f64>> {
    domain.nodes().into_iter().map(|x| weight.at(x)).collect()
}

/// `∫ v conj(f) g dx` with the domain's quadrature weights.
pub fn weighted_inner(f: &GridFunction, g: &GridFunction, weight: &Weight) -> Result<Complex64> {
    f.ensure_same_domain(g)?;
    let d = f.domain();
    let w = d.quadrature_weights();
    let v = weight_values(d, weight)?;
    Ok((0..d.n()).map(|j| w[j] * v[j] * f[j].conj() * g[j]).sum())
}

/// Pointwise weight as a grid function, rejecting `v ≤ 0`.
pub fn positive_weight(domain: &Domain, weight: &Weight) -> Result<Vec<f64>> {
    let v = weight_values(domain, weight)?;
    if let Some(j) = v.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NegativeWeight { x: domain.x(j), v: v[j] });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureProfile;
    use std::f64::consts::PI;

    #[test]
    fn unit_interval_has_unit_measure() {
        let d = Domain::bounded(0.0, 1.0, 1000).unwrap();
        let one = sample(&FunctionSpec::Constant { c: 1.0 }, &d).unwrap();
        let total = weighted_inner(&one, &one, &Weight::Flat).unwrap();
        assert!((total.re - 1.0).abs() < 1e-10 && total.im.abs() < 1e-15);
    }

    #[test]
    fn plane_waves_are_orthogonal() {
        let d = Domain::periodic(-PI, PI, 64).unwrap();
        let f = sample(&FunctionSpec::PlaneWave { k: 1.0 }, &d).unwrap();
        let g = sample(&FunctionSpec::PlaneWave { k: 2.0 }, &d).unwrap();
        assert!(weighted_inner(&f, &g, &Weight::Flat).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gaussian_norm() {
        let d = Domain::bounded(-20.0, 20.0, 2000).unwrap();
        let g = sample(&FunctionSpec::gaussian(0.0, 1.0), &d).unwrap();
        let total = weighted_inner(&g, &g, &Weight::Flat).unwrap();
        assert!((total.re - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let d = Domain::bounded(0.3, 4.0, 64).unwrap();
        let w = Weight::from(MeasureProfile::binomial(0.5, 1.0).unwrap());
        let f = GridFunction::from_fn(d, |x| Complex64::new(x.sin(), x * x));
        let g = GridFunction::from_fn(d, |x| Complex64::new(1.0 / x, x.cos()));
        let a = weighted_inner(&f, &g, &w).unwrap();
        let b = weighted_inner(&g, &f, &w).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn mismatched_domains_are_rejected() {
        let f = GridFunction::zeros(Domain::bounded(0.0, 1.0, 16).unwrap());
        let g = GridFunction::zeros(Domain::bounded(0.0, 2.0, 16).unwrap());
        assert_eq!(weighted_inner(&f, &g, &Weight::Flat), Err(Error::DomainMismatch));
    }
}
