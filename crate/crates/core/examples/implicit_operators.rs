//! Implicit operators with kernel 1/q: fractional behaviour at small scales,
//! derivative-like behaviour at large ones.

use multifrac::frac::{fractional, FracBackend, FracOrder, Side};
use multifrac::grid::{derivative, sample, Domain, FunctionSpec};
use multifrac::laplacian::{OperatorKind, OperatorSpec};
use multifrac::measure::MeasureProfile;
use multifrac::special::gamma;

fn main() -> multifrac::Result<()> {
    let alpha = 0.4;
    let op = OperatorSpec::new(OperatorKind::ImplicitLeft)
        .with_weight(MeasureProfile::binomial(alpha, 1.0)?)
        .with_backend(FracBackend::singular_quadrature());
    for sigma in [1e-3, 1e-1, 1e1, 1e3] {
        let d = Domain::bounded(-10.0 * sigma, 10.0 * sigma, 1024)?;
        let f = sample(&FunctionSpec::gaussian(0.0, sigma), &d)?;
        let out = op.apply(&f)?;
        let frac = fractional(&f, FracOrder::new(alpha)?, Side::Left, FracBackend::singular_quadrature())?
            .scale((alpha * gamma(1.0 - alpha)).into());
        let df = derivative::first(&f);
        let bulk = d.bulk(0.3);
        println!(
            "sigma {sigma:>7.0e}: |out| / |c D^a f| = {:.4}, |out| / |f'| = {:.4}",
            out.max_abs_in(bulk.clone()) / frac.max_abs_in(bulk.clone()),
            out.max_abs_in(bulk.clone()) / df.max_abs_in(bulk)
        );
    }
    Ok(())
}
