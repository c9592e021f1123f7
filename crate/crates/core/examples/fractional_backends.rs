//! Liouville derivative of a Gaussian with the three backends, and the
//! convergence of the Grünwald–Letnikov scheme towards the spectral result.

use std::f64::consts::PI;

use multifrac::frac::{liouville, FracBackend, FracOrder};
use multifrac::grid::{sample, Domain, FunctionSpec};

fn main() -> multifrac::Result<()> {
    let order = FracOrder::new(0.5)?;
    let gaussian = FunctionSpec::gaussian(0.0, 0.5);
    println!("{:>6}  {:>14}  {:>14}", "n", "grunwald", "quadrature");
    for n in [128, 256, 512, 1024] {
        let d = Domain::periodic(-PI, PI, n)?;
        let f = sample(&gaussian, &d)?;
        let exact = liouville(&f, order, FracBackend::Spectral)?;
        let gl = liouville(&f, order, FracBackend::grunwald_letnikov())?.max_abs_diff(&exact)?;
        let quad = liouville(&f, order, FracBackend::singular_quadrature())?.max_abs_diff(&exact)?;
        println!("{n:>6}  {gl:>14.4e}  {quad:>14.4e}");
    }
    Ok(())
}
