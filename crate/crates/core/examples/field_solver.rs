//! Linear and nonlinear static field equations: a sourced massive field on a
//! periodic grid and the kink of a double-well potential.

use std::f64::consts::PI;

use multifrac::field::{solve_linear_dense, solve_linear_spectral, solve_nonlinear, PotentialSpec};
use multifrac::grid::{sample, Domain, FunctionSpec};
use multifrac::laplacian::{OperatorKind, OperatorSpec, Term};
use multifrac::verify::{kink_options, kink_problem};

fn main() -> multifrac::Result<()> {
    let d = Domain::periodic(-PI, PI, 128)?;
    let op = OperatorSpec::new(OperatorKind::ExplicitKinetic { terms: vec![Term::new(1.0, 1.0), Term::new(0.5, 0.6)] });
    let pot = PotentialSpec::new(1.0, 0.0).with_source(sample(&FunctionSpec::gaussian(0.0, 0.4), &d)?);
    let spectral = solve_linear_spectral(&op, &pot, &d)?;
    let dense = solve_linear_dense(&op, &pot, &d)?;
    println!(
        "linear: residual {:.2e}, spectral vs dense {:.2e}",
        spectral.residual_norm,
        spectral.phi.max_abs_diff(&dense.phi)?
    );

    let (op, pot, guess) = kink_problem()?;
    let res = solve_nonlinear(&op, &pot, &guess, kink_options())?;
    let history: Vec<String> = res.history.iter().map(|r| format!("{r:.2e}")).collect();
    println!("kink: {} Newton steps, residual history {}", res.iterations, history.join(" -> "));
    let dom = *res.phi.domain();
    for j in (0..dom.n()).step_by(32) {
        let x = dom.x(j);
        println!("  x = {x:>8.4}  phi = {:>9.6}  tanh(x/sqrt 2) = {:>9.6}", res.phi[j].re, (x / 2f64.sqrt()).tanh());
    }
    Ok(())
}
