//! Plane-wave dispersion of explicit multiscale operators and the pieces of
//! the symbolic square of a two-term derivative.

use multifrac::field::dispersion;
use multifrac::laplacian::{symbolic, OperatorKind, OperatorSpec, Term};

fn main() -> multifrac::Result<()> {
    let terms = vec![Term::new(1.0, 1.0), Term::new(0.5, 0.6)];
    let kinetic = OperatorSpec::new(OperatorKind::ExplicitKinetic { terms: terms.clone() });
    let bar = OperatorSpec::new(OperatorKind::BarKinetic { terms: vec![Term::new(1.0, 1.0), Term::new(0.5, 0.75)] });
    println!("{:>6}  {:>24}  {:>24}", "k", "explicit_kinetic", "bar_kinetic");
    for k in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let (a, b) = (dispersion(&kinetic, k)?, dispersion(&bar, k)?);
        println!("{k:>6}  {:>11.5} {:+11.5}i  {:>11.5} {:+11.5}i", a.re, a.im, b.re, b.im);
    }
    let pieces = symbolic::two_term_square();
    println!("square of a two-term derivative: {} pieces", pieces.len());
    for p in &pieces {
        println!("  {}", p.label());
    }
    Ok(())
}
