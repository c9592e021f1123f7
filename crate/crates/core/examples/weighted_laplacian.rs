//! The weighted kinetic operator K_α is self-adjoint under the measure
//! pairing, while the plain fractional square is not.

use std::f64::consts::PI;

use multifrac::grid::{adjoint_defect, Domain};
use multifrac::laplacian::{OperatorKind, OperatorSpec};
use multifrac::measure::{MeasureProfile, Weight};

fn main() -> multifrac::Result<()> {
    let d = Domain::periodic(-PI, PI, 256)?;
    let w = Weight::Profile(MeasureProfile::binomial(0.5, 1.0)?);
    for alpha in [0.6, 0.75, 0.9] {
        let k = OperatorSpec::new(OperatorKind::KAlpha { alpha }).with_weight(w.clone()).to_matrix(&d)?;
        let plain = OperatorSpec::new(OperatorKind::SymmetricM2 { alpha }).to_matrix(&d)?;
        println!(
            "alpha {alpha}: K_alpha defect {:.3e}, unweighted operator under the weight {:.3e}",
            adjoint_defect(&k, &w)?,
            adjoint_defect(&plain, &w)?
        );
    }
    Ok(())
}
