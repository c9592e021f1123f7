//! The q-derivative keeps the ordinary product rule and inverts q exactly.

use multifrac::grid::{sample, Domain, FunctionSpec};
use multifrac::laplacian::{OperatorKind, OperatorSpec};
use multifrac::measure::MeasureProfile;
use multifrac::verify::leibniz_defect;

fn main() -> multifrac::Result<()> {
    let profile = MeasureProfile::binomial(0.5, 1.0)?;
    let d = Domain::periodic(-3.0, 3.0, 256)?;
    let dq = OperatorSpec::new(OperatorKind::QDeriv).with_weight(profile.clone());
    let k0 = 2.0 * std::f64::consts::PI / d.length();
    let f = sample(&FunctionSpec::PlaneWave { k: 2.0 * k0 }, &d)?;
    let g = sample(&FunctionSpec::PlaneWave { k: -3.0 * k0 }, &d)?;
    println!("Leibniz defect of d_q: {:.3e}", leibniz_defect(&dq, &f, &g)?.max_abs());

    let frac = OperatorSpec::new(OperatorKind::WeightedFrac { alpha: 0.5 }).with_weight(profile.clone());
    println!("Leibniz defect of D^0.5: {:.3e}", leibniz_defect(&frac, &f, &g)?.max_abs());

    let inner = Domain::bounded(0.5, 4.5, 2000)?;
    let q = multifrac::grid::GridFunction::from_fn(inner, |x| profile.q(x).into());
    let one = dq.apply(&q)?;
    let bulk = inner.bulk(0.05);
    let worst = one.values()[bulk].iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    println!("max |d_q q - 1| in the bulk: {worst:.3e}");
    Ok(())
}
