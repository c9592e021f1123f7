//! Tabulate a two-scale profile and its local scaling exponent across scales.

use multifrac::measure::{MeasureProfile, MeasureTerm, ProfileMode};

fn main() -> multifrac::Result<()> {
    let terms = vec![MeasureTerm::power_law(0.7, 10.0), MeasureTerm::power_law(0.4, 1.0)];
    let profile = MeasureProfile::new(terms, ProfileMode::Full)?;
    println!("{:>10}  {:>12}  {:>12}  {:>8}", "x", "q", "v", "alpha");
    for i in 0..=12 {
        let x = 10f64.powf(-4.0 + 0.75 * i as f64);
        println!(
            "{x:>10.3e}  {:>12.5e}  {:>12.5e}  {:>8.4}",
            profile.q(x),
            profile.weight(x)?,
            profile.local_scaling_exponent(x)?
        );
    }
    Ok(())
}
