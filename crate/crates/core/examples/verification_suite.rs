//! Run the full property catalog and print the report table.

use multifrac::verify::{run_suite, SuiteConfig};

fn main() -> multifrac::Result<()> {
    let start = std::time::Instant::now();
    let report = run_suite(&SuiteConfig::default())?;
    print!("{}", report.to_table());
    println!("wall time {:.2?}", start.elapsed());
    Ok(())
}
