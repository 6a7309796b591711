//! Run the certification battery and print a summary.
//!
//! cargo run --release --example verify_battery -- 7

use pppkit::verify::{run_battery, BatteryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    let report = run_battery(&BatteryConfig::standard(seed))?;
    for check in &report.checks {
        println!(
            "{:<14} {}",
            check.name.as_str(),
            if check.pass { "PASS" } else { "FAIL" }
        );
        for t in &check.tests {
            println!(
                "    {:<52} stat {:>8.3}  dof {:>2}  p {:.4}",
                t.label, t.report.statistic, t.report.dof, t.report.p_value
            );
        }
        for e in &check.estimates {
            println!(
                "    {:<52} {:.5} (target {}, tol {:.5})",
                e.label, e.value, e.target, e.tolerance
            );
        }
        for i in &check.invariants {
            println!("    {:<52} {}", i.label, i.pass);
        }
    }
    println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
