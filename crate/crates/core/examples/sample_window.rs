//! Draw a Poisson cloud on the unit square and write it as CSV.
//!
//! cargo run --example sample_window -- 50 7

use pppkit::cli::write_csv;
use pppkit::{sample_ppp, Region, RngStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().map_or(Ok(50.0), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(7), |s| s.parse())?;

    let window = Region::unit_cube(2)?;
    let cloud = sample_ppp(mu, &window, &mut RngStream::new(seed, 0))?;
    eprintln!("{} points, expected {mu}", cloud.len());
    write_csv(&mut std::io::stdout().lock(), &cloud)?;
    Ok(())
}
