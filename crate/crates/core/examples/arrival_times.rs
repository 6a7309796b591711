//! The process on (0, t) as a sequence of arrival times.

use pppkit::stats::empirical_mean_stderr;
use pppkit::{arrival_times, fully_observed_gap_count, replicate, RngStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (mu, t) = (2.0, 50.0);
    let one = arrival_times(mu, t, &mut RngStream::new(3, 0))?;
    println!(
        "{} arrivals on (0, {t}); first five: {:.3?}",
        one.len(),
        &one.times()[..5]
    );
    for s in [1.0, 10.0, 25.0, 50.0] {
        println!("X_{s} = {}", one.count_until(s));
    }

    let runs = replicate(20_000, 3, 1, |rng| arrival_times(mu, t, rng).unwrap());
    let k = fully_observed_gap_count(mu, t);
    let leading: Vec<f64> = runs.iter().flat_map(|r| r.leading_gaps(k)).collect();
    let all: Vec<f64> = runs.iter().flat_map(|r| r.gaps()).collect();
    let e = empirical_mean_stderr(&leading)?;
    let naive = empirical_mean_stderr(&all)?;
    println!(
        "first {k} gaps per run: mean {:.5} +- {:.5} (1/mu = {})",
        e.mean,
        e.stderr,
        1.0 / mu
    );
    println!(
        "every gap inside the window: mean {:.5} +- {:.5}",
        naive.mean, naive.stderr
    );
    Ok(())
}
