//! Merge two independent processes, then split one by random coloring.

use pppkit::stats::{correlation, empirical_mean_stderr};
use pppkit::{replicate, sample_ppp, superpose, thin, Region};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let window = Region::unit_cube(2)?;

    let merged = replicate(10_000, 5, 0, |rng| {
        let a = sample_ppp(2.0, &window, rng).unwrap();
        let b = sample_ppp(3.0, &window, rng).unwrap();
        superpose(&[a, b]).unwrap()
    });
    let sizes: Vec<f64> = merged.iter().map(|c| c.len() as f64).collect();
    let e = empirical_mean_stderr(&sizes)?;
    println!(
        "merged: intensity {}, mean count {:.3} +- {:.3}",
        merged[0].intensity().unwrap(),
        e.mean,
        e.stderr
    );
    let marks = merged[0].marks().unwrap();
    println!("first cloud sources: {marks:?}");

    let probs = [1.0 / 3.0, 2.0 / 3.0];
    let parts = replicate(10_000, 5, 1 << 20, |rng| {
        let cloud = sample_ppp(6.0, &window, rng).unwrap();
        thin(&cloud, &probs, rng).unwrap()
    });
    for (i, p) in probs.iter().enumerate() {
        let counts: Vec<f64> = parts.iter().map(|v| v[i].len() as f64).collect();
        let e = empirical_mean_stderr(&counts)?;
        println!(
            "color {i}: intensity {:.3}, mean count {:.3} +- {:.3}",
            6.0 * p,
            e.mean,
            e.stderr
        );
    }
    let c0: Vec<f64> = parts.iter().map(|v| v[0].len() as f64).collect();
    let c1: Vec<f64> = parts.iter().map(|v| v[1].len() as f64).collect();
    println!("corr(color 0, color 1) = {:.4}", correlation(&c0, &c1)?);
    Ok(())
}
