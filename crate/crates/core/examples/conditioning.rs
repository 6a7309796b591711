//! Given N(B) = n, the count in A is Binomial(n, |A|/|B|). Compare the
//! count histogram from the process (keeping runs with N(B) = n) with the
//! direct uniform sampler and the exact pmf.

use pppkit::stats::{chi_square_gof, histogram, two_sample_test, Pmf, DEFAULT_ALPHA};
use pppkit::{parse_region, replicate, sample_conditional, sample_ppp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let window = parse_region("box:0,0;1,1")?;
    let a = parse_region("inter(box:0,0;1,1, ball:0,0;0.5)")?;
    let n = 8;
    let reps = 20_000;

    let from_process: Vec<u64> = replicate(reps, 1, 0, |rng| {
        let c = sample_ppp(5.0, &window, rng).unwrap();
        (c.len() == n).then(|| c.count_in(&a).unwrap() as u64)
    })
    .into_iter()
    .flatten()
    .collect();
    let from_uniform: Vec<u64> = replicate(reps, 1, 1 << 31, |rng| {
        sample_conditional(n, &window, rng)
            .unwrap()
            .count_in(&a)
            .unwrap() as u64
    });

    let pmf = Pmf::conditional_count(n as u64, a.measure().value, window.measure().value)?;
    let h_proc = histogram(from_process.iter().copied());
    let h_uni = histogram(from_uniform.iter().copied());
    println!(
        "|A| = {:.5} (Monte Carlo), {} conditioned runs",
        a.measure().value,
        from_process.len()
    );
    println!("k   process  uniform  expected");
    for k in 0..=n {
        let get = |h: &[u64]| h.get(k).copied().unwrap_or(0);
        println!(
            "{k}   {:>7}  {:>7}  {:>8.1}",
            get(&h_proc),
            get(&h_uni),
            pmf.mass(k as u64) * reps as f64
        );
    }
    let gof = chi_square_gof(&h_uni, &pmf, reps as u64, DEFAULT_ALPHA)?;
    let two = two_sample_test(&h_proc, &h_uni, DEFAULT_ALPHA)?;
    println!("uniform vs binomial: p = {:.4}", gof.p_value);
    println!("process vs uniform:  p = {:.4}", two.p_value);
    Ok(())
}
