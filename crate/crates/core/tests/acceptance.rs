//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pppkit::cli::{run, RunConfig};
use pppkit::stats::{chi_square_sf, poisson_pmf, Pmf};
use pppkit::verify::{run_check, BatteryConfig, CheckName, CheckOutcome};
use pppkit::{replicate, replicate_sequential, sample_ppp, Region, RngStream};

const SEED: u64 = 20_240_601;

/// p-value of chi-square with 2 degrees of freedom at 5.991, `exp(-5.991 / 2)`
/// to 20 digits.
const CHI2_REFERENCE: f64 = 0.050_011_615_026_579_09;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn config() -> BatteryConfig {
    BatteryConfig::standard(SEED)
}

fn p_values(c: &CheckOutcome) -> String {
    c.tests
        .iter()
        .map(|t| format!("{}: p={:.4}", t.label, t.report.p_value))
        .collect::<Vec<_>>()
        .join("; ")
}

fn require_tests(c: &CheckOutcome, labels: &[&str]) -> bool {
    labels.iter().all(|l| c.test(l).is_some_and(|r| r.pass))
}

fn require_invariants(c: &CheckOutcome, labels: &[&str]) -> bool {
    labels
        .iter()
        .all(|l| c.invariant_named(l).is_some_and(|i| i.pass))
}

fn count_law() -> Verdict {
    let cfg = config();
    let (c, elapsed) = match timed_check(&cfg, CheckName::CountLaw) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let fast = elapsed < Duration::from_secs(10);
    verdict(
        require_tests(&c, &["N(B) ~ Poisson(mu |B|)"]) && fast,
        format!("{} [{elapsed:.2?}, limit 10s]", p_values(&c)),
    )
}

fn timed_check(cfg: &BatteryConfig, name: CheckName) -> Result<(CheckOutcome, Duration), String> {
    let start = Instant::now();
    let c = run_check(cfg, name).map_err(|e| e.to_string())?;
    Ok((c, start.elapsed()))
}

fn conditioning() -> Verdict {
    let cfg = config();
    let (c, elapsed) = match timed_check(&cfg, CheckName::Conditioning) {
        Ok(x) => x,
        Err(e) => return verdict(false, e),
    };
    let labels = [
        "process | N(B)=n: N(A) ~ Binomial(n, |A|/|B|)",
        "uniform sampler: N(A) ~ Binomial(n, |A|/|B|)",
        "process | N(B)=n: N(A') ~ Binomial(n, |A'|/|B|)",
        "uniform sampler: N(A') ~ Binomial(n, |A'|/|B|)",
    ];
    let a = cfg.subregion.measure();
    let a_mc = cfg.mc_subregion.measure();
    let geometry = a.is_exact()
        && a.value == 0.5
        && !a_mc.is_exact()
        && (a_mc.value - std::f64::consts::PI / 16.0).abs() <= 3.0 * a_mc.std_error;
    let fast = elapsed < Duration::from_secs(30);
    let pass = require_tests(&c, &labels) && geometry && fast;
    verdict(
        pass,
        format!(
            "|A'| = {:.5} +- {:.1e} (pi/16 = {:.5}); {} [{elapsed:.2?}, limit 30s]",
            a_mc.value,
            a_mc.std_error,
            std::f64::consts::PI / 16.0,
            p_values(&c)
        ),
    )
}

fn two_sampler() -> Verdict {
    let cfg = config();
    match run_check(&cfg, CheckName::Conditioning) {
        Ok(c) => {
            let labels = [
                "two-sample: N(A) process vs uniform sampler",
                "two-sample: N(A') process vs uniform sampler",
            ];
            let detail = labels
                .iter()
                .filter_map(|l| c.test(l).map(|r| format!("{l}: p={:.4}", r.p_value)))
                .collect::<Vec<_>>()
                .join("; ");
            verdict(require_tests(&c, &labels), detail)
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn independence() -> Verdict {
    match run_check(&config(), CheckName::Independence) {
        Ok(c) => {
            let control_rejected = c.test("control: (N(A1), N(A1))").is_some_and(|r| !r.pass);
            let pass = require_tests(&c, &["N(A1) independent of N(A2)"])
                && control_rejected
                && require_invariants(&c, &["coupled control is rejected"]);
            verdict(pass, p_values(&c))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn superposition() -> Verdict {
    match run_check(&config(), CheckName::Superposition) {
        Ok(c) => {
            let pass = require_tests(&c, &["merged count ~ Poisson(sum mu_i |B|)"])
                && require_invariants(&c, &["merged size = sum of sizes"]);
            verdict(pass, p_values(&c))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn thinning() -> Verdict {
    match run_check(&config(), CheckName::Thinning) {
        Ok(c) => {
            let corr = c.estimate_named("corr(color 0, color 1)");
            let corr_ok = corr.is_some_and(|e| e.pass && e.value.abs() <= 0.03);
            let pass = require_tests(
                &c,
                &[
                    "color 0 ~ Poisson(mu p_0 |B|)",
                    "color 1 ~ Poisson(mu p_1 |B|)",
                ],
            ) && corr_ok
                && require_invariants(&c, &["colors partition the points exactly"]);
            verdict(
                pass,
                format!(
                    "{}; corr = {:.4}",
                    p_values(&c),
                    corr.map_or(f64::NAN, |e| e.value)
                ),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn one_dimensional() -> Verdict {
    match run_check(&config(), CheckName::ExpGaps1d) {
        Ok(c) => {
            let gap = c.estimate_named("mean of pooled leading gaps");
            let gap_ok =
                gap.is_some_and(|e| e.target == 0.5 && (e.value - 0.5).abs() <= e.tolerance);
            let pass = require_tests(&c, &["X_t ~ Poisson(mu t)"])
                && gap_ok
                && require_invariants(&c, &["times strictly increasing inside (0, t)"]);
            let g = gap.map_or(String::new(), |e| {
                format!("gap mean {:.5} (3 stderr = {:.5})", e.value, e.tolerance)
            });
            verdict(pass, format!("{}; {g}", p_values(&c)))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn numerical_kernels() -> Verdict {
    let mut worst_norm: f64 = 1.0;
    for mean in [0.1, 1.0, 5.0, 8.25, 50.0, 100.0, 400.0] {
        worst_norm = worst_norm.min(Pmf::poisson(mean).unwrap().truncated_total());
    }
    for (n, p) in [
        (8, 0.5),
        (8, std::f64::consts::PI / 16.0),
        (40, 0.01),
        (200, 0.97),
    ] {
        worst_norm = worst_norm.min(Pmf::binomial(n, p).unwrap().truncated_total());
    }
    let norm_ok = worst_norm >= 1.0 - 1e-12;

    let mut worst_rec: f64 = 0.0;
    for mean in [0.5, 2.0, 5.0, 30.0, 100.0] {
        for k in 0..(3.0 * mean + 30.0) as u64 {
            let lhs = poisson_pmf(mean, k + 1).unwrap();
            let rhs = poisson_pmf(mean, k).unwrap() * mean / (k + 1) as f64;
            if rhs > 0.0 {
                worst_rec = worst_rec.max((lhs - rhs).abs() / rhs);
            }
        }
    }
    let rec_ok = worst_rec <= 1e-10;

    let p = chi_square_sf(5.991, 2);
    let p_ok = (p - CHI2_REFERENCE).abs() <= 1e-3;

    let disk = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
    let m = disk
        .measure_mc(&mut RngStream::new(SEED, 0), 1_000_000)
        .unwrap();
    let mc_ok = m.samples_used == 1_000_000
        && m.std_error > 0.0
        && (m.value - std::f64::consts::PI).abs() <= 3.0 * m.std_error;

    verdict(
        norm_ok && rec_ok && p_ok && mc_ok,
        format!(
            "min normalization {worst_norm:.15}; max recurrence error {worst_rec:.1e}; \
             p(2, 5.991) = {p:.10}; disk {:.5} +- {:.5}",
            m.value, m.std_error
        ),
    )
}

fn csv_bytes(args: &[&str]) -> Result<Vec<u8>, String> {
    let cfg = RunConfig::from_args(args.iter().copied()).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    run(&cfg, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn determinism() -> Verdict {
    let args = [
        "pppkit",
        "sample",
        "--region",
        "diff(box:0,0;2,1, ball:0.5,0.5;0.25)",
        "--mu",
        "40",
        "--seed",
        "17",
        "--stream",
        "3",
        "--reps",
        "4",
    ];
    let (first, second) = match (csv_bytes(&args), csv_bytes(&args)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return verdict(false, e),
    };
    let csv_ok = !first.is_empty() && first == second;

    let region = Region::unit_cube(3).unwrap();
    let par = replicate(500, SEED, 7, |rng| sample_ppp(20.0, &region, rng).unwrap());
    let seq = replicate_sequential(500, SEED, 7, |rng| sample_ppp(20.0, &region, rng).unwrap());
    let by_hand: Vec<_> = (0..500)
        .map(|i| sample_ppp(20.0, &region, &mut RngStream::new(SEED, 7 + i)).unwrap())
        .collect();
    let par_ok = par == seq && seq == by_hand;

    verdict(
        csv_ok && par_ok,
        format!(
            "csv {} bytes identical: {csv_ok}; parallel = sequential: {par_ok}",
            first.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 count law", count_law),
        ("2 conditioning", conditioning),
        ("3 two-sampler equivalence", two_sampler),
        ("4 independence", independence),
        ("5 superposition", superposition),
        ("6 thinning", thinning),
        ("7 one-dimensional view", one_dimensional),
        ("8 numerical kernels", numerical_kernels),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let (v, elapsed) = timed(f);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name} ({elapsed:.2?}): {}", v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
