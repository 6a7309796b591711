//! Statistical certification battery.
//!
//! Each check simulates many independent replications and compares what it
//! sees against the exact law the process must follow:
//!
//! | check           | simulated quantity                        | reference law                 |
//! |-----------------|-------------------------------------------|-------------------------------|
//! | `count_law`     | `N(B)`                                    | `Poisson(mu |B|)`             |
//! | `independence`  | `(N(A1), N(A2))` for disjoint `A1, A2`    | product of margins            |
//! | `conditioning`  | `N(A)` given `N(B) = n`, both samplers    | `Binomial(n, |A|/|B|)`        |
//! | `superposition` | total count of two merged processes       | `Poisson((mu1 + mu2) |B|)`    |
//! | `thinning`      | per-color counts after random coloring    | independent `Poisson(mu p_i)` |
//! | `exp_gaps_1d`   | counts and gaps of the process on `[0, t]`| `Poisson(mu t)`, `Exp(mu)`    |
//!
//! Every check runs on its own block of stream ids, so the report is a pure
//! function of the configuration.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{
    arrival_times, fully_observed_gap_count, replicate, sample_conditional, sample_ppp, superpose,
    thin, PointCloud,
};
use crate::region::Region;
use crate::stats::{
    chi_square_gof, correlation, empirical_mean_stderr, histogram, independence_test,
    two_sample_test, ContingencyTable, GofReport, Pmf, DEFAULT_ALPHA,
};

/// Largest tolerated inter-color count correlation in the thinning check.
pub const THINNING_CORRELATION_TOLERANCE: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    CountLaw,
    Independence,
    Conditioning,
    Superposition,
    Thinning,
    #[serde(rename = "exp_gaps_1d")]
    ExpGaps1d,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::CountLaw,
        CheckName::Independence,
        CheckName::Conditioning,
        CheckName::Superposition,
        CheckName::Thinning,
        CheckName::ExpGaps1d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::CountLaw => "count_law",
            CheckName::Independence => "independence",
            CheckName::Conditioning => "conditioning",
            CheckName::Superposition => "superposition",
            CheckName::Thinning => "thinning",
            CheckName::ExpGaps1d => "exp_gaps_1d",
        }
    }

    fn stream_block(self) -> u64 {
        let idx = CheckName::ALL.iter().position(|c| *c == self).unwrap_or(0) as u64;
        (idx + 1) << 32
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check `{s}`")))
    }
}

/// Geometry and parameters of the battery.
#[derive(Clone, Debug)]
pub struct BatteryConfig {
    pub seed: u64,
    pub replications: usize,
    pub alpha: f64,
    pub checks: Vec<CheckName>,
    /// The window `B`.
    pub window: Region,
    /// `A ⊂ B` with exact measure.
    pub subregion: Region,
    /// `A' ⊂ B` whose measure is only known by Monte Carlo.
    pub mc_subregion: Region,
    /// Disjoint pair used by the independence check.
    pub disjoint_pair: (Region, Region),
    pub mu: f64,
    pub conditional_n: usize,
    pub superposition_mus: Vec<f64>,
    pub thinning_mu: f64,
    pub thinning_probs: Vec<f64>,
    pub gaps_mu: f64,
    pub gaps_horizon: f64,
}

impl BatteryConfig {
    /// Unit square window, left half as `A`, the radius-1/2 quarter disk at
    /// the origin as `A'`, `mu = 5`, `n = 8`, 20000 replications.
    pub fn standard(seed: u64) -> Self {
        let b = |lo: [f64; 2], hi: [f64; 2]| {
            Region::cuboid(lo.to_vec(), hi.to_vec()).expect("valid box")
        };
        let window = b([0.0, 0.0], [1.0, 1.0]);
        let left = b([0.0, 0.0], [0.5, 1.0]);
        let right = b([0.5, 0.0], [1.0, 1.0]);
        let quarter_disk = window
            .clone()
            .intersection(Region::ball(vec![0.0, 0.0], 0.5).expect("valid ball"))
            .expect("same dimension");
        Self {
            seed,
            replications: 20_000,
            alpha: DEFAULT_ALPHA,
            checks: CheckName::ALL.to_vec(),
            window,
            subregion: left.clone(),
            mc_subregion: quarter_disk,
            disjoint_pair: (left, right),
            mu: 5.0,
            conditional_n: 8,
            superposition_mus: vec![2.0, 3.0],
            thinning_mu: 6.0,
            thinning_probs: vec![1.0 / 3.0, 2.0 / 3.0],
            gaps_mu: 2.0,
            gaps_horizon: 50.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledGof {
    pub label: String,
    #[serde(flatten)]
    pub report: GofReport,
}

/// A scalar estimate compared to a target: passes when
/// `|value - target| <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateCheck {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl EstimateCheck {
    fn new(label: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        }
    }
}

/// A deterministic property that must hold exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub label: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: CheckName,
    pub pass: bool,
    pub tests: Vec<LabeledGof>,
    pub estimates: Vec<EstimateCheck>,
    pub invariants: Vec<InvariantCheck>,
}

impl CheckOutcome {
    fn new(name: CheckName) -> Self {
        Self {
            name,
            pass: true,
            tests: Vec::new(),
            estimates: Vec::new(),
            invariants: Vec::new(),
        }
    }

    fn gof(&mut self, label: &str, report: GofReport) {
        self.pass &= report.pass;
        self.tests.push(LabeledGof {
            label: label.into(),
            report,
        });
    }

    fn estimate(&mut self, e: EstimateCheck) {
        self.pass &= e.pass;
        self.estimates.push(e);
    }

    fn invariant(&mut self, label: &str, pass: bool) {
        self.pass &= pass;
        self.invariants.push(InvariantCheck {
            label: label.into(),
            pass,
        });
    }

    /// Looks up a test by label.
    pub fn test(&self, label: &str) -> Option<&GofReport> {
        self.tests
            .iter()
            .find(|t| t.label == label)
            .map(|t| &t.report)
    }

    pub fn estimate_named(&self, label: &str) -> Option<&EstimateCheck> {
        self.estimates.iter().find(|e| e.label == label)
    }

    pub fn invariant_named(&self, label: &str) -> Option<&InvariantCheck> {
        self.invariants.iter().find(|e| e.label == label)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub replications: usize,
    pub alpha: f64,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

impl BatteryReport {
    pub fn check(&self, name: CheckName) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the selected checks.
pub fn run_battery(cfg: &BatteryConfig) -> Result<BatteryReport> {
    if cfg.replications == 0 {
        return Err(Error::InvalidArgument(
            "replications must be at least 1".into(),
        ));
    }
    let checks = cfg
        .checks
        .iter()
        .map(|&name| run_check(cfg, name))
        .collect::<Result<Vec<_>>>()?;
    Ok(BatteryReport {
        seed: cfg.seed,
        replications: cfg.replications,
        alpha: cfg.alpha,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

pub fn run_check(cfg: &BatteryConfig, name: CheckName) -> Result<CheckOutcome> {
    match name {
        CheckName::CountLaw => count_law(cfg),
        CheckName::Independence => independence(cfg),
        CheckName::Conditioning => conditioning(cfg),
        CheckName::Superposition => superposition(cfg),
        CheckName::Thinning => thinning(cfg),
        CheckName::ExpGaps1d => exp_gaps(cfg),
    }
}

fn reps<T: Send>(
    cfg: &BatteryConfig,
    name: CheckName,
    offset: u64,
    f: impl Fn(&mut crate::rng::RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    replicate(cfg.replications, cfg.seed, name.stream_block() + offset, f)
        .into_iter()
        .collect()
}

fn gof_counts(counts: &[u64], pmf: &Pmf, alpha: f64) -> Result<GofReport> {
    chi_square_gof(
        &histogram(counts.iter().copied()),
        pmf,
        counts.len() as u64,
        alpha,
    )
}

fn count_law(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::CountLaw);
    let counts = reps(cfg, CheckName::CountLaw, 0, |rng| {
        Ok(sample_ppp(cfg.mu, &cfg.window, rng)?.len() as u64)
    })?;
    let pmf = Pmf::poisson(cfg.mu * cfg.window.measure().value)?;
    out.gof(
        "N(B) ~ Poisson(mu |B|)",
        gof_counts(&counts, &pmf, cfg.alpha)?,
    );
    Ok(out)
}

fn independence(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::Independence);
    let (a1, a2) = &cfg.disjoint_pair;
    let pairs = reps(cfg, CheckName::Independence, 0, |rng| {
        let cloud = sample_ppp(cfg.mu, &cfg.window, rng)?;
        Ok((cloud.count_in(a1)? as u64, cloud.count_in(a2)? as u64))
    })?;
    let table = ContingencyTable::from_pairs(pairs.iter().copied());
    out.gof(
        "N(A1) independent of N(A2)",
        independence_test(&table, cfg.alpha)?,
    );

    let coupled = ContingencyTable::from_pairs(pairs.iter().map(|(x, _)| (*x, *x)));
    let control = independence_test(&coupled, cfg.alpha)?;
    out.invariant("coupled control is rejected", !control.pass);
    out.tests.push(LabeledGof {
        label: "control: (N(A1), N(A1))".into(),
        report: control,
    });
    Ok(out)
}

fn conditioning(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::Conditioning);
    let n = cfg.conditional_n;
    let b = cfg.window.measure().value;
    let subregions = [
        ("A", &cfg.subregion),
        ("A'", &cfg.mc_subregion),
        ("B", &cfg.window),
    ];
    let count_all = |cloud: &PointCloud| -> Result<[u64; 3]> {
        let mut c = [0u64; 3];
        for (slot, (_, a)) in c.iter_mut().zip(&subregions) {
            *slot = cloud.count_in(a)? as u64;
        }
        Ok(c)
    };

    // rejection-conditioned process draws: keep replications with N(B) = n
    let from_ppp: Vec<[u64; 3]> = reps(cfg, CheckName::Conditioning, 0, |rng| {
        let cloud = sample_ppp(cfg.mu, &cfg.window, rng)?;
        if cloud.len() == n {
            count_all(&cloud).map(Some)
        } else {
            Ok(None)
        }
    })?
    .into_iter()
    .flatten()
    .collect();
    let from_uniform: Vec<[u64; 3]> = reps(cfg, CheckName::Conditioning, 1 << 31, |rng| {
        count_all(&sample_conditional(n, &cfg.window, rng)?)
    })?;
    out.invariant(
        "conditioned process draws are available",
        from_ppp.len() >= 2,
    );
    if from_ppp.len() < 2 {
        return Ok(out);
    }

    for (idx, (name, a)) in subregions.iter().enumerate().take(2) {
        let pmf = Pmf::conditional_count(n as u64, a.measure().value, b)?;
        let ppp_counts: Vec<u64> = from_ppp.iter().map(|c| c[idx]).collect();
        let uni_counts: Vec<u64> = from_uniform.iter().map(|c| c[idx]).collect();
        out.gof(
            &format!("process | N(B)=n: N({name}) ~ Binomial(n, |{name}|/|B|)"),
            gof_counts(&ppp_counts, &pmf, cfg.alpha)?,
        );
        out.gof(
            &format!("uniform sampler: N({name}) ~ Binomial(n, |{name}|/|B|)"),
            gof_counts(&uni_counts, &pmf, cfg.alpha)?,
        );
        out.gof(
            &format!("two-sample: N({name}) process vs uniform sampler"),
            two_sample_test(
                &histogram(ppp_counts.iter().copied()),
                &histogram(uni_counts.iter().copied()),
                cfg.alpha,
            )?,
        );
    }
    // A = B: the count law degenerates to a point mass at n
    let point_mass = Pmf::conditional_count(n as u64, b, b)?.mass(n as u64) == 1.0;
    let all_in_b = from_ppp
        .iter()
        .chain(&from_uniform)
        .all(|c| c[2] == n as u64);
    out.invariant(
        "A = B: every point counted (point mass at n)",
        point_mass && all_in_b,
    );
    Ok(out)
}

fn superposition(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::Superposition);
    let merged = reps(cfg, CheckName::Superposition, 0, |rng| {
        let parts = cfg
            .superposition_mus
            .iter()
            .map(|mu| sample_ppp(*mu, &cfg.window, rng))
            .collect::<Result<Vec<_>>>()?;
        let sizes: usize = parts.iter().map(PointCloud::len).sum();
        let merged = superpose(&parts)?;
        Ok((merged.len() as u64, merged.len() == sizes))
    })?;
    let total_mu: f64 = cfg.superposition_mus.iter().sum();
    let counts: Vec<u64> = merged.iter().map(|m| m.0).collect();
    let pmf = Pmf::poisson(total_mu * cfg.window.measure().value)?;
    out.gof(
        "merged count ~ Poisson(sum mu_i |B|)",
        gof_counts(&counts, &pmf, cfg.alpha)?,
    );
    out.invariant("merged size = sum of sizes", merged.iter().all(|m| m.1));
    Ok(out)
}

fn thinning(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::Thinning);
    let k = cfg.thinning_probs.len();
    let runs = reps(cfg, CheckName::Thinning, 0, |rng| {
        let cloud = sample_ppp(cfg.thinning_mu, &cfg.window, rng)?;
        let parts = thin(&cloud, &cfg.thinning_probs, rng)?;
        let mut original: Vec<&[f64]> = cloud.points().collect();
        let mut recombined: Vec<&[f64]> = parts.iter().flat_map(PointCloud::points).collect();
        original.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        recombined.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        let sizes: Vec<u64> = parts.iter().map(|p| p.len() as u64).collect();
        Ok((sizes, original == recombined))
    })?;
    let b = cfg.window.measure().value;
    for (i, p) in cfg.thinning_probs.iter().enumerate() {
        let counts: Vec<u64> = runs.iter().map(|r| r.0[i]).collect();
        let pmf = Pmf::poisson(cfg.thinning_mu * p * b)?;
        out.gof(
            &format!("color {i} ~ Poisson(mu p_{i} |B|)"),
            gof_counts(&counts, &pmf, cfg.alpha)?,
        );
    }
    for i in 0..k {
        for j in i + 1..k {
            let xi: Vec<f64> = runs.iter().map(|r| r.0[i] as f64).collect();
            let xj: Vec<f64> = runs.iter().map(|r| r.0[j] as f64).collect();
            out.estimate(EstimateCheck::new(
                &format!("corr(color {i}, color {j})"),
                correlation(&xi, &xj)?,
                0.0,
                THINNING_CORRELATION_TOLERANCE,
            ));
        }
    }
    out.invariant(
        "colors partition the points exactly",
        runs.iter().all(|r| r.1),
    );
    Ok(out)
}

fn exp_gaps(cfg: &BatteryConfig) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(CheckName::ExpGaps1d);
    let runs = reps(cfg, CheckName::ExpGaps1d, 0, |rng| {
        arrival_times(cfg.gaps_mu, cfg.gaps_horizon, rng)
    })?;
    let counts: Vec<u64> = runs.iter().map(|r| r.len() as u64).collect();
    let pmf = Pmf::poisson(cfg.gaps_mu * cfg.gaps_horizon)?;
    out.gof("X_t ~ Poisson(mu t)", gof_counts(&counts, &pmf, cfg.alpha)?);
    let k = fully_observed_gap_count(cfg.gaps_mu, cfg.gaps_horizon);
    let gaps: Vec<f64> = runs.iter().flat_map(|r| r.leading_gaps(k)).collect();
    let est = empirical_mean_stderr(&gaps)?;
    out.estimate(EstimateCheck::new(
        "mean of pooled leading gaps",
        est.mean,
        1.0 / cfg.gaps_mu,
        3.0 * est.stderr,
    ));
    let ordered = runs.iter().all(|r| {
        r.times().windows(2).all(|w| w[0] < w[1])
            && r.times().iter().all(|t| *t > 0.0 && *t < cfg.gaps_horizon)
    });
    out.invariant("times strictly increasing inside (0, t)", ordered);
    Ok(out)
}
