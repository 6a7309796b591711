//! Command-line surface of the `pppkit` binary.
//!
//! Exit codes: `0` on success (and on a passing `verify`), `1` when a run
//! fails or `verify` rejects a check, `2` for malformed input.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::grammar::parse_region;
use crate::process::{color, replicate, sample_conditional, sample_ppp, superpose, PointCloud};
use crate::region::Region;
use crate::rng::{validate_probabilities, RngStream};
use crate::stats::DEFAULT_ALPHA;
use crate::verify::{run_battery, BatteryConfig, BatteryReport, CheckName};

pub const SEED_ENV: &str = "PPPKIT_SEED";
pub const DEFAULT_VERIFY_REPS: usize = 20_000;

#[derive(Parser, Debug)]
#[command(
    name = "pppkit",
    version,
    about = "Simulate homogeneous Poisson point processes and certify their laws",
    after_help = "Reproducibility: output is a pure function of (--seed, --stream). \
                  Replication i uses stream --stream + i. PPPKIT_SEED supplies the seed \
                  when --seed is absent.\n\n\
                  Regions: box:lo0,lo1;hi0,hi1 | ball:c0,c1;r | union(e1,e2) | inter(e1,e2) | diff(e1,e2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw Poisson point clouds with intensity --mu on --region.
    Sample {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Draw exactly --n uniform points on --region.
    Conditional {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a Poisson cloud and color each point independently with --probs.
    Thin {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Comma-separated color probabilities summing to 1.
        #[arg(long, allow_hyphen_values = true)]
        probs: String,
        #[command(flatten)]
        output: Output,
    },
    /// Merge independent Poisson clouds; --mu takes one intensity per source.
    Superpose {
        #[command(flatten)]
        geometry: Geometry,
        /// Comma-separated intensities.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[command(flatten)]
        output: Output,
    },
    /// Run the statistical certification battery and write a JSON report.
    Verify {
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_VERIFY_REPS)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Comma-separated subset of checks (default: all).
        #[arg(long)]
        checks: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Geometry {
    /// Expected dimension; must match the region.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    region: String,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Sample,
    Conditional,
    Thin,
    Superpose,
    Verify,
}

/// A fully parsed invocation. Only the fields the command uses are set.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub dim: Option<usize>,
    pub region: Option<String>,
    pub mu: Vec<f64>,
    pub n: Option<usize>,
    pub probs: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub stream: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub alpha: f64,
    pub checks: Vec<CheckName>,
}

impl RunConfig {
    fn base(command: CommandKind) -> Self {
        Self {
            command,
            dim: None,
            region: None,
            mu: Vec::new(),
            n: None,
            probs: Vec::new(),
            replications: 1,
            seed: 0,
            stream: 0,
            format: Format::Csv,
            out: None,
            alpha: DEFAULT_ALPHA,
            checks: CheckName::ALL.to_vec(),
        }
    }

    /// Parses command-line arguments (including the program name).
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                CliError::Info(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        })?;
        let cfg = match cli.command {
            Command::Sample {
                geometry,
                mu,
                output,
            } => {
                let mut c = Self::with_output(CommandKind::Sample, geometry, output);
                c.mu = vec![mu];
                c
            }
            Command::Conditional {
                geometry,
                n,
                output,
            } => {
                let mut c = Self::with_output(CommandKind::Conditional, geometry, output);
                c.n = Some(n);
                c
            }
            Command::Thin {
                geometry,
                mu,
                probs,
                output,
            } => {
                let mut c = Self::with_output(CommandKind::Thin, geometry, output);
                c.mu = vec![mu];
                c.probs = parse_list(&probs, "--probs")?;
                c
            }
            Command::Superpose {
                geometry,
                mu,
                output,
            } => {
                let mut c = Self::with_output(CommandKind::Superpose, geometry, output);
                c.mu = parse_list(&mu, "--mu")?;
                c
            }
            Command::Verify {
                seed,
                reps,
                alpha,
                checks,
                out,
            } => {
                let mut c = Self::base(CommandKind::Verify);
                c.seed = seed;
                c.replications = reps;
                c.alpha = alpha;
                c.out = out;
                c.format = Format::Json;
                if let Some(list) = checks {
                    c.checks = list
                        .split(',')
                        .map(|s| s.trim().parse())
                        .collect::<Result<_, Error>>()
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                }
                c
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn with_output(command: CommandKind, geometry: Geometry, output: Output) -> Self {
        let mut c = Self::base(command);
        c.dim = geometry.dim;
        c.region = Some(geometry.region);
        c.replications = output.reps;
        c.seed = output.seed;
        c.stream = output.stream;
        c.format = output.format;
        c.out = output.out;
        c
    }

    /// Checks the field-presence and range invariants.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.replications == 0 {
            return usage("--reps must be at least 1".into());
        }
        if let Some(bad) = self.mu.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return usage(format!("--mu must be finite and non-negative, got {bad}"));
        }
        let needs_region = self.command != CommandKind::Verify;
        if needs_region != self.region.is_some() {
            return usage("--region is required for this command".into());
        }
        match self.command {
            CommandKind::Sample | CommandKind::Thin if self.mu.len() != 1 => {
                return usage("--mu takes exactly one intensity".into())
            }
            CommandKind::Superpose if self.mu.is_empty() => {
                return usage("--mu needs at least one intensity".into())
            }
            CommandKind::Conditional if self.n.is_none() => return usage("--n is required".into()),
            CommandKind::Thin => {
                validate_probabilities(&self.probs).map_err(|e| CliError::Usage(e.to_string()))?
            }
            CommandKind::Verify if !(self.alpha > 0.0 && self.alpha < 1.0) => {
                return usage(format!("--alpha must lie in (0, 1), got {}", self.alpha))
            }
            _ => {}
        }
        Ok(())
    }

    /// Parses the region and checks it against `--dim`.
    pub fn parsed_region(&self) -> Result<Region, CliError> {
        let text = self
            .region
            .as_deref()
            .ok_or_else(|| CliError::Usage("--region is required".into()))?;
        let region = parse_region(text).map_err(|e| CliError::Usage(format!("--region: {e}")))?;
        if let Some(d) = self.dim {
            if d != region.dim() {
                return Err(CliError::Usage(format!(
                    "--dim {d} does not match the {}-dimensional region",
                    region.dim()
                )));
            }
        }
        Ok(region)
    }
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{flag}: malformed number `{}`", s.trim())))
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// `--help` / `--version` output; not an error.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

/// Result of a successful run.
#[derive(Debug)]
pub enum RunOutcome {
    Clouds(usize),
    Battery(BatteryReport),
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::Clouds(_) => 0,
            RunOutcome::Battery(r) if r.pass => 0,
            RunOutcome::Battery(_) => 1,
        }
    }
}

/// Executes `config`. Output goes to `--out` when given, otherwise to
/// `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome, CliError> {
    config.validate()?;
    if config.command == CommandKind::Verify {
        return run_verify(config, stdout);
    }
    let region = config.parsed_region()?;
    let clouds: Vec<PointCloud> =
        replicate(config.replications, config.seed, config.stream, |rng| {
            generate(config, &region, rng)
        })
        .into_iter()
        .collect::<Result<_, Error>>()?;

    match (&config.out, config.format) {
        (None, Format::Csv) => {
            for (i, c) in clouds.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                write_csv(stdout, c)?;
            }
        }
        (None, Format::Json) => write_json(stdout, &clouds)?,
        (Some(path), Format::Json) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_json(&mut w, &clouds)?;
            w.flush()?;
        }
        (Some(path), Format::Csv) => {
            for (i, c) in clouds.iter().enumerate() {
                let target = if clouds.len() == 1 {
                    path.clone()
                } else {
                    replication_path(path, i)
                };
                let mut w = BufWriter::new(File::create(target)?);
                write_csv(&mut w, c)?;
                w.flush()?;
            }
        }
    }
    Ok(RunOutcome::Clouds(clouds.len()))
}

fn generate(config: &RunConfig, region: &Region, rng: &mut RngStream) -> Result<PointCloud, Error> {
    match config.command {
        CommandKind::Sample => sample_ppp(config.mu[0], region, rng),
        CommandKind::Conditional => sample_conditional(config.n.unwrap_or(0), region, rng),
        CommandKind::Thin => {
            let cloud = sample_ppp(config.mu[0], region, rng)?;
            color(&cloud, &config.probs, rng)
        }
        CommandKind::Superpose => {
            let parts = config
                .mu
                .iter()
                .map(|mu| sample_ppp(*mu, region, rng))
                .collect::<Result<Vec<_>, _>>()?;
            superpose(&parts)
        }
        CommandKind::Verify => unreachable!("verify does not generate clouds"),
    }
}

/// `points.csv` with replication 3 becomes `points_0003.csv`.
pub fn replication_path(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("cloud");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{index:04}.{ext}"),
        None => format!("{stem}_{index:04}"),
    };
    path.with_file_name(name)
}

fn run_verify(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let mut battery = BatteryConfig::standard(config.seed);
    battery.replications = config.replications;
    battery.alpha = config.alpha;
    battery.checks = config.checks.clone();
    let report = run_battery(&battery)?;
    let json = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    match &config.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => writeln!(stdout, "{json}")?,
    }
    Ok(RunOutcome::Battery(report))
}

/// Header `x0,...,x{d-1}` plus a trailing `mark` column for marked clouds.
pub fn write_csv(w: &mut dyn Write, cloud: &PointCloud) -> io::Result<()> {
    let header: Vec<String> = (0..cloud.dim()).map(|i| format!("x{i}")).collect();
    write!(w, "{}", header.join(","))?;
    if cloud.marks().is_some() {
        write!(w, ",mark")?;
    }
    writeln!(w)?;
    for (i, p) in cloud.points().enumerate() {
        for (j, x) in p.iter().enumerate() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{x}")?;
        }
        if let Some(marks) = cloud.marks() {
            write!(w, ",{}", marks[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// JSON form of a point cloud.
#[derive(Debug, Serialize)]
pub struct CloudRecord<'a> {
    pub dim: usize,
    pub region: String,
    pub intensity: Option<f64>,
    pub seed: u64,
    pub stream: u64,
    pub points: Vec<&'a [f64]>,
    pub marks: Option<&'a [u32]>,
}

impl<'a> From<&'a PointCloud> for CloudRecord<'a> {
    fn from(c: &'a PointCloud) -> Self {
        Self {
            dim: c.dim(),
            region: c.region().to_string(),
            intensity: c.intensity(),
            seed: c.provenance().seed,
            stream: c.provenance().stream,
            points: c.points().collect(),
            marks: c.marks(),
        }
    }
}

/// One object for a single cloud, an array otherwise.
pub fn write_json(w: &mut dyn Write, clouds: &[PointCloud]) -> io::Result<()> {
    let records: Vec<CloudRecord> = clouds.iter().map(CloudRecord::from).collect();
    let result = if records.len() == 1 {
        serde_json::to_writer(&mut *w, &records[0])
    } else {
        serde_json::to_writer(&mut *w, &records)
    };
    result.map_err(io::Error::other)?;
    writeln!(w)
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = RunConfig::from_args(args).and_then(|cfg| {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        let outcome = run(&cfg, &mut lock)?;
        lock.flush()?;
        Ok(outcome)
    });
    match result {
        Ok(RunOutcome::Battery(report)) => {
            for c in &report.checks {
                eprintln!(
                    "{:<14} {}",
                    c.name.as_str(),
                    if c.pass { "PASS" } else { "FAIL" }
                );
            }
            eprintln!(
                "overall        {}",
                if report.pass { "PASS" } else { "FAIL" }
            );
            if report.pass {
                0
            } else {
                1
            }
        }
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("pppkit: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("pppkit".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn parses_sample() {
        let c = RunConfig::from_args(args(
            "sample --dim 2 --region box:0,0;1,1 --mu 5 --seed 42 --reps 1 --format csv",
        ))
        .unwrap();
        assert_eq!(c.command, CommandKind::Sample);
        assert_eq!(c.mu, vec![5.0]);
        assert_eq!(c.seed, 42);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.parsed_region().unwrap(), Region::unit_cube(2).unwrap());
    }

    #[test]
    fn usage_errors_exit_2() {
        for bad in [
            "sample --region box:0,0;1,1 --mu -1",
            "sample --region box:0,0;1,1",
            "sample --region box:0,0;1,1 --mu 1 --reps 0",
            "thin --region box:0;1 --mu 1 --probs 0.5,0.6",
            "superpose --region box:0;1 --mu 1,x",
            "verify --alpha 2",
            "verify --checks count_law,bogus",
            "frobnicate",
        ] {
            let err = RunConfig::from_args(args(bad)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn region_and_dim_errors_are_usage() {
        let c = RunConfig::from_args(args("sample --dim 3 --region box:0,0;1,1 --mu 1")).unwrap();
        let mut sink = Vec::new();
        assert_eq!(run(&c, &mut sink).unwrap_err().exit_code(), 2);
        let c = RunConfig::from_args(args("sample --region box:0,0;1 --mu 1")).unwrap();
        assert_eq!(run(&c, &mut sink).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn zero_measure_conditional_is_a_run_error() {
        let c = RunConfig::from_args(args("conditional --region box:0,0;0,1 --n 3")).unwrap();
        let mut sink = Vec::new();
        assert_eq!(run(&c, &mut sink).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn csv_header_and_marks() {
        let c = RunConfig::from_args(args(
            "thin --region box:0,0;1,1 --mu 30 --probs 0.5,0.5 --seed 3",
        ))
        .unwrap();
        let mut out = Vec::new();
        run(&c, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x0,x1,mark"));
        for l in lines {
            let fields: Vec<&str> = l.split(',').collect();
            assert_eq!(fields.len(), 3);
            assert!(fields[2] == "0" || fields[2] == "1");
        }
    }

    #[test]
    fn replication_file_names() {
        assert_eq!(
            replication_path(Path::new("/tmp/pts.csv"), 3),
            PathBuf::from("/tmp/pts_0003.csv")
        );
        assert_eq!(
            replication_path(Path::new("pts"), 12),
            PathBuf::from("pts_0012")
        );
    }
}
