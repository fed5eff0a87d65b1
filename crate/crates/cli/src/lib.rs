//! Command-line front end for the two-sample block model test.

pub mod edge_list;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use sbm_twosample::sim::profile::{ProfileOutput, ProfileOverrides, ProfileRegistry};
use sbm_twosample::sim::write_density_csv;
use sbm_twosample::tracy_widom::{self, TracyWidom1Table};
use sbm_twosample::two_sample_test::BootstrapSetting;
use sbm_twosample::{run_two_sample_test, TestConfig};

use edge_list::{align_networks, AlignMode, EdgeList};
use report::{Inputs, JsonReport, RunConfig};

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<sbm_twosample::Error> for Failure {
    fn from(e: sbm_twosample::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<edge_list::IngestError> for Failure {
    fn from(e: edge_list::IngestError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Debug, Parser)]
#[command(name = "sbm2", version, about = "Two-sample test for stochastic block models")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test whether two networks on the same nodes share one block model.
    Test(TestArgs),
    /// Run a simulation profile and write its CSV table.
    Simulate(SimulateArgs),
    /// Evaluate the Tracy-Widom (beta = 1) distribution.
    Tw(TwArgs),
    /// Re-run the test recorded in a JSON report and compare the statistics.
    Replay(ReplayArgs),
}

/// `auto`, `off`, or a replicate count of at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapArg(pub BootstrapSetting);

impl FromStr for BootstrapArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self(BootstrapSetting::Auto)),
            "off" => Ok(Self(BootstrapSetting::Off)),
            _ => match s.parse::<usize>() {
                Ok(m) if m >= 2 => Ok(Self(BootstrapSetting::Replicates(m))),
                _ => Err(format!("expected auto, off, or a replicate count >= 2, got {s:?}")),
            },
        }
    }
}

impl std::fmt::Display for BootstrapArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            BootstrapSetting::Auto => f.write_str("auto"),
            BootstrapSetting::Off => f.write_str("off"),
            BootstrapSetting::Replicates(m) => write!(f, "{m}"),
        }
    }
}

fn parse_fixed_k(s: &str) -> Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(a), Ok(b)) if a > 0 && b > 0 => Ok([a, b]),
            _ => Err(format!("expected two positive integers KX,KY, got {s:?}")),
        },
        _ => Err(format!("expected KX,KY, got {s:?}")),
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        _ => Err(format!("alpha must lie in (0, 1), got {s:?}")),
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Edge list of the first network.
    #[arg(long)]
    x: PathBuf,
    /// Edge list of the second network.
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
    /// Largest community count tried when selecting K.
    #[arg(long, default_value = "10", value_parser = parse_positive)]
    kmax: usize,
    /// Community counts KX,KY; skips selection.
    #[arg(long, value_parser = parse_fixed_k)]
    fixed_k: Option<[usize; 2]>,
    /// auto (50 replicates below 2000 nodes), off, or a replicate count.
    #[arg(long, default_value = "auto")]
    bootstrap: BootstrapArg,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "strict")]
    align: AlignMode,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// table1, table2, table3, table4, table4-header, figure1, or figure1-n1200.
    #[arg(long)]
    profile: String,
    #[arg(long, value_parser = parse_positive)]
    reps: Option<usize>,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the nodes per community of grids sized that way.
    #[arg(long, value_parser = parse_positive)]
    community_size: Option<usize>,
    /// Override the node count of grids sized that way and of density runs.
    #[arg(long, value_parser = parse_positive)]
    n: Option<usize>,
    #[arg(long)]
    bootstrap: Option<BootstrapArg>,
    /// Level at which rejection rates are computed.
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    alpha: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("query").required(true).args(["quantile", "cdf"])))]
struct TwArgs {
    #[arg(long)]
    quantile: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    cdf: Option<f64>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// JSON report written by `sbm2 test`.
    #[arg(long)]
    report: PathBuf,
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Data(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> CliResult<EdgeList> {
    EdgeList::load(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn test_report(args: &TestArgs) -> CliResult<JsonReport> {
    let ex = load(&args.x)?;
    let ey = load(&args.y)?;
    for (name, list) in [("X", &ex), ("Y", &ey)] {
        if list.self_loops() > 0 {
            eprintln!("warning: dropped {} self-loop(s) from {name}", list.self_loops());
        }
    }
    let pair = align_networks(&ex, &ey, args.align)?;
    if pair.dropped_x + pair.dropped_y > 0 {
        eprintln!(
            "warning: intersection keeps {} nodes ({} dropped from X, {} from Y)",
            pair.ids.len(),
            pair.dropped_x,
            pair.dropped_y
        );
    }
    let config = TestConfig {
        alpha: args.alpha,
        k_max: args.kmax,
        fixed_k: args.fixed_k.map(|[a, b]| (a, b)),
        bootstrap: args.bootstrap.0,
        seed: args.seed,
    };
    let report = run_two_sample_test(&pair.x, &pair.y, &config)?;
    let inputs = Inputs {
        x: args.x.clone(),
        y: args.y.clone(),
        align: args.align,
        nodes_x: ex.num_nodes(),
        nodes_y: ey.num_nodes(),
        dropped_x: pair.dropped_x,
        dropped_y: pair.dropped_y,
        self_loops_x: ex.self_loops(),
        self_loops_y: ey.self_loops(),
        duplicates_x: ex.duplicates(),
        duplicates_y: ey.duplicates(),
    };
    let run = RunConfig {
        alpha: args.alpha,
        k_max: args.kmax,
        fixed_k: args.fixed_k,
        bootstrap: args.bootstrap.to_string(),
        seed: args.seed,
    };
    Ok(JsonReport::new(&report, inputs, run, pair.ids))
}

fn cmd_test(args: &TestArgs) -> CliResult<()> {
    let report = test_report(args)?;
    let mut out = output(args.out.as_deref())?;
    match args.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out).map_err(|e| Failure::Data(e.to_string()))?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let registry = ProfileRegistry::builtin();
    let profile = registry.get(&args.profile).map_err(|e| Failure::Usage(e.to_string()))?;
    let overrides = ProfileOverrides {
        reps: args.reps,
        community_size: args.community_size,
        n: args.n,
        bootstrap: args.bootstrap.map(|b| b.0),
        seed: args.seed,
    };
    let result = profile.run(&overrides, args.alpha)?;
    let mut out = output(args.out.as_deref())?;
    match result {
        ProfileOutput::Table(t) => t.write_csv(&mut out)?,
        ProfileOutput::Density(d) => write_density_csv(&d, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_tw(args: &TwArgs) -> CliResult<()> {
    let value = match (args.quantile, args.cdf) {
        (Some(p), _) => tracy_widom::tw1_quantile(p).map_err(|e| Failure::Usage(e.to_string()))?,
        (None, Some(x)) => tracy_widom::tw1_cdf(x),
        (None, None) => unreachable!("clap requires one of the two"),
    };
    println!("{value:.6}");
    Ok(())
}

fn cmd_replay(args: &ReplayArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", args.report.display())))?;
    let recorded = JsonReport::parse(&text).map_err(|e| Failure::Data(format!("{}: {e}", args.report.display())))?;
    let c = &recorded.config;
    let test_args = TestArgs {
        x: recorded.inputs.x.clone(),
        y: recorded.inputs.y.clone(),
        alpha: c.alpha,
        kmax: c.k_max,
        fixed_k: c.fixed_k,
        bootstrap: c.bootstrap.parse().map_err(Failure::Data)?,
        seed: c.seed,
        format: Format::Json,
        out: None,
        align: recorded.inputs.align,
    };
    let fresh = test_report(&test_args)?;
    let same = fresh.t_n.to_bits() == recorded.t_n.to_bits()
        && fresh.t_n_boot.map(f64::to_bits) == recorded.t_n_boot.map(f64::to_bits)
        && fresh.decision == recorded.decision;
    if same {
        println!("reproduced: T_n = {}, decision = {}", fresh.t_n, fresh.decision);
        Ok(())
    } else {
        Err(Failure::Data(format!(
            "replay differs: recorded T_n = {} ({:?}, {}), recomputed T_n = {} ({:?}, {})",
            recorded.t_n, recorded.t_n_boot, recorded.decision, fresh.t_n, fresh.t_n_boot, fresh.decision
        )))
    }
}

fn install_table() -> CliResult<()> {
    if std::env::var_os(tracy_widom::TABLE_ENV).is_some() {
        let table = TracyWidom1Table::from_env()
            .map_err(|e| Failure::Data(format!("{}: {e}", tracy_widom::TABLE_ENV)))?;
        // A table already installed in this process stays in use.
        let _ = tracy_widom::install(table);
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    install_table()?;
    match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Tw(a) => cmd_tw(a),
        Command::Replay(a) => cmd_replay(a),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
