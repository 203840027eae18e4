use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ovbound::cli::{self, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "ovbound", version, about = "Bounding sets for treatment effects under omitted-variable bias")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the short, intermediate and auxiliary regressions and write summary.json
    Fit(Flags),
    /// Bias field, contour data and quantile tables for each --box
    Bounds(Flags),
    /// Zero-effect delta* diagnostic at each --rmax
    DeltaStar(Flags),
    /// Equal-selection identified sets at each --rmax
    IdSets(Flags),
    /// Draw a synthetic dataset from a --dgp spec
    Simulate(Flags),
    /// Quantiles of the first box across --steps
    Sweep(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    outcome: Option<String>,
    #[arg(long)]
    treatment: Option<String>,
    /// Comma-separated control columns (default: every other column)
    #[arg(long, value_delimiter = ',')]
    controls: Option<Vec<String>>,
    #[arg(long)]
    summary_json: Option<PathBuf>,
    /// delta_low:delta_high:rmax_low:rmax_high; rmax_low may be `rtilde` (repeatable)
    #[arg(long = "box")]
    boxes: Vec<String>,
    #[arg(long)]
    step: Option<f64>,
    /// Repeatable
    #[arg(long)]
    rmax: Vec<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv or json (repeatable or comma-separated)
    #[arg(long, value_delimiter = ',')]
    format: Vec<String>,
    /// Exclude ambiguous and multiplicity-flagged cells
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated step sizes; fractions like 1/50 accepted
    #[arg(long, value_delimiter = ',')]
    steps: Vec<String>,
    /// JSON DgpSpec file for simulate
    #[arg(long)]
    dgp: Option<PathBuf>,
}

fn parse_step(s: &str) -> anyhow::Result<f64> {
    match s.split_once('/') {
        Some((n, d)) => Ok(n.trim().parse::<f64>()? / d.trim().parse::<f64>()?),
        None => Ok(s.trim().parse()?),
    }
}

impl Flags {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::from_json_path(p)?,
            None => RunConfig::default(),
        };
        let dgp = match &self.dgp {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Some(serde_json::from_str(&text).map_err(|e| ovbound::Error::Config(format!("{}: {e}", p.display())))?)
            }
            None => None,
        };
        let formats = self.format.iter().map(|f| f.parse::<OutputFormat>()).collect::<Result<Vec<_>, _>>()?;
        let steps = self
            .steps
            .iter()
            .map(|s| parse_step(s).map_err(|_| ovbound::Error::Config(format!("bad step `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let flags = RunConfig {
            input: self.input,
            outcome: self.outcome,
            treatment: self.treatment,
            controls: self.controls,
            summary_json: self.summary_json,
            summary: None,
            boxes: self.boxes,
            step: self.step,
            rmax: self.rmax,
            out_dir: self.out_dir,
            formats,
            strict: self.strict,
            seed: self.seed,
            steps,
            dgp,
        };
        Ok(base.overlay(flags))
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("OVBOUND_THREADS") {
        let n: usize = v.parse().map_err(|_| ovbound::Error::Config(format!("OVBOUND_THREADS=`{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

type Handler = fn(&RunConfig, &mut dyn std::io::Write) -> ovbound::Result<Vec<PathBuf>>;

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let (flags, f): (Flags, Handler) = match cli.command {
        Command::Fit(a) => (a, cli::cmd_fit),
        Command::Bounds(a) => (a, cli::cmd_bounds),
        Command::DeltaStar(a) => (a, cli::cmd_delta_star),
        Command::IdSets(a) => (a, cli::cmd_id_sets),
        Command::Simulate(a) => (a, cli::cmd_simulate),
        Command::Sweep(a) => (a, cli::cmd_sweep),
    };
    let cfg = flags.into_config()?;
    let mut stdout = std::io::stdout().lock();
    for path in f(&cfg, &mut stdout)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<ovbound::Error>().map_or(2, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}
