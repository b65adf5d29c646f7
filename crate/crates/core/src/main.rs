use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use lspp::experiment::{
    prepare, run_prepared, write_report, ExperimentConfig, InputSource, OptMode, ReportFormat,
    StepSchedule,
};
use lspp::io::{write_points, PointFormat};
use lspp::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OptArg {
    Exact,
    Planted,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// k-means++ seeding followed by LocalSearch++ swap steps.
#[derive(Debug, Parser)]
#[command(name = "lspp", version)]
#[command(group(ArgGroup::new("source").args(["input", "generate", "config"]).required(true)))]
#[command(group(ArgGroup::new("budget").args(["epsilon", "steps", "config"]).required(true)))]
struct Cli {
    /// Point file: CSV or whitespace-separated rows.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Generator spec, e.g. gaussian_mixture:k=16,n=1600,d=8,sep=10,scatter=1
    #[arg(long)]
    generate: Option<String>,

    /// Read the whole experiment configuration from a JSON file.
    #[arg(long, conflicts_with_all = ["input", "generate", "epsilon", "steps"])]
    config: Option<PathBuf>,

    #[arg(long, required_unless_present = "config")]
    k: Option<usize>,

    /// Run ceil(epsilon * k) local-search steps.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Run exactly this many local-search steps.
    #[arg(long)]
    steps: Option<usize>,

    #[arg(long, default_value_t = 1)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Lloyd iterations after local search.
    #[arg(long, default_value_t = 0)]
    lloyd: usize,

    /// Structure snapshots at steps 0, l/2 and l.
    #[arg(long)]
    diagnostics: bool,

    /// Structure snapshot after every step.
    #[arg(long)]
    diagnostics_every_step: bool,

    #[arg(long, value_enum, default_value_t = OptArg::None)]
    opt: OptArg,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the instance points as CSV.
    #[arg(long)]
    dump_instance: Option<PathBuf>,
}

impl Cli {
    fn into_config(self) -> Result<(ExperimentConfig, Option<PathBuf>), Error> {
        let dump = self.dump_instance.clone();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::usage(format!("{}: {e}", path.display())))?;
            return Ok((cfg, dump));
        }
        let input = match (self.input, self.generate) {
            (Some(path), None) => InputSource::File {
                path,
                format: PointFormat::Auto,
            },
            (None, Some(spec)) => InputSource::Generate {
                spec: spec.parse()?,
            },
            _ => return Err(Error::usage("give exactly one of --input or --generate")),
        };
        let schedule = match (self.epsilon, self.steps) {
            (Some(e), None) => StepSchedule::Epsilon(e),
            (None, Some(s)) => StepSchedule::Steps(s),
            _ => return Err(Error::usage("give exactly one of --epsilon or --steps")),
        };
        let cfg = ExperimentConfig {
            input,
            k: self.k.ok_or_else(|| Error::usage("--k is required"))?,
            schedule,
            trials: self.trials,
            seed: self.seed,
            lloyd_iters: self.lloyd,
            diagnostics: self.diagnostics,
            diagnostics_every_step: self.diagnostics_every_step,
            opt_mode: match self.opt {
                OptArg::Exact => OptMode::Exact,
                OptArg::Planted => OptMode::Planted,
                OptArg::None => OptMode::None,
            },
            format: match self.format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            },
            output: self.out,
        };
        Ok((cfg, dump))
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (config, dump) = cli.into_config()?;
    let prepared = prepare(&config)?;
    if let Some(path) = dump {
        write_points(path, &prepared.points)?;
    }
    let report = run_prepared(&config, &prepared)?;
    write_report(&report, config.format, config.output.as_deref())?;
    let s = &report.summary;
    eprintln!(
        "trials={} steps={} median seeding cost={:.6e} median final cost={:.6e} acceptance={:.3}",
        s.trials, s.steps_per_trial, s.seeding_cost.median, s.final_cost.median, s.acceptance_rate
    );
    if let (Some(seed), Some(fin)) = (s.seeding_factor, s.final_factor) {
        eprintln!(
            "median factor: seeding={:.4} final={:.4}",
            seed.median, fin.median
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
