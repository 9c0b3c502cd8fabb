use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use medbw::config::{resolve, Command, RunConfig};
use medbw::{figures, output, LabError};

#[derive(Parser)]
#[command(name = "medbw", version, about = "Median-heuristic bandwidth experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Histograms of pairwise squared distances.
    Figure1(Flags),
    /// Median-heuristic and power-maximizing bandwidths over a parameter grid.
    Figure2(Flags),
    /// Approximate Bahadur slopes over a parameter grid.
    Figure3(Flags),
    /// CDF of the distance mixture and power-ratio curves, mean shift.
    Figure4(Flags),
    /// CDF of the distance mixture and power-ratio curves, variance scale.
    Figure5(Flags),
    /// Monte Carlo checks of the limit theorems.
    CltSuite(Flags),
    /// Frequency of the intra/inter distance gap.
    GapCheck(Flags),
    /// Median-heuristic bandwidth of a sample or a CSV file.
    Bandwidth(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Mean,
    Var,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Default)]
struct Flags {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit without writing files.
    #[arg(long)]
    dry_run: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Standard deviation of the second distribution.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated sample sizes for the CLT experiments.
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// `a,b,c`, `start:step:stop` or `geom:lo:hi:count`.
    #[arg(long)]
    grid_mu: Option<String>,
    /// Variances, same syntax as `--grid-mu`.
    #[arg(long)]
    grid_sigma2: Option<String>,
    #[arg(long)]
    grid_nu: Option<String>,
    #[arg(long)]
    grid_t: Option<String>,
    #[arg(long)]
    grid_lambda: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    #[arg(long)]
    lambda1_points: Option<String>,
    #[arg(long)]
    lambda1_reps: Option<String>,
    /// `half-median` (ν = √(H/2)) or `median` (ν = √H).
    #[arg(long)]
    nu_convention: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<String>,
    #[arg(long)]
    ecdf_n: Option<String>,
    #[arg(long)]
    ecdf_replicates: Option<String>,
    #[arg(long)]
    gap_replicates: Option<String>,
    /// CSV of points for `bandwidth`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl Flags {
    fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put(
            "scenario",
            self.scenario.map(|s| {
                match s {
                    ScenarioArg::Mean => "mean",
                    ScenarioArg::Var => "var",
                    ScenarioArg::Both => "both",
                }
                .to_string()
            }),
        );
        put("mu", self.mu.clone());
        put("sigma", self.sigma.clone());
        put("alpha", self.alpha.clone());
        put("dim", self.dim.clone());
        put("n", self.n.clone());
        put("ns", self.ns.clone());
        put("replicates", self.replicates.clone());
        put("seed", self.seed.clone());
        put("grid-mu", self.grid_mu.clone());
        put("grid-sigma2", self.grid_sigma2.clone());
        put("grid-nu", self.grid_nu.clone());
        put("grid-t", self.grid_t.clone());
        put("grid-lambda", self.grid_lambda.clone());
        put("bins", self.bins.clone());
        put("lambda1-points", self.lambda1_points.clone());
        put("lambda1-reps", self.lambda1_reps.clone());
        put("nu-convention", self.nu_convention.clone());
        put("threshold", self.threshold.clone());
        put("ecdf-n", self.ecdf_n.clone());
        put("ecdf-replicates", self.ecdf_replicates.clone());
        put("gap-replicates", self.gap_replicates.clone());
        put("input", self.input.as_ref().map(|p| p.display().to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put(
            "format",
            self.format.map(|f| {
                match f {
                    FormatArg::Csv => "csv",
                    FormatArg::Json => "json",
                }
                .to_string()
            }),
        );
        m
    }
}

fn execute(command: Command, flags: &Flags) -> Result<(), LabError> {
    let cfg: RunConfig = resolve(command, flags.config.as_deref(), &flags.overrides())?;
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    if flags.dry_run {
        for (k, v) in cfg.to_pairs() {
            writeln!(stdout, "{k} = {v}").map_err(|e| LabError::io("<stdout>", e))?;
        }
        return Ok(());
    }
    if let Some(threads) = flags.threads {
        if threads == 0 {
            return Err(LabError::config("`threads` must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| LabError::config(format!("`threads`: {e}")))?;
    }
    let report = figures::run(&cfg)?;
    for w in &report.warnings {
        eprintln!("medbw: {w}");
    }
    for path in output::emit(&report, &mut stdout)? {
        eprintln!("medbw: wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, flags) = match &cli.command {
        Sub::Figure1(f) => (Command::Figure1, f),
        Sub::Figure2(f) => (Command::Figure2, f),
        Sub::Figure3(f) => (Command::Figure3, f),
        Sub::Figure4(f) => (Command::Figure4, f),
        Sub::Figure5(f) => (Command::Figure5, f),
        Sub::CltSuite(f) => (Command::CltSuite, f),
        Sub::GapCheck(f) => (Command::GapCheck, f),
        Sub::Bandwidth(f) => (Command::Bandwidth, f),
    };
    match execute(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("medbw: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
