use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use krigbound::benchmarks::{ArrayBenchmark, BenchmarkSpec, PolyBenchmark};
use krigbound::experiment::{emit, run_experiment, ExperimentConfig, ExperimentResult};
use krigbound::kriging::{BetaMode, BetaSearch, BetaStrategy, Objective};

/// Worst-case response bounds from sampled data via interval-extended kriging.
#[derive(Parser)]
#[command(name = "krigbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomial benchmark Φ(θ) = Σ p_n θⁿ on θ ∈ [-1, 1].
    BenchPoly(Common),
    /// Linear-array power pattern with Dolph-Chebyshev nominal amplitudes.
    BenchArray {
        #[command(flatten)]
        common: Common,
        /// Element spacing in wavelengths.
        #[arg(long, default_value_t = ArrayBenchmark::DEFAULT_SPACING)]
        spacing: f64,
        /// Sidelobe level of the nominal excitation, dB.
        #[arg(long, default_value_t = ArrayBenchmark::DEFAULT_SLL_DB, allow_negative_numbers = true)]
        sll: f64,
    },
    /// Bounds from an external sample file.
    Analyze {
        dataset: PathBuf,
        /// Held-out samples used as the reference band.
        #[arg(long)]
        validation: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliBetaMode {
    PerK,
    Shared,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliObjective {
    Likelihood,
    Loo,
}

#[derive(Args)]
struct Common {
    /// Number of parameters (benchmarks only; inferred for datasets).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Training samples per repeat (default 6N).
    #[arg(long)]
    s: Option<usize>,
    /// Response grid size (benchmark default when absent).
    #[arg(long)]
    k: Option<usize>,
    /// Relative tolerance, e.g. 0.2 for ±20%.
    #[arg(long)]
    delta: Option<f64>,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_M)]
    m: usize,
    /// Training repeats; the narrowest bounds are kept.
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_L)]
    l: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "shared")]
    beta_mode: CliBetaMode,
    /// Objective of the β search.
    #[arg(long, value_enum, default_value = "likelihood")]
    objective: CliObjective,
    /// Lower bound of the β search in standardized units.
    #[arg(long)]
    beta_floor: Option<f64>,
    /// Include the nominal point among the Monte Carlo draws.
    #[arg(long)]
    include_nominal: bool,
    /// Also write two-column series under plotdata/.
    #[arg(long)]
    plotdata: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        cfg.s = self.s;
        cfg.m = self.m;
        cfg.l = self.l;
        cfg.seed = self.seed;
        cfg.include_nominal = self.include_nominal;
        cfg.kriging.mode = match self.beta_mode {
            CliBetaMode::PerK => BetaMode::PerSample,
            CliBetaMode::Shared => BetaMode::Shared,
        };
        let mut search = BetaSearch::interval_calibrated();
        search.objective = match self.objective {
            CliObjective::Likelihood => Objective::Likelihood,
            CliObjective::Loo => Objective::LeaveOneOut,
        };
        if let Some(lo) = self.beta_floor {
            search.lo = lo;
        }
        cfg.kriging.beta = BetaStrategy::Optimize(search);
    }
}

fn summary(result: &ExperimentResult) {
    for cut in &result.cuts {
        let m = &cut.ia_lbe_metrics;
        let label = if cut.label.is_empty() { String::new() } else { format!("[{}] ", cut.label) };
        match &m.inclusion {
            Some(r) => println!(
                "{label}IA-LBE: psi = {:.6e} (int {:.6e}, ext {:.6e}, pen {:.6e}), delta = {:.6}",
                r.psi, r.psi_int, r.psi_ext, r.psi_pen, m.delta
            ),
            None => println!("{label}IA-LBE: psi undefined (no reference band width), delta = {:.6}", m.delta),
        }
        if let Some(e) = &cut.ia_e_metrics {
            match &e.inclusion {
                Some(r) => println!("{label}IA-E:   psi = {:.6e}, delta = {:.6}", r.psi, e.delta),
                None => println!("{label}IA-E:   psi undefined, delta = {:.6}", e.delta),
            }
        }
    }
    println!("runtime: {:.3} s", result.runtime_seconds);
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (cfg, common) = match &cli.command {
        Command::BenchPoly(c) => {
            let spec = BenchmarkSpec::Poly { n_params: c.n, grid_size: c.k.unwrap_or(PolyBenchmark::DEFAULT_GRID) };
            let mut cfg = ExperimentConfig::benchmark(spec, c.delta.unwrap_or(0.2), c.seed);
            c.apply(&mut cfg);
            (cfg, c)
        }
        Command::BenchArray { common: c, spacing, sll } => {
            let spec = BenchmarkSpec::Array {
                n_elements: c.n,
                spacing_over_lambda: *spacing,
                grid_size: c.k.unwrap_or_else(|| ArrayBenchmark::default_grid(c.n)),
                nominal_sll_db: *sll,
            };
            let mut cfg = ExperimentConfig::benchmark(spec, c.delta.unwrap_or(0.01), c.seed);
            c.apply(&mut cfg);
            (cfg, c)
        }
        Command::Analyze { dataset, validation, common: c } => {
            let mut cfg = ExperimentConfig::external(dataset.clone(), validation.clone());
            c.apply(&mut cfg);
            cfg.delta = c.delta;
            cfg.l = 1;
            if c.l != ExperimentConfig::DEFAULT_L && c.l != 1 {
                log::warn!("--l has no effect on external datasets");
            }
            (cfg, c)
        }
    };
    let result = run_experiment(&cfg).context("experiment failed")?;
    emit(&result, &common.out, common.plotdata)
        .with_context(|| format!("writing results to {}", common.out.display()))?;
    summary(&result);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
