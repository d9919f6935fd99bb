use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use basisfn::bench::{run_benchmark_with, Grid};
use basisfn::graph::{emit_graph, Knowledge};
use basisfn::io;
use basisfn::metrics::MetricsReport;
use basisfn::run::{evaluate, run_search, search_table, Algorithm, RunConfig, SearchParams};
use basisfn::sim::{simulate, SimSpec};
use basisfn::{Error, Result};

/// Causal discovery with basis-function scores and tests.
///
/// Three modes: search a CSV (`--data`), simulate a dataset (`--sim`,
/// optionally followed by a search when `--algorithm` is given), or run a
/// benchmark grid (`--grid`).
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// boss or pcmax
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Input CSV with a header row
    #[arg(long, conflicts_with_all = ["sim", "grid"])]
    data: Option<PathBuf>,
    /// True graph, for metrics
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Tier / forbid / require file
    #[arg(long)]
    knowledge: Option<PathBuf>,
    /// Legendre truncation limit p
    #[arg(long, default_value_t = 3)]
    truncation: usize,
    /// Penalty discount c (boss)
    #[arg(long)]
    penalty: Option<f64>,
    /// Significance level (pcmax)
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest conditioning set (pcmax)
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time limit in seconds
    #[arg(long)]
    timeout: Option<f64>,
    /// Where to write the estimated graph (stdout if omitted)
    #[arg(long)]
    out_graph: Option<PathBuf>,
    /// Where to write metrics JSON
    #[arg(long)]
    out_metrics: Option<PathBuf>,
    /// Benchmark grid (TOML)
    #[arg(long, conflicts_with = "sim")]
    grid: Option<PathBuf>,
    /// Simulation, e.g. nodes=10,edges=20,n=1000,type=continuous|mixed|additive,mprob=0.5
    #[arg(long)]
    sim: Option<SimSpec>,
    /// Where to write simulated data (CSV)
    #[arg(long)]
    out_data: Option<PathBuf>,
    /// Where to write the simulated true DAG
    #[arg(long)]
    out_truth: Option<PathBuf>,
    /// Benchmark output directory
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
}

impl Cli {
    fn params(&self) -> Result<SearchParams> {
        let algorithm = self
            .algorithm
            .ok_or_else(|| Error::Config("--algorithm is required".into()))?;
        let params = SearchParams {
            algorithm,
            truncation: self.truncation,
            penalty: self.penalty,
            alpha: self.alpha,
            max_depth: self.max_depth,
            seed: self.seed,
            timeout: self.timeout,
        };
        params.validate()?;
        Ok(params)
    }
}

fn print_metrics(m: &MetricsReport) {
    println!("{m}");
}

fn run(cli: Cli) -> Result<()> {
    if let Some(path) = &cli.grid {
        let grid = Grid::load(path)?;
        eprintln!("{}", MetricsReport::table_header());
        let report = run_benchmark_with(&grid, &cli.out_dir, |cell| {
            let p = &cell.params;
            let tuning = p.penalty.map_or_else(|| format!("alpha={}", p.alpha.unwrap_or_default()), |c| format!("c={c}"));
            eprintln!(
                "{}  {} n={} p={} {tuning}",
                cell.mean.table_row(),
                cell.label,
                cell.samples,
                p.truncation
            );
        })?;
        println!(
            "{} runs, {} cells; wrote {}, {}, {}",
            report.runs.len(),
            report.cells.len(),
            report.runs_csv.display(),
            report.averages_csv.display(),
            report.best_csv.display()
        );
        return Ok(());
    }

    if let Some(spec) = &cli.sim {
        let spec = SimSpec {
            seed: cli.seed,
            ..spec.clone()
        };
        let (table, dag) = simulate(&spec)?;
        if let Some(p) = &cli.out_data {
            io::write_csv(&table, p)?;
        }
        if let Some(p) = &cli.out_truth {
            io::write_graph(&dag, p)?;
        }
        if cli.algorithm.is_none() {
            if cli.out_data.is_none() {
                io::write_csv_to(&table, std::io::stdout().lock())?;
            }
            return Ok(());
        }
        let knowledge = match &cli.knowledge {
            Some(p) => io::load_knowledge(p, &table.names())?,
            None => Knowledge::empty(),
        };
        let out = search_table(&table, &knowledge, &cli.params()?)?;
        match &cli.out_graph {
            Some(p) => io::write_graph(&out.graph, p)?,
            None => print!("{}", emit_graph(&out.graph)),
        }
        let m = evaluate(&out.graph, &dag, out.elapsed)?;
        if let Some(p) = &cli.out_metrics {
            std::fs::write(p, m.to_json() + "\n")?;
        }
        print_metrics(&m);
        return Ok(());
    }

    let input = cli
        .data
        .clone()
        .ok_or_else(|| Error::Config("one of --data, --sim or --grid is required".into()))?;
    let cfg = RunConfig {
        params: cli.params()?,
        input,
        truth: cli.truth.clone(),
        knowledge: cli.knowledge.clone(),
        out_graph: cli.out_graph.clone(),
        out_metrics: cli.out_metrics.clone(),
    };
    let (graph, metrics) = run_search(&cfg)?;
    if cfg.out_graph.is_none() {
        print!("{}", emit_graph(&graph));
    }
    if let Some(m) = metrics {
        print_metrics(&m);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
