//! Seeded benchmark grids over simulated scenarios.
//!
//! A grid file (TOML) lists scenarios; each scenario expands into one
//! scenario instance per sample size and one parameter cell per combination
//! of truncation limit and penalty (BOSS) or alpha (PC-Max). Every cell is
//! run once per seed on the same per-seed dataset.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Knowledge};
use crate::metrics::MetricsReport;
use crate::run::{evaluate, search_table, Algorithm, SearchParams};
use crate::sim::{simulate, DataKind, SimSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_scale")]
    pub scale: String,
    #[serde(default)]
    pub data: DataKind,
    pub nodes: usize,
    pub edges: usize,
    pub samples: Vec<usize>,
    pub algorithm: Algorithm,
    pub truncation: Vec<usize>,
    #[serde(default)]
    pub penalty: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_mprob")]
    pub mprob: f64,
    pub seeds: Seeds,
    /// Per-run wall-clock limit in seconds; runs over the limit are recorded
    /// with status `timeout`.
    pub timeout: Option<f64>,
}

fn default_scale() -> String {
    "small".into()
}

fn default_max_depth() -> usize {
    3
}

fn default_mprob() -> f64 {
    0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

impl Grid {
    pub fn from_toml(text: &str) -> Result<Grid> {
        let grid: Grid = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for s in &grid.scenarios {
            s.validate()?;
        }
        Ok(grid)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Grid> {
        Grid::from_toml(&fs::read_to_string(path)?)
    }
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        let (params, name) = match self.algorithm {
            Algorithm::Boss => (&self.penalty, "penalty"),
            Algorithm::PcMax => (&self.alpha, "alpha"),
        };
        if params.is_empty() || self.truncation.is_empty() || self.samples.is_empty() {
            return Err(Error::Config(format!(
                "scenario {} needs non-empty samples, truncation and {name} lists",
                self.label()
            )));
        }
        if self.seeds.values().is_empty() {
            return Err(Error::Config(format!("scenario {} has no seeds", self.label())));
        }
        for p in self.cells() {
            p.validate()?;
        }
        Ok(())
    }

    /// Appendix-style label such as `BOSS-BF-BIC 10:2` (nodes : average degree).
    pub fn label(&self) -> String {
        let method = match self.algorithm {
            Algorithm::Boss => "BOSS-BF-BIC",
            Algorithm::PcMax => "PC-MAX-BF-LRT",
        };
        let degree = 2.0 * self.edges as f64 / self.nodes.max(1) as f64;
        format!("{method} {}:{}", self.nodes, format_number(degree))
    }

    /// Parameter cells, ordered by truncation and then penalty or alpha.
    pub fn cells(&self) -> Vec<SearchParams> {
        let mut out = Vec::new();
        for &p in &self.truncation {
            match self.algorithm {
                Algorithm::Boss => {
                    for &c in &self.penalty {
                        out.push(SearchParams::boss(p, c));
                    }
                }
                Algorithm::PcMax => {
                    for &a in &self.alpha {
                        out.push(SearchParams::pcmax(p, a));
                    }
                }
            }
        }
        for cell in &mut out {
            cell.max_depth = self.max_depth;
            cell.timeout = self.timeout;
        }
        out
    }

    fn sim(&self, samples: usize, seed: u64) -> SimSpec {
        SimSpec {
            nodes: self.nodes,
            edges: self.edges,
            samples,
            kind: self.data,
            mprob: self.mprob,
            pnl: None,
            seed,
            shuffle_columns: true,
        }
    }
}

fn format_number(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v}"))
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scale: String,
    pub data: DataKind,
    pub label: String,
    pub samples: usize,
    pub params: SearchParams,
    pub seed: u64,
    /// `None` when the run hit its time limit.
    pub metrics: Option<MetricsReport>,
}

/// Seed-averaged metrics of one cell. Undefined values are skipped; a metric
/// undefined for every seed stays undefined.
#[derive(Clone, Debug)]
pub struct CellSummary {
    pub scale: String,
    pub data: DataKind,
    pub label: String,
    pub samples: usize,
    pub params: SearchParams,
    pub runs: usize,
    pub timeouts: usize,
    pub mean: MetricsReport,
    pub mean_shd: Option<f64>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(runs: &[RunRecord]) -> CellSummary {
    let first = &runs[0];
    let done: Vec<&MetricsReport> = runs.iter().filter_map(|r| r.metrics.as_ref()).collect();
    macro_rules! avg {
        ($f:ident) => {
            mean(done.iter().map(|m| m.$f))
        };
    }
    let mean_shd = mean(done.iter().map(|m| Some(m.shd as f64)));
    let mean_report = MetricsReport {
        ap: avg!(ap),
        ar: avg!(ar),
        ahp: avg!(ahp),
        ahr: avg!(ahr),
        ahpc: avg!(ahpc),
        ahrc: avg!(ahrc),
        f1adj: avg!(f1adj),
        f1all: avg!(f1all),
        // rounded; the exact mean is `mean_shd`
        shd: mean_shd.map_or(0, |x| x.round() as usize),
        elapsed: mean(done.iter().map(|m| Some(m.elapsed))).unwrap_or(0.0),
    };
    CellSummary {
        scale: first.scale.clone(),
        data: first.data,
        label: first.label.clone(),
        samples: first.samples,
        params: first.params.clone(),
        runs: runs.len(),
        timeouts: runs.len() - done.len(),
        mean: mean_report,
        mean_shd,
    }
}

fn tuning(p: &SearchParams) -> f64 {
    p.penalty.or(p.alpha).unwrap_or(0.0)
}

/// Highest mean F1Adj. Ties go to the lower penalty (or alpha), then to the
/// lower truncation limit. Cells with undefined F1Adj rank last.
pub fn best_cell(cells: &[CellSummary]) -> Option<&CellSummary> {
    cells.iter().reduce(|best, c| {
        let (f, bf) = (
            c.mean.f1adj.unwrap_or(f64::NEG_INFINITY),
            best.mean.f1adj.unwrap_or(f64::NEG_INFINITY),
        );
        let better = f > bf
            || (f == bf
                && (tuning(&c.params), c.params.truncation)
                    < (tuning(&best.params), best.params.truncation));
        if better {
            c
        } else {
            best
        }
    })
}

const METRIC_COLUMNS: &str = "ap,ar,ahp,ahr,ahpc,ahrc,f1adj,f1all";

fn metric_fields(m: &MetricsReport) -> String {
    [m.ap, m.ar, m.ahp, m.ahr, m.ahpc, m.ahrc, m.f1adj, m.f1all]
        .into_iter()
        .map(opt)
        .collect::<Vec<_>>()
        .join(",")
}

fn cell_fields(label: &str, scale: &str, data: DataKind, samples: usize, p: &SearchParams) -> String {
    format!(
        "{scale},{},{label},{samples},{},{},{},{}",
        data.label(),
        p.algorithm,
        p.truncation,
        opt(p.penalty),
        opt(p.alpha)
    )
}

const KEY_COLUMNS: &str = "scale,type,label,sample_size,algorithm,trunc_limit,penalty,alpha";

/// Output of [`run_benchmark`].
#[derive(Clone, Debug)]
pub struct BenchmarkReport {
    pub runs: Vec<RunRecord>,
    pub cells: Vec<CellSummary>,
    pub best: Vec<CellSummary>,
    pub runs_csv: PathBuf,
    pub averages_csv: PathBuf,
    pub best_csv: PathBuf,
}

/// Runs every cell of `grid` and writes `runs.csv` (one row per run),
/// `averages.csv` (one row per cell) and `best.csv` (best cell per scenario
/// instance) into `out_dir`. The first two are flushed after every cell.
pub fn run_benchmark(grid: &Grid, out_dir: impl AsRef<Path>) -> Result<BenchmarkReport> {
    run_benchmark_with(grid, out_dir, |_| {})
}

/// As [`run_benchmark`], calling `progress` after each finished cell.
pub fn run_benchmark_with(
    grid: &Grid,
    out_dir: impl AsRef<Path>,
    mut progress: impl FnMut(&CellSummary),
) -> Result<BenchmarkReport> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let runs_csv = out_dir.join("runs.csv");
    let averages_csv = out_dir.join("averages.csv");
    let best_csv = out_dir.join("best.csv");
    let mut runs_out = fs::File::create(&runs_csv)?;
    writeln!(runs_out, "{KEY_COLUMNS},seed,status,{METRIC_COLUMNS},shd,elapsed")?;
    let mut avg_out = fs::File::create(&averages_csv)?;
    writeln!(avg_out, "{KEY_COLUMNS},runs,timeouts,{METRIC_COLUMNS},shd,elapsed")?;

    let mut all_runs = Vec::new();
    let mut all_cells = Vec::new();
    let mut best = Vec::new();
    for scenario in &grid.scenarios {
        let label = scenario.label();
        for &samples in &scenario.samples {
            let seeds = scenario.seeds.values();
            let datasets: Vec<_> = seeds
                .iter()
                .map(|&s| simulate(&scenario.sim(samples, s)))
                .collect::<Result<_>>()?;
            let mut instance_cells = Vec::new();
            for params in scenario.cells() {
                let mut cell_runs = Vec::new();
                for (&seed, (table, truth)) in seeds.iter().zip(&datasets) {
                    let params = SearchParams {
                        seed,
                        ..params.clone()
                    };
                    let metrics = run_one(table, truth, &params)?;
                    let row = cell_fields(&label, &scenario.scale, scenario.data, samples, &params);
                    match &metrics {
                        Some(m) => writeln!(
                            runs_out,
                            "{row},{seed},ok,{},{},{}",
                            metric_fields(m),
                            m.shd,
                            m.elapsed
                        )?,
                        None => writeln!(runs_out, "{row},{seed},timeout,,,,,,,,,,")?,
                    }
                    cell_runs.push(RunRecord {
                        scale: scenario.scale.clone(),
                        data: scenario.data,
                        label: label.clone(),
                        samples,
                        params,
                        seed,
                        metrics,
                    });
                }
                runs_out.flush()?;
                let summary = summarize(&cell_runs);
                writeln!(
                    avg_out,
                    "{},{},{},{},{},{}",
                    cell_fields(&label, &scenario.scale, scenario.data, samples, &summary.params),
                    summary.runs,
                    summary.timeouts,
                    metric_fields(&summary.mean),
                    opt(summary.mean_shd),
                    summary.mean.elapsed
                )?;
                avg_out.flush()?;
                progress(&summary);
                all_runs.extend(cell_runs);
                instance_cells.push(summary);
            }
            if let Some(b) = best_cell(&instance_cells) {
                best.push(b.clone());
            }
            all_cells.extend(instance_cells);
        }
    }
    write_best(&best, &best_csv)?;
    Ok(BenchmarkReport {
        runs: all_runs,
        cells: all_cells,
        best,
        runs_csv,
        averages_csv,
        best_csv,
    })
}

fn run_one(
    table: &crate::data::DataTable,
    truth: &Graph,
    params: &SearchParams,
) -> Result<Option<MetricsReport>> {
    match search_table(table, &Knowledge::empty(), params) {
        Ok(out) => Ok(Some(evaluate(&out.graph, truth, out.elapsed)?)),
        Err(Error::TimeoutExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Best rows in the layout of the optimal-parameter tables: scale, type,
/// label, sample size, truncation, penalty, alpha (`*` where not applicable),
/// followed by the mean metrics.
fn write_best(best: &[CellSummary], path: &Path) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(
        out,
        "scale,type,label,sample_size,trunc_limit,penalty,alpha,{METRIC_COLUMNS},shd,elapsed"
    )?;
    let star = |x: Option<f64>| x.map_or_else(|| "*".to_string(), |v| format!("{v:.6}"));
    for b in best {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            b.scale,
            b.data.label(),
            b.label,
            b.samples,
            b.params.truncation,
            star(b.params.penalty),
            star(b.params.alpha),
            metric_fields(&b.mean),
            opt(b.mean_shd),
            b.mean.elapsed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(truncation: usize, penalty: f64, f1adj: Option<f64>) -> CellSummary {
        CellSummary {
            scale: "small".into(),
            data: DataKind::Continuous,
            label: "x".into(),
            samples: 100,
            params: SearchParams::boss(truncation, penalty),
            runs: 1,
            timeouts: 0,
            mean: MetricsReport {
                f1adj,
                ..Default::default()
            },
            mean_shd: Some(0.0),
        }
    }

    #[test]
    fn best_cell_tie_breaks() {
        let cells = vec![
            summary(3, 2.0, Some(0.9)),
            summary(4, 1.0, Some(0.9)),
            summary(3, 1.0, Some(0.9)),
            summary(1, 8.0, Some(0.5)),
            summary(1, 1.0, None),
        ];
        let b = best_cell(&cells).unwrap();
        assert_eq!((b.params.truncation, b.params.penalty), (3, Some(1.0)));
    }

    #[test]
    fn grid_parsing() {
        let g = Grid::from_toml(
            r#"
            [[scenario]]
            data = "continuous"
            nodes = 10
            edges = 20
            samples = [200, 500]
            algorithm = "pcmax"
            truncation = [1, 3]
            alpha = [0.05, 0.01, 0.001]
            seeds = 3
            "#,
        )
        .unwrap();
        let s = &g.scenarios[0];
        assert_eq!(s.cells().len(), 6);
        assert_eq!(s.label(), "PC-MAX-BF-LRT 10:4");
        assert_eq!(s.seeds.values(), vec![0, 1, 2]);

        let missing = Grid::from_toml(
            "[[scenario]]\nnodes = 3\nedges = 2\nsamples = [10]\nalgorithm = \"boss\"\ntruncation = [1]\nseeds = [1]\n",
        );
        assert!(matches!(missing, Err(Error::Config(_))));
    }
}
