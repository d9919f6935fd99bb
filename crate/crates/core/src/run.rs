//! End-to-end search runs: data in, graph and metrics out.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::citest::{BfLrt, TestConfig};
use crate::data::{prepare, BasisSpec, DataTable};
use crate::error::{Error, Result};
use crate::graph::{dag_to_cpdag, Graph, Knowledge};
use crate::io;
use crate::metrics::{compare_graphs, MetricsReport};
use crate::score::{BfBicScore, ScoreConfig};
use crate::search::{boss_search, pcmax_search, BossOptions, PcMaxOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Boss,
    #[serde(alias = "pc-max", alias = "pc_max")]
    PcMax,
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "boss" => Ok(Algorithm::Boss),
            "pcmax" => Ok(Algorithm::PcMax),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Boss => "boss",
            Algorithm::PcMax => "pcmax",
        })
    }
}

/// Algorithm and tuning parameters of one search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub algorithm: Algorithm,
    pub truncation: usize,
    pub penalty: Option<f64>,
    pub alpha: Option<f64>,
    pub max_depth: usize,
    pub seed: u64,
    /// Wall-clock limit in seconds.
    pub timeout: Option<f64>,
}

impl SearchParams {
    pub fn boss(truncation: usize, penalty: f64) -> Self {
        SearchParams {
            algorithm: Algorithm::Boss,
            truncation,
            penalty: Some(penalty),
            alpha: None,
            max_depth: PcMaxOptions::default().max_depth,
            seed: 0,
            timeout: None,
        }
    }

    pub fn pcmax(truncation: usize, alpha: f64) -> Self {
        SearchParams {
            algorithm: Algorithm::PcMax,
            alpha: Some(alpha),
            penalty: None,
            ..SearchParams::boss(truncation, 1.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        BasisSpec::new(self.truncation)?;
        match self.algorithm {
            Algorithm::Boss => {
                let c = self
                    .penalty
                    .ok_or_else(|| Error::Config("boss requires a penalty discount".into()))?;
                ScoreConfig::new(c, self.truncation)?;
            }
            Algorithm::PcMax => {
                let a = self
                    .alpha
                    .ok_or_else(|| Error::Config("pcmax requires an alpha level".into()))?;
                TestConfig::new(a, self.truncation)?;
            }
        }
        if let Some(t) = self.timeout {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("timeout must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Estimated CPDAG over the table's columns, in table order.
    pub graph: Graph,
    pub elapsed: f64,
}

/// Scales and embeds `table`, then runs the configured search.
///
/// Variables are sorted by name before anything else happens, so the result
/// does not depend on the column order of the input.
pub fn search_table(
    table: &DataTable,
    knowledge: &Knowledge,
    params: &SearchParams,
) -> Result<SearchOutcome> {
    params.validate()?;
    let start = Instant::now();
    let deadline = params.timeout.map(|t| start + Duration::from_secs_f64(t));

    let names = table.names();
    let mut by_name: Vec<usize> = (0..names.len()).collect();
    by_name.sort_by(|&a, &b| names[a].cmp(&names[b]));
    // perm[old] = new
    let mut perm = vec![0; names.len()];
    for (new, &old) in by_name.iter().enumerate() {
        perm[old] = new;
    }
    let sorted = table.permute_columns(&perm);
    let knowledge = knowledge.permuted(&perm);
    let sorted_names = sorted.names();

    let data = prepare(&sorted, BasisSpec::new(params.truncation)?)?;
    let result = match params.algorithm {
        Algorithm::Boss => {
            let cfg = ScoreConfig::new(params.penalty.unwrap_or_default(), params.truncation)?;
            let score = BfBicScore::new(&data, cfg);
            let opts = BossOptions {
                seed: params.seed,
                deadline,
            };
            boss_search(&score, &sorted_names, &knowledge, &opts).map(|r| r.cpdag)
        }
        Algorithm::PcMax => {
            let cfg = TestConfig::new(params.alpha.unwrap_or_default(), params.truncation)?;
            let test = BfLrt::new(&data, cfg);
            let opts = PcMaxOptions {
                max_depth: params.max_depth,
                deadline,
            };
            pcmax_search(&test, &sorted_names, &knowledge, &opts).map(|r| r.cpdag)
        }
    };
    let cpdag = result.map_err(|e| match e {
        Error::TimeoutExceeded(_) => Error::TimeoutExceeded(params.timeout.unwrap_or_default()),
        other => other,
    })?;
    Ok(SearchOutcome {
        graph: cpdag.reindexed(&names)?,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// A fully directed acyclic truth is compared through its CPDAG.
pub fn truth_as_cpdag(truth: &Graph) -> Result<Graph> {
    if truth.all_directed() && truth.is_dag() {
        dag_to_cpdag(truth)
    } else {
        Ok(truth.clone())
    }
}

/// Metrics of `estimated` against `truth`, with `elapsed` filled in.
pub fn evaluate(estimated: &Graph, truth: &Graph, elapsed: f64) -> Result<MetricsReport> {
    let mut m = compare_graphs(estimated, &truth_as_cpdag(truth)?)?;
    m.elapsed = elapsed;
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: SearchParams,
    pub input: PathBuf,
    pub truth: Option<PathBuf>,
    pub knowledge: Option<PathBuf>,
    pub out_graph: Option<PathBuf>,
    pub out_metrics: Option<PathBuf>,
}

/// Loads the CSV, runs the search and writes the requested outputs. Metrics
/// are computed only when a truth graph is given.
pub fn run_search(cfg: &RunConfig) -> Result<(Graph, Option<MetricsReport>)> {
    cfg.params.validate()?;
    let table = io::load_csv(&cfg.input)?;
    let knowledge = match &cfg.knowledge {
        Some(path) => io::load_knowledge(path, &table.names())?,
        None => Knowledge::empty(),
    };
    let outcome = search_table(&table, &knowledge, &cfg.params)?;
    if let Some(path) = &cfg.out_graph {
        io::write_graph(&outcome.graph, path)?;
    }
    let metrics = match &cfg.truth {
        Some(path) => Some(evaluate(&outcome.graph, &io::read_graph(path)?, outcome.elapsed)?),
        None => None,
    };
    if let (Some(path), Some(m)) = (&cfg.out_metrics, &metrics) {
        std::fs::write(path, m.to_json() + "\n")?;
    }
    Ok((outcome.graph, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_parameters_are_config_errors() {
        let mut p = SearchParams::pcmax(3, 0.01);
        p.alpha = None;
        assert!(matches!(p.validate(), Err(Error::Config(_))));
        let mut p = SearchParams::boss(3, 1.0);
        p.penalty = None;
        assert!(matches!(p.validate(), Err(Error::Config(_))));
        assert!(SearchParams::boss(0, 1.0).validate().is_err());
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("PC-Max".parse::<Algorithm>().unwrap(), Algorithm::PcMax);
        assert_eq!("boss".parse::<Algorithm>().unwrap(), Algorithm::Boss);
        assert!("ges".parse::<Algorithm>().is_err());
    }
}
