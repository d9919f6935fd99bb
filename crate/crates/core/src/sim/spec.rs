use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{additive_sem_generate, cpn_generate, random_dag, CpnSpec, NoiseSpec, Pnl};
use crate::data::DataTable;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    /// CPN with every node continuous.
    #[default]
    Continuous,
    /// CPN with multinomial nodes.
    Mixed,
    /// Additive nonlinear SEM with Gaussian noise.
    Additive,
}

impl FromStr for DataKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "continuous" => Ok(DataKind::Continuous),
            "mixed" => Ok(DataKind::Mixed),
            "additive" => Ok(DataKind::Additive),
            other => Err(Error::Config(format!("unknown data type `{other}`"))),
        }
    }
}

impl DataKind {
    pub fn label(self) -> &'static str {
        match self {
            DataKind::Continuous => "Continuous",
            DataKind::Mixed => "Mixed",
            DataKind::Additive => "Additive",
        }
    }
}

/// One simulated dataset: a random DAG, data drawn from it, and optionally
/// shuffled columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SimSpec {
    pub nodes: usize,
    pub edges: usize,
    pub samples: usize,
    pub kind: DataKind,
    /// Probability of a multinomial node for [`DataKind::Mixed`].
    pub mprob: f64,
    pub pnl: Option<Pnl>,
    pub seed: u64,
    pub shuffle_columns: bool,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            nodes: 10,
            edges: 10,
            samples: 1000,
            kind: DataKind::Continuous,
            mprob: 0.5,
            pnl: None,
            seed: 0,
            shuffle_columns: true,
        }
    }
}

impl FromStr for SimSpec {
    type Err = Error;

    /// `nodes=10,edges=20,n=1000,type=mixed,mprob=0.3`
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SimSpec::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{part}`")))?;
            let bad = || Error::Config(format!("invalid value for `{key}`: `{value}`"));
            match key.trim() {
                "nodes" => spec.nodes = value.parse().map_err(|_| bad())?,
                "edges" => spec.edges = value.parse().map_err(|_| bad())?,
                "n" | "samples" => spec.samples = value.parse().map_err(|_| bad())?,
                "type" => spec.kind = value.parse()?,
                "mprob" => spec.mprob = value.parse().map_err(|_| bad())?,
                "pnl" => spec.pnl = Some(value.parse()?),
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                "shuffle" => spec.shuffle_columns = value.parse().map_err(|_| bad())?,
                other => return Err(Error::Config(format!("unknown simulation key `{other}`"))),
            }
        }
        Ok(spec)
    }
}

fn derive(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates the dataset and its true DAG. Columns of the table (and nodes of
/// the returned DAG) are shuffled when `shuffle_columns` is set.
pub fn simulate(spec: &SimSpec) -> Result<(DataTable, Graph)> {
    let dag = random_dag(spec.nodes, spec.edges, derive(spec.seed, 1))?;
    let data_seed = derive(spec.seed, 2);
    let (table, dag) = match spec.kind {
        DataKind::Continuous | DataKind::Mixed => {
            let cpn = CpnSpec {
                multinomial_prob: if spec.kind == DataKind::Mixed { spec.mprob } else { 0.0 },
                seed: data_seed,
                ..CpnSpec::default()
            };
            cpn_generate(&dag, &cpn, spec.samples)?
        }
        DataKind::Additive => additive_sem_generate(
            &dag,
            spec.samples,
            NoiseSpec::Gaussian { sigma: 1.0 },
            spec.pnl,
            data_seed,
        )?,
    };
    if !spec.shuffle_columns {
        return Ok((table, dag));
    }
    let mut perm: Vec<usize> = (0..spec.nodes).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(derive(spec.seed, 3)));
    Ok((table.permute_columns(&perm), dag.permuted(&perm)))
}
