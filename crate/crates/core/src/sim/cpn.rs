//! Causal perceptron networks: recursive SEMs whose structural functions are
//! randomly initialized multilayer perceptrons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::noise::NoiseSpec;
use crate::data::{Column, DataTable};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq)]
pub struct CpnSpec {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub input_scale: f64,
    pub leaky_slope: f64,
    pub multinomial_prob: f64,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl Default for CpnSpec {
    fn default() -> Self {
        CpnSpec {
            hidden_layers: 5,
            hidden_width: 50,
            input_scale: 5.0,
            leaky_slope: 0.01,
            multinomial_prob: 0.0,
            noise: NoiseSpec::default(),
            seed: 0,
        }
    }
}

impl CpnSpec {
    fn validate(&self) -> Result<()> {
        if self.hidden_layers == 0 || self.hidden_width == 0 {
            return Err(Error::Config("networks need at least one hidden unit and layer".into()));
        }
        if !(0.0..=1.0).contains(&self.multinomial_prob) {
            return Err(Error::Config("multinomial probability must lie in [0, 1]".into()));
        }
        self.noise.validate()
    }
}

/// Dense layer: `weights` is `out x in`, row-major.
#[derive(Clone, Debug)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub inputs: usize,
}

impl Layer {
    /// Kaiming-normal weights for a leaky rectifier (`std = gain / sqrt(fan_in)`),
    /// biases uniform on `±1/sqrt(fan_in)`.
    fn kaiming<R: Rng>(inputs: usize, outputs: usize, slope: f64, rng: &mut R) -> Self {
        let gain = (2.0 / (1.0 + slope * slope)).sqrt();
        let std = gain / (inputs as f64).sqrt();
        let bound = 1.0 / (inputs as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| std * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let bias = (0..outputs).map(|_| rng.random_range(-bound..bound)).collect();
        Layer { weights, bias, inputs }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bias.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }
}

/// Structural function of one node.
#[derive(Clone, Debug)]
pub struct MlpNetwork {
    pub layers: Vec<Layer>,
    pub leaky_slope: f64,
}

impl MlpNetwork {
    pub fn new<R: Rng>(
        inputs: usize,
        outputs: usize,
        hidden_layers: usize,
        width: usize,
        leaky_slope: f64,
        rng: &mut R,
    ) -> Self {
        let mut layers = Vec::with_capacity(hidden_layers + 1);
        let mut fan_in = inputs;
        for _ in 0..hidden_layers {
            layers.push(Layer::kaiming(fan_in, width, leaky_slope, rng));
            fan_in = width;
        }
        layers.push(Layer::kaiming(fan_in, outputs, leaky_slope, rng));
        MlpNetwork { layers, leaky_slope }
    }

    /// Leaky rectifier after every hidden layer; the output layer is linear.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.forward(&cur, &mut next);
            if i < last {
                for v in next.iter_mut() {
                    if *v < 0.0 {
                        *v *= self.leaky_slope;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }
}

/// Softmax with the maximum logit subtracted first.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Draws a category index from probabilities `probs`.
pub fn sample_category<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

struct Node {
    parents: Vec<usize>,
    net: MlpNetwork,
    categories: Option<usize>,
}

/// Generates `n` rows from a CPN over `dag`. Returns the table (columns named
/// after the DAG's nodes) and a copy of the DAG.
///
/// Each row draws from its own random stream, so rows are generated in
/// parallel and the output only depends on `(dag, spec, n)`.
pub fn cpn_generate(dag: &Graph, spec: &CpnSpec, n: usize) -> Result<(DataTable, Graph)> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    let order = dag.topological_order()?;
    let mut init = ChaCha8Rng::seed_from_u64(spec.seed);
    init.set_stream(u64::MAX);
    let nodes: Vec<Node> = (0..dag.num_nodes())
        .map(|v| {
            let parents = dag.parents(v);
            let categories = (init.random::<f64>() < spec.multinomial_prob)
                .then(|| init.random_range(2..=5usize));
            let net = MlpNetwork::new(
                parents.len() + 1,
                categories.unwrap_or(1),
                spec.hidden_layers,
                spec.hidden_width,
                spec.leaky_slope,
                &mut init,
            );
            Node {
                parents,
                net,
                categories,
            }
        })
        .collect();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(r as u64);
            let mut values = vec![0.0; nodes.len()];
            let mut input = Vec::new();
            for &v in &order {
                let node = &nodes[v];
                input.clear();
                input.extend(node.parents.iter().map(|&p| values[p] * spec.input_scale));
                input.push(spec.noise.sample(&mut rng) * spec.input_scale);
                let out = node.net.forward(&input);
                values[v] = match node.categories {
                    None => out[0],
                    Some(_) => sample_category(&softmax(&out), &mut rng) as f64,
                };
            }
            values
        })
        .collect();

    let columns = nodes
        .iter()
        .enumerate()
        .map(|(v, node)| {
            let col = match node.categories {
                None => Column::Continuous(rows.iter().map(|r| r[v]).collect()),
                Some(c) => Column::Categorical {
                    codes: rows.iter().map(|r| r[v] as u32).collect(),
                    categories: c,
                },
            };
            (dag.name(v).to_string(), col)
        })
        .collect();
    Ok((DataTable::new(columns)?, dag.clone()))
}
