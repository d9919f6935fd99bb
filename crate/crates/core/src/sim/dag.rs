use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Random DAG on `nodes` nodes (`X1..Xn`) with exactly `edges` edges.
///
/// A random node order is drawn, then `edges` distinct pairs are sampled
/// uniformly and oriented along that order.
pub fn random_dag(nodes: usize, edges: usize, seed: u64) -> Result<Graph> {
    let pairs = nodes * nodes.saturating_sub(1) / 2;
    if edges > pairs {
        return Err(Error::TooManyEdges { nodes, edges });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(&mut rng);

    let mut all = Vec::with_capacity(pairs);
    for i in 0..nodes {
        for j in i + 1..nodes {
            all.push((order[i], order[j]));
        }
    }
    let mut g = Graph::with_nodes(nodes);
    for k in index::sample(&mut rng, pairs, edges) {
        let (a, b) = all[k];
        g.add_directed(a, b)?;
    }
    Ok(g)
}
