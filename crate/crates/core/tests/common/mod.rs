#![allow(dead_code)]

use basisfn::graph::Graph;

/// Every DAG on `n` labelled nodes, by assigning each pair one of
/// {absent, forward, backward} and discarding cyclic graphs.
pub fn all_dags(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut g = Graph::with_nodes(n);
        for &(a, b) in &pairs {
            match code % 3 {
                1 => g.add_directed(a, b).unwrap(),
                2 => g.add_directed(b, a).unwrap(),
                _ => {}
            }
            code /= 3;
        }
        if g.is_dag() {
            out.push(g);
        }
    }
    out
}

pub fn dag(n: usize, edges: &[(usize, usize)]) -> Graph {
    let mut g = Graph::with_nodes(n);
    for &(a, b) in edges {
        g.add_directed(a, b).unwrap();
    }
    g
}

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}
