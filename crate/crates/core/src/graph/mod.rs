//! Mixed graphs with tail/arrow endpoints.
//!
//! One representation serves as DAG, skeleton and CPDAG. Edges are stored in a
//! dense endpoint matrix: `ends[i][j]` holds the mark at `j` of the edge `i *-* j`,
//! so `i --> j` is `ends[i][j] = Arrow, ends[j][i] = Tail`.

mod cpdag;
mod dsep;
mod format;
mod knowledge;

pub use cpdag::{apply_meek_rules, dag_to_cpdag, unshielded_colliders};
pub(crate) use cpdag::meek_closure_lenient;
pub use dsep::d_separated;
pub use format::{emit_graph, parse_graph};
pub use knowledge::Knowledge;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Tail,
    Arrow,
}

/// An edge between two distinct nodes, with the mark at each end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub mark_a: Mark,
    pub mark_b: Mark,
}

impl Edge {
    /// `from --> to`
    pub fn directed(from: usize, to: usize) -> Self {
        Edge {
            a: from,
            b: to,
            mark_a: Mark::Tail,
            mark_b: Mark::Arrow,
        }
    }

    pub fn undirected(a: usize, b: usize) -> Self {
        Edge {
            a,
            b,
            mark_a: Mark::Tail,
            mark_b: Mark::Tail,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.mark_a != self.mark_b
    }

    /// Tail and head of a directed edge.
    pub fn endpoints_directed(&self) -> Option<(usize, usize)> {
        match (self.mark_a, self.mark_b) {
            (Mark::Tail, Mark::Arrow) => Some((self.a, self.b)),
            (Mark::Arrow, Mark::Tail) => Some((self.b, self.a)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    ends: Vec<Option<Mark>>,
}

impl Graph {
    /// Empty graph over the named nodes. Names must be unique.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::InvalidEdge(format!("invalid or duplicate node name `{n}`")));
            }
        }
        let v = names.len();
        Ok(Graph {
            names,
            ends: vec![None; v * v],
        })
    }

    /// Empty graph with nodes named `X1..Xn`.
    pub fn with_nodes(n: usize) -> Self {
        Graph::new((1..=n).map(|i| format!("X{i}"))).expect("generated names are unique")
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::UnknownVariable(format!("node index {v}")))
        }
    }

    #[inline]
    fn end(&self, from: usize, to: usize) -> Option<Mark> {
        self.ends[from * self.names.len() + to]
    }

    /// Inserts or replaces the edge between `e.a` and `e.b`.
    pub fn set_edge(&mut self, e: Edge) -> Result<()> {
        self.check(e.a)?;
        self.check(e.b)?;
        if e.a == e.b {
            return Err(Error::InvalidEdge(format!("self-loop at {}", self.names[e.a])));
        }
        if e.mark_a == Mark::Arrow && e.mark_b == Mark::Arrow {
            return Err(Error::InvalidEdge(format!(
                "bidirected edge {} <-> {}",
                self.names[e.a], self.names[e.b]
            )));
        }
        let v = self.num_nodes();
        self.ends[e.a * v + e.b] = Some(e.mark_b);
        self.ends[e.b * v + e.a] = Some(e.mark_a);
        Ok(())
    }

    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<()> {
        self.set_edge(Edge::directed(from, to))
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.set_edge(Edge::undirected(a, b))
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        let v = self.num_nodes();
        self.ends[a * v + b] = None;
        self.ends[b * v + a] = None;
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.end(a, b).is_some()
    }

    /// `a --> b`
    pub fn is_directed(&self, a: usize, b: usize) -> bool {
        self.end(a, b) == Some(Mark::Arrow) && self.end(b, a) == Some(Mark::Tail)
    }

    pub fn is_undirected(&self, a: usize, b: usize) -> bool {
        self.end(a, b) == Some(Mark::Tail) && self.end(b, a) == Some(Mark::Tail)
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<Edge> {
        let mark_b = self.end(a, b)?;
        let mark_a = self.end(b, a)?;
        Some(Edge {
            a,
            b,
            mark_a,
            mark_b,
        })
    }

    /// Nodes `p` with `p --> v`.
    pub fn parents(&self, v: usize) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&p| self.is_directed(p, v)).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&c| self.is_directed(v, c)).collect()
    }

    /// All nodes adjacent to `v`, in index order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&u| self.adjacent(v, u)).collect()
    }

    pub fn undirected_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&u| self.is_undirected(v, u)).collect()
    }

    /// Edges sorted by `(min endpoint, max endpoint)`, reported with `a < b`.
    pub fn edges(&self) -> Vec<Edge> {
        let v = self.num_nodes();
        let mut out = Vec::new();
        for a in 0..v {
            for b in a + 1..v {
                if let Some(e) = self.edge(a, b) {
                    out.push(e);
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.ends.iter().filter(|m| m.is_some()).count() / 2
    }

    /// Same adjacencies, every edge undirected.
    pub fn skeleton(&self) -> Graph {
        let mut g = self.clone();
        for m in g.ends.iter_mut().flatten() {
            *m = Mark::Tail;
        }
        g
    }

    pub fn all_directed(&self) -> bool {
        self.edges().iter().all(Edge::is_directed)
    }

    /// True if the directed part of the graph contains a cycle.
    pub fn has_directed_cycle(&self) -> bool {
        directed_order(self).is_none()
    }

    pub fn is_dag(&self) -> bool {
        self.all_directed() && !self.has_directed_cycle()
    }

    /// Parents-before-children ordering of a DAG; ties broken by lowest index.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        if let Some(e) = self.edges().into_iter().find(|e| !e.is_directed()) {
            return Err(Error::InvalidEdge(format!(
                "{} --- {} is not directed",
                self.names[e.a], self.names[e.b]
            )));
        }
        directed_order(self).ok_or(Error::CyclicGraph)
    }

    /// Copy with node `i` moved to position `perm[i]` (names move with nodes).
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let v = self.num_nodes();
        assert_eq!(perm.len(), v);
        let mut seen = vec![false; v];
        for &p in perm {
            assert!(p < v && !std::mem::replace(&mut seen[p], true), "not a permutation");
        }
        let mut names = vec![String::new(); v];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.names[i].clone();
        }
        let mut ends = vec![None; v * v];
        for i in 0..v {
            for j in 0..v {
                ends[perm[i] * v + perm[j]] = self.ends[i * v + j];
            }
        }
        Graph { names, ends }
    }

    /// Copy of the graph with nodes reordered to match `names`.
    pub fn reindexed(&self, names: &[String]) -> Result<Graph> {
        if names.len() != self.num_nodes() {
            return Err(Error::VariableMismatch);
        }
        let mut perm = vec![0; names.len()];
        for (i, n) in self.names.iter().enumerate() {
            perm[i] = names.iter().position(|m| m == n).ok_or(Error::VariableMismatch)?;
        }
        Ok(self.permuted(&perm))
    }
}

/// Kahn's algorithm over directed edges only; `None` if a directed cycle exists.
fn directed_order(g: &Graph) -> Option<Vec<usize>> {
    let v = g.num_nodes();
    let mut indeg: Vec<usize> = (0..v).map(|i| g.parents(i).len()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..v).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(v);
    while let Some(n) = ready.pop_first() {
        order.push(n);
        for c in g.children(n) {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == v).then_some(order)
}
