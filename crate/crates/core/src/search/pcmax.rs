//! PC-Max: depth-stratified skeleton search, colliders oriented from the
//! separating set with the largest p-value, then Meek propagation.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;

use super::subsets::subsets_up_to;
use crate::citest::IndependenceTest;
use crate::error::{Error, Result};
use crate::graph::{Graph, Knowledge};

type Sepset = Option<(Vec<usize>, f64)>;

/// Separating sets keyed by unordered pair `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SepSetMap {
    map: BTreeMap<(usize, usize), (Vec<usize>, f64)>,
}

impl SepSetMap {
    fn key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    pub fn insert(&mut self, a: usize, b: usize, set: Vec<usize>, p_value: f64) {
        self.map.insert(Self::key(a, b), (set, p_value));
    }

    pub fn get(&self, a: usize, b: usize) -> Option<(&[usize], f64)> {
        self.map.get(&Self::key(a, b)).map(|(s, p)| (s.as_slice(), *p))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &(Vec<usize>, f64))> {
        self.map.iter()
    }
}

#[derive(Clone, Debug)]
pub struct PcMaxOptions {
    pub max_depth: usize,
    pub deadline: Option<Instant>,
}

impl Default for PcMaxOptions {
    fn default() -> Self {
        PcMaxOptions {
            max_depth: 3,
            deadline: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PcMaxResult {
    pub cpdag: Graph,
    pub skeleton: Graph,
    pub sepsets: SepSetMap,
}

fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() > d => Err(Error::TimeoutExceeded(0.0)),
        _ => Ok(()),
    }
}

/// Searches conditioning sets of size `depth` drawn from `adj_a` and then
/// `adj_b`; returns the first set judged independent.
fn find_sepset<T: IndependenceTest + ?Sized>(
    test: &T,
    a: usize,
    b: usize,
    adj_a: &[usize],
    adj_b: &[usize],
    depth: usize,
) -> Result<Sepset> {
    for s in super::subsets::subsets_of_size(adj_a, depth) {
        let r = test.test(a, b, &s)?;
        if r.independent {
            return Ok(Some((s, r.p_value)));
        }
    }
    for s in super::subsets::subsets_of_size(adj_b, depth) {
        if s.iter().all(|x| adj_a.contains(x)) {
            continue;
        }
        let r = test.test(a, b, &s)?;
        if r.independent {
            return Ok(Some((s, r.p_value)));
        }
    }
    Ok(None)
}

/// Skeleton phase. Adjacency sets are frozen at the start of each depth, so
/// the outcome does not depend on the order in which edges are visited.
pub fn pcmax_skeleton<T: IndependenceTest + ?Sized>(
    test: &T,
    names: &[String],
    knowledge: &Knowledge,
    opts: &PcMaxOptions,
) -> Result<(Graph, SepSetMap)> {
    let v = test.num_variables();
    if names.len() != v {
        return Err(Error::VariableMismatch);
    }
    let mut g = Graph::new(names.iter().cloned())?;
    for a in 0..v {
        for b in a + 1..v {
            let blocked = knowledge.is_forbidden(a, b) && knowledge.is_forbidden(b, a);
            let required = knowledge.is_required(a, b) || knowledge.is_required(b, a);
            if !blocked || required {
                g.add_undirected(a, b)?;
            }
        }
    }
    let mut sepsets = SepSetMap::default();

    for depth in 0..=opts.max_depth {
        check_deadline(opts.deadline)?;
        let adj: Vec<Vec<usize>> = (0..v).map(|x| g.neighbors(x)).collect();
        let edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|e| (e.a, e.b))
            .filter(|&(a, b)| !knowledge.is_required(a, b) && !knowledge.is_required(b, a))
            .collect();
        let without = |x: usize, y: usize| -> Vec<usize> {
            adj[x].iter().copied().filter(|&u| u != y).collect()
        };
        if !edges
            .iter()
            .any(|&(a, b)| without(a, b).len() >= depth || without(b, a).len() >= depth)
        {
            break;
        }
        let found: Vec<Result<Sepset>> = edges
            .par_iter()
            .map(|&(a, b)| {
                check_deadline(opts.deadline)?;
                find_sepset(test, a, b, &without(a, b), &without(b, a), depth)
            })
            .collect();
        for (&(a, b), f) in edges.iter().zip(found) {
            if let Some((set, p)) = f? {
                g.remove_edge(a, b);
                sepsets.insert(a, b, set, p);
            }
        }
    }
    Ok((g, sepsets))
}

/// Nonadjacent pairs `(x, z)`, `x < z`, with at least one common neighbour.
fn unshielded_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let v = g.num_nodes();
    let mut out = BTreeSet::new();
    for y in 0..v {
        let nb = g.neighbors(y);
        for (i, &x) in nb.iter().enumerate() {
            for &z in &nb[i + 1..] {
                if !g.adjacent(x, z) {
                    out.insert((x, z));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Separating set with the largest p-value among subsets (size up to
/// `max_depth`) of the current neighbours of `x` and of `z`. Earlier sets win
/// ties.
fn max_p_sepset<T: IndependenceTest + ?Sized>(
    test: &T,
    g: &Graph,
    x: usize,
    z: usize,
    max_depth: usize,
) -> Result<(Vec<usize>, f64)> {
    let adj_x: Vec<usize> = g.neighbors(x).into_iter().filter(|&u| u != z).collect();
    let adj_z: Vec<usize> = g.neighbors(z).into_iter().filter(|&u| u != x).collect();
    let mut candidates = subsets_up_to(&adj_x, max_depth);
    for s in subsets_up_to(&adj_z, max_depth) {
        if !s.iter().all(|u| adj_x.contains(u)) {
            candidates.push(s);
        }
    }
    let mut best: Sepset = None;
    for s in candidates {
        let p = test.test(x, z, &s)?.p_value;
        if best.as_ref().is_none_or(|(_, bp)| p > *bp) {
            best = Some((s, p));
        }
    }
    Ok(best.expect("the empty set is always a candidate"))
}

/// True if a directed path `from ~> to` exists.
fn directed_path(g: &Graph, from: usize, to: usize) -> bool {
    let mut seen = vec![false; g.num_nodes()];
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if std::mem::replace(&mut seen[n], true) {
            continue;
        }
        stack.extend(g.children(n));
    }
    false
}

fn can_orient(g: &Graph, from: usize, to: usize, knowledge: &Knowledge) -> bool {
    if knowledge.is_forbidden(from, to) || g.is_directed(to, from) {
        return false;
    }
    g.is_directed(from, to) || !directed_path(g, to, from)
}

/// Orients unshielded colliders `x --> y <-- z` whenever `y` is absent from
/// the max-p separating set of `(x, z)`.
///
/// Candidate colliders are applied in order of decreasing max-p value (ties in
/// lexicographic triple order); a collider that would reverse an existing
/// orientation, violate knowledge or close a directed cycle is skipped.
pub fn orient_colliders_maxp<T: IndependenceTest + ?Sized>(
    skeleton: &Graph,
    test: &T,
    knowledge: &Knowledge,
    max_depth: usize,
) -> Result<Graph> {
    let pairs = unshielded_pairs(skeleton);
    let best: Vec<Result<(Vec<usize>, f64)>> = pairs
        .par_iter()
        .map(|&(x, z)| max_p_sepset(test, skeleton, x, z, max_depth))
        .collect();

    let mut colliders: Vec<(f64, (usize, usize, usize))> = Vec::new();
    for (&(x, z), b) in pairs.iter().zip(best) {
        let (set, p) = b?;
        for y in skeleton.neighbors(x) {
            if skeleton.adjacent(y, z) && !set.contains(&y) {
                colliders.push((p, (x, y, z)));
            }
        }
    }
    colliders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut g = skeleton.clone();
    for (_, (x, y, z)) in colliders {
        if can_orient(&g, x, y, knowledge) && can_orient(&g, z, y, knowledge) {
            g.add_directed(x, y)?;
            if can_orient(&g, z, y, knowledge) {
                g.add_directed(z, y)?;
            } else {
                g.add_undirected(x, y)?;
            }
        }
    }
    Ok(g)
}

/// Full PC-Max: skeleton, max-p colliders, required edges, Meek closure.
pub fn pcmax_search<T: IndependenceTest + ?Sized>(
    test: &T,
    names: &[String],
    knowledge: &Knowledge,
    opts: &PcMaxOptions,
) -> Result<PcMaxResult> {
    let (skeleton, sepsets) = pcmax_skeleton(test, names, knowledge, opts)?;
    check_deadline(opts.deadline)?;
    let mut g = orient_colliders_maxp(&skeleton, test, knowledge, opts.max_depth)?;
    for &(a, b) in knowledge.required() {
        if g.adjacent(a, b) && !g.is_directed(a, b) && can_orient(&g, a, b, knowledge) {
            g.add_directed(a, b)?;
        }
    }
    let cpdag = crate::graph::meek_closure_lenient(&g, knowledge)?;
    Ok(PcMaxResult {
        cpdag,
        skeleton,
        sepsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citest::DSeparationOracle;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::with_nodes(n);
        for &(a, b) in edges {
            g.add_directed(a, b).unwrap();
        }
        g
    }

    #[test]
    fn collider_and_its_sepset() {
        let truth = dag(3, &[(0, 2), (1, 2)]);
        let oracle = DSeparationOracle::new(&truth);
        let out = pcmax_search(&oracle, truth.names(), &Knowledge::empty(), &PcMaxOptions::default()).unwrap();
        assert_eq!(out.cpdag, truth);
        assert_eq!(out.sepsets.get(1, 0).unwrap().0, &[] as &[usize]);
        assert_eq!(out.sepsets.len(), 1);
    }

    #[test]
    fn chain_stays_undirected() {
        let truth = dag(3, &[(0, 1), (1, 2)]);
        let oracle = DSeparationOracle::new(&truth);
        let out = pcmax_search(&oracle, truth.names(), &Knowledge::empty(), &PcMaxOptions::default()).unwrap();
        assert!(out.cpdag.is_undirected(0, 1) && out.cpdag.is_undirected(1, 2));
        assert_eq!(out.sepsets.get(0, 2).unwrap().0, &[1]);
    }

    #[test]
    fn forbidden_pairs_start_absent() {
        let truth = dag(2, &[(0, 1)]);
        let oracle = DSeparationOracle::new(&truth);
        let k = Knowledge::new(vec![], [(0, 1), (1, 0)], [], truth.names()).unwrap();
        let (g, sep) = pcmax_skeleton(&oracle, truth.names(), &k, &PcMaxOptions::default()).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(sep.is_empty());
    }

    #[test]
    fn expired_deadline() {
        let truth = dag(3, &[(0, 1)]);
        let oracle = DSeparationOracle::new(&truth);
        let opts = PcMaxOptions {
            max_depth: 3,
            deadline: Some(Instant::now() - std::time::Duration::from_secs(1)),
        };
        assert!(matches!(
            pcmax_search(&oracle, truth.names(), &Knowledge::empty(), &opts),
            Err(Error::TimeoutExceeded(_))
        ));
    }
}
