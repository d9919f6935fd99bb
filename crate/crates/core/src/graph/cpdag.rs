use super::{Graph, Knowledge};
use crate::error::{Error, Result};

/// Unshielded colliders `a --> c <-- b` with `a < b` and `a`, `b` nonadjacent,
/// returned as `(a, c, b)` in lexicographic order.
pub fn unshielded_colliders(g: &Graph) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for c in 0..g.num_nodes() {
        let pa = g.parents(c);
        for (i, &a) in pa.iter().enumerate() {
            for &b in &pa[i + 1..] {
                if !g.adjacent(a, b) {
                    out.push((a, c, b));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Label {
    Unknown,
    Compelled,
    Reversible,
}

/// CPDAG of the Markov equivalence class containing `dag`.
///
/// Edges are ordered by the topological position of their heads (ascending)
/// and then of their tails (descending), and labelled compelled or reversible
/// in that order. Compelled edges stay directed; reversible ones become
/// undirected.
pub fn dag_to_cpdag(dag: &Graph) -> Result<Graph> {
    let order = dag.topological_order()?;
    let v = dag.num_nodes();
    let mut pos = vec![0; v];
    for (i, &n) in order.iter().enumerate() {
        pos[n] = i;
    }

    let mut edges: Vec<(usize, usize)> = dag
        .edges()
        .iter()
        .filter_map(|e| e.endpoints_directed())
        .collect();
    edges.sort_by(|&(x1, y1), &(x2, y2)| pos[y1].cmp(&pos[y2]).then(pos[x2].cmp(&pos[x1])));

    let mut label = vec![Label::Unknown; v * v];
    let idx = |x: usize, y: usize| x * v + y;

    for &(x, y) in &edges {
        if label[idx(x, y)] != Label::Unknown {
            continue;
        }
        let mut done = false;
        for w in dag.parents(x) {
            if label[idx(w, x)] != Label::Compelled {
                continue;
            }
            if !dag.is_directed(w, y) {
                for z in dag.parents(y) {
                    label[idx(z, y)] = Label::Compelled;
                }
                done = true;
                break;
            }
            label[idx(w, y)] = Label::Compelled;
        }
        if done {
            continue;
        }
        let compelled = dag
            .parents(y)
            .into_iter()
            .any(|z| z != x && !dag.is_directed(z, x));
        let mark = if compelled {
            Label::Compelled
        } else {
            Label::Reversible
        };
        for z in dag.parents(y) {
            if label[idx(z, y)] == Label::Unknown {
                label[idx(z, y)] = mark;
            }
        }
    }

    let mut out = dag.clone();
    for &(x, y) in &edges {
        if label[idx(x, y)] == Label::Reversible {
            out.add_undirected(x, y)?;
        }
    }
    Ok(out)
}

/// The first Meek rule that orients `a --> b`, given `a --- b` is undirected.
fn meek_fires(g: &Graph, a: usize, b: usize) -> bool {
    let v = g.num_nodes();
    // R1: c --> a --- b, c and b nonadjacent
    if (0..v).any(|c| g.is_directed(c, a) && !g.adjacent(c, b)) {
        return true;
    }
    // R2: a --> c --> b
    if (0..v).any(|c| g.is_directed(a, c) && g.is_directed(c, b)) {
        return true;
    }
    // R3: c --- a --- d, c --> b <-- d, c and d nonadjacent
    let und = g.undirected_neighbors(a);
    for (i, &c) in und.iter().enumerate() {
        if c == b || !g.is_directed(c, b) {
            continue;
        }
        for &d in &und[i + 1..] {
            if d != b && g.is_directed(d, b) && !g.adjacent(c, d) {
                return true;
            }
        }
    }
    // R4: a --- k --> l --> b, a adjacent to l, k and b nonadjacent
    for &k in &und {
        if k == b || g.adjacent(k, b) {
            continue;
        }
        if (0..v).any(|l| g.is_directed(k, l) && g.is_directed(l, b) && g.adjacent(a, l)) {
            return true;
        }
    }
    false
}

/// Closes `g` under Meek's rules R1-R4, never orienting a forbidden direction.
///
/// Orientations are applied one at a time, scanning undirected edges in index
/// order, until no rule fires. Fails if rules demand both directions of an edge.
pub fn apply_meek_rules(g: &Graph, knowledge: &Knowledge) -> Result<Graph> {
    meek_closure(g, knowledge, true)
}

/// Like [`apply_meek_rules`], but edges with conflicting demands, or whose
/// orientation would close a directed cycle, are left undirected.
pub(crate) fn meek_closure_lenient(g: &Graph, knowledge: &Knowledge) -> Result<Graph> {
    meek_closure(g, knowledge, false)
}

fn reaches(g: &Graph, from: usize, to: usize) -> bool {
    let mut seen = vec![false; g.num_nodes()];
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if !std::mem::replace(&mut seen[n], true) {
            stack.extend(g.children(n));
        }
    }
    false
}

fn meek_closure(g: &Graph, knowledge: &Knowledge, strict: bool) -> Result<Graph> {
    let mut g = g.clone();
    loop {
        let mut applied = false;
        for e in g.edges() {
            if e.is_directed() {
                continue;
            }
            let (a, b) = (e.a, e.b);
            let mut fwd = !knowledge.is_forbidden(a, b) && meek_fires(&g, a, b);
            let mut bwd = !knowledge.is_forbidden(b, a) && meek_fires(&g, b, a);
            if !strict {
                fwd &= !reaches(&g, b, a);
                bwd &= !reaches(&g, a, b);
            }
            match (fwd, bwd) {
                (true, true) if strict => {
                    return Err(Error::ConflictingOrientation(
                        g.name(a).to_string(),
                        g.name(b).to_string(),
                    ))
                }
                (true, true) | (false, false) => continue,
                (true, false) => g.add_directed(a, b)?,
                (false, true) => g.add_directed(b, a)?,
            }
            applied = true;
            break;
        }
        if !applied {
            return Ok(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::with_nodes(n);
        for &(a, b) in edges {
            g.add_directed(a, b).unwrap();
        }
        g
    }

    #[test]
    fn chain_becomes_undirected() {
        let c = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)])).unwrap();
        assert!(c.is_undirected(0, 1));
        assert!(c.is_undirected(1, 2));
        assert_eq!(c.num_edges(), 2);
    }

    #[test]
    fn collider_is_kept() {
        let g = dag(3, &[(0, 1), (2, 1)]);
        assert_eq!(dag_to_cpdag(&g).unwrap(), g);
        assert_eq!(unshielded_colliders(&g), vec![(0, 1, 2)]);
    }

    #[test]
    fn collider_child_is_compelled() {
        // 0 -> 2 <- 1, 2 -> 3: the 2 -> 3 edge is forced by R1
        let g = dag(4, &[(0, 2), (1, 2), (2, 3)]);
        assert_eq!(dag_to_cpdag(&g).unwrap(), g);
    }

    #[test]
    fn meek_r1() {
        let mut g = Graph::with_nodes(3);
        g.add_directed(0, 1).unwrap();
        g.add_undirected(1, 2).unwrap();
        let out = apply_meek_rules(&g, &Knowledge::empty()).unwrap();
        assert!(out.is_directed(1, 2));
    }

    #[test]
    fn meek_respects_forbidden_direction() {
        let mut g = Graph::with_nodes(3);
        g.add_directed(0, 1).unwrap();
        g.add_undirected(1, 2).unwrap();
        let names: Vec<String> = g.names().to_vec();
        let k = Knowledge::new(vec![], [(1, 2)], [], &names).unwrap();
        let out = apply_meek_rules(&g, &k).unwrap();
        assert!(out.is_undirected(1, 2));
    }

    #[test]
    fn knowledge_does_not_compel() {
        let mut g = Graph::with_nodes(2);
        g.add_undirected(0, 1).unwrap();
        let k = Knowledge::new(vec![vec![0], vec![1]], [], [], g.names()).unwrap();
        assert_eq!(apply_meek_rules(&g, &k).unwrap(), g);
    }

    #[test]
    fn meek_r2_and_r3() {
        // R2: 0 -> 2 -> 1 with 0 --- 1
        let mut g = Graph::with_nodes(3);
        g.add_directed(0, 2).unwrap();
        g.add_directed(2, 1).unwrap();
        g.add_undirected(0, 1).unwrap();
        assert!(apply_meek_rules(&g, &Knowledge::empty()).unwrap().is_directed(0, 1));

        // R3: 1 --- 0 --- 2, 1 -> 3 <- 2, 0 --- 3
        let mut g = Graph::with_nodes(4);
        g.add_undirected(0, 1).unwrap();
        g.add_undirected(0, 2).unwrap();
        g.add_directed(1, 3).unwrap();
        g.add_directed(2, 3).unwrap();
        g.add_undirected(0, 3).unwrap();
        let out = apply_meek_rules(&g, &Knowledge::empty()).unwrap();
        assert!(out.is_directed(0, 3));
        assert!(out.is_undirected(0, 1));
    }
}
