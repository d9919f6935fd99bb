mod common;

use std::collections::{BTreeSet, HashMap};

use basisfn::graph::{
    apply_meek_rules, d_separated, dag_to_cpdag, emit_graph, parse_graph, unshielded_colliders,
    Graph, Knowledge,
};
use common::{all_dags, dag};
use proptest::prelude::*;

/// d-separation by brute force: enumerate every simple path in the skeleton
/// and check whether any of them is active given `z`.
fn dsep_by_paths(g: &Graph, x: usize, y: usize, z: &[usize]) -> bool {
    let n = g.num_nodes();
    let mut desc = vec![vec![false; n]; n];
    for (s, row) in desc.iter_mut().enumerate() {
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            if !row[u] {
                row[u] = true;
                stack.extend(g.children(u));
            }
        }
    }
    let in_z = |v: usize| z.contains(&v);
    let active = |path: &[usize]| {
        path.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            if g.is_directed(a, b) && g.is_directed(c, b) {
                (0..n).any(|d| desc[b][d] && in_z(d))
            } else {
                !in_z(b)
            }
        })
    };
    fn walk(g: &Graph, path: &mut Vec<usize>, y: usize, found: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let last = *path.last().unwrap();
        if last == y {
            return found(path);
        }
        for nb in g.neighbors(last) {
            if path.contains(&nb) {
                continue;
            }
            path.push(nb);
            let hit = walk(g, path, y, found);
            path.pop();
            if hit {
                return true;
            }
        }
        false
    }
    let mut path = vec![x];
    !walk(g, &mut path, y, &mut |p| active(p))
}

fn random_dag_strategy(n: usize) -> impl Strategy<Value = Graph> {
    let pairs = n * (n - 1) / 2;
    let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
    (proptest::collection::vec(any::<bool>(), pairs), perm).prop_map(move |(present, perm)| {
        // orient along index order so the result is acyclic, then relabel
        let mut g = Graph::with_nodes(n);
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                if present[k] {
                    g.add_directed(a, b).unwrap();
                }
                k += 1;
            }
        }
        g.permuted(&perm)
    })
}

proptest! {
    #[test]
    fn dsep_matches_path_enumeration(g in random_dag_strategy(5), zmask in 0u32..32) {
        for x in 0..5 {
            for y in x + 1..5 {
                let z: Vec<usize> = (0..5).filter(|&v| v != x && v != y && zmask & (1 << v) != 0).collect();
                prop_assert_eq!(
                    d_separated(&g, x, y, &z).unwrap(),
                    dsep_by_paths(&g, x, y, &z),
                    "x={} y={} z={:?}\n{}", x, y, &z, emit_graph(&g)
                );
            }
        }
    }

    #[test]
    fn meek_closure_is_idempotent(g in random_dag_strategy(6)) {
        let mut pattern = g.skeleton();
        for (a, c, b) in unshielded_colliders(&g) {
            pattern.add_directed(a, c).unwrap();
            pattern.add_directed(b, c).unwrap();
        }
        let once = apply_meek_rules(&pattern, &Knowledge::empty()).unwrap();
        let twice = apply_meek_rules(&once, &Knowledge::empty()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn graph_text_round_trips(g in random_dag_strategy(6), undirected in proptest::collection::vec(any::<bool>(), 15)) {
        let mut g = g;
        for (e, flip) in g.edges().into_iter().zip(undirected) {
            if flip {
                g.add_undirected(e.a, e.b).unwrap();
            }
        }
        prop_assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }
}

/// Markov equivalence classes by brute force: DAGs sharing a skeleton and
/// unshielded colliders. The CPDAG directs exactly the edges every member
/// orients the same way.
fn brute_force_cpdags(dags: &[Graph]) -> Vec<Graph> {
    let key = |g: &Graph| {
        let skel: BTreeSet<(usize, usize)> = g.edges().iter().map(|e| (e.a, e.b)).collect();
        (skel, unshielded_colliders(g))
    };
    let mut classes: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, g) in dags.iter().enumerate() {
        classes.entry(key(g)).or_default().push(i);
    }
    let mut out = vec![None; dags.len()];
    for members in classes.values() {
        let first = &dags[members[0]];
        let mut cpdag = first.clone();
        for e in first.edges() {
            let agree = members.iter().all(|&m| dags[m].edge(e.a, e.b) == first.edge(e.a, e.b));
            if !agree {
                cpdag.add_undirected(e.a, e.b).unwrap();
            }
        }
        for &m in members {
            out[m] = Some(cpdag.clone());
        }
    }
    out.into_iter().map(Option::unwrap).collect()
}

#[test]
fn there_are_543_dags_on_four_nodes() {
    assert_eq!(all_dags(4).len(), 543);
    assert_eq!(all_dags(3).len(), 25);
}

fn check_cpdags(n: usize) {
    let dags = all_dags(n);
    let truth = brute_force_cpdags(&dags);
    for (g, want) in dags.iter().zip(&truth) {
        assert_eq!(&dag_to_cpdag(g).unwrap(), want, "\n{}", emit_graph(g));

        // same class via colliders + Meek closure
        let mut pattern = g.skeleton();
        for (a, c, b) in unshielded_colliders(g) {
            pattern.add_directed(a, c).unwrap();
            pattern.add_directed(b, c).unwrap();
        }
        assert_eq!(&apply_meek_rules(&pattern, &Knowledge::empty()).unwrap(), want);
    }
}

#[test]
fn cpdag_matches_brute_force_on_all_four_node_dags() {
    check_cpdags(4);
}

#[test]
fn cpdag_matches_brute_force_on_all_five_node_dags() {
    check_cpdags(5);
}

#[test]
fn cpdag_of_classic_examples() {
    // chain and fork share a class; the collider does not
    let chain = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)])).unwrap();
    let fork = dag_to_cpdag(&dag(3, &[(1, 0), (1, 2)])).unwrap();
    assert_eq!(chain, fork);
    let collider = dag(3, &[(0, 1), (2, 1)]);
    assert_eq!(dag_to_cpdag(&collider).unwrap(), collider);
}
