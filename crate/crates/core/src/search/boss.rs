//! Best-order score search.
//!
//! A permutation determines a DAG: each variable takes the parents chosen by
//! grow-shrink from its prefix. Each sweep moves every variable to the
//! insertion position with the highest total score; sweeps repeat until one
//! completes without a move.

use std::time::Instant;

use dashmap::DashMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{dag_to_cpdag, Graph, Knowledge};
use crate::score::LocalScore;

/// Grow-shrink parent selection for `v` among `prefix`.
///
/// Required parents present in the prefix are always kept; forbidden parents
/// are never added. Returns the parent set (sorted) and its local score.
pub fn best_parents_given_prefix<S: LocalScore + ?Sized>(
    v: usize,
    prefix: &[usize],
    score: &S,
    knowledge: &Knowledge,
) -> Result<(Vec<usize>, f64)> {
    if prefix.contains(&v) {
        return Err(Error::Config("a variable cannot appear in its own prefix".into()));
    }
    let mut parents: Vec<usize> = prefix
        .iter()
        .copied()
        .filter(|&w| knowledge.is_required(w, v))
        .collect();
    parents.sort_unstable();
    let mut current = score.local_score(v, &parents)?;

    // grow
    loop {
        let mut best: Option<(usize, f64)> = None;
        for &w in prefix {
            if parents.contains(&w) || knowledge.is_forbidden(w, v) {
                continue;
            }
            let mut trial = parents.clone();
            trial.push(w);
            let s = score.local_score(v, &trial)?;
            if s > best.map_or(current, |(_, b)| b) {
                best = Some((w, s));
            }
        }
        match best {
            Some((w, s)) => {
                parents.push(w);
                current = s;
            }
            None => break,
        }
    }

    // shrink
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, &w) in parents.iter().enumerate() {
            if knowledge.is_required(w, v) {
                continue;
            }
            let mut trial = parents.clone();
            trial.remove(i);
            let s = score.local_score(v, &trial)?;
            if s > best.map_or(current, |(_, b)| b) {
                best = Some((i, s));
            }
        }
        match best {
            Some((i, s)) => {
                parents.remove(i);
                current = s;
            }
            None => break,
        }
    }

    parents.sort_unstable();
    Ok((parents, current))
}

#[derive(Clone, Debug)]
pub struct BossOptions {
    pub seed: u64,
    pub deadline: Option<Instant>,
}

impl BossOptions {
    pub fn with_seed(seed: u64) -> Self {
        BossOptions { seed, deadline: None }
    }
}

#[derive(Clone, Debug)]
pub struct BossResult {
    pub cpdag: Graph,
    pub dag: Graph,
    pub order: Vec<usize>,
    pub score: f64,
    /// Total score after the initial order and after every committed move.
    pub trace: Vec<f64>,
}

type Memo = DashMap<(usize, Vec<u64>), (Vec<usize>, f64)>;

struct OrderScorer<'a, S: ?Sized> {
    score: &'a S,
    knowledge: &'a Knowledge,
    memo: Memo,
    words: usize,
}

impl<'a, S: LocalScore + ?Sized> OrderScorer<'a, S> {
    fn parents(&self, v: usize, prefix: &[usize]) -> Result<(Vec<usize>, f64)> {
        let mut key = vec![0u64; self.words];
        for &p in prefix {
            key[p / 64] |= 1 << (p % 64);
        }
        if let Some(hit) = self.memo.get(&(v, key.clone())) {
            return Ok(hit.clone());
        }
        let mut sorted = prefix.to_vec();
        sorted.sort_unstable();
        let out = best_parents_given_prefix(v, &sorted, self.score, self.knowledge)?;
        self.memo.insert((v, key), out.clone());
        Ok(out)
    }

    /// Total score of the DAG implied by `order`, summed in variable order so
    /// identical DAGs give bit-identical totals.
    fn total(&self, order: &[usize]) -> Result<f64> {
        let mut local = vec![0.0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            local[v] = self.parents(v, &order[..i])?.1;
        }
        Ok(local.iter().sum())
    }
}

fn strictly_better(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + 1e-10 * incumbent.abs().max(1.0)
}

/// Runs BOSS with the given local score and returns the CPDAG of the best DAG.
pub fn boss_search<S: LocalScore + ?Sized>(
    score: &S,
    names: &[String],
    knowledge: &Knowledge,
    opts: &BossOptions,
) -> Result<BossResult> {
    let v = score.num_variables();
    if names.len() != v {
        return Err(Error::VariableMismatch);
    }
    let scorer = OrderScorer {
        score,
        knowledge,
        memo: DashMap::new(),
        words: v.div_ceil(64).max(1),
    };

    // start from name order so the initial permutation ignores column order
    let mut order: Vec<usize> = (0..v).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
    let mut current = scorer.total(&order)?;
    let mut trace = vec![current];

    loop {
        let mut moved = false;
        for x in order.clone() {
            if let Some(deadline) = opts.deadline {
                if Instant::now() > deadline {
                    return Err(Error::TimeoutExceeded(0.0));
                }
            }
            let from = order.iter().position(|&u| u == x).expect("x is in the order");
            let mut rest = order.clone();
            rest.remove(from);
            let totals: Vec<Result<f64>> = (0..v)
                .into_par_iter()
                .map(|to| {
                    if to == from {
                        return Ok(current);
                    }
                    let mut cand = rest.clone();
                    cand.insert(to, x);
                    scorer.total(&cand)
                })
                .collect();
            let mut best = (from, current);
            for (to, t) in totals.into_iter().enumerate() {
                let t = t?;
                if strictly_better(t, best.1) {
                    best = (to, t);
                }
            }
            if best.0 != from {
                rest.insert(best.0, x);
                order = rest;
                current = best.1;
                trace.push(current);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    let mut dag = Graph::new(names.iter().cloned())?;
    for (i, &x) in order.iter().enumerate() {
        for p in scorer.parents(x, &order[..i])?.0 {
            dag.add_directed(p, x)?;
        }
    }
    let cpdag = dag_to_cpdag(&dag)?;
    Ok(BossResult {
        cpdag,
        dag,
        order,
        score: current,
        trace,
    })
}
