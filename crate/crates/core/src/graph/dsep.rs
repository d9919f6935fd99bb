use super::Graph;
use crate::error::{Error, Result};

/// Whether `x` and `y` are d-separated by `cond` in the DAG `g`.
///
/// Reachability over (node, direction) states: a trail may pass a non-collider
/// outside `cond`, and a collider that is in `cond` or has a descendant in it.
pub fn d_separated(g: &Graph, x: usize, y: usize, cond: &[usize]) -> Result<bool> {
    let v = g.num_nodes();
    for &n in [x, y].iter().chain(cond) {
        if n >= v {
            return Err(Error::UnknownVariable(format!("node index {n}")));
        }
    }
    if x == y || cond.contains(&x) || cond.contains(&y) {
        return Err(Error::Config(
            "d-separation query needs distinct x, y outside the conditioning set".into(),
        ));
    }

    let mut in_cond = vec![false; v];
    for &c in cond {
        in_cond[c] = true;
    }
    // cond together with all of its ancestors
    let mut anc = in_cond.clone();
    let mut stack: Vec<usize> = cond.to_vec();
    while let Some(n) = stack.pop() {
        for p in g.parents(n) {
            if !anc[p] {
                anc[p] = true;
                stack.push(p);
            }
        }
    }

    // state: (node, arrived_from_child)
    let mut seen = vec![[false; 2]; v];
    let mut queue = vec![(x, true)];
    while let Some((n, up)) = queue.pop() {
        let slot = usize::from(up);
        if seen[n][slot] {
            continue;
        }
        seen[n][slot] = true;
        if n == y {
            return Ok(false);
        }
        if up {
            if !in_cond[n] {
                queue.extend(g.parents(n).into_iter().map(|p| (p, true)));
                queue.extend(g.children(n).into_iter().map(|c| (c, false)));
            }
        } else {
            if !in_cond[n] {
                queue.extend(g.children(n).into_iter().map(|c| (c, false)));
            }
            if anc[n] {
                queue.extend(g.parents(n).into_iter().map(|p| (p, true)));
            }
        }
    }
    Ok(true)
}
