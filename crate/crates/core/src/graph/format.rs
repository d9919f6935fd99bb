//! Plain-text graph files.
//!
//! ```text
//! Nodes: X,Y,Z
//! X --> Y
//! Y --- Z
//! ```

use super::{Edge, Graph, Mark};
use crate::error::{Error, Result};

/// Writes the canonical text form: node line, then edges sorted by node index.
pub fn emit_graph(g: &Graph) -> String {
    let mut out = format!("Nodes: {}\n", g.names().join(","));
    for e in g.edges() {
        match (e.mark_a, e.mark_b) {
            (Mark::Tail, Mark::Tail) => {
                out.push_str(&format!("{} --- {}\n", g.name(e.a), g.name(e.b)))
            }
            (Mark::Tail, Mark::Arrow) => {
                out.push_str(&format!("{} --> {}\n", g.name(e.a), g.name(e.b)))
            }
            (Mark::Arrow, Mark::Tail) => {
                out.push_str(&format!("{} --> {}\n", g.name(e.b), g.name(e.a)))
            }
            (Mark::Arrow, Mark::Arrow) => unreachable!("bidirected edges are never stored"),
        }
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty graph file".into(),
    })?;
    let nodes = header.strip_prefix("Nodes:").ok_or(Error::Parse {
        line: first,
        msg: "expected `Nodes:` line".into(),
    })?;
    let names: Vec<&str> = nodes
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let mut g = Graph::new(names).map_err(|e| Error::Parse {
        line: first,
        msg: e.to_string(),
    })?;

    for (line, l) in lines {
        let (lhs, rhs, directed) = if let Some((a, b)) = l.split_once(" --> ") {
            (a, b, true)
        } else if let Some((a, b)) = l.split_once(" --- ") {
            (a, b, false)
        } else {
            return Err(Error::Parse {
                line,
                msg: format!("unrecognized edge `{l}`"),
            });
        };
        let lookup = |n: &str| {
            g.index_of(n.trim()).ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown node `{}`", n.trim()),
            })
        };
        let (a, b) = (lookup(lhs)?, lookup(rhs)?);
        if g.adjacent(a, b) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate edge between `{}` and `{}`", g.name(a), g.name(b)),
            });
        }
        let e = if directed {
            Edge::directed(a, b)
        } else {
            Edge::undirected(a, b)
        };
        g.set_edge(e).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(g)
}
