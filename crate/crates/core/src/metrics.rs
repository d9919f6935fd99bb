//! Structural comparison of an estimated graph against the truth.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Mark};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ap: Option<f64>,
    pub ar: Option<f64>,
    pub ahp: Option<f64>,
    pub ahr: Option<f64>,
    pub ahpc: Option<f64>,
    pub ahrc: Option<f64>,
    pub f1adj: Option<f64>,
    pub f1all: Option<f64>,
    pub shd: usize,
    /// Wall-clock seconds of the search that produced the estimate.
    pub elapsed: f64,
}

pub const TABLE_COLUMNS: [&str; 10] = [
    "AP", "AR", "AHP", "AHR", "AHPC", "AHRC", "F1Adj", "F1All", "SHD", "E",
];

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Harmonic mean of the defined values; `None` if none are defined. A zero
/// member makes the mean zero.
pub fn harmonic_mean(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        return None;
    }
    if defined.contains(&0.0) {
        return Some(0.0);
    }
    Some(defined.len() as f64 / defined.iter().map(|v| 1.0 / v).sum::<f64>())
}

fn aligned(estimated: &Graph, truth: &Graph) -> Result<Graph> {
    if estimated.num_nodes() != truth.num_nodes() {
        return Err(Error::VariableMismatch);
    }
    if estimated.names() == truth.names() {
        Ok(truth.clone())
    } else {
        truth.reindexed(estimated.names())
    }
}

fn arrow_at(g: &Graph, from: usize, at: usize) -> bool {
    g.edge(from, at).is_some_and(|e| e.mark_b == Mark::Arrow)
}

/// Adjacency, arrowhead and SHD metrics of `estimated` against `truth`.
///
/// Arrowhead counts run over endpoints: an estimated arrowhead is a true
/// positive iff the truth has an arrowhead at the same endpoint. The `c`
/// variants only count pairs adjacent in both graphs. Zero-denominator
/// metrics are `None` and left out of the F1 aggregates. `elapsed` is zero.
pub fn compare_graphs(estimated: &Graph, truth: &Graph) -> Result<MetricsReport> {
    let truth = aligned(estimated, truth)?;
    let v = estimated.num_nodes();
    let (mut adj_tp, mut adj_est, mut adj_true) = (0, 0, 0);
    let (mut ah_tp, mut ah_est, mut ah_true) = (0, 0, 0);
    let (mut ahc_tp, mut ahc_est, mut ahc_true) = (0, 0, 0);

    for a in 0..v {
        for b in a + 1..v {
            let in_est = estimated.adjacent(a, b);
            let in_true = truth.adjacent(a, b);
            adj_est += in_est as usize;
            adj_true += in_true as usize;
            adj_tp += (in_est && in_true) as usize;
            for (from, at) in [(a, b), (b, a)] {
                let e = arrow_at(estimated, from, at);
                let t = arrow_at(&truth, from, at);
                ah_est += e as usize;
                ah_true += t as usize;
                ah_tp += (e && t) as usize;
                if in_est && in_true {
                    ahc_est += e as usize;
                    ahc_true += t as usize;
                    ahc_tp += (e && t) as usize;
                }
            }
        }
    }

    let ap = ratio(adj_tp, adj_est);
    let ar = ratio(adj_tp, adj_true);
    let ahp = ratio(ah_tp, ah_est);
    let ahr = ratio(ah_tp, ah_true);
    let f1adj = match (ap, ar) {
        (Some(_), Some(_)) => harmonic_mean(&[ap, ar]),
        _ => None,
    };
    Ok(MetricsReport {
        ap,
        ar,
        ahp,
        ahr,
        ahpc: ratio(ahc_tp, ahc_est),
        ahrc: ratio(ahc_tp, ahc_true),
        f1adj,
        f1all: harmonic_mean(&[ap, ar, ahp, ahr]),
        shd: shd_aligned(estimated, &truth),
        elapsed: 0.0,
    })
}

#[derive(PartialEq)]
enum Status {
    Absent,
    Undirected,
    Forward,
    Backward,
}

fn status(g: &Graph, a: usize, b: usize) -> Status {
    match g.edge(a, b) {
        None => Status::Absent,
        Some(e) => match (e.mark_a, e.mark_b) {
            (Mark::Tail, Mark::Arrow) => Status::Forward,
            (Mark::Arrow, Mark::Tail) => Status::Backward,
            _ => Status::Undirected,
        },
    }
}

fn shd_aligned(estimated: &Graph, truth: &Graph) -> usize {
    let v = estimated.num_nodes();
    (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .filter(|&(a, b)| status(estimated, a, b) != status(truth, a, b))
        .count()
}

/// Number of node pairs whose edge status (absent, undirected, or either
/// direction) differs between the two graphs.
pub fn shd(estimated: &Graph, truth: &Graph) -> Result<usize> {
    let truth = aligned(estimated, truth)?;
    Ok(shd_aligned(estimated, &truth))
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "—".to_string(), |x| format!("{x:.3}"))
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }

    pub fn table_header() -> String {
        TABLE_COLUMNS.iter().map(|c| format!("{c:>7}")).collect::<Vec<_>>().join(" ")
    }

    pub fn table_row(&self) -> String {
        let mut cells: Vec<String> = [
            self.ap, self.ar, self.ahp, self.ahr, self.ahpc, self.ahrc, self.f1adj, self.f1all,
        ]
        .into_iter()
        .map(cell)
        .collect();
        cells.push(self.shd.to_string());
        cells.push(format!("{:.2}", self.elapsed));
        // width counted in chars so the dash marker lines up
        cells
            .iter()
            .map(|c| format!("{}{c}", " ".repeat(7usize.saturating_sub(c.chars().count()))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::table_header())?;
        write!(f, "{}", self.table_row())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(names: &[&str], edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(names.iter().copied()).unwrap();
        for &(a, b) in edges {
            g.add_directed(a, b).unwrap();
        }
        g
    }

    #[test]
    fn identical_graphs() {
        let mut g = graph(&["A", "B", "C"], &[(0, 1)]);
        g.add_undirected(1, 2).unwrap();
        let m = compare_graphs(&g, &g).unwrap();
        for v in [m.ap, m.ar, m.ahp, m.ahr, m.ahpc, m.ahrc, m.f1adj, m.f1all] {
            assert_eq!(v, Some(1.0));
        }
        assert_eq!(m.shd, 0);
    }

    #[test]
    fn empty_estimate() {
        let truth = graph(&["A", "B"], &[(0, 1)]);
        let est = graph(&["A", "B"], &[]);
        let m = compare_graphs(&est, &truth).unwrap();
        assert_eq!(m.ap, None);
        assert_eq!(m.ar, Some(0.0));
        assert_eq!(m.ahr, Some(0.0));
        assert_eq!(m.f1adj, None);
        assert_eq!(m.f1all, Some(0.0));
    }

    #[test]
    fn hand_fixture() {
        // truth A->B->C->D; estimate keeps A->B, reverses B-C, drops C-D, adds A->D
        let names = ["A", "B", "C", "D"];
        let truth = graph(&names, &[(0, 1), (1, 2), (2, 3)]);
        let est = graph(&names, &[(0, 1), (2, 1), (0, 3)]);
        let m = compare_graphs(&est, &truth).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(m.ap, Some(2.0 / 3.0));
        assert_eq!(m.ar, Some(2.0 / 3.0));
        assert_eq!(m.ahp, Some(third));
        assert_eq!(m.ahr, Some(third));
        assert_eq!(m.ahpc, Some(0.5));
        assert_eq!(m.ahrc, Some(0.5));
        assert_eq!(m.shd, 3);
    }

    #[test]
    fn shd_counts_each_pair_once() {
        let names = ["A", "B", "C", "D"];
        let truth = graph(&names, &[(0, 1), (1, 2)]);
        // two additions (A-C, B-D), one deletion (A-B), one reversal (C->B)
        let est = graph(&names, &[(0, 2), (1, 3), (2, 1)]);
        assert_eq!(shd(&est, &truth).unwrap(), 4);
        let mut rev = truth.clone();
        rev.add_directed(1, 0).unwrap();
        assert_eq!(shd(&rev, &truth).unwrap(), 1);
    }

    #[test]
    fn truth_in_other_order() {
        let truth = graph(&["B", "A"], &[(1, 0)]);
        let est = graph(&["A", "B"], &[(0, 1)]);
        assert_eq!(compare_graphs(&est, &truth).unwrap().shd, 0);
        let other = graph(&["A", "X"], &[]);
        assert!(matches!(compare_graphs(&est, &other), Err(Error::VariableMismatch)));
    }

    #[test]
    fn json_uses_null_for_undefined() {
        let m = MetricsReport {
            ap: None,
            ar: Some(0.5),
            ..Default::default()
        };
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert!(v["ap"].is_null());
        assert_eq!(v["ar"], 0.5);
        assert!(m.table_row().contains('—'));
        assert_eq!(
            MetricsReport::table_header().chars().count(),
            m.table_row().chars().count()
        );
    }
}
