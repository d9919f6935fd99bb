//! Python bindings: datasets, graphs, simulation, both searches, the score,
//! the test, and metrics.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use basisfn::citest::{self, TestConfig};
use basisfn::data::{prepare, BasisSpec, Column, DataTable};
use basisfn::graph::{self, Knowledge, Mark};
use basisfn::io;
use basisfn::run::{evaluate, search_table, SearchParams};
use basisfn::score::{self, ScoreConfig};
use basisfn::sim::{self, SimSpec};

fn err(e: basisfn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A table of named continuous and categorical columns.
#[pyclass(name = "Dataset", module = "basisfn", from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: DataTable,
}

#[pymethods]
impl PyDataset {
    /// `continuous` maps names to float lists, `categorical` maps names to
    /// integer codes `0..c`. Columns keep insertion order, continuous first.
    #[new]
    #[pyo3(signature = (continuous = None, categorical = None))]
    fn new(
        continuous: Option<Vec<(String, Vec<f64>)>>,
        categorical: Option<Vec<(String, Vec<u32>)>>,
    ) -> PyResult<Self> {
        let mut cols: Vec<(String, Column)> = Vec::new();
        for (name, v) in continuous.unwrap_or_default() {
            cols.push((name, Column::Continuous(v)));
        }
        for (name, codes) in categorical.unwrap_or_default() {
            let categories = codes.iter().max().map_or(0, |&m| m as usize + 1);
            cols.push((name, Column::Categorical { codes, categories }));
        }
        Ok(PyDataset {
            inner: DataTable::new(cols).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        Ok(PyDataset {
            inner: io::load_csv(path).map_err(err)?,
        })
    }

    fn to_csv(&self, path: &str) -> PyResult<()> {
        io::write_csv(&self.inner, path).map_err(err)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names()
    }

    #[getter]
    fn num_rows(&self) -> usize {
        self.inner.num_rows()
    }

    /// Column values as floats (categorical codes included).
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        let i = self
            .inner
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name}")))?;
        let col = self.inner.column(i);
        Ok((0..col.len()).map(|r| col.value(r)).collect())
    }

    fn is_categorical(&self, name: &str) -> PyResult<bool> {
        let i = self
            .inner
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name}")))?;
        Ok(matches!(self.inner.column(i), Column::Categorical { .. }))
    }

    fn __len__(&self) -> usize {
        self.inner.num_rows()
    }

    fn __repr__(&self) -> String {
        format!("Dataset({} rows, {:?})", self.inner.num_rows(), self.inner.names())
    }
}

/// A DAG, CPDAG or skeleton over named nodes.
#[pyclass(name = "Graph", module = "basisfn", eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(names: Vec<String>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::Graph::new(names).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::parse_graph(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        graph::emit_graph(&self.inner)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn add_directed(&mut self, from: &str, to: &str) -> PyResult<()> {
        let (a, b) = (self.index(from)?, self.index(to)?);
        self.inner.add_directed(a, b).map_err(err)
    }

    fn add_undirected(&mut self, a: &str, b: &str) -> PyResult<()> {
        let (a, b) = (self.index(a)?, self.index(b)?);
        self.inner.add_undirected(a, b).map_err(err)
    }

    /// Edges as `(a, b, kind)` with kind `"-->"` (a to b) or `"---"`.
    fn edges(&self) -> Vec<(String, String, &'static str)> {
        let g = &self.inner;
        g.edges()
            .iter()
            .map(|e| match e.endpoints_directed() {
                Some((f, t)) => (g.name(f).to_string(), g.name(t).to_string(), "-->"),
                None if e.mark_a == Mark::Tail => (g.name(e.a).to_string(), g.name(e.b).to_string(), "---"),
                None => (g.name(e.a).to_string(), g.name(e.b).to_string(), "<->"),
            })
            .collect()
    }

    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn is_dag(&self) -> bool {
        self.inner.is_dag()
    }

    /// The CPDAG of this DAG.
    fn cpdag(&self) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: graph::dag_to_cpdag(&self.inner).map_err(err)?,
        })
    }

    fn d_separated(&self, x: &str, y: &str, z: Vec<String>) -> PyResult<bool> {
        let z: Vec<usize> = z.iter().map(|v| self.index(v)).collect::<PyResult<_>>()?;
        graph::d_separated(&self.inner, self.index(x)?, self.index(y)?, &z).map_err(err)
    }

    fn __str__(&self) -> String {
        self.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Graph({} nodes, {} edges)", self.inner.num_nodes(), self.inner.num_edges())
    }
}

impl PyGraph {
    fn index(&self, name: &str) -> PyResult<usize> {
        self.inner
            .index_of(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name}")))
    }
}

fn knowledge_for(data: &DataTable, text: Option<&str>) -> PyResult<Knowledge> {
    match text {
        Some(t) => io::parse_knowledge(t, &data.names()).map_err(err),
        None => Ok(Knowledge::empty()),
    }
}

fn var_index(data: &DataTable, name: &str) -> PyResult<usize> {
    data.names()
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name}")))
}

/// Legendre polynomial `P_n(x)`.
#[pyfunction]
fn legendre_eval(n: i64, x: f64) -> PyResult<f64> {
    basisfn::data::legendre_eval(n, x).map_err(err)
}

/// `P(χ²_dof > x)`.
#[pyfunction]
fn chi_square_survival(x: f64, dof: i64) -> PyResult<f64> {
    citest::chi_square_survival(x, dof).map_err(err)
}

/// Simulates data and returns `(dataset, true_dag)`.
#[pyfunction]
#[pyo3(signature = (nodes, edges, samples, kind = "continuous", mprob = 0.5, pnl = None, seed = 0, shuffle = true))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    nodes: usize,
    edges: usize,
    samples: usize,
    kind: &str,
    mprob: f64,
    pnl: Option<&str>,
    seed: u64,
    shuffle: bool,
) -> PyResult<(PyDataset, PyGraph)> {
    let spec = SimSpec {
        nodes,
        edges,
        samples,
        kind: kind.parse().map_err(err)?,
        mprob,
        pnl: pnl.map(str::parse).transpose().map_err(err)?,
        seed,
        shuffle_columns: shuffle,
    };
    let (table, dag) = sim::simulate(&spec).map_err(err)?;
    Ok((PyDataset { inner: table }, PyGraph { inner: dag }))
}

/// BOSS with the basis-function BIC; returns the estimated CPDAG.
#[pyfunction]
#[pyo3(signature = (data, truncation = 3, penalty = 1.0, seed = 0, knowledge = None, timeout = None))]
fn boss(
    data: &PyDataset,
    truncation: usize,
    penalty: f64,
    seed: u64,
    knowledge: Option<&str>,
    timeout: Option<f64>,
) -> PyResult<PyGraph> {
    let params = SearchParams {
        seed,
        timeout,
        ..SearchParams::boss(truncation, penalty)
    };
    let k = knowledge_for(&data.inner, knowledge)?;
    let out = search_table(&data.inner, &k, &params).map_err(err)?;
    Ok(PyGraph { inner: out.graph })
}

/// PC-Max with the basis-function likelihood-ratio test; returns the CPDAG.
#[pyfunction]
#[pyo3(signature = (data, truncation = 3, alpha = 0.01, max_depth = 3, knowledge = None, timeout = None))]
fn pcmax(
    data: &PyDataset,
    truncation: usize,
    alpha: f64,
    max_depth: usize,
    knowledge: Option<&str>,
    timeout: Option<f64>,
) -> PyResult<PyGraph> {
    let params = SearchParams {
        max_depth,
        timeout,
        ..SearchParams::pcmax(truncation, alpha)
    };
    let k = knowledge_for(&data.inner, knowledge)?;
    let out = search_table(&data.inner, &k, &params).map_err(err)?;
    Ok(PyGraph { inner: out.graph })
}

/// Local BF-BIC of `child` given `parents`.
#[pyfunction]
#[pyo3(signature = (data, child, parents, truncation = 3, penalty = 1.0))]
fn local_score(data: &PyDataset, child: &str, parents: Vec<String>, truncation: usize, penalty: f64) -> PyResult<f64> {
    let cfg = ScoreConfig::new(penalty, truncation).map_err(err)?;
    let e = prepare(&data.inner, cfg.basis).map_err(err)?;
    let parents: Vec<usize> = parents.iter().map(|p| var_index(&data.inner, p)).collect::<PyResult<_>>()?;
    score::local_bf_bic(var_index(&data.inner, child)?, &parents, &e, &cfg).map_err(err)
}

/// BF-LRT of `x ⟂ y | z`; returns `(statistic, dof, p_value)`.
#[pyfunction]
#[pyo3(signature = (data, x, y, z = Vec::new(), truncation = 3))]
fn bf_lrt(data: &PyDataset, x: &str, y: &str, z: Vec<String>, truncation: usize) -> PyResult<(f64, usize, f64)> {
    let cfg = TestConfig::new(0.05, truncation).map_err(err)?;
    let e = prepare(&data.inner, BasisSpec::new(truncation).map_err(err)?).map_err(err)?;
    let z: Vec<usize> = z.iter().map(|v| var_index(&data.inner, v)).collect::<PyResult<_>>()?;
    let r = citest::bf_lrt(var_index(&data.inner, x)?, var_index(&data.inner, y)?, &z, &e, &cfg).map_err(err)?;
    Ok((r.statistic, r.dof, r.p_value))
}

/// Metrics of an estimated CPDAG against a true DAG or CPDAG. Undefined
/// ratios are `None`.
#[pyfunction]
fn compare(estimated: &PyGraph, truth: &PyGraph) -> PyResult<HashMap<String, Option<f64>>> {
    let m = evaluate(&estimated.inner, &truth.inner, 0.0).map_err(err)?;
    Ok([
        ("ap", m.ap),
        ("ar", m.ar),
        ("ahp", m.ahp),
        ("ahr", m.ahr),
        ("ahpc", m.ahpc),
        ("ahrc", m.ahrc),
        ("f1adj", m.f1adj),
        ("f1all", m.f1all),
        ("shd", Some(m.shd as f64)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect())
}

/// Causal discovery with basis-function scores and tests.
#[pymodule(name = "basisfn")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(legendre_eval, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square_survival, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(boss, m)?)?;
    m.add_function(wrap_pyfunction!(pcmax, m)?)?;
    m.add_function(wrap_pyfunction!(local_score, m)?)?;
    m.add_function(wrap_pyfunction!(bf_lrt, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
