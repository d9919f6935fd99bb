use std::ops::Range;

use nalgebra::DMatrix;

use super::legendre::legendre_terms;
use super::table::{Column, DataTable, VarKind};
use crate::error::{Error, Result};

/// Number of Legendre terms kept per continuous variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisSpec {
    truncation: usize,
}

impl BasisSpec {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Config("truncation limit must be at least 1".into()));
        }
        Ok(BasisSpec { truncation })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }
}

/// Per-variable blocks of basis or indicator columns, with their joint
/// covariance (denominator `N`) and column means.
#[derive(Clone, Debug)]
pub struct EmbeddedData {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    blocks: Vec<Range<usize>>,
    matrix: DMatrix<f64>,
    covariance: DMatrix<f64>,
    means: Vec<f64>,
}

impl EmbeddedData {
    pub fn num_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_variables(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_columns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    /// Column range of variable `v` in the design matrix.
    pub fn block(&self, v: usize) -> Range<usize> {
        self.blocks[v].clone()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Block columns of several variables, concatenated in the given order.
    pub fn columns_of(&self, vars: &[usize]) -> Vec<usize> {
        vars.iter().flat_map(|&v| self.block(v)).collect()
    }
}

/// Expands a scaled table: `P_1..P_p` per continuous variable, and one
/// indicator per observed category except the highest observed code for each
/// categorical variable.
pub fn embed_dataset(table: &DataTable, spec: BasisSpec) -> Result<EmbeddedData> {
    let n = table.num_rows();
    let p = spec.truncation();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut blocks = Vec::with_capacity(table.num_columns());
    let mut kinds = Vec::with_capacity(table.num_columns());

    for (var, col) in table.variables().iter().zip((0..).map(|i| table.column(i))) {
        let start = cols.len();
        match col {
            Column::Continuous(values) => {
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                if hi <= lo {
                    return Err(Error::ConstantColumn(var.name.clone()));
                }
                let mut block = vec![vec![0.0; n]; p];
                let mut buf = vec![0.0; p];
                for (r, &x) in values.iter().enumerate() {
                    legendre_terms(x, &mut buf);
                    for (j, &v) in buf.iter().enumerate() {
                        block[j][r] = v;
                    }
                }
                cols.extend(block);
            }
            Column::Categorical { codes, categories } => {
                let mut seen = vec![false; *categories];
                for &c in codes {
                    seen[c as usize] = true;
                }
                let observed: Vec<u32> = (0..*categories as u32).filter(|&c| seen[c as usize]).collect();
                if observed.len() < 2 {
                    return Err(Error::DegenerateCategory(var.name.clone()));
                }
                for &cat in &observed[..observed.len() - 1] {
                    cols.push(codes.iter().map(|&c| f64::from(u8::from(c == cat))).collect());
                }
            }
        }
        blocks.push(start..cols.len());
        kinds.push(var.kind);
    }

    let m = cols.len();
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .zip(&means)
        .map(|(c, &mu)| c.iter().map(|x| x - mu).collect())
        .collect();
    let mut covariance = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let s: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let c = s / n as f64;
            covariance[(i, j)] = c;
            covariance[(j, i)] = c;
        }
    }
    let matrix = DMatrix::from_fn(n, m, |r, c| cols[c][r]);

    Ok(EmbeddedData {
        names: table.names(),
        kinds,
        blocks,
        matrix,
        covariance,
        means,
    })
}

/// Scales then embeds.
pub fn prepare(table: &DataTable, spec: BasisSpec) -> Result<EmbeddedData> {
    embed_dataset(&table.scale_columns()?, spec)
}
