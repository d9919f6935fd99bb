use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Categorical(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: usize,
    pub name: String,
    pub kind: VarKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Continuous(Vec<f64>),
    /// Integer codes `0..categories`.
    Categorical { codes: Vec<u32>, categories: usize },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Continuous(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at `row` as a real number; categorical codes are returned as-is.
    pub fn value(&self, row: usize) -> f64 {
        match self {
            Column::Continuous(v) => v[row],
            Column::Categorical { codes, .. } => f64::from(codes[row]),
        }
    }

    fn kind(&self) -> VarKind {
        match self {
            Column::Continuous(_) => VarKind::Continuous,
            Column::Categorical { categories, .. } => VarKind::Categorical(*categories),
        }
    }
}

/// Immutable column store of mixed continuous and categorical observations.
#[derive(Clone, Debug, PartialEq)]
pub struct DataTable {
    variables: Vec<Variable>,
    columns: Vec<Column>,
    rows: usize,
}

impl DataTable {
    pub fn new(columns: Vec<(String, Column)>) -> Result<Self> {
        let rows = columns.first().map_or(0, |(_, c)| c.len());
        if rows == 0 {
            return Err(Error::Config("a data table needs at least one row and column".into()));
        }
        let mut variables = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        for (id, (name, col)) in columns.into_iter().enumerate() {
            if variables.iter().any(|v: &Variable| v.name == name) {
                return Err(Error::Config(format!("duplicate column name `{name}`")));
            }
            if col.len() != rows {
                return Err(Error::RaggedRows {
                    row: col.len().min(rows),
                    found: col.len(),
                    expected: rows,
                });
            }
            match &col {
                Column::Categorical { codes, categories } => {
                    if *categories < 2 {
                        return Err(Error::DegenerateCategory(name));
                    }
                    if codes.iter().any(|&c| c as usize >= *categories) {
                        return Err(Error::Config(format!(
                            "column `{name}` has a code outside 0..{categories}"
                        )));
                    }
                }
                Column::Continuous(v) => {
                    if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                        return Err(Error::MissingValues { column: name, row });
                    }
                }
            }
            variables.push(Variable {
                id,
                name,
                kind: col.kind(),
            });
            cols.push(col);
        }
        Ok(DataTable {
            variables,
            columns: cols,
            rows,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    /// Table whose column `perm[i]` is this table's column `i`.
    pub fn permute_columns(&self, perm: &[usize]) -> DataTable {
        assert_eq!(perm.len(), self.num_columns());
        let mut slots: Vec<Option<(String, Column)>> = vec![None; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            slots[p] = Some((self.variables[i].name.clone(), self.columns[i].clone()));
        }
        DataTable::new(slots.into_iter().map(|s| s.expect("perm is a permutation")).collect())
            .expect("permuting a valid table keeps it valid")
    }

    /// Maps every continuous column affinely onto `[-1, 1]` (min to -1, max to 1).
    pub fn scale_columns(&self) -> Result<DataTable> {
        let mut out = self.clone();
        for (var, col) in out.variables.iter().zip(out.columns.iter_mut()) {
            if let Column::Continuous(values) = col {
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                if hi <= lo {
                    return Err(Error::ConstantColumn(var.name.clone()));
                }
                if lo == -1.0 && hi == 1.0 {
                    continue;
                }
                let span = hi - lo;
                for x in values.iter_mut() {
                    *x = (2.0 * (*x - lo) / span - 1.0).clamp(-1.0, 1.0);
                }
            }
        }
        Ok(out)
    }
}
