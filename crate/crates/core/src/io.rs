//! CSV datasets, knowledge files and graph files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{Column, DataTable};
use crate::error::{Error, Result};
use crate::graph::{emit_graph, parse_graph, Graph, Knowledge};

/// Integer columns with at most this many distinct values load as categorical.
pub const MAX_CATEGORICAL_LEVELS: usize = 5;

const MISSING: [&str; 4] = ["", "NA", "NaN", "?"];

pub fn load_csv(path: impl AsRef<Path>) -> Result<DataTable> {
    read_csv(fs::File::open(path)?)
}

/// Reads a comma-separated table with a header row.
///
/// Columns holding only integers with at most [`MAX_CATEGORICAL_LEVELS`]
/// distinct values become categorical, codes assigned in ascending order of
/// value. Everything else numeric is continuous.
pub fn read_csv<R: Read>(reader: R) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header row".into(),
        });
    }
    let width = headers.len();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); width];
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = i + 2;
        if record.len() != width {
            return Err(Error::RaggedRows {
                row: line,
                found: record.len(),
                expected: width,
            });
        }
        for (c, field) in record.iter().enumerate() {
            if MISSING.contains(&field) {
                return Err(Error::MissingValues {
                    column: headers[c].clone(),
                    row: line,
                });
            }
            cells[c].push(field.to_string());
        }
    }

    let mut columns = Vec::with_capacity(width);
    for (name, raw) in headers.into_iter().zip(cells) {
        let column = infer_column(&raw).map_err(|(row, value)| Error::Parse {
            line: row + 2,
            msg: format!("column `{name}`: `{value}` is not a number"),
        })?;
        columns.push((name, column));
    }
    DataTable::new(columns)
}

fn infer_column(raw: &[String]) -> std::result::Result<Column, (usize, String)> {
    let ints: Option<Vec<i64>> = raw.iter().map(|s| s.parse::<i64>().ok()).collect();
    if let Some(ints) = ints {
        let levels: BTreeSet<i64> = ints.iter().copied().collect();
        if levels.len() >= 2 && levels.len() <= MAX_CATEGORICAL_LEVELS {
            let code: BTreeMap<i64, u32> = levels.iter().zip(0..).map(|(&l, c)| (l, c)).collect();
            return Ok(Column::Categorical {
                codes: ints.iter().map(|v| code[v]).collect(),
                categories: levels.len(),
            });
        }
    }
    raw.iter()
        .enumerate()
        .map(|(row, s)| s.parse::<f64>().map_err(|_| (row, s.clone())))
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map(Column::Continuous)
}

pub fn write_csv(table: &DataTable, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write_csv_to(table, std::io::BufWriter::new(file))
}

/// Writes categorical columns as integer codes and continuous columns with
/// 17 significant digits.
pub fn write_csv_to<W: Write>(table: &DataTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(table.names())?;
    for row in 0..table.num_rows() {
        let record = (0..table.num_columns()).map(|c| match table.column(c) {
            Column::Continuous(v) => format!("{:.16e}", v[row]),
            Column::Categorical { codes, .. } => codes[row].to_string(),
        });
        w.write_record(record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_knowledge(path: impl AsRef<Path>, names: &[String]) -> Result<Knowledge> {
    parse_knowledge(&fs::read_to_string(path)?, names)
}

/// Parses a knowledge file.
///
/// ```text
/// # comment
/// 1 Region Day Month
/// 2 RH Rain Temperature Ws
/// forbid Temperature Rain
/// require FWI Fire
/// ```
///
/// A line starting with a number lists the variables of that tier; tiers are
/// ordered by number. `forbid A B` rules out `A --> B`, `require A B` demands it.
pub fn parse_knowledge(text: &str, names: &[String]) -> Result<Knowledge> {
    let lookup = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };
    let mut tiers: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut forbidden = Vec::new();
    let mut required = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        let parse_err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        match head.to_ascii_lowercase().as_str() {
            kw @ ("forbid" | "require") => {
                let [a, b] = rest[..] else {
                    return Err(parse_err("expected two variable names"));
                };
                let pair = (lookup(a)?, lookup(b)?);
                if kw == "forbid" {
                    forbidden.push(pair);
                } else {
                    required.push(pair);
                }
            }
            _ => {
                let tier: i64 = head
                    .parse()
                    .map_err(|_| parse_err("expected a tier number, `forbid` or `require`"))?;
                let members = tiers.entry(tier).or_default();
                for name in rest {
                    members.push(lookup(name)?);
                }
            }
        }
    }
    Knowledge::new(tiers.into_values().collect(), forbidden, required, names)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, emit_graph(g))?;
    Ok(())
}
