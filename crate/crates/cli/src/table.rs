//! Numeric tables written as CSV or JSON.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::config::Format;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Int(n) => n.to_string(),
            // 17 significant digits round-trip every double.
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Int(n) => json!(n),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `stamp` becomes a leading `# generated ...` line (CSV) or a
    /// `generated` field (JSON).
    pub fn write(&self, w: &mut impl Write, format: Format, stamp: Option<&str>) -> io::Result<()> {
        match format {
            Format::Csv => {
                if let Some(s) = stamp {
                    writeln!(w, "# generated {s}")?;
                }
                writeln!(w, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let mut doc = json!({ "columns": self.columns, "rows": rows });
                if let Some(s) = stamp {
                    doc["generated"] = json!(s);
                }
                serde_json::to_writer(&mut *w, &doc)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_exact_and_lf_terminated() {
        let mut t = Table::new(&["n", "x", "e"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.1), Cell::Empty]);
        let mut out = Vec::new();
        t.write(&mut out, Format::Csv, None).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, "n,x,e\n1,1.0000000000000001e-1,\n");
        let x: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(x, 0.1);
    }

    #[test]
    fn json_has_columns_and_rows() {
        let mut t = Table::new(&["a"]);
        t.push(vec![Cell::Num(2.5)]);
        let mut out = Vec::new();
        t.write(&mut out, Format::Json, Some("now")).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["rows"][0][0], 2.5);
        assert_eq!(v["generated"], "now");
    }
}
