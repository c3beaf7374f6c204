//! Tabular output with a metadata header, rendered as CSV or JSON.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

/// Floats are written with nine significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(u64),
    /// Absent value: below cutoff or undefined.
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) if x.is_finite() => fmt_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Num(_) | Cell::Missing => "NA".to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num(x) if x.is_finite() => {
                let rounded: f64 = fmt_float(*x).parse().expect("formatted float parses");
                json!(rounded)
            }
            Cell::Int(n) => json!(n),
            Cell::Num(_) | Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn meta_float(&mut self, key: impl Into<String>, value: f64) {
        self.meta(key, fmt_float(value));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut meta = Map::new();
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "metadata": meta, "columns": self.columns, "rows": rows })
    }

    pub fn write_json(&self, w: &mut dyn Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, &self.to_json())?;
        writeln!(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::default();
        t.meta("tool", "chiralforce");
        t.meta_float("gamma0_rad_s", 3.8107e7);
        t.columns = vec!["mode".into(), "r_nm".into(), "eta".into(), "n".into()];
        t.rows.push(vec![Cell::Text("HE11".into()), Cell::Num(355.0), Cell::Num(0.123456789012), Cell::Int(3)]);
        t.rows.push(vec![Cell::Text("TM01".into()), Cell::Num(355.0), Cell::Missing, Cell::Int(4)]);
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let want = "# tool = chiralforce\n# gamma0_rad_s = 3.81070000e7\nmode,r_nm,eta,n\n\
                    HE11,3.55000000e2,1.23456789e-1,3\nTM01,3.55000000e2,NA,4\n";
        assert_eq!(text, want);
    }

    #[test]
    fn json_carries_same_content() {
        let v = sample().to_json();
        assert_eq!(v["metadata"]["tool"], "chiralforce");
        assert_eq!(v["columns"][2], "eta");
        assert_eq!(v["rows"][0][2].as_f64().unwrap(), 0.123456789);
        assert!(v["rows"][1][2].is_null());
        assert_eq!(v["rows"][1][3], 4);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(-1.0 / 3.0), "-3.33333333e-1");
        assert_eq!(fmt_float(7.049e-22), "7.04900000e-22");
    }
}
