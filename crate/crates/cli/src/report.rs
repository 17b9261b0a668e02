use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Identifier of the structured report layout; bumped on breaking changes.
pub const REPORT_SCHEMA: &str = "maglev-report/1";

/// A table cell. Non-finite numbers are stored as text so that the JSON
/// document never carries `null` in place of a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Number(v)
        } else {
            Cell::Text(v.to_string())
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Number(v as f64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-tripping text, in exponent form outside `[1e-3, 1e6)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaEntry {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    /// Also the stem of the CSV file.
    pub name: String,
    pub columns: Vec<String>,
    /// Written as `# key: value` lines ahead of the CSV header.
    #[serde(default)]
    pub meta: Vec<MetaEntry>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            meta: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Panics when the row width differs from the column count.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    /// Numbers use [`format_number`].
    pub fn meta_num(self, key: &str, value: f64) -> Self {
        self.meta(key, format_number(value))
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push(MetaEntry {
            key: key.into(),
            value: value.to_string(),
        });
        self
    }

    /// `quantity,value,units,formula anchor` layout shared by all budgets.
    pub fn quantities(name: &str) -> Self {
        Table::new(name, &["quantity", "value", "units", "formula anchor"])
    }

    pub fn quantity(&mut self, quantity: &str, value: f64, units: &str, anchor: &str) {
        self.push(vec![quantity.into(), value.into(), units.into(), anchor.into()]);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            let _ = writeln!(s, "# {}: {}", m.key, m.value);
        }
        let header: Vec<String> = self.columns.iter().map(|c| csv_field(c)).collect();
        let _ = writeln!(s, "{}", header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Number(v) => format_number(*v),
                    Cell::Text(t) => csv_field(t),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Value of a `quantity` row in a quantities table.
    pub fn get(&self, quantity: &str) -> Option<f64> {
        let q = self.column("quantity")?;
        let v = self.column("value")?;
        self.rows.iter().find_map(|r| match (&r[q], &r[v]) {
            (Cell::Text(name), Cell::Number(x)) if name == quantity => Some(*x),
            _ => None,
        })
    }
}

/// Structured output of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: String,
    /// SHA-256 of the scenario file bytes, when a scenario was read.
    pub scenario_sha256: Option<String>,
    pub seed: Option<u64>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema: REPORT_SCHEMA.into(),
            command: command.into(),
            scenario_sha256: None,
            seed: None,
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Every table in turn; with more than one, each is preceded by a
    /// `# table: name` line and separated by a blank line.
    pub fn to_csv(&self) -> String {
        if let [only] = self.tables.as_slice() {
            return only.to_csv();
        }
        let parts: Vec<String> = self
            .tables
            .iter()
            .map(|t| format!("# table: {}\n{}", t.name, t.to_csv()))
            .collect();
        parts.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_through_text() {
        for v in [0.0, 94.9, -3.5e-19, 1e6, 0.00099, 123456.789] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_number(4.875e-19), "4.875e-19");
        assert_eq!(format_number(244.8), "244.8");
    }

    #[test]
    fn non_finite_becomes_text() {
        assert_eq!(Cell::from(f64::INFINITY), Cell::Text("inf".into()));
        let mut t = Table::new("t", &["a"]);
        t.push(vec![f64::NAN.into()]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Table>(&json).unwrap(), t);
    }

    #[test]
    fn csv_has_meta_and_quotes() {
        let mut t = Table::quantities("b").meta("seed", 3);
        t.quantity("x", 2.0, "m", "a, b");
        assert_eq!(t.to_csv(), "# seed: 3\nquantity,value,units,formula anchor\nx,2,m,\"a, b\"\n");
        assert_eq!(t.get("x"), Some(2.0));
    }
}
