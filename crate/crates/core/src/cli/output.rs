//! Tabular output in a versioned CSV layout or as a JSON array of row objects.

use crate::blockcore::matrix::Mat;

pub const SCHEMA_LINE: &str = "# bjweyl-schema v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<isize> for Cell {
    fn from(x: isize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(if x { "true" } else { "false" }.into())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map(Cell::Num).unwrap_or(Cell::Empty)
    }
}

/// Column names for the entries of a `d x d` matrix, row-major with `re`/`im` pairs.
pub fn matrix_columns(prefix: &str, d: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(format!("{prefix}_{i}{j}_re"));
            out.push(format!("{prefix}_{i}{j}_im"));
        }
    }
    out
}

pub fn matrix_cells(m: &Mat) -> Vec<Cell> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(Cell::Num(m[(i, j)].re));
            out.push(Cell::Num(m[(i, j)].im));
        }
    }
    out
}

pub fn empty_cells(n: usize) -> Vec<Cell> {
    vec![Cell::Empty; n]
}

/// A table whose last column is always `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(mut columns: Vec<String>) -> Self {
        columns.push("error".into());
        Self { columns, rows: Vec::new() }
    }

    /// Appends a row; `cells` covers every column but `error`.
    pub fn push(&mut self, mut cells: Vec<Cell>, error: Option<String>) {
        assert_eq!(cells.len() + 1, self.columns.len(), "row width must match the header");
        cells.push(error.map(Cell::Text).unwrap_or(Cell::Empty));
        self.rows.push(cells);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Empty))).count()
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.error_count() == self.rows.len()
    }
}

/// 17 significant digits, enough to round-trip any double.
fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(c: &Cell) -> String {
    match c {
        Cell::Num(x) if x.is_nan() => "nan".into(),
        Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
        Cell::Num(x) => fmt_num(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_value(c: &Cell) -> String {
    match c {
        Cell::Num(x) if x.is_finite() => fmt_num(*x),
        Cell::Num(_) | Cell::Empty => "null".into(),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
    }
}

pub fn to_csv(t: &Table) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_LINE);
    out.push('\n');
    out.push_str(&t.columns.join(","));
    out.push('\n');
    for row in &t.rows {
        out.push_str(&row.iter().map(csv_field).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(t: &Table) -> String {
    let keys: Vec<String> =
        t.columns.iter().map(|c| serde_json::to_string(c).expect("strings always serialize")).collect();
    let mut out = String::from("[\n");
    for (i, row) in t.rows.iter().enumerate() {
        let fields: Vec<String> = keys.iter().zip(row).map(|(k, v)| format!("{k}: {}", json_value(v))).collect();
        out.push_str("  {");
        out.push_str(&fields.join(", "));
        out.push('}');
        if i + 1 < t.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

/// Reads a table back from either output format. Numbers come back as `Num`, everything else as `Text`.
pub fn parse_table(text: &str) -> Result<Table, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        parse_json_table(trimmed)
    } else {
        parse_csv_table(text)
    }
}

fn parse_csv_table(text: &str) -> Result<Table, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim() == SCHEMA_LINE => {}
        _ => return Err(format!("missing schema line `{SCHEMA_LINE}`")),
    }
    let header = lines.next().ok_or("missing header row")?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<Cell> = split_csv_line(line)
            .into_iter()
            .map(|f| {
                if f.is_empty() {
                    Cell::Empty
                } else if let Ok(x) = f.parse::<f64>() {
                    Cell::Num(x)
                } else {
                    Cell::Text(f)
                }
            })
            .collect();
        if cells.len() != columns.len() {
            return Err(format!("row {} has {} fields, header has {}", i + 1, cells.len(), columns.len()));
        }
        rows.push(cells);
    }
    Ok(Table { columns, rows })
}

/// Splits one CSV line, honouring double-quoted fields with `""` escapes.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match (ch, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            (c, _) => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

fn parse_json_table(text: &str) -> Result<Table, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("json: {e}"))?;
    let arr = v.as_array().ok_or("expected a JSON array of rows")?;
    let mut columns: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for obj in arr {
        let obj = obj.as_object().ok_or("expected row objects")?;
        if columns.is_empty() {
            columns = obj.keys().cloned().collect();
        }
        let row = columns
            .iter()
            .map(|k| match obj.get(k) {
                Some(serde_json::Value::Number(n)) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                Some(serde_json::Value::String(s)) => Cell::Text(s.clone()),
                _ => Cell::Empty,
            })
            .collect();
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["x".into(), "label".into()]);
        t.push(vec![Cell::Num(0.1), "a,b".into()], None);
        t.push(vec![Cell::Num(f64::INFINITY), Cell::Empty], Some("boom".into()));
        t
    }

    #[test]
    fn csv_layout() {
        let s = to_csv(&sample());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], SCHEMA_LINE);
        assert_eq!(lines[1], "x,label,error");
        assert_eq!(lines[2], "1.0000000000000001e-1,\"a,b\",");
        assert_eq!(lines[3], "inf,,boom");
    }

    #[test]
    fn json_layout_and_round_trip() {
        let s = to_json(&sample());
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v[1]["x"], serde_json::Value::Null);
        let back = parse_table(&s).unwrap();
        assert_eq!(back.rows[0][back.column("x").unwrap()], Cell::Num(0.1));
        let back = parse_table(&to_csv(&sample())).unwrap();
        assert_eq!(back.rows[0][1], Cell::Text("a,b".into()));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Table::new(vec!["x".into()]);
        let vals = [std::f64::consts::PI, -1e-300, 123456789.12345679, 5e-324];
        for v in vals {
            t.push(vec![Cell::Num(v)], None);
        }
        let back = parse_table(&to_csv(&t)).unwrap();
        for (row, v) in back.rows.iter().zip(vals) {
            assert_eq!(row[0], Cell::Num(v));
        }
    }

    #[test]
    fn all_failed_flag() {
        let t = sample();
        assert!(!t.all_failed());
        let mut f = Table::new(vec!["x".into()]);
        f.push(vec![Cell::Empty], Some("e".into()));
        assert!(f.all_failed());
    }
}
