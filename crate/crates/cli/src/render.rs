//! Output formats: compact JSON, human-readable text, and CSV.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A command result: the JSON value is authoritative, the rest are views of it.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub table: Option<Table>,
    pub text: Option<String>,
}

impl Report {
    pub fn new(value: Value) -> Report {
        Report { value, table: None, text: None }
    }

    pub fn with_table(mut self, t: Table) -> Report {
        self.table = Some(t);
        self
    }

    pub fn with_text(mut self, s: impl Into<String>) -> Report {
        self.text = Some(s.into());
        self
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => format!("{}\n", self.value),
            Format::Csv => csv(self.table.as_ref().cloned().unwrap_or_else(|| flatten_table(&self.value))),
            Format::Pretty => match (&self.text, &self.table) {
                (Some(t), _) => format!("{t}\n"),
                (None, Some(t)) => aligned(t),
                (None, None) => format!("{}\n", serde_json::to_string_pretty(&self.value).unwrap_or_default()),
            },
        }
    }
}

fn leaf(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Table) {
    match v {
        Value::Object(o) if !o.is_empty() => {
            for (k, x) in o {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&p, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (k, x) in a.iter().enumerate() {
                flatten_into(&format!("{prefix}[{k}]"), x, out);
            }
        }
        _ => out.push(vec![prefix.to_string(), leaf(v)]),
    }
}

/// `path,value` rows for values without a natural table.
pub fn flatten_table(v: &Value) -> Table {
    let mut t = Table::new(&["path", "value"]);
    flatten_into("", v, &mut t);
    t
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(t: Table) -> String {
    let mut out = String::new();
    for row in std::iter::once(&t.header).chain(t.rows.iter()) {
        out.push_str(&row.iter().map(|s| csv_field(s)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn aligned(t: &Table) -> String {
    let n = t.header.len();
    let mut w = vec![0; n];
    for row in std::iter::once(&t.header).chain(t.rows.iter()) {
        for (k, c) in row.iter().enumerate().take(n) {
            w[k] = w[k].max(c.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&t.header).chain(t.rows.iter()) {
        let cells: Vec<String> = row.iter().enumerate().map(|(k, c)| format!("{c:>width$}", width = w[k])).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn formats() {
        let mut t = Table::new(&["d", "n"]);
        t.push(vec!["1".into(), "2875".into()]);
        let r = Report::new(json!({ "rows": [{ "d": 1, "n": "2875" }] })).with_table(t);
        assert_eq!(r.render(Format::Csv), "d,n\n1,2875\n");
        assert_eq!(r.render(Format::Json), "{\"rows\":[{\"d\":1,\"n\":\"2875\"}]}\n");
        assert_eq!(r.render(Format::Pretty), "d     n\n1  2875\n");
    }

    #[test]
    fn flattening() {
        let v = json!({ "b": { "x": "1/2" }, "a": [1, "a,b"] });
        let r = Report::new(v);
        assert_eq!(r.render(Format::Csv), "path,value\na[0],1\na[1],\"a,b\"\nb.x,1/2\n");
    }
}
