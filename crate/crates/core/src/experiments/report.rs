use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Report file format: CSV tables or one JSON object per line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Records,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Table => "csv",
            Format::Records => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "records" => Ok(Format::Records),
            _ => Err(Error::arg(format!("unknown format {s:?} (expected table or records)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Records => "records",
        })
    }
}

/// Rows of string cells under fixed column names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Table => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
                for row in &self.rows {
                    w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
            }
            Format::Records => {
                let mut out = String::new();
                for row in &self.rows {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(|v| Value::String(v.clone()))).collect();
                    out.push_str(&serde_json::to_string(&obj)?);
                    out.push('\n');
                }
                Ok(out)
            }
        }
    }
}

/// One pass/fail assertion of an experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything one experiment produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub experiment: String,
    /// Parameters and headline metrics, one cell each.
    pub headline: Vec<(String, String)>,
    pub summary: Table,
    pub records: Table,
    pub checks: Vec<Check>,
    /// Extra files `(name, contents)` such as distributions and traces.
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report { experiment: experiment.to_string(), ..Default::default() }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.headline.push((name.to_string(), value.to_string()));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(&["check", "passed", "detail"]);
        for c in &self.checks {
            t.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
        }
        t
    }

    /// Writes `summary`, `records` and `checks` in `format`, plus the
    /// artifacts, into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let ext = format.extension();
        std::fs::write(dir.join(format!("summary.{ext}")), self.summary.render(format)?)?;
        std::fs::write(dir.join(format!("records.{ext}")), self.records.render(format)?)?;
        std::fs::write(dir.join(format!("checks.{ext}")), self.checks_table().render(format)?)?;
        for (name, text) in &self.artifacts {
            std::fs::write(dir.join(name), text)?;
        }
        Ok(())
    }

    /// Human-readable digest for the terminal.
    pub fn describe(&self) -> String {
        let mut out = format!("experiment {}\n", self.experiment);
        for (k, v) in &self.headline {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_jsonl() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.render(Format::Table).unwrap(), "a,b\n1,\"x,y\"\n");
        assert_eq!(t.render(Format::Records).unwrap(), "{\"a\":\"1\",\"b\":\"x,y\"}\n");
        assert!("yaml".parse::<Format>().is_err());
    }
}
