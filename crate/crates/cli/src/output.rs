//! Report tables and the run summary.
//!
//! Floats are written in the shortest scientific form that round-trips, so
//! equal values always print the same bytes.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Column names `prefix0 .. prefix{n-1}`.
pub fn columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="`, or `"in"` for the range `[threshold, upper]`.
    pub relation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: "<=",
            upper: None,
            passed: value <= threshold,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: lo,
            relation: "in",
            upper: Some(hi),
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn describe(&self) -> String {
        match self.upper {
            Some(hi) => format!("{}: {} in [{}, {}]", self.name, num(self.value), num(self.threshold), num(hi)),
            None => format!("{}: {} <= {}", self.name, num(self.value), num(self.threshold)),
        }
    }
}

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    passed: bool,
    checks: &'a [Check],
    warnings: &'a [String],
    tables: Vec<(&'a str, usize)>,
    results: &'a serde_json::Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Writes `<table>.csv` files, `summary.json` and the resolved config to `dir`.
    pub fn write(&self, dir: &Path, command: &str, warnings: &[String], resolved: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        let summary = Summary {
            command,
            passed: self.passed(),
            checks: &self.checks,
            warnings,
            tables: self.tables.iter().map(|t| (t.name.as_str(), t.len())).collect(),
            results: &self.results,
        };
        let mut json = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
        json.push('\n');
        std::fs::write(dir.join("summary.json"), json)?;
        std::fs::write(dir.join("config.resolved.toml"), resolved)
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.describe());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "5e-1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("t", vec!["a".into(), "b".into()]);
        t.push(vec![num(1.0), num(2.5)]);
        assert_eq!(t.to_csv(), "a,b\n1e0,2.5e0\n");
    }

    #[test]
    fn range_checks() {
        assert!(Check::within("r", 2.0, 1.5, 2.5).passed);
        assert!(!Check::within("r", 2.6, 1.5, 2.5).passed);
        assert!(!Check::at_most("e", f64::NAN, 1.0).passed);
    }
}
