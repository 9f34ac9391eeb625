//! CSV tables with a versioned schema line, JSON artifacts and a markdown summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = format!("# schema: lowrank/{}/v{SCHEMA_VERSION}\n", self.name);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub experiment: String,
    pub tables: Vec<Table>,
    pub json: Vec<(String, String)>,
    /// Markdown lines of the summary body.
    pub notes: Vec<String>,
    pub violations: Vec<String>,
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Records a bound check; returns the pass flag as a CSV cell.
    pub fn check(&mut self, what: impl FnOnce() -> String, value: f64, bound: f64) -> String {
        let ok = value <= bound;
        if !ok {
            self.violations.push(format!("{}: {value:e} > {bound:e}", what()));
        }
        flag(ok)
    }

    /// 0 when every bound held, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.violations.is_empty())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}\n", self.experiment);
        for line in &self.notes {
            let _ = writeln!(s, "{line}");
        }
        if !self.notes.is_empty() {
            s.push('\n');
        }
        let _ = writeln!(s, "## Bound checks\n");
        if self.violations.is_empty() {
            let _ = writeln!(s, "No violations.");
        } else {
            for v in &self.violations {
                let _ = writeln!(s, "- VIOLATION {v}");
            }
        }
        if !self.timings.is_empty() {
            let _ = writeln!(s, "\n## Timing\n\n| step | seconds |\n|---|---|");
            for (name, secs) in &self.timings {
                let _ = writeln!(s, "| {name} | {secs:.3} |");
            }
        }
        let _ = writeln!(s, "\n## Files\n");
        for t in &self.tables {
            let _ = writeln!(s, "- `{}.csv`: {}", t.name, t.columns.join(", "));
        }
        for (name, _) in &self.json {
            let _ = writeln!(s, "- `{name}`");
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |p: &Path| {
            let path = p.display().to_string();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        for t in &self.tables {
            let p = dir.join(format!("{}.csv", t.name));
            fs::write(&p, t.to_csv()?).map_err(io(&p))?;
        }
        for (name, body) in &self.json {
            let p = dir.join(name);
            fs::write(&p, body).map_err(io(&p))?;
        }
        let p = dir.join("summary.md");
        fs::write(&p, self.summary()).map_err(io(&p))
    }
}

pub fn flag(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violations_set_the_exit_code() {
        let mut r = Report::new("x");
        assert_eq!(r.check(|| "ok".into(), 1.0, 1.0), "pass");
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.check(|| "nan".into(), f64::NAN, 1.0), "FAIL");
        assert_eq!(r.check(|| "over".into(), 2.0, 1.0), "FAIL");
        assert_eq!(r.exit_code(), 1);
        assert!(r.summary().contains("VIOLATION over"));
    }

    #[test]
    fn csv_starts_with_schema_line() {
        let mut t = Table::new("errors", &["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "# schema: lowrank/errors/v1\na,b\n1,\"x,y\"\n");
    }
}
