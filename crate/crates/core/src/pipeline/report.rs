use std::fmt;
use std::fmt::Write as _;

use crate::classify::Metrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Baseline,
    DistanceSweep,
    SpeedSweep,
    Workflow,
    StftSweep,
    Eval,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Baseline => "baseline",
            ExperimentKind::DistanceSweep => "distance-sweep",
            ExperimentKind::SpeedSweep => "speed-sweep",
            ExperimentKind::Workflow => "workflow",
            ExperimentKind::StftSweep => "stft-sweep",
            ExperimentKind::Eval => "eval",
        })
    }
}

/// Labelled grid of optional values. `footer` is an extra summary row
/// (usually overall accuracy) kept apart from the per-class rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
    pub footer: Option<(String, Vec<Option<f64>>)>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<String>) -> Self {
        Table {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
            footer: None,
        }
    }

    pub fn row(&self, label: &str) -> Option<&[Option<f64>]> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    pub fn row_labels(&self) -> Vec<&str> {
        self.rows.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.columns.len())
    }

    pub fn cells(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().flat_map(|(_, v)| v.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    pub tables: Vec<Table>,
    /// Confusion data per column of the main grid, for recomputing other
    /// per-class statistics.
    pub metrics: Vec<(String, Metrics)>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(kind: ExperimentKind) -> Self {
        Report {
            kind,
            tables: Vec::new(),
            metrics: Vec::new(),
            summary: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Long-form CSV: `experiment,table,row,column,value`. Empty values are
    /// cells without data (for example a class absent from a test split).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "table", "row", "column", "value"]).expect("in-memory CSV");
        let kind = self.kind.to_string();
        for t in &self.tables {
            for (label, values) in t.rows.iter().chain(t.footer.iter()) {
                for (col, v) in t.columns.iter().zip(values) {
                    let v = v.map(|x| x.to_string()).unwrap_or_default();
                    w.write_record([kind.as_str(), &t.name, label, col, &v]).expect("in-memory CSV");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.kind);
        for t in &self.tables {
            let _ = writeln!(s, "\n{}", t.name);
            let first = t
                .rows
                .iter()
                .chain(t.footer.iter())
                .map(|(l, _)| l.len())
                .max()
                .unwrap_or(0)
                .max(5);
            let width = t.columns.iter().map(String::len).max().unwrap_or(0).max(8);
            let _ = write!(s, "{:first$}", "");
            for c in &t.columns {
                let _ = write!(s, "  {c:>width$}");
            }
            s.push('\n');
            for (label, values) in t.rows.iter().chain(t.footer.iter()) {
                let _ = write!(s, "{label:first$}");
                for v in values {
                    match v {
                        Some(x) => {
                            let _ = write!(s, "  {x:>width$.4}");
                        }
                        None => {
                            let _ = write!(s, "  {:>width$}", "-");
                        }
                    }
                }
                s.push('\n');
            }
        }
        if !self.summary.is_empty() {
            s.push('\n');
            for line in &self.summary {
                let _ = writeln!(s, "{line}");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}
