//! Per-point residual reports and their summaries.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::jetcalc::Point;
use crate::Result;

/// How a residual column enters the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "floor", rename_all = "kebab-case")]
pub enum Gate {
    /// Every trusted point must be below the report tolerance.
    Below,
    /// Every trusted point must be below a fixed limit.
    BelowLimit(f64),
    /// Every trusted point must exceed the floor.
    MinAbove(f64),
    /// The maximum over trusted points must exceed the floor.
    MaxAbove(f64),
    /// Informational; never affects the verdict.
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub gate: Gate,
}

impl Column {
    pub fn below(name: &str) -> Self {
        Column { name: name.into(), gate: Gate::Below }
    }

    pub fn below_limit(name: &str, limit: f64) -> Self {
        Column { name: name.into(), gate: Gate::BelowLimit(limit) }
    }

    pub fn record(name: &str) -> Self {
        Column { name: name.into(), gate: Gate::Record }
    }

    pub fn min_above(name: &str, floor: f64) -> Self {
        Column { name: name.into(), gate: Gate::MinAbove(floor) }
    }

    pub fn max_above(name: &str, floor: f64) -> Self {
        Column { name: name.into(), gate: Gate::MaxAbove(floor) }
    }

    pub fn gated(name: &str, gated: bool) -> Self {
        if gated {
            Column::below(name)
        } else {
            Column::record(name)
        }
    }
}

/// Residuals measured at one point, in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub residuals: Vec<f64>,
    pub trusted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Error,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
            Verdict::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub point: Point,
    pub residuals: Vec<f64>,
    pub pass: bool,
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub gate: Gate,
    pub max: Option<f64>,
    pub min: Option<f64>,
    pub mean: Option<f64>,
    pub pass: bool,
}

/// Statistics over trusted points. `max`, `mean` and `p99` describe each
/// point's worst residual among the `Below` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub verdict: Verdict,
    pub points: usize,
    pub trusted_points: usize,
    pub failing_points: usize,
    pub tolerance: f64,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub p99: Option<f64>,
    pub columns: Vec<ColumnSummary>,
    pub provenance: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub scenario: String,
    pub columns: Vec<Column>,
    pub points: Vec<PointRecord>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub provenance: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

/// Evaluates `f` at every point in parallel; the rows come back in point
/// order and the first error in that order wins.
pub fn collect_rows<F>(points: &[Point], f: F) -> Result<Vec<Row>>
where
    F: Fn(usize, &Point) -> Result<Row> + Sync,
{
    let results: Vec<Result<Row>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(i, p))
        .collect();
    results.into_iter().collect()
}

/// Per-point gates; `MaxAbove` is decided over the whole column.
fn point_passes(columns: &[Column], residuals: &[f64], tolerance: f64) -> bool {
    columns.iter().zip(residuals).all(|(c, &v)| match c.gate {
        Gate::Below => v < tolerance,
        Gate::BelowLimit(limit) => v < limit,
        Gate::MinAbove(floor) => v > floor,
        Gate::MaxAbove(_) | Gate::Record => true,
    })
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl CheckReport {
    pub fn assemble(
        scenario: &str,
        columns: Vec<Column>,
        points: &[Point],
        rows: Vec<Row>,
        tolerance: f64,
    ) -> CheckReport {
        assert_eq!(points.len(), rows.len());
        let records: Vec<PointRecord> = points
            .iter()
            .zip(rows)
            .map(|(p, row)| {
                assert_eq!(row.residuals.len(), columns.len());
                let pass = point_passes(&columns, &row.residuals, tolerance);
                PointRecord { point: *p, residuals: row.residuals, pass, trusted: row.trusted }
            })
            .collect();
        let mut report = CheckReport {
            scenario: scenario.to_string(),
            columns,
            points: records,
            tolerance,
            verdict: Verdict::Pass,
            provenance: BTreeMap::new(),
            notes: Vec::new(),
        };
        report.verdict = report.computed_verdict();
        report
    }

    /// Report for a scenario whose structure could not be built.
    pub fn construction_error(scenario: &str, tolerance: f64, message: &str) -> CheckReport {
        CheckReport {
            scenario: scenario.to_string(),
            columns: Vec::new(),
            points: Vec::new(),
            tolerance,
            verdict: Verdict::Error,
            provenance: BTreeMap::new(),
            notes: vec![message.to_string()],
        }
    }

    fn trusted(&self) -> impl Iterator<Item = &PointRecord> {
        self.points.iter().filter(|r| r.trusted)
    }

    fn computed_verdict(&self) -> Verdict {
        if self.trusted().next().is_none() {
            return Verdict::NotApplicable;
        }
        let all_columns = (0..self.columns.len()).all(|i| self.column_pass(i));
        if all_columns && self.trusted().all(|r| r.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn column_pass(&self, i: usize) -> bool {
        let values = || self.trusted().map(|r| r.residuals[i]);
        match self.columns[i].gate {
            Gate::Below => values().all(|v| v < self.tolerance),
            Gate::BelowLimit(limit) => values().all(|v| v < limit),
            Gate::MinAbove(floor) => values().all(|v| v > floor),
            Gate::MaxAbove(floor) => values().fold(f64::NEG_INFINITY, f64::max) > floor,
            Gate::Record => true,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of a column over all points.
    ///
    /// # Panics
    /// If the column does not exist.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self
            .column_index(name)
            .unwrap_or_else(|| panic!("report {} has no column {name}", self.scenario));
        self.points.iter().map(|r| r.residuals[i]).collect()
    }

    /// Largest value of a column over trusted points.
    pub fn column_max(&self, name: &str) -> f64 {
        let i = self.column_index(name).expect("unknown column");
        self.trusted().map(|r| r.residuals[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether a single column satisfies its gate.
    pub fn column_passes(&self, name: &str) -> bool {
        self.column_pass(self.column_index(name).expect("unknown column"))
    }

    pub fn set_gate(&mut self, name: &str, gate: Gate) {
        let i = self.column_index(name).expect("unknown column");
        self.columns[i].gate = gate;
        for r in &mut self.points {
            r.pass = point_passes(&self.columns, &r.residuals, self.tolerance);
        }
        self.verdict = self.computed_verdict();
    }

    pub fn mark_not_applicable(&mut self, note: &str) {
        self.verdict = Verdict::NotApplicable;
        self.notes.push(note.to_string());
    }

    pub fn with_provenance(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.provenance.insert(key.to_string(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Worst `Below` residual at a point, if the report has such columns.
    pub fn worst_gated(&self, record: &PointRecord) -> Option<f64> {
        self.columns
            .iter()
            .zip(&record.residuals)
            .filter(|(c, _)| c.gate == Gate::Below)
            .map(|(_, &v)| v)
            .reduce(f64::max)
    }

    pub fn summary(&self) -> Summary {
        let mut worst: Vec<f64> = self.trusted().filter_map(|r| self.worst_gated(r)).collect();
        worst.sort_by(f64::total_cmp);
        let (max, mean, p99) = if worst.is_empty() {
            (None, None, None)
        } else {
            (
                worst.last().copied(),
                Some(worst.iter().sum::<f64>() / worst.len() as f64),
                Some(nearest_rank(&worst, 0.99)),
            )
        };
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let values: Vec<f64> = self.trusted().map(|r| r.residuals[i]).collect();
                let (cmax, cmin, cmean) = if values.is_empty() {
                    (None, None, None)
                } else {
                    (
                        Some(values.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                        Some(values.iter().copied().fold(f64::INFINITY, f64::min)),
                        Some(values.iter().sum::<f64>() / values.len() as f64),
                    )
                };
                ColumnSummary {
                    name: c.name.clone(),
                    gate: c.gate,
                    max: cmax,
                    min: cmin,
                    mean: cmean,
                    pass: self.column_pass(i),
                }
            })
            .collect();
        Summary {
            scenario: self.scenario.clone(),
            verdict: self.verdict,
            points: self.points.len(),
            trusted_points: self.trusted().count(),
            failing_points: self.trusted().filter(|r| !r.pass).count(),
            tolerance: self.tolerance,
            max,
            mean,
            p99,
            columns,
            provenance: self.provenance.clone(),
            notes: self.notes.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(values: &[[f64; 2]]) -> (Vec<Point>, Vec<Row>) {
        let points = (0..values.len()).map(|i| [i as f64, 0.0, 0.0]).collect();
        let rows = values
            .iter()
            .map(|v| Row { residuals: v.to_vec(), trusted: true })
            .collect();
        (points, rows)
    }

    #[test]
    fn verdict_follows_gates() {
        let (p, r) = rows(&[[1e-12, 5.0], [1e-10, 7.0]]);
        let rep = CheckReport::assemble("t", vec![Column::below("a"), Column::record("b")], &p, r, 1e-8);
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.summary().max, Some(1e-10));

        let (p, r) = rows(&[[1e-12, 5.0], [1e-6, 7.0]]);
        let rep = CheckReport::assemble("t", vec![Column::below("a"), Column::record("b")], &p, r, 1e-8);
        assert_eq!(rep.verdict, Verdict::Fail);
        assert_eq!(rep.summary().failing_points, 1);

        let (p, r) = rows(&[[0.0, 0.5], [0.0, 0.0]]);
        let mut rep =
            CheckReport::assemble("t", vec![Column::below("a"), Column::max_above("b", 0.1)], &p, r, 1e-8);
        assert_eq!(rep.verdict, Verdict::Pass);
        rep.set_gate("b", Gate::MaxAbove(1.0));
        assert_eq!(rep.verdict, Verdict::Fail);
    }

    #[test]
    fn untrusted_points_do_not_decide() {
        let (p, mut r) = rows(&[[1.0, 0.0], [0.0, 0.0]]);
        r[0].trusted = false;
        let rep = CheckReport::assemble("t", vec![Column::below("a"), Column::below("b")], &p, r, 1e-8);
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.summary().trusted_points, 1);
    }

    #[test]
    fn empty_report_is_not_applicable() {
        let rep = CheckReport::assemble("t", vec![Column::below("a")], &[], vec![], 1e-8);
        assert_eq!(rep.verdict, Verdict::NotApplicable);
        assert_eq!(rep.summary().max, None);
    }

    #[test]
    fn p99_uses_nearest_rank() {
        let sorted: Vec<f64> = (1..=200).map(f64::from).collect();
        assert_eq!(nearest_rank(&sorted, 0.99), 198.0);
        assert_eq!(nearest_rank(&[3.0], 0.99), 3.0);
    }

    #[test]
    fn collected_rows_keep_point_order() {
        let points: Vec<Point> = (0..64).map(|i| [i as f64, 0.0, 0.0]).collect();
        let rows = collect_rows(&points, |i, p| Ok(Row { residuals: vec![p[0] - i as f64], trusted: true })).unwrap();
        assert!(rows.iter().all(|r| r.residuals[0] == 0.0));
        let err = collect_rows(&points, |i, _| {
            if i % 10 == 7 {
                Err(crate::Error::Construction(format!("{i}")))
            } else {
                Ok(Row { residuals: vec![], trusted: true })
            }
        })
        .unwrap_err();
        assert_eq!(err, crate::Error::Construction("7".into()));
    }
}
