//! Report emission: JSON lines, CSV and a human-readable summary table.

use std::io::Write;
use std::str::FromStr;

use anyhow::Result;
use serde_json::{json, Map, Value};

use crate::runner::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    JsonLines,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" | "human-table" => Ok(Format::Table),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (table, jsonl, csv)")),
        }
    }
}

/// The closing summary object of a JSON-lines report.
pub fn summary_value(o: &Outcome) -> Value {
    let mut summary = serde_json::to_value(o.report.summary()).expect("summary serializes");
    if let Value::Object(m) = &mut summary {
        m.insert("expected".into(), json!(o.expected));
        m.insert("as_expected".into(), json!(o.as_expected()));
    }
    json!({ "summary": summary })
}

fn write_json_lines(o: &Outcome, w: &mut dyn Write) -> Result<()> {
    let r = &o.report;
    for rec in &r.points {
        let residuals: Map<String, Value> = r
            .columns
            .iter()
            .zip(&rec.residuals)
            .map(|(c, v)| (c.name.clone(), json!(v)))
            .collect();
        let line = json!({
            "scenario": r.scenario,
            "point": rec.point,
            "residuals": residuals,
            "pass": rec.pass,
            "trusted": rec.trusted,
        });
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{}", summary_value(o))?;
    Ok(())
}

fn write_csv(o: &Outcome, w: &mut dyn Write) -> Result<()> {
    let r = &o.report;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["scenario".to_string(), "x".into(), "y".into(), "z".into()];
    header.extend(r.columns.iter().map(|c| c.name.clone()));
    header.extend(["pass".to_string(), "trusted".to_string()]);
    out.write_record(&header)?;
    for rec in &r.points {
        let mut row = vec![r.scenario.clone()];
        row.extend(rec.point.iter().map(f64::to_string));
        row.extend(rec.residuals.iter().map(f64::to_string));
        row.extend([rec.pass.to_string(), rec.trusted.to_string()]);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

fn write_table(outcomes: &[Outcome], w: &mut dyn Write) -> Result<()> {
    let width = outcomes.iter().map(|o| o.report.scenario.len()).max().unwrap_or(8).max(8);
    writeln!(
        w,
        "{:<width$}  {:<14}  {:<14}  {:>6}  {:>7}  {:>7}  {:>10}  {:>10}",
        "scenario", "verdict", "expected", "points", "trusted", "failing", "max", "p99"
    )?;
    for o in outcomes {
        let s = o.report.summary();
        let mark = if o.as_expected() { "" } else { "  <- unexpected" };
        writeln!(
            w,
            "{:<width$}  {:<14}  {:<14}  {:>6}  {:>7}  {:>7}  {:>10}  {:>10}{mark}",
            s.scenario,
            s.verdict.to_string(),
            o.expected.to_string(),
            s.points,
            s.trusted_points,
            s.failing_points,
            fmt_opt(s.max),
            fmt_opt(s.p99),
        )?;
        for note in &s.notes {
            writeln!(w, "{:<width$}  note: {note}", "")?;
        }
    }
    let unexpected = outcomes.iter().filter(|o| !o.as_expected()).count();
    writeln!(w, "{} scenarios, {} as expected, {} unexpected", outcomes.len(), outcomes.len() - unexpected, unexpected)?;
    Ok(())
}

/// Writes one report in the given format. The table holds the summary only.
pub fn emit_report(o: &Outcome, format: Format, w: &mut dyn Write) -> Result<()> {
    emit_all(std::slice::from_ref(o), format, w)
}

/// Writes several reports in order.
pub fn emit_all(outcomes: &[Outcome], format: Format, w: &mut dyn Write) -> Result<()> {
    match format {
        Format::Table => write_table(outcomes, w),
        Format::JsonLines => outcomes.iter().try_for_each(|o| write_json_lines(o, w)),
        Format::Csv => outcomes.iter().try_for_each(|o| write_csv(o, w)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmu_core::jetcalc::Point;
    use kmu_core::report::{CheckReport, Column, Row, Verdict};

    fn outcome(values: &[f64]) -> Outcome {
        let points: Vec<Point> = (0..values.len()).map(|i| [i as f64, 0.5, 0.25]).collect();
        let rows = values.iter().map(|&v| Row { residuals: vec![v, 3.0], trusted: true }).collect();
        let report = CheckReport::assemble(
            "demo",
            vec![Column::below("a"), Column::record("b")],
            &points,
            rows,
            1e-8,
        );
        Outcome { report, expected: Verdict::Pass }
    }

    fn render(o: &Outcome, f: Format) -> String {
        let mut buf = Vec::new();
        emit_report(o, f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn json_lines_round_trip_max() {
        let o = outcome(&[1e-12, 4e-10, 2e-11]);
        let text = render(&o, Format::JsonLines);
        let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 4);
        let max = lines[..3]
            .iter()
            .map(|l| l["residuals"]["a"].as_f64().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(lines[3]["summary"]["max"].as_f64().unwrap(), max);
        assert_eq!(lines[0]["point"], json!([0.0, 0.5, 0.25]));
        assert_eq!(lines[3]["summary"]["verdict"], json!("pass"));
    }

    #[test]
    fn empty_report_is_summary_only() {
        let o = outcome(&[]);
        let text = render(&o, Format::JsonLines);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("{\"summary\""));
    }

    #[test]
    fn csv_has_header_and_one_row_per_point() {
        let o = outcome(&[1e-12, 4e-10]);
        let text = render(&o, Format::Csv);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), "scenario,x,y,z,a,b,pass,trusted");
    }

    #[test]
    fn table_flags_unexpected_verdicts() {
        let mut o = outcome(&[1.0]);
        assert!(render(&o, Format::Table).contains("unexpected"));
        o.expected = Verdict::Fail;
        assert!(render(&o, Format::Table).contains("1 as expected"));
    }

    #[test]
    fn format_names() {
        assert_eq!("jsonl".parse::<Format>().unwrap(), Format::JsonLines);
        assert!("xml".parse::<Format>().is_err());
    }
}
