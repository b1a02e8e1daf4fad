//! Writing run results as CSV or JSON lines, plus gnuplot scripts.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::json;
use tempus_core::io::{csv_table, fmt_f64, report_row, REPORT_HEADER};
use tempus_core::suite::Group;
use tempus_core::BoundReport;

use crate::experiments::{Output, Table};
use crate::params::Params;
use crate::Format;

/// Reports of one run, with the swept key and value when part of a sweep.
type Labelled<'a> = (Option<(&'a str, f64)>, &'a [BoundReport]);

pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
    name: &'static str,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format, name: &'static str) -> std::io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir, format, name })
    }

    pub fn single(&mut self, p: &Params, o: &Output) -> std::io::Result<()> {
        let mut summary = vec![p.iter().map(|(k, v)| (k.clone(), *v)).collect::<Vec<_>>()];
        summary[0].extend(o.summary.iter().cloned());
        self.emit(&o.tables, &summary, &[(None, o.reports.as_slice())])
    }

    pub fn sweep(&mut self, key: &str, runs: &[(Params, Output)]) -> std::io::Result<()> {
        let mut tables = Vec::new();
        let mut summary = Vec::new();
        let mut reports: Vec<Labelled> = Vec::new();
        for (p, o) in runs {
            let v = p.f(key);
            for t in &o.tables {
                let mut t = t.clone();
                t.header.insert(0, key.to_string());
                for r in &mut t.rows {
                    r.insert(0, v);
                }
                match tables.iter_mut().find(|x: &&mut Table| x.name == t.name) {
                    Some(x) => x.rows.extend(t.rows),
                    None => tables.push(t),
                }
            }
            let mut row: Vec<(String, f64)> = p.iter().map(|(k, v)| (k.clone(), *v)).collect();
            row.extend(o.summary.iter().cloned());
            row.push((
                "failed".into(),
                o.reports.iter().filter(|r| r.asserted && !r.pass).count() as f64,
            ));
            summary.push(row);
            reports.push((Some((key, v)), o.reports.as_slice()));
        }
        self.emit(&tables, &summary, &reports)
    }

    fn emit(
        &mut self,
        tables: &[Table],
        summary: &[Vec<(String, f64)>],
        reports: &[Labelled],
    ) -> std::io::Result<()> {
        let report_text = match self.format {
            Format::Csv => {
                let key = reports.iter().find_map(|r| r.0.map(|x| x.0));
                let mut s = match key {
                    Some(k) => format!("{k},{REPORT_HEADER}\n"),
                    None => format!("{REPORT_HEADER}\n"),
                };
                for (k, rs) in reports {
                    for r in rs.iter() {
                        if let Some((_, v)) = k {
                            s.push_str(&fmt_f64(*v));
                            s.push(',');
                        }
                        s.push_str(&report_row(r));
                        s.push('\n');
                    }
                }
                s
            }
            Format::Jsonl => {
                let mut s = String::new();
                for (k, rs) in reports {
                    for r in rs.iter() {
                        let mut v = serde_json::to_value(r).expect("report serialises");
                        if let Some((key, x)) = k {
                            v["sweep"] = json!({ "key": key, "value": x });
                        }
                        s.push_str(&v.to_string());
                        s.push('\n');
                    }
                }
                s
            }
        };
        let Some(dir) = &self.dir else {
            return std::io::stdout().write_all(report_text.as_bytes());
        };
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        };
        fs::write(
            dir.join(format!("{}_reports.{ext}", self.name)),
            report_text,
        )?;
        fs::write(
            dir.join(format!("{}_summary.{ext}", self.name)),
            summary_text(summary, self.format),
        )?;
        for t in tables {
            fs::write(
                dir.join(format!("{}.{ext}", t.name)),
                table_text(t, self.format),
            )?;
            if self.format == Format::Csv && t.header.len() >= 2 {
                let swept = reports.first().is_some_and(|r| r.0.is_some());
                fs::write(dir.join(format!("{}.gp", t.name)), gnuplot(t, swept))?;
            }
        }
        Ok(())
    }
}

fn table_text(t: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let h: Vec<&str> = t.header.iter().map(String::as_str).collect();
            csv_table(&h, t.rows.iter().cloned())
        }
        Format::Jsonl => {
            let mut s = String::new();
            for r in &t.rows {
                let obj: serde_json::Map<String, serde_json::Value> = t
                    .header
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.clone(), json_num(*v)))
                    .collect();
                s.push_str(&serde_json::Value::Object(obj).to_string());
                s.push('\n');
            }
            s
        }
    }
}

/// JSON has no inf/nan; those become strings.
fn json_num(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

fn summary_text(rows: &[Vec<(String, f64)>], format: Format) -> String {
    let Some(first) = rows.first() else {
        return String::new();
    };
    match format {
        Format::Csv => {
            let h: Vec<&str> = first.iter().map(|c| c.0.as_str()).collect();
            csv_table(&h, rows.iter().map(|r| r.iter().map(|c| c.1).collect()))
        }
        Format::Jsonl => {
            let mut s = String::new();
            for r in rows {
                let obj: serde_json::Map<String, serde_json::Value> =
                    r.iter().map(|(k, v)| (k.clone(), json_num(*v))).collect();
                s.push_str(&serde_json::Value::Object(obj).to_string());
                s.push('\n');
            }
            s
        }
    }
}

/// Plot every column against the first; for a sweep the first column is the
/// swept parameter, so plot against the second and colour by the first.
fn gnuplot(t: &Table, swept: bool) -> String {
    let x = if swept { 2 } else { 1 };
    let mut s = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{}'\nset terminal pngcairo size 900,600\nset output '{}.png'\nplot ",
        t.header[x - 1],
        t.name
    );
    let cols: Vec<String> = (x + 1..=t.header.len())
        .map(|c| match swept {
            false => format!("'{}.csv' using 1:{c} with lines", t.name),
            true => format!("'{}.csv' using 2:{c}:1 with points palette", t.name),
        })
        .collect();
    s.push_str(&cols.join(", \\\n     "));
    s.push('\n');
    s
}

/// Deterministic verification listing: one row per report, then a coverage row per missing relation.
pub fn verify_text(groups: &[Group], missing: &[&str], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&format!("group,{REPORT_HEADER}\n"));
            for g in groups {
                for r in &g.reports {
                    s.push_str(&format!("{},{}\n", g.id, report_row(r)));
                }
            }
            for t in missing {
                s.push_str(&format!("coverage,{t},nan,nan,nan,0,false,true\n"));
            }
        }
        Format::Jsonl => {
            for g in groups {
                for r in &g.reports {
                    let mut v = serde_json::to_value(r).expect("report serialises");
                    v["group"] = json!(g.id);
                    s.push_str(&v.to_string());
                    s.push('\n');
                }
            }
            for t in missing {
                s.push_str(&json!({"group": "coverage", "tag": t, "pass": false}).to_string());
                s.push('\n');
            }
        }
    }
    s
}
