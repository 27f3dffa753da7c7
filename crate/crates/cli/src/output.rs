use std::io::Write;

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::run::{Row, SweepResult};
use crate::spec::Format;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn wall_ms(row: &Row, timing: bool) -> Option<f64> {
    match (&row.outcome, timing) {
        (Ok(r), true) => Some((r.wall_time.as_secs_f64() * 1e6).round() / 1e3),
        _ => None,
    }
}

fn out_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

/// CSV with a header row; one `f_<label>` column per group.
pub fn write_csv<W: Write>(result: &SweepResult, writer: W, timing: bool) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = ["axis", "value", "algorithm", "k", "tau", "eps", "status", "f", "g"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(result.group_labels.iter().map(|l| format!("f_{l}")));
    header.extend(
        [
            "items", "k_prime", "alpha_min", "alpha_max", "fell_back", "opt_f", "opt_g",
            "tau_opt_g", "wall_ms", "evaluations", "error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    w.write_record(&header).map_err(out_err)?;
    let c = result.group_labels.len();
    for row in &result.rows {
        let p = &row.point;
        let mut rec = vec![
            row.axis.unwrap_or("").to_string(),
            opt(p.value),
            row.algorithm.to_string(),
            p.k.to_string(),
            p.tau.to_string(),
            p.eps.to_string(),
        ];
        match &row.outcome {
            Ok(r) => {
                rec.extend(["ok".to_string(), r.f.to_string(), r.g.to_string()]);
                rec.extend(r.group_values.iter().map(f64::to_string));
                rec.extend([
                    r.item_names.join(" "),
                    opt(r.k_prime),
                    opt(r.alpha_min),
                    opt(r.alpha_max),
                    r.fell_back.to_string(),
                    r.opt_f.to_string(),
                    r.opt_g.to_string(),
                    r.reference.to_string(),
                    opt(wall_ms(row, timing)),
                    r.evaluations.to_string(),
                    String::new(),
                ]);
            }
            Err(e) => {
                rec.extend(["failed".to_string(), String::new(), String::new()]);
                rec.extend(std::iter::repeat_n(String::new(), c + 10));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec).map_err(out_err)?;
    }
    w.flush().map_err(out_err)?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    axis: Option<&'a str>,
    value: Option<f64>,
    algorithm: &'a str,
    k: usize,
    tau: f64,
    eps: f64,
    status: &'a str,
    f: Option<f64>,
    g: Option<f64>,
    group_labels: &'a [String],
    group_values: Option<&'a [f64]>,
    items: Option<&'a [String]>,
    k_prime: Option<usize>,
    alpha_min: Option<f64>,
    alpha_max: Option<f64>,
    fell_back: Option<bool>,
    opt_f: Option<f64>,
    opt_g: Option<f64>,
    tau_opt_g: Option<f64>,
    wall_ms: Option<f64>,
    evaluations: Option<u64>,
    error: Option<&'a str>,
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(result: &SweepResult, mut writer: W, timing: bool) -> CliResult<()> {
    for row in &result.rows {
        let p = &row.point;
        let ok = row.outcome.as_ref().ok();
        let json = JsonRow {
            axis: row.axis,
            value: p.value,
            algorithm: row.algorithm.name(),
            k: p.k,
            tau: p.tau,
            eps: p.eps,
            status: if ok.is_some() { "ok" } else { "failed" },
            f: ok.map(|r| r.f),
            g: ok.map(|r| r.g),
            group_labels: &result.group_labels,
            group_values: ok.map(|r| r.group_values.as_slice()),
            items: ok.map(|r| r.item_names.as_slice()),
            k_prime: ok.and_then(|r| r.k_prime),
            alpha_min: ok.and_then(|r| r.alpha_min),
            alpha_max: ok.and_then(|r| r.alpha_max),
            fell_back: ok.map(|r| r.fell_back),
            opt_f: ok.map(|r| r.opt_f),
            opt_g: ok.map(|r| r.opt_g),
            tau_opt_g: ok.map(|r| r.reference),
            wall_ms: wall_ms(row, timing),
            evaluations: ok.map(|r| r.evaluations),
            error: row.outcome.as_ref().err().map(String::as_str),
        };
        serde_json::to_writer(&mut writer, &json).map_err(out_err)?;
        writeln!(writer).map_err(out_err)?;
    }
    writer.flush().map_err(out_err)?;
    Ok(())
}

pub fn write_table<W: Write>(result: &SweepResult, writer: W, format: Format, timing: bool) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(result, writer, timing),
        Format::Json => write_jsonl(result, writer, timing),
    }
}
