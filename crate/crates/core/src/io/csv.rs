//! Plain-text tables for spectra, sweeps and validation records.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! so parsing a written table reproduces every `f64` exactly. Infinities are
//! written as `inf` / `-inf`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::closed_form::ValidationReport;
use crate::model::HybridModes;
use crate::spectra::SpectrumSample;
use crate::sweep::{Interval, SweepResult, ThermalRatio};

pub const SPECTRUM_HEADER: &str = "omega,r_m,s_th,n_add,s_total,sql_margin";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("expected header `{expected}`, got `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: expected {expected} fields, got {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{value}` as a number")]
    Number { line: usize, value: String },
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt_num)
}

pub fn spectrum_csv(samples: &[SpectrumSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(s.omega),
            fmt_num(s.r_m),
            fmt_num(s.s_th),
            fmt_num(s.n_add),
            fmt_num(s.s_total),
            fmt_num(s.sql_margin)
        );
    }
    out
}

pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumSample>, CsvError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    if header != SPECTRUM_HEADER {
        return Err(CsvError::Header {
            expected: SPECTRUM_HEADER.into(),
            found: header.into(),
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CsvError::FieldCount {
                line: line_no,
                expected: 6,
                found: fields.len(),
            });
        }
        let mut v = [0.0; 6];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.trim().parse::<f64>().map_err(|_| CsvError::Number {
                line: line_no,
                value: f.to_string(),
            })?;
        }
        out.push(SpectrumSample {
            omega: v[0],
            r_m: v[1],
            s_th: v[2],
            n_add: v[3],
            s_total: v[4],
            sql_margin: v[5],
        });
    }
    Ok(out)
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("{},branch,omega_eff,n_add,r_m\n", result.parameter.name());
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.value),
            r.branch,
            fmt_opt(r.omega_eff),
            fmt_num(r.n_add),
            fmt_num(r.r_m)
        );
    }
    out
}

pub fn thermal_csv(rows: &[ThermalRatio]) -> String {
    let mut out = String::from("omega,s_th_ratio\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", fmt_num(r.omega), fmt_num(r.ratio));
    }
    out
}

pub fn bandwidth_csv(threshold: f64, intervals: &[Interval]) -> String {
    let mut out = format!(
        "# sub-threshold intervals of n_add < {}\nstart,stop,width\n",
        fmt_num(threshold)
    );
    for i in intervals {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_num(i.start),
            fmt_num(i.stop),
            fmt_num(i.width())
        );
    }
    out
}

/// One row per phase: couplings, hybrid frequencies and dark label.
pub fn modes_csv(rows: &[(f64, HybridModes)]) -> String {
    let mut out = String::from(
        "phi,g_plus_re,g_plus_im,g_minus_re,g_minus_im,g_plus_abs,g_minus_abs,omega_plus,omega_minus,dark\n",
    );
    for (phi, m) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_num(*phi),
            fmt_num(m.g_plus.re),
            fmt_num(m.g_plus.im),
            fmt_num(m.g_minus.re),
            fmt_num(m.g_minus.im),
            fmt_num(m.g_plus.norm()),
            fmt_num(m.g_minus.norm()),
            fmt_num(m.omega_plus),
            fmt_num(m.omega_minus),
            m.dark_label
        );
    }
    out
}

/// Machine-readable validation record stream, one line per variant and
/// frequency.
pub fn validation_records_csv(report: &ValidationReport) -> String {
    let mut out = String::from("variant,omega,dev_a1,dev_a2,dev_a3,dev_a4\n");
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.variant,
            fmt_num(r.omega),
            fmt_num(r.deviation[0]),
            fmt_num(r.deviation[1]),
            fmt_num(r.deviation[2]),
            fmt_num(r.deviation[3])
        );
    }
    out
}
