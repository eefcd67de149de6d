//! Result records and their CSV / JSON-lines serialization.
//!
//! Raw CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `trial` | trial index |
//! | `scheme` | scheme tag |
//! | `sweep_parameter` | swept key, empty outside sweeps |
//! | `sweep_value` | swept value, empty outside sweeps |
//! | `theta_true` | true eavesdropper azimuth (rad) |
//! | `theta_hat` | estimated azimuth (rad) |
//! | `crb` | bound used for the uncertainty region (rad²) |
//! | `secrecy` | worst-user secrecy rate against the true eavesdropper (bit/s/Hz) |
//! | `surrogate` | smoothed surrogate at termination |
//! | `ao_iterations` | outer iterations used |
//! | `converged` | outer loop met its tolerance |
//! | `phi_arr` | array rotation (rad) |
//! | `varphi` | element orientations (rad), `;`-separated |
//! | `status` | `ok` or a failure diagnostic |
//! | `wall_ms` | design time, only with timing enabled |
//!
//! Floats carry 12 significant digits.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::scheme::SchemeTag;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub trial: usize,
    pub scheme: SchemeTag,
    pub sweep_parameter: Option<String>,
    pub sweep_value: Option<f64>,
    pub theta_true: f64,
    pub theta_hat: f64,
    pub crb: f64,
    pub secrecy: f64,
    pub surrogate: f64,
    pub ao_iterations: usize,
    pub converged: bool,
    pub phi_arr: f64,
    pub varphi: Vec<f64>,
    pub status: String,
    pub wall_ms: f64,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub const CSV_COLUMNS: [&str; 14] = [
    "trial",
    "scheme",
    "sweep_parameter",
    "sweep_value",
    "theta_true",
    "theta_hat",
    "crb",
    "secrecy",
    "surrogate",
    "ao_iterations",
    "converged",
    "phi_arr",
    "varphi",
    "status",
];

/// `x` with 12 significant digits: positional notation for moderate
/// exponents, scientific otherwise, trailing zeros removed.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to the value its 12-digit text represents.
pub fn round_sig(x: f64) -> f64 {
    fmt_float(x).parse().unwrap_or(x)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(out: &mut W, records: &[ResultRecord], timing: bool) -> io::Result<()> {
    let mut header = CSV_COLUMNS.join(",");
    if timing {
        header.push_str(",wall_ms");
    }
    writeln!(out, "{header}")?;
    for r in records {
        let varphi: Vec<String> = r.varphi.iter().map(|v| fmt_float(*v)).collect();
        let mut row = vec![
            r.trial.to_string(),
            r.scheme.to_string(),
            csv_field(r.sweep_parameter.as_deref().unwrap_or("")),
            r.sweep_value.map(fmt_float).unwrap_or_default(),
            fmt_float(r.theta_true),
            fmt_float(r.theta_hat),
            fmt_float(r.crb),
            fmt_float(r.secrecy),
            fmt_float(r.surrogate),
            r.ao_iterations.to_string(),
            r.converged.to_string(),
            fmt_float(r.phi_arr),
            varphi.join(";"),
            csv_field(&r.status),
        ];
        if timing {
            row.push(fmt_float(r.wall_ms));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// One JSON object per line with the same fields as the CSV.
pub fn write_jsonl<W: Write>(out: &mut W, records: &[ResultRecord], timing: bool) -> io::Result<()> {
    for r in records {
        let mut value = serde_json::json!({
            "trial": r.trial,
            "scheme": r.scheme,
            "sweep_parameter": r.sweep_parameter,
            "sweep_value": r.sweep_value.map(round_sig),
            "theta_true": round_sig(r.theta_true),
            "theta_hat": round_sig(r.theta_hat),
            "crb": round_sig(r.crb),
            "secrecy": round_sig(r.secrecy),
            "surrogate": round_sig(r.surrogate),
            "ao_iterations": r.ao_iterations,
            "converged": r.converged,
            "phi_arr": round_sig(r.phi_arr),
            "varphi": r.varphi.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
            "status": r.status,
        });
        if timing {
            value["wall_ms"] = serde_json::json!(round_sig(r.wall_ms));
        }
        writeln!(out, "{value}")?;
    }
    Ok(())
}

/// Aggregate of the successful records of one (swept value, scheme) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_parameter: Option<String>,
    pub sweep_value: Option<f64>,
    pub scheme: SchemeTag,
    pub n: usize,
    pub failed: usize,
    pub mean_secrecy: f64,
    /// Standard error of the mean (sample standard deviation over `√n`).
    pub stderr_secrecy: f64,
    pub mean_surrogate: f64,
    pub mean_ao_iterations: f64,
    pub mean_wall_ms: f64,
}

/// Cells in order of first appearance.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<(Option<String>, Option<u64>, SchemeTag)> = Vec::new();
    let mut groups: BTreeMap<(Option<String>, Option<u64>, SchemeTag), Vec<&ResultRecord>> =
        BTreeMap::new();
    for r in records {
        let key = (r.sweep_parameter.clone(), r.sweep_value.map(f64::to_bits), r.scheme);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let ok: Vec<&&ResultRecord> = rows.iter().filter(|r| r.is_ok()).collect();
            let n = ok.len();
            let mean = |f: &dyn Fn(&ResultRecord) -> f64| {
                if n == 0 {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / n as f64
                }
            };
            let mean_secrecy = mean(&|r| r.secrecy);
            let stderr_secrecy = if n > 1 {
                let var = ok
                    .iter()
                    .map(|r| (r.secrecy - mean_secrecy).powi(2))
                    .sum::<f64>()
                    / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                sweep_parameter: key.0.clone(),
                sweep_value: key.1.map(f64::from_bits),
                scheme: key.2,
                n,
                failed: rows.len() - n,
                mean_secrecy,
                stderr_secrecy,
                mean_surrogate: mean(&|r| r.surrogate),
                mean_ao_iterations: mean(&|r| r.ao_iterations as f64),
                mean_wall_ms: mean(&|r| r.wall_ms),
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(out: &mut W, rows: &[SummaryRow], timing: bool) -> io::Result<()> {
    let mut header = String::from(
        "sweep_parameter,sweep_value,scheme,n,failed,mean_secrecy,stderr_secrecy,mean_surrogate,mean_ao_iterations",
    );
    if timing {
        header.push_str(",mean_wall_ms");
    }
    writeln!(out, "{header}")?;
    for s in rows {
        let mut row = vec![
            csv_field(s.sweep_parameter.as_deref().unwrap_or("")),
            s.sweep_value.map(fmt_float).unwrap_or_default(),
            s.scheme.to_string(),
            s.n.to_string(),
            s.failed.to_string(),
            fmt_float(s.mean_secrecy),
            fmt_float(s.stderr_secrecy),
            fmt_float(s.mean_surrogate),
            fmt_float(s.mean_ao_iterations),
        ];
        if timing {
            row.push(fmt_float(s.mean_wall_ms));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
