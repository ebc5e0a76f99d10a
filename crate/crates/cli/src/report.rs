//! Report rows and their CSV / JSON serializations.
//!
//! CSV is RFC-4180 (quoting only where needed), decimal point '.', reals at
//! 17 significant digits; the JSON file mirrors the CSV rows one-to-one.

use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PassState {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "report-only")]
    ReportOnly,
}

impl PassState {
    pub fn gate(ok: bool) -> Self {
        if ok {
            PassState::Pass
        } else {
            PassState::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            PassState::Pass => "pass",
            PassState::Fail => "fail",
            PassState::ReportOnly => "report-only",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub n: String,
    pub d: usize,
    pub a: Option<f64>,
    pub statistic: String,
    pub value: f64,
    pub se_or_band: f64,
    pub bound_or_target: f64,
    pub rule: String,
    pub pass: PassState,
}

/// 17 significant digits, '.' separator.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(
        "experiment,n,d,a,statistic,value,se_or_band,bound_or_target,rule,pass\n",
    );
    for r in rows {
        let a = r.a.map(fmt_real).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.experiment),
            csv_field(&r.n),
            r.d,
            a,
            csv_field(&r.statistic),
            fmt_real(r.value),
            fmt_real(r.se_or_band),
            fmt_real(r.bound_or_target),
            csv_field(&r.rule),
            r.pass.as_str(),
        ));
    }
    out
}

/// Sort key used before writing: worker scheduling must never affect bytes.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|x, y| {
        (&x.experiment, &x.n, &x.statistic)
            .cmp(&(&y.experiment, &y.n, &y.statistic))
            .then(
                x.a.unwrap_or(f64::NEG_INFINITY)
                    .total_cmp(&y.a.unwrap_or(f64::NEG_INFINITY)),
            )
    });
}

/// Write `<out>/<stem>-<unix-seconds>.csv` and `.json`; returns the paths.
pub fn write_outputs(
    out_dir: &Path,
    stem: &str,
    rows: &[ReportRow],
) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)?;
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let csv_path = out_dir.join(format!("{stem}-{ts}.csv"));
    let json_path = out_dir.join(format!("{stem}-{ts}.json"));
    std::fs::File::create(&csv_path)?.write_all(rows_to_csv(rows).as_bytes())?;
    let json = serde_json::to_string_pretty(rows).expect("rows serialize");
    std::fs::File::create(&json_path)?.write_all(json.as_bytes())?;
    Ok((csv_path, json_path))
}

/// Write an arbitrary raw CSV (header + rows of preformatted fields).
pub fn write_raw_csv(
    out_dir: &Path,
    stem: &str,
    header: &str,
    lines: &[String],
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let path = out_dir.join(format!("{stem}-{ts}.csv"));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(f, "{header}")?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    Ok(path)
}
