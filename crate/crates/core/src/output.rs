//! CSV serialisation of analysis results.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::SwitchPointReport;
use crate::numerics::Series;
use crate::Result;

/// `%.17g`: 17 significant digits, trailing zeros removed, `nan` for NaN.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integral exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa.to_string()), exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `time,<label>...` followed by one row per grid point.
pub fn write_series_csv(sink: impl Write, times: &[f64], series: &[Series]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let mut header = vec!["time".to_string()];
    header.extend(series.iter().map(|s| s.label.clone()));
    w.write_record(&header)?;
    for (j, t) in times.iter().enumerate() {
        let mut row = vec![format_value(*t)];
        row.extend(series.iter().map(|s| format_value(s.values[j])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar path `<stem>.crossings.txt` next to `csv`.
pub fn crossings_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.crossings.txt"))
}

/// One line per min term: `<label>: t1 t2 ...`.
pub fn crossings_text(report: &SwitchPointReport) -> String {
    let mut out = String::new();
    for t in &report.terms {
        let _ = write!(out, "{}:", t.series.label);
        for c in &t.crossings {
            let _ = write!(out, " {}", format_value(*c));
        }
        out.push('\n');
    }
    out
}

/// Write a switch-point report as CSV plus its crossings sidecar; returns
/// the paths written.
pub fn write_switchpoints(path: &Path, times: &[f64], report: &SwitchPointReport) -> Result<Vec<PathBuf>> {
    let series: Vec<Series> = report.terms.iter().map(|t| t.series.clone()).collect();
    write_series_csv(std::fs::File::create(path)?, times, &series)?;
    let sidecar = crossings_path(path);
    std::fs::write(&sidecar, crossings_text(report))?;
    Ok(vec![path.to_path_buf(), sidecar])
}

/// A gnuplot script plotting every column of `csv` against time.
pub fn gnuplot_script(csv: &Path) -> Result<String> {
    let mut r = csv::ReaderBuilder::new().from_path(csv)?;
    let header = r.headers()?.clone();
    let file = csv.display().to_string().replace('\'', "''");
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set key outside right\n");
    out.push_str("set xlabel 'time'\n");
    let plots: Vec<String> = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, label)| {
            let title = label.replace('\'', "''");
            format!("'{file}' using 1:{} with lines title '{title}'", i + 1)
        })
        .collect();
    if plots.is_empty() {
        out.push_str("# no data columns\n");
    } else {
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    }
    Ok(out)
}
