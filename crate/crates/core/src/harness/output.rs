use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::run::{ResultTable, COLUMNS};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// 12 significant digits; scientific for `|x| < 1e−4` or `|x| ≥ 1e6`.
/// Trailing zeros are dropped and zero prints as `0`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-4..1e6).contains(&a) {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent present");
        return format!("{}e{exp}", trim_fraction(mantissa));
    }
    let decimals = (11 - a.log10().floor() as i32).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn cell(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

/// CSV bytes: `#` metadata lines, the fixed header, one row per node.
pub fn render_csv(table: &ResultTable) -> Vec<u8> {
    let mut out = Vec::new();
    for line in table.metadata() {
        writeln!(out, "# {line}").expect("write to Vec");
    }
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let mut header = vec!["t"];
        header.extend(COLUMNS);
        w.write_record(&header).expect("write to Vec");
        for row in table.rows() {
            let mut rec = vec![format_number(row.t)];
            rec.extend(row.values.iter().map(|v| cell(*v)));
            rec.push(row.flags.join(";"));
            w.write_record(&rec).expect("write to Vec");
        }
        w.flush().expect("write to Vec");
    }
    out
}

pub fn emit_csv(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, render_csv(table)).map_err(io_err(path))
}

/// Writes `<scenario>_<delta>.dat` into `dir` for every available delta
/// column: two whitespace-separated columns `t Δ`, no header.
pub fn emit_plotdata(table: &ResultTable, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for name in table.available_deltas() {
        let values = table.delta(name).expect("listed as available");
        let mut body = String::new();
        for (t, d) in table.times.iter().zip(&values) {
            body.push_str(&format!("{} {}\n", format_number(*t), format_number(*d)));
        }
        let path = dir.join(format!("{}_{name}.dat", table.config.scenario));
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
