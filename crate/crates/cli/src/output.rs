use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::figures::Dataset;
use crate::{CliError, Format};

/// Formats `x` with 12 significant digits in the style of C's `%.12g`.
pub fn sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_owned()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_owned()
    } else {
        t.to_owned()
    }
}

pub fn render(data: &Dataset, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&data.columns)?;
            for row in &data.rows {
                w.write_record(row.iter().map(|&v| sig12(v)))?;
            }
            w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
        }
        Format::Json => {
            let doc = json!({
                "figure": data.figure,
                "columns": data.columns,
                "rows": data.rows,
            });
            let mut bytes = serde_json::to_vec(&doc)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place. On failure nothing is left at `path` or beside it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn to_json_line(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}
