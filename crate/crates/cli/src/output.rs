use std::io::Write;
use std::path::Path;

use serde_json::Value;
use zitter_core::operator_core::ComplexMatrix;

use crate::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// RFC-4180 CSV with a header row.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Config(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Config(format!("csv encoding failed: {e}")))
}

pub fn json_bytes(value: &Value) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Row-major `[re, im]` pairs.
pub fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(m.row_major().iter().map(|z| serde_json::json!([z.re, z.im])).collect())
}

/// Inverse of [`matrix_json`].
pub fn matrix_from_json(value: &Value) -> Option<ComplexMatrix> {
    let entries = value
        .as_array()?
        .iter()
        .map(|pair| {
            let pair = pair.as_array()?;
            match pair.as_slice() {
                [re, im] => Some(zitter_core::operator_core::c(re.as_f64()?, im.as_f64()?)),
                _ => None,
            }
        })
        .collect::<Option<Vec<_>>>()?;
    let dim = (entries.len() as f64).sqrt().round() as usize;
    (dim > 0 && dim * dim == entries.len()).then(|| ComplexMatrix::from_row_major(&entries))
}

/// Write to `path` through a temporary file in the same directory and a rename, or to
/// standard output when no path is given.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
