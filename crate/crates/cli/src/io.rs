//! CSV input and output, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use csit_core::grid::{RealSeries, UniformGrid};

use crate::CliError;

/// Relative tolerance on the sample spacing of input files.
pub const SPACING_JITTER: f64 = 1e-9;

/// Fixed 17-significant-digit rendering; non-finite values become empty
/// cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn fmt_bool(v: bool) -> String {
    if v { "1" } else { "0" }.to_string()
}

/// A table of string cells under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::io)?;
        for row in &self.rows {
            w.write_record(row).map_err(CliError::io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut builder = tempfile::Builder::new();
    // Regular file mode under the process umask, not the 0600 of temp files.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(fs::Permissions::from_mode(0o666));
    }
    let mut tmp = builder
        .tempfile_in(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes).map_err(CliError::io)?;
    tmp.as_file().sync_all().map_err(CliError::io)?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Reads a two-column `(coordinate, value)` CSV on a uniform grid. A header
/// line is optional; `#` lines are comments.
pub fn read_series(path: &Path) -> Result<RealSeries, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let at = |msg: String| CliError::Input(format!("{}:{line}: {msg}", path.display()));
        if record.len() < 2 {
            return Err(at(format!("expected 2 columns, found {}", record.len())));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(v)) => {
                if !x.is_finite() || !v.is_finite() {
                    return Err(at("non-finite value".into()));
                }
                xs.push(x);
                vs.push(v);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(at(format!(
                    "cannot parse '{}', '{}' as numbers",
                    &record[0], &record[1]
                )))
            }
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(CliError::Input(format!(
            "{}: need at least 2 samples, found {n}",
            path.display()
        )));
    }
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(CliError::Input(format!(
            "{}: coordinates must increase",
            path.display()
        )));
    }
    for (j, w) in xs.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > SPACING_JITTER * dx {
            return Err(CliError::Input(format!(
                "{}: sample {} breaks the uniform spacing {dx:e} (step {:e})",
                path.display(),
                j + 1,
                w[1] - w[0]
            )));
        }
    }
    let grid = UniformGrid::new(xs[0], dx * n as f64, n).map_err(|e| CliError::Input(e.to_string()))?;
    RealSeries::new(grid, vs).map_err(|e| CliError::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(f64::NAN), "");
        assert_eq!(fmt_f64(f64::INFINITY), "");
    }

    #[test]
    fn table_uses_newlines() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "".into()]);
        assert_eq!(t.to_bytes().unwrap(), b"a,b\n1,\n");
    }

    #[test]
    fn reads_uniform_series_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "t,value\n0,1\n0.5,2\n1.0,3\n").unwrap();
        let s = read_series(&path).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.grid().len(), 3);
        assert!((s.grid().length() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "0,1\n1,2\n2,oops\n").unwrap();
        let err = read_series(&path).unwrap_err().to_string();
        assert!(err.contains(":3:"), "{err}");
        fs::write(&path, "0,1\n1,2\n2.5,3\n").unwrap();
        assert!(read_series(&path).unwrap_err().to_string().contains("uniform"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            let mode = fs::metadata(&path).unwrap().permissions().mode();
            assert_ne!(mode & 0o044, 0, "{mode:o}");
        }
    }
}
