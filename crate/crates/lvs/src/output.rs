//! CSV tables, the run manifest, and writing both to disk.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Version string in `git describe` style.
pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// `v` with 9 significant digits, fixed notation for moderate exponents and
/// scientific otherwise; trailing zeros are dropped.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Rectangular table with a mandatory header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| (*s).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    /// Trials per hypothesis actually simulated; 0 for analytic scenarios.
    pub trials: usize,
    pub threads: usize,
    /// Merged configuration, echoed as resolved from all layers.
    pub config: serde_json::Value,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
    pub notes: Vec<String>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// Writes `<scenario>.csv`, then the manifest; the manifest only appears
/// once the CSV is in place.
pub fn write_outputs(
    out_dir: &Path,
    scenario: &str,
    table: &Table,
    mut manifest: RunManifest,
) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(out_dir)?;
    let csv_name = format!("{scenario}.csv");
    let csv_path = out_dir.join(&csv_name);
    write_atomic(&csv_path, &table.to_csv()?)?;
    manifest.outputs = vec![csv_name];
    let manifest_path = out_dir.join(format!("{scenario}.manifest.json"));
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(io::Error::other)?;
    json.push(b'\n');
    write_atomic(&manifest_path, &json)?;
    Ok((csv_path, manifest_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-25.0), "-25");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(2.0 / 3.0 * 1e-3), "0.000666666667");
        assert_eq!(format_float(123456789.0), "123456789");
        assert_eq!(format_float(1234567891.0), "1.23456789e9");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(9.9999999999), "10");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    proptest! {
        #[test]
        fn formatting_keeps_nine_significant_digits(v in prop::num::f64::NORMAL) {
            let s = format_float(v);
            let back: f64 = s.parse().unwrap();
            prop_assert!(((back - v) / v).abs() <= 5.0e-9, "{v} -> {s}");
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit)
                .skip_while(|&c| c == '0').count();
            prop_assert!(digits <= 9, "{v} -> {s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["rule", "k", "x"]);
        t.push(vec!["lrt_exact".into(), 4usize.into(), 0.5.into()]);
        t.push(vec!["lrt_ffa".into(), 8usize.into(), (-1e-12).into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "rule,k,x\nlrt_exact,4,0.5\nlrt_ffa,8,-1e-12\n");
    }

    #[test]
    fn manifest_follows_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["a"]);
        t.push(vec![1.0.into()]);
        let manifest = RunManifest {
            scenario: "demo".into(),
            version: version_string(),
            seed: 1,
            trials: 0,
            threads: 1,
            config: serde_json::json!({}),
            wall_time_s: 0.0,
            outputs: vec![],
            summary: serde_json::json!({}),
            notes: vec![],
        };
        let (csv, json) = write_outputs(dir.path(), "demo", &t, manifest).unwrap();
        assert!(csv.exists() && json.exists());
        let m: serde_json::Value = serde_json::from_slice(&fs::read(json).unwrap()).unwrap();
        assert_eq!(m["outputs"], serde_json::json!(["demo.csv"]));
        assert!(!dir.path().join("demo.csv.tmp").exists());
    }
}
