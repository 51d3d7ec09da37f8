//! CSV and JSON plumbing shared by the command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, MacromicError, Result};
use crate::linalg::{c, CMatrix};
use crate::spectra::DensityMatrix;

/// Formats `x` with 12 significant digits, shortest round-trip form, `.` as separator.
/// Zero prints as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".to_owned() } else if x > 0.0 { "inf".to_owned() } else { "-inf".to_owned() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("scientific notation round-trips");
    format!("{rounded:?}")
}

/// A CSV table with a fixed header. Cells are stored already formatted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Vec<String>>) {
        rows.into_iter().for_each(|r| self.push(r));
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// UTF-8 text with LF line endings and a trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Array of objects keyed by header; numeric cells become JSON numbers.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        let value = v
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .and_then(serde_json::Number::from_f64)
                            .map(serde_json::Value::Number)
                            .unwrap_or_else(|| serde_json::Value::String(v.clone()));
                        (k.clone(), value)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

/// Parses a density matrix from JSON: a row-major list of `[re, im]` pairs of length `d²`,
/// or a list of rows of such pairs.
pub fn density_matrix_from_json(text: &str) -> Result<DensityMatrix> {
    let entries: Vec<[f64; 2]> = match serde_json::from_str::<MatrixJson>(text)? {
        MatrixJson::Flat(v) => v,
        MatrixJson::Rows(rows) => {
            let d = rows.len();
            if let Some(bad) = rows.iter().find(|r| r.len() != d) {
                return Err(MacromicError::DimensionMismatch { expected: d, found: bad.len() });
            }
            rows.into_iter().flatten().collect()
        }
    };
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != entries.len() {
        return domain(format!("{} entries do not form a square matrix", entries.len()));
    }
    DensityMatrix::new(CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = entries[i * d + j];
        c(re, im)
    }))
}

pub fn read_density_matrix(path: &Path) -> Result<DensityMatrix> {
    density_matrix_from_json(&std::fs::read_to_string(path)?)
}

/// Row-major `[re, im]` pairs, the inverse of [`density_matrix_from_json`].
pub fn density_matrix_to_json(rho: &DensityMatrix) -> String {
    let m = rho.entries();
    let d = rho.dim();
    let pairs: Vec<[f64; 2]> = (0..d).flat_map(|i| (0..d).map(move |j| [m[(i, j)].re, m[(i, j)].im])).collect();
    serde_json::to_string(&pairs).expect("finite numbers serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Reproducibility record written next to an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub output_path: String,
    pub format: OutputFormat,
}

impl RunManifest {
    /// `<output>.manifest.json`
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = Self::path_for(Path::new(&self.output_path));
        std::fs::write(&path, self.to_json())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1.0");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e-20), "6.66666666667e-21");
        assert_eq!(format_number(123456789012345.0), "123456789012000.0");
        assert_eq!(format_number(f64::INFINITY), "inf");
    }

    #[test]
    fn formatted_numbers_reparse_to_twelve_digits() {
        for &x in &[std::f64::consts::PI, -std::f64::consts::E * 1e7, 1.23456789012345e-9] {
            let y: f64 = format_number(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 5e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,x\n");
        assert_eq!(t.to_json()[0]["a"], serde_json::json!(1.0));
        assert_eq!(t.to_json()[0]["b"], serde_json::json!("x"));
    }

    #[test]
    fn density_matrix_json_round_trip() {
        let rho = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let back = density_matrix_from_json(&density_matrix_to_json(&rho)).unwrap();
        assert!(rho.max_entry_distance(&back) == 0.0);
        let nested = density_matrix_from_json("[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]").unwrap();
        assert!((nested.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(density_matrix_from_json("[[1,0],[0,0],[0,0]]").is_err());
        assert!(density_matrix_from_json("[[2,0],[0,0],[0,0],[0,0]]").is_err());
        assert!(density_matrix_from_json("{\"a\":1}").is_err());
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(RunManifest::path_for(Path::new("out/fig2.csv")), PathBuf::from("out/fig2.csv.manifest.json"));
        let m = RunManifest {
            command: "mi".into(),
            parameters: BTreeMap::from([("delta".into(), "1".into())]),
            seed: 7,
            output_path: "x.csv".into(),
            format: OutputFormat::Csv,
        };
        let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
