//! Deterministic text output: fixed-format numbers, CSV tables, and the run
//! manifest that accompanies every file written by the CLI.
//!
//! All numbers are rendered through one formatter so that identical inputs
//! produce byte-identical files: positional decimal with 12 significant
//! digits, and lowercase `inf` / `-inf` / `nan` for the non-finite values
//! that legitimately appear in physics columns (divergent ratios, quantities
//! undefined at a resonance).

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

/// Fixed 12-significant-digit decimal rendering.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0.000000000000".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-18..=15).contains(&mag) {
        // Positional notation would either clip the significant digits or
        // stretch absurdly wide; scientific keeps all 12 digits.
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).clamp(0, 30) as usize;
    format!("{x:.decimals$}")
}

/// In-memory CSV with a mandatory header row. Rendering uses `,` with no
/// quoting; cell content is expected to be comma-free (ours always is).
#[derive(Clone, Debug)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(
            row.len(),
            self.header.len(),
            "CSV row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_string())
    }
}

impl std::fmt::Display for CsvTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Flat, sorted `key = value` record of everything needed to reproduce an
/// output file byte-for-byte (modulo the timestamp entry). Written next to
/// the output as `<name>.manifest`.
#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    entries: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(tool_version: &str) -> Self {
        let mut m = RunManifest::default();
        m.set("tool_version", tool_version);
        m
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_float(&mut self, key: &str, x: f64) -> &mut Self {
        self.set(key, fmt_sig(x))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// `<output path>.manifest`
    pub fn manifest_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_os_string();
        s.push(".manifest");
        PathBuf::from(s)
    }

    pub fn write_alongside(&self, out: &Path) -> io::Result<PathBuf> {
        let path = Self::manifest_path(out);
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_fixed_width_in_significance() {
        assert_eq!(fmt_sig(3.0), "3.00000000000");
        assert_eq!(fmt_sig(0.25), "0.250000000000");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.0), "-2.00000000000");
        assert_eq!(fmt_sig(0.0), "0.000000000000");
        assert_eq!(fmt_sig(-0.0), "0.000000000000");
        assert_eq!(fmt_sig(1e-3), "0.00100000000000");
        assert_eq!(fmt_sig(123.456), "123.456000000");
        assert_eq!(fmt_sig(1e-33), "1.00000000000e-33");
        assert_eq!(fmt_sig(2.5e20), "2.50000000000e20");
    }

    #[test]
    fn non_finite_literals_are_lowercase() {
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn csv_has_header_and_trailing_newline() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push_row([fmt_sig(1.0), "x".to_string()]);
        assert_eq!(t.to_string(), "a,b\n1.00000000000,x\n");
        assert_eq!(t.n_rows(), 1);
    }

    #[test]
    #[should_panic(expected = "width")]
    fn csv_rejects_ragged_rows() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push_row(["only one"]);
    }

    #[test]
    fn manifest_is_sorted_and_stable() {
        let mut m = RunManifest::new("0.1.0");
        m.set("zeta", 1).set("alpha", "two").set_float("gamma", 0.5);
        let r = m.render();
        assert_eq!(
            r,
            "alpha = two\ngamma = 0.500000000000\ntool_version = 0.1.0\nzeta = 1\n"
        );
        assert_eq!(m.render(), r, "rendering must be pure");
        assert_eq!(m.get("alpha"), Some("two"));
    }

    #[test]
    fn manifest_path_appends_suffix() {
        let p = RunManifest::manifest_path(Path::new("out/sweep.csv"));
        assert_eq!(p, PathBuf::from("out/sweep.csv.manifest"));
    }

    #[test]
    fn manifest_writes_next_to_the_output() {
        let dir = std::env::temp_dir().join("wqed_report_test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("table.csv");
        let m = RunManifest::new("0.1.0");
        let written = m.write_alongside(&out).unwrap();
        assert!(written.ends_with("table.csv.manifest"));
        let body = std::fs::read_to_string(&written).unwrap();
        assert!(body.contains("tool_version = 0.1.0"));
        std::fs::remove_file(&written).unwrap();
    }
}
