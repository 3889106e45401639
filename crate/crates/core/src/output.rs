//! Deterministic CSV/JSON emission and run manifests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::params::{DerivedParams, SystemParams};

/// Significant digits kept in data files.
pub const SIG_DIGITS: usize = 12;

/// Shortest representation that round-trips the value rounded to 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-3..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<&'static str>,
    body: String,
}

pub enum Cell<'a> {
    F(f64),
    U(usize),
    S(&'a str),
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), body: String::new() }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        assert_eq!(cells.len(), self.header.len(), "row width must match header");
        for (k, c) in cells.iter().enumerate() {
            if k > 0 {
                self.body.push(',');
            }
            match c {
                Cell::F(x) => self.body.push_str(&fmt_float(*x)),
                Cell::U(n) => write!(self.body, "{n}").expect("string write"),
                Cell::S(s) => self.body.push_str(s),
            }
        }
        self.body.push('\n');
    }

    pub fn rows(&self) -> usize {
        self.body.lines().count()
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Record written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub version: String,
    pub params: SystemParams<f64>,
    pub derived: DerivedParams<f64>,
    /// Resolved configuration, reparseable by the config loader.
    pub config: String,
    pub outputs: Vec<PathBuf>,
    pub duration_s: f64,
}

/// `<path>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
