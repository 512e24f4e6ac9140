//! Run directories, CSV tables and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Twelve significant digits, scientific notation.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.11e}")
    }
}

/// CSV cell.
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

/// Shorthand for `quantity,value` summary tables.
pub fn kv(rows: Vec<(&str, Cell)>) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in rows {
        t.row(vec![k.into(), v]);
    }
    t
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: &'a str,
    seed: u64,
    tool_version: &'a str,
    outputs: BTreeMap<String, String>,
    timings_ms: BTreeMap<String, f64>,
}

/// Output directory for one run, created on construction.
pub struct Run {
    pub dir: PathBuf,
    command: String,
    hash: String,
    seed: u64,
    files: BTreeMap<String, String>,
    timings: BTreeMap<String, f64>,
    clock: Instant,
}

impl Run {
    /// `<out>/<command>-<hash>`; an existing directory is an error unless
    /// `force` is set, in which case it is replaced.
    pub fn create(out: &Path, command: &str, resolved: &str, seed: u64, force: bool) -> Result<Self, CliError> {
        let hash = sha256_hex(format!("{command}\n{resolved}").as_bytes());
        let dir = out.join(format!("{command}-{}", &hash[..16]));
        if dir.exists() {
            if !force {
                return Err(CliError::Exists(dir));
            }
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        let mut run = Self {
            dir,
            command: command.into(),
            hash,
            seed,
            files: BTreeMap::new(),
            timings: BTreeMap::new(),
            clock: Instant::now(),
        };
        run.write("config.resolved", resolved)?;
        Ok(run)
    }

    pub fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(name), body)?;
        self.files.insert(name.into(), sha256_hex(body.as_bytes()));
        Ok(())
    }

    /// Adds a file written by other means to the manifest.
    pub fn register(&mut self, name: &str) -> Result<(), CliError> {
        let body = fs::read(self.dir.join(name))?;
        self.files.insert(name.into(), sha256_hex(&body));
        Ok(())
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<(), CliError> {
        self.write(name, &t.render())
    }

    /// Records the time since the previous mark under `stage`.
    pub fn mark(&mut self, stage: &str) {
        let ms = self.clock.elapsed().as_secs_f64() * 1e3;
        self.timings.insert(stage.into(), ms);
        self.clock = Instant::now();
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let m = Manifest {
            command: &self.command,
            config_hash: &self.hash,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            outputs: self.files.clone(),
            timings_ms: self.timings.clone(),
        };
        let body = serde_json::to_string_pretty(&m).map_err(|e| CliError::Config(e.to_string()))?;
        fs::write(self.dir.join("manifest.json"), body + "\n")?;
        Ok(self.dir)
    }
}
