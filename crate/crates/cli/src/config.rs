//! Line-oriented `key = value` experiment configs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use parametrix_core::expr::Expr;
use parametrix_core::operator::parse_coeff_line;
use parametrix_core::{EllipticOperator, GridDomain, GridFunction, YoungFunction};

use crate::CliError;

/// One accepted key: name, default (`None` = required) and a short note.
pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn key(name: &'static str, default: Option<&'static str>, doc: &'static str) -> Key {
    Key { name, default, doc }
}

const SEED: Key = key("seed", Some("0"), "random seed (overridden by --seed)");
const YOUNG: Key = key("young", Some("power:p=2"), "power:p=..[,c=..] | power-log:p=.. | exp[:c=..] | table:<csv>");
const GRID_N_DIM: Key = key("grid.n", Some("1"), "dimension");
const GRID_N: Key = key("grid.N", Some("64"), "points per axis");
const GRID_D: Key = key("grid.d", Some("2"), "cube side");
const MASK: Key = key("mask", Some("full"), "full | ball:<r> | box:<lo>,<hi> | file:<path>");

pub fn schema(command: &str) -> Vec<Key> {
    let mut keys = vec![SEED];
    match command {
        "young" => keys.extend([
            key("young", None, "young function to analyse"),
            key("complementary.v_min", Some("0.01"), "first tabulated v"),
            key("complementary.v_max", Some("100"), "last tabulated v"),
            key("complementary.count", Some("41"), "log-spaced table rows"),
            key("delta2.u0", Some("1"), "start of the doubling window"),
            key("delta2.u_max", Some("auto"), "end of the window; auto = min(1e6, cap/2)"),
        ]),
        "norms" => keys.extend([
            YOUNG,
            GRID_N_DIM,
            GRID_N,
            GRID_D,
            MASK,
            key("f", Some("indicator"), "indicator | bump:<R> | poly:<R> | expr:<e> | file:<path>"),
            key("g", Some("f"), "second input of the inequality suite; f reuses f"),
            key("shifts", Some("8,4,2,1,0"), "shift moduli steps along x1"),
            key("dual.trials", Some("64"), "random dual witnesses"),
            key("inequality.trials", Some("0"), "extra seeded random (f, g, M) triples"),
        ]),
        "mollify" => keys.extend([
            YOUNG,
            GRID_N_DIM,
            GRID_N,
            GRID_D,
            MASK,
            key("f", Some("indicator"), "indicator | bump:<R> | poly:<R> | expr:<e> | file:<path>"),
            key("eps", Some("0.4,0.2,0.1"), "mollifier radii"),
        ]),
        "shift" => keys.extend([
            YOUNG,
            key("grid.n", Some("2"), "dimension"),
            GRID_N,
            key("grid.d", Some("1"), "cube side"),
            MASK,
            key("f", Some("bump:0.25"), "bump:<R> | poly:<R> | indicator | expr:<e> | file:<path>"),
            key("kernel", Some("cos2theta"), "cos2theta | <named kernel>:(p1,..,pn)"),
            key("shifts", Some("16,8,4,2,1,0"), "shift steps along x1"),
            key("multiplier", Some("none"), "none | expr:<e>"),
            key("multiplier.eps", Some("auto"), "mollifier radius for the split; auto = 4h"),
        ]),
        "solve" | "contraction" => {
            keys.extend([
                key("operator", None, "named operator or n=<n>,m=<m> followed by coeff lines"),
                key("kernel", Some("auto"), "auto | laplace2d | laplace3d | biharmonic2d | biharmonic3d | aniso2:<entries>"),
                YOUNG,
                key("x0", Some("origin"), "comma-separated point"),
                GRID_N,
                key("sigma.probes", Some("8"), "probes per radius"),
                key("sigma.radii", Some("0.4,0.2,0.1,0.05"), "radius ladder"),
            ]);
            if command == "solve" {
                keys.extend([
                    key("r", Some("0.2"), "working radius"),
                    key("tol", Some("1e-6"), "relative step tolerance"),
                    key("k_max", Some("200"), "iteration cap"),
                    key("f", None, "expr:<e> | file:<path> | manufactured:<u*>, u* = poly:<R> | bump:<R> | expr:<e>"),
                ]);
            }
        }
        _ => {}
    }
    keys
}

pub const COMMANDS: [&str; 6] = ["young", "norms", "solve", "contraction", "mollify", "shift"];

/// Parsed config with defaults filled in.
#[derive(Debug, Clone)]
pub struct Config {
    pub command: String,
    values: BTreeMap<String, String>,
    order: Vec<String>,
    pub coeff_lines: Vec<(usize, String)>,
    base: PathBuf,
}

impl Config {
    pub fn parse(command: &str, text: &str, base: &Path) -> Result<Self, CliError> {
        let keys = schema(command);
        let mut values = BTreeMap::new();
        let mut lines_of = BTreeMap::new();
        let mut coeff_lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("coeff") {
                if rest.starts_with(char::is_whitespace) {
                    coeff_lines.push((line_no, rest.trim().to_string()));
                    continue;
                }
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::config(line_no, format!("expected key = value, got '{line}'")));
            };
            let (k, v) = (k.trim(), v.trim());
            if !keys.iter().any(|s| s.name == k) {
                return Err(CliError::config(line_no, format!("unknown key '{k}' for {command}")));
            }
            if let Some(prev) = lines_of.insert(k.to_string(), line_no) {
                return Err(CliError::config(line_no, format!("'{k}' already set on line {prev}")));
            }
            values.insert(k.to_string(), v.to_string());
        }
        if values.is_empty() && coeff_lines.is_empty() {
            return Err(CliError::Usage(format!("empty config for {command}")));
        }
        if !coeff_lines.is_empty() && !keys.iter().any(|s| s.name == "operator") {
            return Err(CliError::config(coeff_lines[0].0, format!("coeff lines are not accepted by {command}")));
        }
        for s in &keys {
            if !values.contains_key(s.name) {
                match s.default {
                    Some(d) => {
                        values.insert(s.name.to_string(), d.to_string());
                    }
                    None => return Err(CliError::Config(format!("missing required key '{}'", s.name))),
                }
            }
        }
        Ok(Self {
            command: command.to_string(),
            values,
            order: keys.iter().map(|s| s.name.to_string()).collect(),
            coeff_lines,
            base: base.to_path_buf(),
        })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    /// Config text with every default materialised, in schema order.
    pub fn resolved(&self) -> String {
        let docs = schema(&self.command);
        let mut out = String::new();
        for k in &self.order {
            let doc = docs.iter().find(|s| s.name == k).map(|s| s.doc).unwrap_or("");
            let _ = writeln!(out, "{k} = {}  # {doc}", self.get(k));
        }
        for (_, c) in &self.coeff_lines {
            let _ = writeln!(out, "coeff {c}");
        }
        out
    }

    fn bad(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{key} = {}: {msg}", self.get(key)))
    }

    pub fn path(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.get(key).parse().map_err(|_| self.bad(key, "not a number"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.get(key).parse().map_err(|_| self.bad(key, "not a nonnegative integer"))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.get(key).parse().map_err(|_| self.bad(key, "not a nonnegative integer"))
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.get(key)
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| self.bad(key, format!("'{s}' is not a number"))))
            .collect()
    }

    pub fn list_i64(&self, key: &str) -> Result<Vec<i64>, CliError> {
        self.get(key)
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| self.bad(key, format!("'{s}' is not an integer"))))
            .collect()
    }

    pub fn young(&self) -> Result<YoungFunction, CliError> {
        let text = self.get("young");
        match text.strip_prefix("table:") {
            Some(p) => YoungFunction::from_table_file(&self.path(p.trim())).map_err(|e| self.bad("young", e)),
            None => YoungFunction::parse(text).map_err(|e| self.bad("young", e)),
        }
    }

    /// Cube from `grid.*` with the configured mask.
    pub fn domain(&self) -> Result<GridDomain, CliError> {
        let g = GridDomain::new(self.usize("grid.n")?, self.usize("grid.N")?, self.f64("grid.d")?)
            .map_err(|e| CliError::Config(format!("grid: {e}")))?;
        let n = g.n();
        let mask = self.get("mask");
        let out = if mask == "full" {
            Ok(g.clone())
        } else if let Some(r) = mask.strip_prefix("ball:") {
            let r: f64 = r.trim().parse().map_err(|_| self.bad("mask", "bad radius"))?;
            g.with_ball_mask(&vec![0.0; n], r)
        } else if let Some(b) = mask.strip_prefix("box:") {
            let v: Vec<f64> = b.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| self.bad("mask", "bad bounds"))?;
            if v.len() != 2 {
                return Err(self.bad("mask", "box needs lo,hi"));
            }
            g.with_mask_fn(|x| x.iter().all(|&c| c >= v[0] && c < v[1]))
        } else if let Some(p) = mask.strip_prefix("file:") {
            GridFunction::read_mask(&self.path(p.trim()), &g)
        } else {
            return Err(self.bad("mask", "unknown mask"));
        };
        out.map_err(|e| self.bad("mask", e))
    }

    /// Grid function from an `f`-style key on `domain`. `manufactured:`
    /// takes any other form, or `poly:<R>` for the C³ polynomial bump.
    pub fn function(&self, key: &str, domain: &GridDomain) -> Result<GridFunction, CliError> {
        let v = self.get(key);
        let v = v.strip_prefix("manufactured:").unwrap_or(v).trim();
        let radius = |r: &str| r.trim().parse::<f64>().map_err(|_| self.bad(key, "bad radius"));
        let out = if v == "indicator" {
            Ok(GridFunction::mask_indicator(domain))
        } else if let Some(r) = v.strip_prefix("bump:") {
            Ok(parametrix_core::probes::mollifier_bump(domain, domain.center(), radius(r)?))
        } else if let Some(r) = v.strip_prefix("poly:") {
            Ok(parametrix_core::probes::polynomial_bump(domain, domain.center(), radius(r)?))
        } else if let Some(e) = v.strip_prefix("expr:") {
            let e = self.expr(key, e, domain.n())?;
            Ok(GridFunction::from_fn(domain, |x| e.eval(x)))
        } else if let Some(p) = v.strip_prefix("file:") {
            GridFunction::read_text(&self.path(p.trim())).and_then(|f| f.with_domain(domain))
        } else {
            return Err(self.bad(key, "expected indicator, bump:<R>, poly:<R>, expr:<e> or file:<path>"));
        };
        out.map_err(|e| self.bad(key, e))
    }

    fn expr(&self, key: &str, src: &str, n: usize) -> Result<Expr, CliError> {
        let e = Expr::parse(src).map_err(|e| self.bad(key, e))?;
        if e.dimension_used() > n {
            return Err(self.bad(key, format!("uses x{} in {n} dimensions", e.dimension_used())));
        }
        Ok(e)
    }

    pub fn expr_value(&self, key: &str, prefix: &str, n: usize) -> Result<Option<Expr>, CliError> {
        match self.get(key).strip_prefix(prefix) {
            Some(src) => self.expr(key, src, n).map(Some),
            None => Ok(None),
        }
    }

    /// `operator = <named>` or `operator = n=<n>,m=<m>` with coeff lines.
    pub fn operator(&self) -> Result<EllipticOperator, CliError> {
        let v = self.get("operator");
        if !v.contains('=') {
            if !self.coeff_lines.is_empty() {
                return Err(CliError::config(self.coeff_lines[0].0, "coeff lines need operator = n=..,m=..".into()));
            }
            return parametrix_core::kernels::named_operator(v).map_err(|e| self.bad("operator", e));
        }
        let (mut n, mut m) = (None, None);
        for part in v.split(',') {
            let (k, val) = part.split_once('=').ok_or_else(|| self.bad("operator", "expected n=..,m=.."))?;
            let val: usize = val.trim().parse().map_err(|_| self.bad("operator", "bad integer"))?;
            match k.trim() {
                "n" => n = Some(val),
                "m" => m = Some(val),
                other => return Err(self.bad("operator", format!("unknown field '{other}'"))),
            }
        }
        let (Some(n), Some(m)) = (n, m) else {
            return Err(self.bad("operator", "needs both n and m"));
        };
        if self.coeff_lines.is_empty() {
            return Err(CliError::Config("operator needs at least one coeff line".into()));
        }
        let mut coeffs = Vec::new();
        for (line_no, c) in &self.coeff_lines {
            coeffs.push(parse_coeff_line(n, c).map_err(|e| CliError::config(*line_no, e.to_string()))?);
        }
        EllipticOperator::new(n, m, coeffs).map_err(|e| CliError::Config(format!("operator: {e}")))
    }

    pub fn x0(&self, n: usize) -> Result<Vec<f64>, CliError> {
        if self.get("x0") == "origin" {
            return Ok(vec![0.0; n]);
        }
        let v = self.list_f64("x0")?;
        if v.len() != n {
            return Err(self.bad("x0", format!("needs {n} coordinates")));
        }
        Ok(v)
    }
}
