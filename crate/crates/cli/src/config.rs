//! Line-based `key = value` configuration with `[section]` headers.
//!
//! `#` starts a comment. Keys outside any section are resolved by their bare
//! name when that name is unique across sections.

use crate::error::{config, Result};
use fkslab_core::solver::{BlowupThresholds, Scheme, SolverConfig};
use fkslab_core::Grid;
use std::path::{Path, PathBuf};

/// Every accepted key, as `(section, key, numeric)`.
const SCHEMA: &[(&str, &str, bool)] = &[
    ("experiment", "kind", false),
    ("experiment", "id", false),
    ("experiment", "seed", true),
    ("grid", "dim", true),
    ("grid", "half_width", true),
    ("grid", "points", true),
    ("solver", "alpha", true),
    ("solver", "dt", true),
    ("solver", "T", true),
    ("solver", "scheme", false),
    ("solver", "picard_max_iters", true),
    ("solver", "picard_tol", true),
    ("solver", "dealias", false),
    ("solver", "stride", true),
    ("solver", "nonlinear", false),
    ("data", "initial", false),
    ("data", "exponent", false),
    ("data", "time_exponent", false),
    ("data", "yt_p", true),
    ("monitor", "growth_factor", true),
    ("monitor", "tail_fraction", true),
    ("verify", "suite", false),
    ("decay", "pairs", false),
    ("decay", "derivative", false),
    ("decay", "samples", true),
    ("decay", "wrap_tol", true),
    ("decay", "resolution", true),
    ("decay", "t0", true),
    ("dichotomy", "amplitudes", false),
    ("local", "amplitudes", false),
    ("local", "times", false),
    ("output", "snapshots", false),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed but uninterpreted configuration; keys are `section.key`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub entries: Vec<Entry>,
}

fn resolve(section: Option<&str>, key: &str) -> Option<String> {
    match section {
        Some(s) => SCHEMA
            .iter()
            .find(|(sec, k, _)| *sec == s && *k == key)
            .map(|(sec, k, _)| format!("{sec}.{k}")),
        None => {
            if let Some((sec, k)) = key.split_once('.') {
                return resolve(Some(sec), k);
            }
            let mut hits = SCHEMA.iter().filter(|(_, k, _)| *k == key);
            match (hits.next(), hits.next()) {
                (Some((sec, k, _)), None) => Some(format!("{sec}.{k}")),
                _ => None,
            }
        }
    }
}

/// Fully qualified name of a key that may be given bare, e.g. `alpha`.
pub fn qualify(key: &str) -> Result<String> {
    resolve(None, key).ok_or_else(|| config(format!("unknown or ambiguous key '{key}'")))
}

pub fn is_numeric(qualified: &str) -> bool {
    SCHEMA
        .iter()
        .any(|(sec, k, numeric)| *numeric && format!("{sec}.{k}") == qualified)
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section: Option<String> = None;
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config(format!("line {line}: unterminated section header '{content}'")))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _, _)| *s == name) {
                    return Err(config(format!("line {line}: unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config(format!("line {line}: expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            let value = value.trim();
            let qualified = resolve(section.as_deref(), key).ok_or_else(|| {
                let shown = section.as_ref().map_or(key.to_string(), |s| format!("{s}.{key}"));
                config(format!("line {line}: unknown key '{shown}'"))
            })?;
            if let Some(prev) = entries.iter().find(|e| e.key == qualified) {
                return Err(config(format!(
                    "line {line}: key '{qualified}' already set on line {}",
                    prev.line
                )));
            }
            if value.is_empty() {
                return Err(config(format!("line {line}: key '{qualified}' has an empty value")));
            }
            entries.push(Entry {
                key: qualified,
                value: value.to_string(),
                line,
            });
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, qualified: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == qualified)
    }

    /// Replaces or appends a value (used by sweeps).
    pub fn set(&mut self, qualified: &str, value: &str) {
        match self.entries.iter_mut().find(|e| e.key == qualified) {
            Some(e) => e.value = value.to_string(),
            None => self.entries.push(Entry {
                key: qualified.to_string(),
                value: value.to_string(),
                line: 0,
            }),
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                config(format!("line {}: cannot parse '{}' for key '{key}'", e.line, e.value))
            }),
        }
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn text(&self, key: &str) -> Option<String> {
        self.get(key).map(|e| e.value.clone())
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => parse_list(&e.value)
                .map(Some)
                .map_err(|msg| config(format!("line {}: key '{key}': {msg}", e.line))),
        }
    }
}

/// Comma-separated reals; `inf` is accepted.
pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("'{s}' is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty value list".into());
    }
    Ok(values)
}

fn parse_bool(raw: &RawConfig, key: &str, default: bool) -> Result<bool> {
    match raw.get(key) {
        None => Ok(default),
        Some(e) => match e.value.as_str() {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            other => Err(config(format!("line {}: '{other}' is not a boolean for key '{key}'", e.line))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    VerifyEstimates,
    DecayStudy,
    DichotomySweep,
    LocalExistence,
    Solve,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::VerifyEstimates => "verify-estimates",
            Kind::DecayStudy => "decay-study",
            Kind::DichotomySweep => "dichotomy-sweep",
            Kind::LocalExistence => "local-existence",
            Kind::Solve => "solve",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            Kind::VerifyEstimates,
            Kind::DecayStudy,
            Kind::DichotomySweep,
            Kind::LocalExistence,
            Kind::Solve,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown experiment kind '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Varlebesgue,
    Kernels,
    Solver,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Varlebesgue => "varlebesgue",
            Suite::Kernels => "kernels",
            Suite::Solver => "solver",
            Suite::All => "all",
        }
    }

    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Suite::Varlebesgue, Suite::Kernels, Suite::Solver, Suite::All]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}' (expected varlebesgue, kernels, solver or all)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayOptions {
    pub pairs: Vec<(f64, f64)>,
    pub derivative: Vec<bool>,
    pub samples: usize,
    pub wrap_tol: f64,
    /// Smallest resolved multiplier `e^{-t0 k_max^alpha / 2}` used to pick `t0`.
    pub resolution: f64,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub id: String,
    pub seed: u64,
    pub grid: Grid,
    pub solver: SolverConfig,
    pub initial: String,
    pub exponent: String,
    pub time_exponent: String,
    pub yt_p: f64,
    pub thresholds: BlowupThresholds,
    pub suite: Suite,
    pub decay: DecayOptions,
    pub amplitudes: Vec<f64>,
    pub local_amplitudes: Vec<f64>,
    pub local_times: Option<Vec<f64>>,
    pub snapshots: Vec<f64>,
    /// Directory that relative CSV paths in presets are resolved against.
    pub base_dir: PathBuf,
}

fn parse_pairs(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (p, q) = s.split_once(':').ok_or_else(|| format!("pair '{s}' is not of the form p:q"))?;
            let p: f64 = p.trim().parse().map_err(|_| format!("bad p in '{s}'"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad q in '{s}'"))?;
            Ok((p, q))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig, base_dir: &Path) -> Result<Self> {
        let kind = match raw.get("experiment.kind") {
            None => return Err(config("missing required key 'experiment.kind'")),
            Some(e) => e
                .value
                .parse::<Kind>()
                .map_err(|msg| config(format!("line {}: {msg}", e.line)))?,
        };
        let alpha: f64 = raw
            .parsed("solver.alpha")?
            .ok_or_else(|| config("missing required key 'alpha' (section [solver])"))?;
        let dim: usize = raw.or("grid.dim", 2)?;
        let half_width: f64 = raw.or("grid.half_width", 4.0)?;
        let points: usize = raw.or("grid.points", 128)?;
        let grid = Grid::new(dim, half_width, points).map_err(|e| config(format!("grid: {e}")))?;
        let dt: f64 = raw.or("solver.dt", 0.01)?;
        let t_final: f64 = raw.or("solver.T", 1.0)?;
        let mut solver = SolverConfig {
            alpha,
            grid,
            dt,
            t_final,
            scheme: Scheme::Both,
            picard_max_iters: raw.or("solver.picard_max_iters", 60)?,
            picard_tol: raw.or("solver.picard_tol", 1e-12)?,
            dealias: parse_bool(raw, "solver.dealias", true)?,
            seed: 0,
            stride: raw.or("solver.stride", 1)?,
            nonlinear: parse_bool(raw, "solver.nonlinear", true)?,
            mean_density: 0.0,
        };
        if let Some(e) = raw.get("solver.scheme") {
            solver.scheme = e
                .value
                .parse()
                .map_err(|err| config(format!("line {}: {err}", e.line)))?;
        }
        // Only the kinds that integrate in time depend on T / dt.
        if matches!(kind, Kind::Solve | Kind::DichotomySweep | Kind::LocalExistence) {
            solver.validate().map_err(|e| config(e.to_string()))?;
        } else if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(config(format!("alpha must lie in (1, 2], got {alpha}")));
        }
        let seed: u64 = raw.or("experiment.seed", 0)?;
        solver.seed = seed;
        let thresholds = BlowupThresholds {
            growth_factor: raw.or("monitor.growth_factor", 50.0)?,
            tail_fraction: raw.or("monitor.tail_fraction", 0.1)?,
        };
        let suite = match raw.get("verify.suite") {
            None => Suite::All,
            Some(e) => e
                .value
                .parse()
                .map_err(|msg| config(format!("line {}: {msg}", e.line)))?,
        };
        let pairs = match raw.get("decay.pairs") {
            None => vec![(1.0, 2.0), (1.0, f64::INFINITY), (2.0, f64::INFINITY)],
            Some(e) => parse_pairs(&e.value).map_err(|msg| config(format!("line {}: {msg}", e.line)))?,
        };
        let derivative = match raw.get("decay.derivative") {
            None => vec![false, true],
            Some(e) => match e.value.as_str() {
                "both" => vec![false, true],
                "true" => vec![true],
                "false" => vec![false],
                other => {
                    return Err(config(format!(
                        "line {}: decay.derivative must be true, false or both, got '{other}'",
                        e.line
                    )))
                }
            },
        };
        let decay = DecayOptions {
            pairs,
            derivative,
            samples: raw.or("decay.samples", 11)?,
            wrap_tol: raw.or("decay.wrap_tol", 1e-2)?,
            resolution: raw.or("decay.resolution", 1e-6)?,
            t0: raw.parsed("decay.t0")?,
        };
        let id = raw.text("experiment.id").unwrap_or_else(|| kind.name().to_string());
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(config(format!("experiment id '{id}' must be alphanumeric with - _ .")));
        }
        Ok(Self {
            kind,
            id,
            seed,
            grid,
            solver,
            initial: raw
                .text("data.initial")
                .unwrap_or_else(|| "gaussian:0.5,1".to_string()),
            exponent: raw
                .text("data.exponent")
                .unwrap_or_else(|| "gauss-bump:2+exp(-r2)".to_string()),
            time_exponent: raw.text("data.time_exponent").unwrap_or_else(|| "constant:4".to_string()),
            yt_p: raw.or("data.yt_p", 4.0)?,
            thresholds,
            suite,
            decay,
            amplitudes: raw
                .list("dichotomy.amplitudes")?
                .unwrap_or_else(|| vec![0.1, 0.2, 0.4, 0.8, 1.6, 3.2]),
            local_amplitudes: raw.list("local.amplitudes")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0]),
            local_times: raw.list("local.times")?,
            snapshots: raw.list("output.snapshots")?.unwrap_or_default(),
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<(RawConfig, Self)> {
        let raw = RawConfig::from_file(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let cfg = Self::from_raw(&raw, &base)?;
        Ok((raw, cfg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# comment
[experiment]
kind = solve
seed = 3

[solver]
alpha = 1.5   # inline comment
dt = 0.05
T = 0.5
";

    #[test]
    fn parses_sections_and_defaults() {
        let raw = RawConfig::parse(SAMPLE).unwrap();
        let cfg = ExperimentConfig::from_raw(&raw, Path::new(".")).unwrap();
        assert_eq!(cfg.kind, Kind::Solve);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.solver.alpha, 1.5);
        assert_eq!(cfg.solver.steps(), 10);
        assert_eq!(cfg.grid.points_per_dim(), 128);
    }

    #[test]
    fn unknown_key_names_the_line() {
        let err = RawConfig::parse("[solver]\nalpha = 1.5\nbeta = 2\n").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("solver.beta"), "{err}");
    }

    #[test]
    fn missing_alpha_names_the_key() {
        let raw = RawConfig::parse("[experiment]\nkind = solve\n").unwrap();
        let err = ExperimentConfig::from_raw(&raw, Path::new(".")).unwrap_err().to_string();
        assert!(err.contains("alpha"), "{err}");
    }

    #[test]
    fn bare_keys_resolve_when_unique() {
        assert_eq!(qualify("alpha").unwrap(), "solver.alpha");
        assert_eq!(qualify("solver.T").unwrap(), "solver.T");
        // `amplitudes` lives in two sections.
        assert!(qualify("amplitudes").is_err());
        assert!(is_numeric("solver.T") && !is_numeric("solver.scheme"));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(RawConfig::parse("[solver]\nalpha = 1.5\nalpha = 2\n").is_err());
    }
}
