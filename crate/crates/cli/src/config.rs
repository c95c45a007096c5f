//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

/// Keys accepted both as `--key` flags and in config files.
const KEYS: &[&str] = &[
    "scenario", "a", "b", "l", "k", "beta", "C", "grid", "u-range", "v-range", "mode", "out",
    "format", "seed", "suite", "n", "xi", "eta", "side", "levels",
];

/// Flags shared by every subcommand. Values stay textual until merged with
/// the config file so both sources go through one parser.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// coffeecup | nephroid | paraboloid | cylinder
    #[arg(long)]
    scenario: Option<String>,
    /// Cylinder radius, or the paraboloid's x1 coefficient
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Paraboloid x2 coefficient
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Distance of the point source from the cylinder axis
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    /// Number of reflections
    #[arg(long)]
    k: Option<String>,
    /// Angle between the incoming plane wave and the cylinder axis (radians)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Comma-separated wavefront constants
    #[arg(long = "C", value_name = "LIST", allow_hyphen_values = true)]
    c: Option<String>,
    /// Grid size as NUxNV
    #[arg(long)]
    grid: Option<String>,
    /// Range of the first grid parameter as lo:hi
    #[arg(long = "u-range", value_name = "LO:HI", allow_hyphen_values = true)]
    u_range: Option<String>,
    /// Range of the second grid parameter as lo:hi
    #[arg(long = "v-range", value_name = "LO:HI", allow_hyphen_values = true)]
    v_range: Option<String>,
    /// closed-form | pipeline | both
    #[arg(long)]
    mode: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// csv | obj | svg
    #[arg(long)]
    format: Option<String>,
    /// Seed for validation sweeps
    #[arg(long)]
    seed: Option<String>,
    /// Validation suite: oracle | sachs | mainthm1 | pair-geometry | all
    #[arg(long)]
    suite: Option<String>,
    /// Number of validation samples
    #[arg(long)]
    n: Option<String>,
    /// Direction coordinate of the incoming ray as re,im
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Position coordinate of the incoming ray as re,im
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// interior | exterior
    #[arg(long)]
    side: Option<String>,
    /// Comma-separated slice heights for levelset
    #[arg(long, allow_hyphen_values = true)]
    levels: Option<String>,
    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let fields = [
            ("scenario", &self.scenario),
            ("a", &self.a),
            ("b", &self.b),
            ("l", &self.l),
            ("k", &self.k),
            ("beta", &self.beta),
            ("C", &self.c),
            ("grid", &self.grid),
            ("u-range", &self.u_range),
            ("v-range", &self.v_range),
            ("mode", &self.mode),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
            ("suite", &self.suite),
            ("n", &self.n),
            ("xi", &self.xi),
            ("eta", &self.eta),
            ("side", &self.side),
            ("levels", &self.levels),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Coffeecup,
    Nephroid,
    Paraboloid,
    Cylinder,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Coffeecup => "coffeecup",
            Scenario::Nephroid => "nephroid",
            Scenario::Paraboloid => "paraboloid",
            Scenario::Cylinder => "cylinder",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ClosedForm,
    Pipeline,
    Both,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed-form",
            Mode::Pipeline => "pipeline",
            Mode::Both => "both",
        }
    }

    pub fn closed_form(self) -> bool {
        matches!(self, Mode::ClosedForm | Mode::Both)
    }

    pub fn pipeline(self) -> bool {
        matches!(self, Mode::Pipeline | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Obj,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Sachs,
    RootCount,
    PairGeometry,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub a: f64,
    pub b: f64,
    pub l: f64,
    pub k: u32,
    pub beta: f64,
    pub constants: Vec<f64>,
    pub grid: (usize, usize),
    pub u_range: Option<(f64, f64)>,
    pub v_range: Option<(f64, f64)>,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub suite: Suite,
    pub n: Option<usize>,
    pub xi: Option<Complex64>,
    pub eta: Option<Complex64>,
    pub side: Side,
    pub levels: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            a: 1.0,
            b: 1.0,
            l: 0.5,
            k: 1,
            beta: PI / 3.0,
            constants: vec![0.0],
            grid: (50, 50),
            u_range: None,
            v_range: None,
            mode: Mode::ClosedForm,
            out: None,
            format: Format::Csv,
            seed: 7,
            suite: Suite::All,
            n: None,
            xi: None,
            eta: None,
            side: Side::Interior,
            levels: vec![-1.0, 0.0, 1.0],
        }
    }
}

fn bad(key: &str, value: &str, what: &str) -> CliError {
    CliError::Config(format!("{key} = {value:?}: expected {what}"))
}

fn number<T: FromStr>(key: &str, value: &str, what: &str) -> CliResult<T> {
    value.trim().parse().map_err(|_| bad(key, value, what))
}

fn real(key: &str, value: &str) -> CliResult<f64> {
    let x: f64 = number(key, value, "a number")?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, value, "a finite number"))
    }
}

fn real_list(key: &str, value: &str) -> CliResult<Vec<f64>> {
    let list = value
        .split(',')
        .map(|s| real(key, s))
        .collect::<CliResult<Vec<_>>>()?;
    if list.is_empty() {
        return Err(bad(key, value, "a comma-separated list of numbers"));
    }
    Ok(list)
}

fn range(key: &str, value: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = value
        .split_once(':')
        .ok_or_else(|| bad(key, value, "lo:hi"))?;
    let (lo, hi) = (real(key, lo)?, real(key, hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(bad(key, value, "lo:hi with lo < hi"))
    }
}

fn complex(key: &str, value: &str) -> CliResult<Complex64> {
    let (re, im) = value
        .split_once(',')
        .ok_or_else(|| bad(key, value, "re,im"))?;
    Ok(Complex64::new(real(key, re)?, real(key, im)?))
}

fn grid(key: &str, value: &str) -> CliResult<(usize, usize)> {
    let (nu, nv) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| bad(key, value, "NUxNV"))?;
    let nu: usize = number(key, nu, "NUxNV")?;
    let nv: usize = number(key, nv, "NUxNV")?;
    if nu < 2 || nv < 2 {
        return Err(bad(key, value, "grid sizes of at least 2"));
    }
    Ok((nu, nv))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", no + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "line {}: unknown key {key:?}",
                no + 1
            )));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(CliError::Config(format!(
                "line {}: duplicate key {key:?}",
                no + 1
            )));
        }
    }
    Ok(map)
}

fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_file(&text)
}

impl RunConfig {
    /// Flags override values from `--config`.
    pub fn resolve(flags: &Flags) -> CliResult<Self> {
        let mut map = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        for (k, v) in flags.pairs() {
            map.insert(k.to_string(), v.to_string());
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (key, value) in map {
            let v = value.as_str();
            match key.as_str() {
                "scenario" => {
                    cfg.scenario = Some(match v {
                        "coffeecup" => Scenario::Coffeecup,
                        "nephroid" => Scenario::Nephroid,
                        "paraboloid" => Scenario::Paraboloid,
                        "cylinder" => Scenario::Cylinder,
                        _ => {
                            return Err(bad(key, v, "coffeecup, nephroid, paraboloid or cylinder"))
                        }
                    })
                }
                "a" => cfg.a = real(key, v)?,
                "b" => cfg.b = real(key, v)?,
                "l" => cfg.l = real(key, v)?,
                "k" => cfg.k = number(key, v, "a positive integer")?,
                "beta" => cfg.beta = real(key, v)?,
                "C" => cfg.constants = real_list(key, v)?,
                "grid" => cfg.grid = grid(key, v)?,
                "u-range" => cfg.u_range = Some(range(key, v)?),
                "v-range" => cfg.v_range = Some(range(key, v)?),
                "mode" => {
                    cfg.mode = match v {
                        "closed-form" => Mode::ClosedForm,
                        "pipeline" => Mode::Pipeline,
                        "both" => Mode::Both,
                        _ => return Err(bad(key, v, "closed-form, pipeline or both")),
                    }
                }
                "out" => cfg.out = Some(PathBuf::from(v)),
                "format" => {
                    cfg.format = match v {
                        "csv" => Format::Csv,
                        "obj" => Format::Obj,
                        "svg" => Format::Svg,
                        _ => return Err(bad(key, v, "csv, obj or svg")),
                    }
                }
                "seed" => cfg.seed = number(key, v, "an unsigned integer")?,
                "suite" => {
                    cfg.suite = match v {
                        "oracle" => Suite::Oracle,
                        "sachs" => Suite::Sachs,
                        "mainthm1" => Suite::RootCount,
                        "pair-geometry" => Suite::PairGeometry,
                        "all" => Suite::All,
                        _ => {
                            return Err(bad(
                                key,
                                v,
                                "oracle, sachs, mainthm1, pair-geometry or all",
                            ))
                        }
                    }
                }
                "n" => {
                    let n: usize = number(key, v, "a positive integer")?;
                    if n == 0 {
                        return Err(bad(key, v, "a positive integer"));
                    }
                    cfg.n = Some(n);
                }
                "xi" => cfg.xi = Some(complex(key, v)?),
                "eta" => cfg.eta = Some(complex(key, v)?),
                "side" => {
                    cfg.side = match v {
                        "interior" => Side::Interior,
                        "exterior" => Side::Exterior,
                        _ => return Err(bad(key, v, "interior or exterior")),
                    }
                }
                "levels" => cfg.levels = real_list(key, v)?,
                _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("focalset-out"))
    }

    pub fn scenario_or(&self, default: Scenario) -> Scenario {
        self.scenario.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn parses_values() {
        let cfg = RunConfig::from_map(&map(&[
            ("grid", "20x30"),
            ("u-range", "-1:2.5"),
            ("C", "0,1,-2"),
            ("xi", "0.5,-1"),
            ("mode", "both"),
        ]))
        .unwrap();
        assert_eq!(cfg.grid, (20, 30));
        assert_eq!(cfg.u_range, Some((-1.0, 2.5)));
        assert_eq!(cfg.constants, vec![0.0, 1.0, -2.0]);
        assert_eq!(cfg.xi, Some(Complex64::new(0.5, -1.0)));
        assert_eq!(cfg.mode, Mode::Both);
    }

    #[test]
    fn rejects_bad_values() {
        for (k, v) in [
            ("grid", "1x5"),
            ("grid", "10"),
            ("u-range", "2:1"),
            ("a", "nan"),
            ("mode", "fast"),
            ("n", "0"),
            ("k", "-1"),
        ] {
            assert!(RunConfig::from_map(&map(&[(k, v)])).is_err(), "{k} = {v}");
        }
    }

    #[test]
    fn config_file_syntax() {
        let m = parse_config_file("# scene\na = 2\n\nu-range = 0.1:3  # trailing\n").unwrap();
        assert_eq!(m["a"], "2");
        assert_eq!(m["u-range"], "0.1:3");
        assert!(parse_config_file("radius = 2").is_err());
        assert!(parse_config_file("a = 1\na = 2").is_err());
        assert!(parse_config_file("just words").is_err());
    }
}
