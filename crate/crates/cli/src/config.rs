//! Flag resolution: command line over config file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dirac1d::model::{validate, BPolicy, Component, PotentialParams, Regime, ValidatedProblem};
use dirac1d::spectrum::Sign;

use crate::PhysicsArgs;

/// Typed failure with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Usage or validation problem: exit 1.
    Usage(String),
    /// Solver or I/O failure: exit 2.
    Runtime(String),
    /// Verification ran but a report failed tolerance: exit 3.
    VerificationFailed { failed: usize, total: usize, max_rel_error: f64 },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::VerificationFailed { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
            CliError::VerificationFailed { failed, total, max_rel_error } => write!(
                f,
                "verification failed: {failed} of {total} reports out of tolerance \
                 (max relative error {max_rel_error:.3e})"
            ),
        }
    }
}

impl From<dirac1d::ModelError> for CliError {
    fn from(e: dirac1d::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<dirac1d::SpectrumError> for CliError {
    fn from(e: dirac1d::SpectrumError) -> Self {
        match e {
            dirac1d::SpectrumError::Model(m) => CliError::Usage(m.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<dirac1d::WavefunctionError> for CliError {
    fn from(e: dirac1d::WavefunctionError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<dirac1d::OracleError> for CliError {
    fn from(e: dirac1d::OracleError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json|csv)")),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PotentialParams,
    pub regime: Regime,
    pub component: Component,
    pub policy: BPolicy,
    pub n_lo: u32,
    pub n_hi: u32,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub in_units_of_m: bool,
    pub sign: Sign,
    pub grid_points: Option<usize>,
    pub oracle_points: Option<usize>,
    pub richardson: bool,
    pub inject_energy_offset: Option<f64>,
}

impl RunConfig {
    pub fn problem(&self) -> Result<ValidatedProblem, CliError> {
        Ok(validate(self.params, self.regime, self.component, self.policy)?)
    }

    /// Echo of the resolved physics flags as config-file text; feeding this
    /// back through `--config` reproduces the run. Output paths are omitted.
    pub fn to_config_entries(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("M".into(), trim_float(self.params.mass)),
            ("D".into(), trim_float(self.params.depth)),
            ("a".into(), trim_float(self.params.range)),
            ("b".into(), trim_float(self.params.pseudoscalar)),
            ("q".into(), trim_float(self.params.shape)),
            ("regime".into(), self.regime.as_str().into()),
            ("component".into(), self.component.as_str().into()),
            ("n".into(), format!("{}..{}", self.n_lo, self.n_hi)),
            ("format".into(), self.format.as_str().into()),
            (
                "strict-b".into(),
                if self.policy == BPolicy::Strict { "on" } else { "off" }.into(),
            ),
            (
                "in-units-of-M".into(),
                if self.in_units_of_m { "true" } else { "false" }.into(),
            ),
            (
                "sign".into(),
                if self.sign == Sign::Plus { "plus" } else { "minus" }.into(),
            ),
        ];
        if let Some(g) = self.grid_points {
            kv.push(("grid-points".into(), g.to_string()));
        }
        if let Some(o) = self.oracle_points {
            kv.push(("oracle-points".into(), o.to_string()));
        }
        if !self.richardson {
            kv.push(("no-richardson".into(), "true".into()));
        }
        if let Some(d) = self.inject_energy_offset {
            kv.push(("inject-energy-offset".into(), trim_float(d)));
        }
        kv
    }
}

/// Full-precision float text without the fixed-width padding of data output.
fn trim_float(x: f64) -> String {
    let s = format!("{x}");
    debug_assert_eq!(s.parse::<f64>().unwrap(), x);
    s
}

const CONFIG_KEYS: &[&str] = &[
    "M",
    "D",
    "a",
    "b",
    "q",
    "regime",
    "component",
    "n",
    "format",
    "strict-b",
    "in-units-of-M",
    "sign",
    "grid-points",
    "oracle-points",
    "no-richardson",
    "inject-energy-offset",
];

/// Parse a `key=value` config file (one flag per line, `#` comments).
pub fn load_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config {}:{}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config {}:{}: unknown key `{key}`",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_with<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| CliError::Usage(format!("bad value for {key}: `{raw}` ({e})")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        other => Err(CliError::Usage(format!("bad value for {key}: `{other}`"))),
    }
}

/// Inclusive level range: a single index or `i..j`.
pub fn parse_n_range(raw: &str) -> Result<(u32, u32), CliError> {
    let (lo, hi) = match raw.split_once("..") {
        Some((lo, hi)) => (parse_with::<u32>("n", lo.trim())?, parse_with::<u32>("n", hi.trim())?),
        None => {
            let n = parse_with::<u32>("n", raw.trim())?;
            (n, n)
        }
    };
    if hi < lo {
        return Err(CliError::Usage(format!("empty level range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

/// Merge command line, config file, and defaults into a validated RunConfig.
pub fn resolve(args: &PhysicsArgs) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => load_config_file(path)?,
        None => BTreeMap::new(),
    };

    let lookup = |key: &str, cli: Option<String>| -> Option<String> {
        cli.or_else(|| file.get(key).cloned())
    };

    let require_f64 = |key: &str, cli: Option<f64>| -> Result<f64, CliError> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match file.get(key) {
            Some(raw) => parse_with::<f64>(key, raw),
            None => Err(CliError::Usage(format!("missing required parameter --{key}"))),
        }
    };

    let mass = require_f64("M", args.m)?;
    let depth = require_f64("D", args.d)?;
    let range = require_f64("a", args.a)?;
    let pseudoscalar = require_f64("b", args.b)?;
    let shape = match (args.q, file.get("q")) {
        (Some(v), _) => v,
        (None, Some(raw)) => parse_with::<f64>("q", raw)?,
        (None, None) => 0.0,
    };

    let regime: Regime = match lookup("regime", args.regime.clone()) {
        Some(raw) => parse_with(&"regime", &raw)?,
        None => return Err(CliError::Usage("missing required parameter --regime".into())),
    };
    let component: Component = match lookup("component", args.component.clone()) {
        Some(raw) => parse_with(&"component", &raw)?,
        None => Component::Upper,
    };
    let (n_lo, n_hi) = match lookup("n", args.n.clone()) {
        Some(raw) => parse_n_range(&raw)?,
        None => (0, 0),
    };
    let format: OutputFormat = match lookup("format", args.format.clone()) {
        Some(raw) => parse_with(&"format", &raw)?,
        None => OutputFormat::Json,
    };
    let policy = match lookup("strict-b", args.strict_b.clone()) {
        Some(raw) => match raw.as_str() {
            "on" => BPolicy::Strict,
            "off" => BPolicy::Permissive,
            other => {
                return Err(CliError::Usage(format!(
                    "bad value for strict-b: `{other}` (expected on|off)"
                )))
            }
        },
        None => BPolicy::Strict,
    };
    let sign = match lookup("sign", args.sign.clone()) {
        Some(raw) => match raw.as_str() {
            "plus" => Sign::Plus,
            "minus" => Sign::Minus,
            other => {
                return Err(CliError::Usage(format!(
                    "bad value for sign: `{other}` (expected plus|minus)"
                )))
            }
        },
        None => Sign::Plus,
    };
    let in_units_of_m = args.in_units_of_m
        || match file.get("in-units-of-M") {
            Some(raw) => parse_bool("in-units-of-M", raw)?,
            None => false,
        };
    let grid_points = match (args.grid_points, file.get("grid-points")) {
        (Some(v), _) => Some(v),
        (None, Some(raw)) => Some(parse_with::<usize>("grid-points", raw)?),
        (None, None) => None,
    };
    let oracle_points = match (args.oracle_points, file.get("oracle-points")) {
        (Some(v), _) => Some(v),
        (None, Some(raw)) => Some(parse_with::<usize>("oracle-points", raw)?),
        (None, None) => None,
    };
    let richardson = !(args.no_richardson
        || match file.get("no-richardson") {
            Some(raw) => parse_bool("no-richardson", raw)?,
            None => false,
        });
    let inject_energy_offset = match (args.inject_energy_offset, file.get("inject-energy-offset")) {
        (Some(v), _) => Some(v),
        (None, Some(raw)) => Some(parse_with::<f64>("inject-energy-offset", raw)?),
        (None, None) => None,
    };

    let params = PotentialParams::new(mass, depth, range, pseudoscalar, shape);
    // Surface invalid combinations before any work (exit 1, nothing written).
    validate(params, regime, component, policy)?;

    Ok(RunConfig {
        params,
        regime,
        component,
        policy,
        n_lo,
        n_hi,
        format,
        out: args.out.clone(),
        in_units_of_m,
        sign,
        grid_points,
        oracle_points,
        richardson,
        inject_energy_offset,
    })
}
