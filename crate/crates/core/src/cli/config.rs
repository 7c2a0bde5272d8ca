//! TOML run configuration.
//!
//! ```toml
//! command = "weyl-scan"
//! n = 200
//!
//! [family]
//! name = "diagonal"
//! parts = [{ a = [1.0], b = [0.0] }, { a = [1.0], b = [0.0] }]
//!
//! [grid]
//! lambda_min = -3.0
//! lambda_max = 3.0
//! lambda_steps = 61
//! eps = [0.1, 0.03, 0.01, 0.003, 0.001]
//! ```
//!
//! Matrices are arrays of rows; an entry is a number or a `[re, im]` pair.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::blockcore::matrix::{block_from_rows, Mat, C64};
use crate::blockcore::params::{make_family, FamilySpec, Growth, JacobiParams, ScalarJacobi};
use crate::seminorms::SeminormKind;
use crate::subordinacy::DEFAULT_COND_CAP;
use crate::weyl::{NRule, ScanThresholds};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Validate,
    Polys,
    TransferCheck,
    Weyl,
    WeylScan,
    Measure,
    CauchyCheck,
    Jl,
    Nonsub,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Validate,
        Command::Polys,
        Command::TransferCheck,
        Command::Weyl,
        Command::WeylScan,
        Command::Measure,
        Command::CauchyCheck,
        Command::Jl,
        Command::Nonsub,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Polys => "polys",
            Command::TransferCheck => "transfer-check",
            Command::Weyl => "weyl",
            Command::WeylScan => "weyl-scan",
            Command::Measure => "measure",
            Command::CauchyCheck => "cauchy-check",
            Command::Jl => "jl",
            Command::Nonsub => "nonsub",
            Command::Report => "report",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|c| c.name()).collect();
            ConfigError(format!("unknown command `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => err(format!("unknown format `{other}`; expected csv or json")),
        }
    }
}

pub fn parse_seminorm(s: &str) -> Result<SeminormKind, ConfigError> {
    match s {
        "norm" => Ok(SeminormKind::MatrixNorm),
        "minmod" => Ok(SeminormKind::MatrixMinmod),
        other => err(format!("unknown seminorm `{other}`; expected norm or minmod")),
    }
}

/// A fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub family: JacobiParams,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Truncation size for single-`N` commands and the polynomial/transfer horizon.
    pub n: usize,
    /// Truncation sizes for `cauchy-check`.
    pub n_list: Vec<usize>,
    pub n_rule: NRule,
    pub lambda_grid: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    pub jl_eps: Vec<f64>,
    pub z_list: Vec<C64>,
    pub t_grid: Vec<f64>,
    pub k_max: usize,
    pub thresholds: ScanThresholds,
    pub cap: f64,
    pub seminorm: SeminormKind,
    pub self_adjoint: bool,
    pub measure_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

type RawMatrix = Vec<Vec<Entry>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScalar {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    name: Option<String>,
    d: Option<usize>,
    a: Option<RawMatrix>,
    b: Option<RawMatrix>,
    a_list: Option<Vec<RawMatrix>>,
    b_list: Option<Vec<RawMatrix>>,
    parts: Option<Vec<RawScalar>>,
    a_growth: Option<f64>,
    b_growth: Option<f64>,
    block_file: Option<String>,
    len: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlockFile {
    a_list: Vec<RawMatrix>,
    b_list: Vec<RawMatrix>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    lambda_steps: Option<usize>,
    eps: Option<Vec<f64>>,
    jl_eps: Option<Vec<f64>>,
    z: Option<Vec<[f64; 2]>>,
    t_max: Option<f64>,
    t_steps: Option<usize>,
    k_max: Option<usize>,
    n_list: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    rank_abs: Option<f64>,
    rank_rel: Option<f64>,
    cauchy_ratio: Option<f64>,
    sing_growth: Option<f64>,
    sing_min_trace: Option<f64>,
    cap: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    format: Option<String>,
    out: Option<String>,
    seed: Option<u64>,
    n: Option<usize>,
    n_rule_c: Option<f64>,
    seminorm: Option<String>,
    self_adjoint: Option<bool>,
    measure_file: Option<String>,
    family: Option<RawFamily>,
    grid: Option<RawGrid>,
    tolerances: Option<RawTolerances>,
}

/// Values given on the command line; each one replaces the config entry.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub n: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_steps: Option<usize>,
    pub eps_ladder: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub seminorm: Option<String>,
    pub cap: Option<f64>,
}

pub const DEFAULT_N: usize = 200;
pub const DEFAULT_EPS_LADDER: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

/// Parses TOML text; relative paths inside it resolve against `base_dir`.
pub fn parse_config_with(text: &str, base_dir: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(format!("config syntax error: {e}")))?;
    build(raw, base_dir, overrides)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, Path::new("."), &Overrides::default())
}

fn matrix(raw: &RawMatrix, what: &str) -> Result<Mat, ConfigError> {
    let rows: Vec<Vec<C64>> = raw
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| match *e {
                    Entry::Real(x) => C64::new(x, 0.0),
                    Entry::Complex([re, im]) => C64::new(re, im),
                })
                .collect()
        })
        .collect();
    let m = block_from_rows(&rows).map_err(|e| ConfigError(format!("{what}: {e}")))?;
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return err(format!("{what}: blocks must be square and non-empty, got {}x{}", m.nrows(), m.ncols()));
    }
    Ok(m)
}

fn matrices(raw: &[RawMatrix], what: &str) -> Result<Vec<Mat>, ConfigError> {
    if raw.is_empty() {
        return err(format!("{what} must not be empty"));
    }
    raw.iter().enumerate().map(|(n, m)| matrix(m, &format!("{what}[{n}]"))).collect()
}

fn semantic(e: crate::Error) -> ConfigError {
    ConfigError(format!("invalid family parameters: {e}"))
}

fn reject_unused(f: &RawFamily, name: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    let present = [
        ("d", f.d.is_some()),
        ("a", f.a.is_some()),
        ("b", f.b.is_some()),
        ("a_list", f.a_list.is_some()),
        ("b_list", f.b_list.is_some()),
        ("parts", f.parts.is_some()),
        ("a_growth", f.a_growth.is_some()),
        ("b_growth", f.b_growth.is_some()),
        ("block_file", f.block_file.is_some()),
        ("len", f.len.is_some()),
    ];
    for (key, set) in present {
        if set && !allowed.contains(&key) {
            return err(format!("family `{name}` does not accept key `family.{key}`"));
        }
    }
    Ok(())
}

fn growth(exponent: Option<f64>) -> Growth {
    match exponent {
        Some(exponent) if exponent != 0.0 => Growth::Power { exponent },
        _ => Growth::None,
    }
}

fn build_family(f: RawFamily, base_dir: &Path, seed: u64) -> Result<JacobiParams, ConfigError> {
    let name = f.name.clone().unwrap_or_else(|| "free".into());
    let check_d = |p: JacobiParams, d: Option<usize>| -> Result<JacobiParams, ConfigError> {
        match d {
            Some(d) if d != p.d() => err(format!("family.d = {d} disagrees with block size {}", p.d())),
            _ => Ok(p),
        }
    };
    match name.as_str() {
        "free" => {
            reject_unused(&f, &name, &["d"])?;
            make_family(FamilySpec::Free { d: f.d.unwrap_or(1) }).map_err(semantic)
        }
        "constant" => {
            reject_unused(&f, &name, &["d", "a", "b"])?;
            let a =
                matrix(f.a.as_ref().ok_or_else(|| ConfigError("constant family needs family.a".into()))?, "family.a")?;
            let b =
                matrix(f.b.as_ref().ok_or_else(|| ConfigError("constant family needs family.b".into()))?, "family.b")?;
            check_d(make_family(FamilySpec::Constant { a, b }).map_err(semantic)?, f.d)
        }
        "diagonal" => {
            reject_unused(&f, &name, &["d", "parts"])?;
            let parts = f
                .parts
                .ok_or_else(|| ConfigError("diagonal family needs family.parts".into()))?
                .into_iter()
                .map(|s| ScalarJacobi::new(s.a, s.b))
                .collect();
            check_d(make_family(FamilySpec::Diagonal { parts }).map_err(semantic)?, f.d)
        }
        "periodic_modulated" => {
            reject_unused(&f, &name, &["d", "a_list", "b_list", "a_growth", "b_growth"])?;
            let a = matrices(f.a_list.as_deref().unwrap_or_default(), "family.a_list")?;
            let b = matrices(f.b_list.as_deref().unwrap_or_default(), "family.b_list")?;
            let spec =
                FamilySpec::PeriodicModulated { a, b, a_growth: growth(f.a_growth), b_growth: growth(f.b_growth) };
            check_d(make_family(spec).map_err(semantic)?, f.d)
        }
        "explicit" => {
            reject_unused(&f, &name, &["d", "a_list", "b_list", "block_file"])?;
            let (a_raw, b_raw) = match (&f.block_file, f.a_list, f.b_list) {
                (Some(path), None, None) => {
                    let full = base_dir.join(path);
                    let text = std::fs::read_to_string(&full)
                        .map_err(|e| ConfigError(format!("cannot read block file {}: {e}", full.display())))?;
                    let file: RawBlockFile = toml::from_str(&text)
                        .map_err(|e| ConfigError(format!("block file {} syntax error: {e}", full.display())))?;
                    (file.a_list, file.b_list)
                }
                (None, Some(a), Some(b)) => (a, b),
                _ => {
                    return err(
                        "explicit family needs either family.block_file or both family.a_list and family.b_list",
                    )
                }
            };
            let a = matrices(&a_raw, "a_list")?;
            let b = matrices(&b_raw, "b_list")?;
            check_d(make_family(FamilySpec::Explicit { a, b }).map_err(semantic)?, f.d)
        }
        "random" => {
            reject_unused(&f, &name, &["d", "len"])?;
            let d = f.d.unwrap_or(2);
            if d == 0 {
                return err("family.d must be positive");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(JacobiParams::random_bounded(d, f.len.unwrap_or(64).max(1), &mut rng))
        }
        other => err(format!(
            "unknown family `{other}`; expected free, constant, diagonal, periodic_modulated, explicit or random"
        )),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        err(format!("{name} must be positive, got {v}"))
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn log_grid(hi: f64, lo: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| hi * (lo / hi).powf(i as f64 / (steps - 1) as f64)).collect()
}

fn build(raw: RawConfig, base_dir: &Path, o: &Overrides) -> Result<RunConfig, ConfigError> {
    let command = Command::parse(o.command.as_deref().or(raw.command.as_deref()).unwrap_or("validate"))?;
    let format = Format::parse(o.format.as_deref().or(raw.format.as_deref()).unwrap_or("csv"))?;
    let seed = o.seed.or(raw.seed).unwrap_or(0);
    let family = build_family(raw.family.unwrap_or_default(), base_dir, seed)?;
    let grid = raw.grid.unwrap_or_default();
    let tol = raw.tolerances.unwrap_or_default();

    let n = o.n.or(raw.n).unwrap_or(DEFAULT_N);
    if n == 0 {
        return err("n must be at least 1");
    }
    let n_list = grid.n_list.unwrap_or_else(|| vec![n]);
    if n_list.is_empty() || n_list.contains(&0) {
        return err("grid.n_list must be non-empty with positive entries");
    }
    let n_rule = NRule::Inverse { c: positive("n_rule_c", raw.n_rule_c.unwrap_or(50.0))? };

    let lambda_min = o.lambda_min.or(grid.lambda_min).unwrap_or(-3.0);
    let lambda_max = o.lambda_max.or(grid.lambda_max).unwrap_or(3.0);
    let lambda_steps = o.lambda_steps.or(grid.lambda_steps).unwrap_or(61);
    if lambda_steps == 0 || !(lambda_min.is_finite() && lambda_max.is_finite()) || lambda_max < lambda_min {
        return err("lambda grid must be non-empty with finite lambda_min <= lambda_max");
    }
    let lambda_grid = linspace(lambda_min, lambda_max, lambda_steps);

    let eps_ladder = o.eps_ladder.clone().or(grid.eps).unwrap_or_else(|| DEFAULT_EPS_LADDER.to_vec());
    if eps_ladder.is_empty() {
        return err("eps ladder must be non-empty");
    }
    for e in &eps_ladder {
        positive("eps ladder entry", *e)?;
    }
    if eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return err("eps ladder must be strictly decreasing");
    }
    let jl_eps = grid.jl_eps.unwrap_or_else(|| log_grid(1e-1, 1e-3, 20));
    if jl_eps.is_empty() {
        return err("grid.jl_eps must be non-empty");
    }
    for e in &jl_eps {
        positive("grid.jl_eps entry", *e)?;
    }

    let z_list: Vec<C64> =
        grid.z.unwrap_or_else(|| vec![[0.0, 2.0]]).into_iter().map(|[re, im]| C64::new(re, im)).collect();
    if z_list.is_empty() {
        return err("grid.z must be non-empty");
    }

    let t_max = positive("grid.t_max", grid.t_max.unwrap_or(1000.0))?;
    let t_steps = grid.t_steps.unwrap_or(100);
    if t_steps == 0 {
        return err("grid.t_steps must be positive");
    }
    let t_grid = (1..=t_steps).map(|i| t_max * i as f64 / t_steps as f64).collect();

    let defaults = ScanThresholds::default();
    let thresholds = ScanThresholds {
        rank_abs: positive("tolerances.rank_abs", tol.rank_abs.unwrap_or(defaults.rank_abs))?,
        rank_rel: positive("tolerances.rank_rel", tol.rank_rel.unwrap_or(defaults.rank_rel))?,
        cauchy_ratio: positive("tolerances.cauchy_ratio", tol.cauchy_ratio.unwrap_or(defaults.cauchy_ratio))?,
        sing_growth: positive("tolerances.sing_growth", tol.sing_growth.unwrap_or(defaults.sing_growth))?,
        sing_rungs: defaults.sing_rungs,
        sing_min_trace: positive("tolerances.sing_min_trace", tol.sing_min_trace.unwrap_or(defaults.sing_min_trace))?,
    };
    let cap = positive("cap", o.cap.or(tol.cap).unwrap_or(DEFAULT_COND_CAP))?;
    let seminorm = parse_seminorm(o.seminorm.as_deref().or(raw.seminorm.as_deref()).unwrap_or("norm"))?;

    Ok(RunConfig {
        command,
        family,
        format,
        out: o.out.clone().or(raw.out.map(|p| base_dir.join(p))),
        seed,
        n,
        n_list,
        n_rule,
        lambda_grid,
        eps_ladder,
        jl_eps,
        z_list,
        t_grid,
        k_max: grid.k_max.unwrap_or(20).max(1),
        thresholds,
        cap,
        seminorm,
        self_adjoint: raw.self_adjoint.unwrap_or(false),
        measure_file: raw.measure_file.map(|p| base_dir.join(p)),
    })
}
