//! Plain `section.key = value` configuration with line-numbered diagnostics.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use chlab_core::fixtures::Profile;
use chlab_core::{Field, Grid, SystemParams};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Gaussian,
    Sech,
    Sech2,
    SyntheticSpectrum,
    FromFile,
    Zero,
}

impl InitKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gaussian" => InitKind::Gaussian,
            "sech" => InitKind::Sech,
            "sech2" => InitKind::Sech2,
            "synthetic_spectrum" => InitKind::SyntheticSpectrum,
            "from_file" => InitKind::FromFile,
            "zero" => InitKind::Zero,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            InitKind::Gaussian => "gaussian",
            InitKind::Sech => "sech",
            InitKind::Sech2 => "sech2",
            InitKind::SyntheticSpectrum => "synthetic_spectrum",
            InitKind::FromFile => "from_file",
            InitKind::Zero => "zero",
        }
    }
}

/// Initial profile for one component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitSpec {
    pub kind: InitKind,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub rate: f64,
    /// Sample file for `from_file`: N whitespace-separated values.
    pub path: String,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            kind: InitKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
            rate: 1.0,
            path: String::new(),
        }
    }
}

impl InitSpec {
    /// Samples the profile; relative sample paths resolve against `base`.
    pub fn field(&self, grid: &Grid, base: &Path) -> anyhow::Result<Field> {
        let (amplitude, width, center) = (self.amplitude, self.width, self.center);
        let profile = match self.kind {
            InitKind::Gaussian => Profile::Gaussian {
                amplitude,
                width,
                center,
            },
            InitKind::Sech => Profile::Sech {
                amplitude,
                width,
                center,
            },
            InitKind::Sech2 => Profile::Sech2 {
                amplitude,
                width,
                center,
            },
            InitKind::SyntheticSpectrum => Profile::SyntheticSpectrum {
                amplitude,
                rate: self.rate,
            },
            InitKind::Zero => Profile::Zero,
            InitKind::FromFile => {
                let path = base.join(&self.path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
                let samples = text
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
                if samples.len() != grid.modes() {
                    anyhow::bail!(
                        "{}: expected {} samples, got {}",
                        path.display(),
                        grid.modes(),
                        samples.len()
                    );
                }
                return Ok(Field::from_samples(grid, samples)?);
            }
        };
        Ok(profile.field(grid)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub half_width: f64,
    pub modes: usize,
    pub alpha: f64,
    pub beta: f64,
    pub u0: InitSpec,
    pub v0: InitSpec,
    pub sigma0: f64,
    pub sigma_bar: f64,
    pub m: usize,
    pub s: f64,
    pub delta: f64,
    pub j_max: usize,
    pub m_trunc: usize,
    pub t_end: f64,
    pub dt: f64,
    pub save_every: usize,
    pub seed: u64,
    /// The ensemble runs on its own, smaller grid.
    pub verify_half_width: f64,
    pub verify_modes: usize,
    pub ensemble: usize,
    /// Run the verification ensemble on zero fields only.
    pub zero_ensemble: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub c_s: Option<f64>,
    pub taylor_order: usize,
    pub picard_iters: usize,
    /// Picard time as a fraction of `T (1 - delta)`.
    pub picard_fraction: f64,
    /// Demand the global theory (`0 < beta < 2`).
    pub global: bool,
    pub out_dir: PathBuf,
    pub json: bool,
    pub csv: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            half_width: 16.0,
            modes: 1024,
            alpha: 0.0,
            beta: 1.0,
            u0: InitSpec::default(),
            v0: InitSpec::default(),
            sigma0: -1.0,
            sigma_bar: 0.0,
            m: 4,
            s: 2.0,
            delta: 0.5,
            j_max: 12,
            m_trunc: 6,
            t_end: 2.0,
            dt: 0.01,
            save_every: 10,
            seed: 0,
            verify_half_width: 4.0,
            verify_modes: 256,
            ensemble: 200,
            zero_ensemble: false,
            lambda_min: 1e-3,
            lambda_max: 1e3,
            lambda_points: 13,
            c_s: None,
            taylor_order: 12,
            picard_iters: 12,
            picard_fraction: 0.25,
            global: false,
            out_dir: PathBuf::from("out"),
            json: true,
            csv: true,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    pub fn grid(&self) -> chlab_core::Result<Grid> {
        Grid::new(self.half_width, self.modes)
    }

    pub fn verify_grid(&self) -> chlab_core::Result<Grid> {
        Grid::new(self.verify_half_width, self.verify_modes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based; 0 when the problem involves defaults only.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

fn real(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| err(line, format!("{key}: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(err(line, format!("{key}: must be finite")));
    }
    Ok(x)
}

fn count(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| {
        err(
            line,
            format!("{key}: expected a non-negative integer, got `{v}`"),
        )
    })
}

fn flag(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(
            line,
            format!("{key}: expected true or false, got `{v}`"),
        )),
    }
}

fn check(ok: bool, line: usize, msg: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(err(line, msg()))
    }
}

fn set_init(
    spec: &mut InitSpec,
    field: &str,
    line: usize,
    key: &str,
    v: &str,
) -> Result<bool, ConfigError> {
    match field {
        "kind" => {
            spec.kind = InitKind::parse(v).ok_or_else(|| {
                err(
                    line,
                    format!("{key}: unknown profile `{v}` (gaussian, sech, sech2, synthetic_spectrum, from_file, zero)"),
                )
            })?
        }
        "amplitude" => spec.amplitude = real(line, key, v)?,
        "width" => {
            spec.width = real(line, key, v)?;
            check(spec.width > 0.0, line, || format!("{key}: must be > 0"))?;
        }
        "center" => spec.center = real(line, key, v)?,
        "rate" => {
            spec.rate = real(line, key, v)?;
            check(spec.rate > 0.0, line, || format!("{key}: must be > 0"))?;
        }
        "path" => spec.path = v.to_string(),
        _ => return Ok(false),
    }
    Ok(true)
}

/// Parses a configuration document, filling defaults and validating ranges.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| {
            err(
                line,
                format!("expected `section.key = value`, got `{body}`"),
            )
        })?;
        let (key, v) = (key.trim(), value.trim());
        if v.is_empty() {
            return Err(err(line, format!("{key}: missing value")));
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(err(line, format!("{key}: already set on line {prev}")));
        }
        match key {
            "grid.half_width" => {
                c.half_width = real(line, key, v)?;
                check(c.half_width > 0.0, line, || format!("{key}: must be > 0"))?;
            }
            "grid.modes" => {
                c.modes = count(line, key, v)?;
                check(c.modes >= 8 && c.modes % 2 == 0, line, || {
                    format!("{key}: must be even and >= 8")
                })?;
            }
            "params.alpha" => c.alpha = real(line, key, v)?,
            "params.beta" => c.beta = real(line, key, v)?,
            "norms.sigma0" => c.sigma0 = real(line, key, v)?,
            "norms.sigma_bar" => c.sigma_bar = real(line, key, v)?,
            "norms.m" => {
                c.m = count(line, key, v)?;
                check(c.m >= 1, line, || format!("{key}: must be >= 1"))?;
            }
            "norms.s" => {
                c.s = real(line, key, v)?;
                check(c.s >= 2.0, line, || format!("{key}: must be >= 2"))?;
            }
            "norms.delta" => {
                c.delta = real(line, key, v)?;
                check(c.delta > 0.0 && c.delta < 1.0, line, || {
                    format!("{key}: must lie in (0, 1)")
                })?;
            }
            "norms.j_max" => {
                c.j_max = count(line, key, v)?;
                check((2..=16).contains(&c.j_max), line, || {
                    format!("{key}: must lie in 2..=16")
                })?;
            }
            "norms.m_trunc" => {
                c.m_trunc = count(line, key, v)?;
                check(c.m_trunc >= 1, line, || format!("{key}: must be >= 1"))?;
            }
            "time.t_end" => {
                c.t_end = real(line, key, v)?;
                check(c.t_end >= 0.0, line, || format!("{key}: must be >= 0"))?;
            }
            "time.dt" => {
                c.dt = real(line, key, v)?;
                check(c.dt > 0.0, line, || format!("{key}: must be > 0"))?;
            }
            "time.save_every" => {
                c.save_every = count(line, key, v)?;
                check(c.save_every >= 1, line, || format!("{key}: must be >= 1"))?;
            }
            "verify.seed" => {
                c.seed = v.parse().map_err(|_| {
                    err(
                        line,
                        format!("{key}: expected an unsigned integer, got `{v}`"),
                    )
                })?
            }
            "verify.half_width" => {
                c.verify_half_width = real(line, key, v)?;
                check(c.verify_half_width > 0.0, line, || {
                    format!("{key}: must be > 0")
                })?;
            }
            "verify.modes" => {
                c.verify_modes = count(line, key, v)?;
                check(c.verify_modes >= 8 && c.verify_modes % 2 == 0, line, || {
                    format!("{key}: must be even and >= 8")
                })?;
            }
            "verify.ensemble" => {
                c.ensemble = count(line, key, v)?;
                check(c.ensemble >= 1, line, || format!("{key}: must be >= 1"))?;
            }
            "verify.zero" => c.zero_ensemble = flag(line, key, v)?,
            "lifespan.lambda_min" => {
                c.lambda_min = real(line, key, v)?;
                check(c.lambda_min > 0.0, line, || format!("{key}: must be > 0"))?;
            }
            "lifespan.lambda_max" => {
                c.lambda_max = real(line, key, v)?;
                check(c.lambda_max > 0.0, line, || format!("{key}: must be > 0"))?;
            }
            "lifespan.points" => {
                c.lambda_points = count(line, key, v)?;
                check(c.lambda_points >= 2, line, || {
                    format!("{key}: must be >= 2")
                })?;
            }
            "lifespan.c_s" => {
                c.c_s = if v == "default" {
                    None
                } else {
                    let x = real(line, key, v)?;
                    check(x > 0.0, line, || format!("{key}: must be > 0 or `default`"))?;
                    Some(x)
                }
            }
            "taylor.order" => {
                c.taylor_order = count(line, key, v)?;
                check((12..=20).contains(&c.taylor_order), line, || {
                    format!("{key}: must lie in 12..=20 (the radius fit needs six orders)")
                })?;
            }
            "taylor.picard_iters" => {
                c.picard_iters = count(line, key, v)?;
                check(c.picard_iters >= 2, line, || format!("{key}: must be >= 2"))?;
            }
            "taylor.picard_fraction" => {
                c.picard_fraction = real(line, key, v)?;
                check(
                    c.picard_fraction >= 0.0 && c.picard_fraction < 1.0,
                    line,
                    || format!("{key}: must lie in [0, 1)"),
                )?;
            }
            "run.global" => c.global = flag(line, key, v)?,
            "output.dir" => c.out_dir = PathBuf::from(v),
            "output.formats" => {
                c.json = false;
                c.csv = false;
                for f in v.split(',').map(str::trim) {
                    match f {
                        "json" => c.json = true,
                        "csv" => c.csv = true,
                        _ => {
                            return Err(err(
                                line,
                                format!("{key}: unknown format `{f}` (json, csv)"),
                            ))
                        }
                    }
                }
            }
            _ => {
                let handled = if let Some(field) = key.strip_prefix("init.u.") {
                    set_init(&mut c.u0, field, line, key, v)?
                } else if let Some(field) = key.strip_prefix("init.v.") {
                    set_init(&mut c.v0, field, line, key, v)?
                } else {
                    false
                };
                if !handled {
                    return Err(err(line, format!("unknown key `{key}`")));
                }
            }
        }
    }

    let at = |k: &str| seen.get(k).copied().unwrap_or(0);
    let later = |a: &str, b: &str| at(a).max(at(b));
    check(
        c.sigma0 <= c.sigma_bar,
        later("norms.sigma0", "norms.sigma_bar"),
        || {
            format!(
                "norms.sigma0 = {} exceeds norms.sigma_bar = {}",
                c.sigma0, c.sigma_bar
            )
        },
    )?;
    check(c.m + 2 <= 16, at("norms.m"), || {
        "norms.m: need m + 2 <= 16".into()
    })?;
    check(c.m_trunc + 2 <= 16, at("norms.m_trunc"), || {
        "norms.m_trunc: need m_trunc + 2 <= 16".into()
    })?;
    check(
        c.lambda_min < c.lambda_max,
        later("lifespan.lambda_min", "lifespan.lambda_max"),
        || "lifespan.lambda_min must be below lifespan.lambda_max".into(),
    )?;
    for (name, spec) in [("u", &c.u0), ("v", &c.v0)] {
        check(
            spec.kind != InitKind::FromFile || !spec.path.is_empty(),
            at(&format!("init.{name}.kind")),
            || format!("init.{name}.path is required for from_file"),
        )?;
    }
    if c.global {
        check(
            c.beta > 0.0 && c.beta < 2.0,
            later("params.beta", "run.global"),
            || {
                format!(
                    "params.beta = {} is outside 0 < beta < 2, required by run.global = true",
                    c.beta
                )
            },
        )?;
    }
    check(c.json || c.csv, at("output.formats"), || {
        "output.formats: choose at least one".into()
    })?;
    Ok(c)
}

fn init_lines(out: &mut String, name: &str, s: &InitSpec) {
    out.push_str(&format!("init.{name}.kind = {}\n", s.kind.name()));
    out.push_str(&format!("init.{name}.amplitude = {:?}\n", s.amplitude));
    out.push_str(&format!("init.{name}.width = {:?}\n", s.width));
    out.push_str(&format!("init.{name}.center = {:?}\n", s.center));
    out.push_str(&format!("init.{name}.rate = {:?}\n", s.rate));
    if !s.path.is_empty() {
        out.push_str(&format!("init.{name}.path = {}\n", s.path));
    }
}

/// Canonical text form; `parse_config(&to_text(c)) == c`.
pub fn to_text(c: &RunConfig) -> String {
    let mut o = String::new();
    o.push_str(&format!("grid.half_width = {:?}\n", c.half_width));
    o.push_str(&format!("grid.modes = {}\n", c.modes));
    o.push_str(&format!("params.alpha = {:?}\n", c.alpha));
    o.push_str(&format!("params.beta = {:?}\n", c.beta));
    init_lines(&mut o, "u", &c.u0);
    init_lines(&mut o, "v", &c.v0);
    o.push_str(&format!("norms.sigma0 = {:?}\n", c.sigma0));
    o.push_str(&format!("norms.sigma_bar = {:?}\n", c.sigma_bar));
    o.push_str(&format!("norms.m = {}\n", c.m));
    o.push_str(&format!("norms.s = {:?}\n", c.s));
    o.push_str(&format!("norms.delta = {:?}\n", c.delta));
    o.push_str(&format!("norms.j_max = {}\n", c.j_max));
    o.push_str(&format!("norms.m_trunc = {}\n", c.m_trunc));
    o.push_str(&format!("time.t_end = {:?}\n", c.t_end));
    o.push_str(&format!("time.dt = {:?}\n", c.dt));
    o.push_str(&format!("time.save_every = {}\n", c.save_every));
    o.push_str(&format!("verify.seed = {}\n", c.seed));
    o.push_str(&format!("verify.half_width = {:?}\n", c.verify_half_width));
    o.push_str(&format!("verify.modes = {}\n", c.verify_modes));
    o.push_str(&format!("verify.ensemble = {}\n", c.ensemble));
    o.push_str(&format!("verify.zero = {}\n", c.zero_ensemble));
    o.push_str(&format!("lifespan.lambda_min = {:?}\n", c.lambda_min));
    o.push_str(&format!("lifespan.lambda_max = {:?}\n", c.lambda_max));
    o.push_str(&format!("lifespan.points = {}\n", c.lambda_points));
    match c.c_s {
        Some(x) => o.push_str(&format!("lifespan.c_s = {x:?}\n")),
        None => o.push_str("lifespan.c_s = default\n"),
    }
    o.push_str(&format!("taylor.order = {}\n", c.taylor_order));
    o.push_str(&format!("taylor.picard_iters = {}\n", c.picard_iters));
    o.push_str(&format!(
        "taylor.picard_fraction = {:?}\n",
        c.picard_fraction
    ));
    o.push_str(&format!("run.global = {}\n", c.global));
    o.push_str(&format!("output.dir = {}\n", c.out_dir.display()));
    let formats: Vec<&str> = [(c.json, "json"), (c.csv, "csv")]
        .iter()
        .filter(|f| f.0)
        .map(|f| f.1)
        .collect();
    o.push_str(&format!("output.formats = {}\n", formats.join(",")));
    o
}
