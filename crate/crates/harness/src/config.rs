//! Run configuration.
//!
//! Configs are flat TOML documents. Every key is optional on disk; a
//! `preset` fills in a named parameter set and explicit keys win over it.
//!
//! ```toml
//! preset  = "c-nonzero"   # or "c-zero"
//! beta    = 0.7
//! gamma   = 0.05
//! mu      = 0.12
//! lambda  = 0.12          # defaults to mu
//! alpha   = 0.7
//! i0      = 0.3785714285714286
//! T       = 5.0
//! dt      = 0.05
//! methods = ["series", "pece", "l1", "classical"]
//! terms   = 120
//! out     = "runs/alpha07"
//! formats = ["csv", "json", "svg"]
//! ```
//!
//! A run manifest (`manifest.json`) written by the harness is accepted as
//! well; its first run's fully resolved config is used.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fracsis::coeffs::{radius_theorem1, MAX_ORDER};
use fracsis::model::{derive, ZERO_CAPACITY_TOL};
use fracsis::{DerivedParams, Method, ModelParams, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_T: f64 = 5.0;
pub const DEFAULT_TERMS: usize = 120;
pub const DEFAULT_OUT: &str = "fracsis-out";

/// Tolerance when checking that `i0` is the initial datum a series needs.
const I0_TOL: f64 = 1e-12;

/// Output formats a run may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(HarnessError::Validation(format!(
                "unknown format `{other}`"
            ))),
        }
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// β = 0.7, γ = 0.05, μ = 0.12, I0 = c/2, T = 5, dt = 0.05.
    CNonzero,
    /// β = 0.7, γ = 0.07, μ = 0.63, I0 = 1/(2β), T = 1, dt = 0.01.
    CZero,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::CNonzero => "c-nonzero",
            Preset::CZero => "c-zero",
        }
    }

    /// Values the preset supplies; `i0` is left to the initial-datum rule.
    pub fn raw(self) -> RawConfig {
        let (gamma, mu, t, dt) = match self {
            Preset::CNonzero => (0.05, 0.12, 5.0, 0.05),
            Preset::CZero => (0.07, 0.63, 1.0, 0.01),
        };
        RawConfig {
            preset: Some(self.name().to_string()),
            beta: Some(0.7),
            gamma: Some(gamma),
            mu: Some(mu),
            alpha: Some(0.99),
            t_final: Some(t),
            dt: Some(dt),
            ..RawConfig::default()
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "c-nonzero" => Ok(Preset::CNonzero),
            "c-zero" => Ok(Preset::CZero),
            other => Err(HarnessError::Validation(format!(
                "unknown preset `{other}` (expected c-nonzero or c-zero)"
            ))),
        }
    }
}

/// Config as written on disk or on the command line; everything optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, alias = "I0", skip_serializing_if = "Option::is_none")]
    pub i0: Option<f64>,
    #[serde(
        default,
        rename = "T",
        alias = "t_final",
        skip_serializing_if = "Option::is_none"
    )]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<String>>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: RawConfig) -> RawConfig {
        RawConfig {
            preset: over.preset.or(self.preset),
            beta: over.beta.or(self.beta),
            gamma: over.gamma.or(self.gamma),
            mu: over.mu.or(self.mu),
            lambda: over.lambda.or(self.lambda),
            alpha: over.alpha.or(self.alpha),
            i0: over.i0.or(self.i0),
            t_final: over.t_final.or(self.t_final),
            dt: over.dt.or(self.dt),
            methods: over.methods.or(self.methods),
            terms: over.terms.or(self.terms),
            out: over.out.or(self.out),
            formats: over.formats.or(self.formats),
        }
    }
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub derived: DerivedParams,
    pub grid: TimeGrid,
    pub methods: BTreeSet<Method>,
    pub series_terms: usize,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub preset: Option<Preset>,
}

/// Reads a TOML config, or the config recorded in a run manifest.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    resolve(read_raw(path)?)
}

/// Reads a config file without resolving it.
pub fn read_raw(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        crate::emit::Manifest::from_json(&text, path)?
            .runs
            .into_iter()
            .next()
            .map(|r| r.config)
            .ok_or_else(|| HarnessError::Validation(format!("{} records no runs", path.display())))
    } else {
        RawConfig::from_toml_str(&text, path)
    }
}

fn require(value: Option<f64>, key: &str) -> Result<f64> {
    value.ok_or_else(|| HarnessError::Validation(format!("missing required key `{key}`")))
}

/// Initial datum the series solution is built for: `c/2` or `1/(2β)`.
pub fn series_initial_datum(params: &ModelParams, derived: &DerivedParams) -> Option<f64> {
    if derived.c > ZERO_CAPACITY_TOL {
        Some(derived.c / 2.0)
    } else if derived.c.abs() <= ZERO_CAPACITY_TOL {
        let i0 = 1.0 / (2.0 * params.beta);
        (i0 <= 1.0).then_some(i0)
    } else {
        None
    }
}

/// Checks the hypotheses of the series solution for these parameters.
pub fn check_series(params: &ModelParams, derived: &DerivedParams) -> Result<()> {
    let c = derived.c;
    if c < -ZERO_CAPACITY_TOL {
        return Err(HarnessError::Validation(format!(
            "series requires c >= 0, got c = {c} (sigma = {})",
            derived.sigma
        )));
    }
    if c > ZERO_CAPACITY_TOL {
        radius_theorem1(params.alpha, derived.b)
            .map_err(|e| HarnessError::Validation(format!("series: {e}")))?;
    }
    let want = series_initial_datum(params, derived).ok_or_else(|| {
        HarnessError::Validation("series requires 1/(2 beta) <= 1 when c = 0".into())
    })?;
    if (params.i0 - want).abs() > I0_TOL {
        let rule = if c > ZERO_CAPACITY_TOL {
            "c/2"
        } else {
            "1/(2 beta)"
        };
        return Err(HarnessError::Validation(format!(
            "series requires i0 = {rule} = {want}, got {}",
            params.i0
        )));
    }
    Ok(())
}

fn check_method(method: Method, params: &ModelParams, derived: &DerivedParams) -> Result<()> {
    match method {
        Method::L1 if params.alpha >= 1.0 => Err(HarnessError::Validation(format!(
            "method l1 requires alpha in (0, 1) with the extreme values excluded, got alpha = {}",
            params.alpha
        ))),
        Method::Series => check_series(params, derived),
        _ => Ok(()),
    }
}

fn parse_list<T: FromStr<Err = E> + Ord, E: Into<HarnessError>>(
    items: &[String],
) -> Result<BTreeSet<T>> {
    items
        .iter()
        .map(|s| s.parse::<T>().map_err(Into::into))
        .collect()
}

fn invalid(e: fracsis::Error) -> HarnessError {
    HarnessError::Validation(e.to_string())
}

/// Applies the preset, fills defaults and validates.
pub fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let preset = raw.preset.as_deref().map(Preset::from_str).transpose()?;
    let raw = match preset {
        Some(p) => p.raw().merged(raw),
        None => raw,
    };

    let beta = require(raw.beta, "beta")?;
    let gamma = require(raw.gamma, "gamma")?;
    let mu = require(raw.mu, "mu")?;
    let alpha = require(raw.alpha, "alpha")?;
    let lambda = raw.lambda.unwrap_or(mu);

    // i0 is validated once the capacity is known
    let provisional = ModelParams::new(beta, gamma, mu, alpha, 0.0)
        .and_then(|p| p.with_lambda(lambda))
        .map_err(invalid)?;
    let derived = derive(&provisional).map_err(invalid)?;
    let i0 = match raw.i0 {
        Some(v) => v,
        None => series_initial_datum(&provisional, &derived).ok_or_else(|| {
            HarnessError::Validation("missing required key `i0` (no default when c < 0)".into())
        })?,
    };
    let params = provisional.with_i0(i0).map_err(invalid)?;

    let grid = TimeGrid::new(
        raw.t_final.unwrap_or(DEFAULT_T),
        raw.dt.unwrap_or(DEFAULT_DT),
    )
    .map_err(invalid)?;

    let series_terms = raw.terms.unwrap_or(DEFAULT_TERMS);
    if series_terms == 0 || series_terms > MAX_ORDER {
        return Err(HarnessError::Validation(format!(
            "terms must lie in 1..={MAX_ORDER}, got {series_terms}"
        )));
    }

    let methods: BTreeSet<Method> = match &raw.methods {
        Some(list) => {
            let set: BTreeSet<Method> = parse_list(list)?;
            for &m in &set {
                check_method(m, &params, &derived)?;
            }
            set
        }
        None => Method::ALL
            .into_iter()
            .filter(|&m| check_method(m, &params, &derived).is_ok())
            .collect(),
    };
    if methods.is_empty() {
        return Err(HarnessError::Validation(
            "at least one method is required".into(),
        ));
    }

    let formats = match &raw.formats {
        Some(list) => parse_list(list)?,
        None => [Format::Csv, Format::Json].into_iter().collect(),
    };

    Ok(RunConfig {
        params,
        derived,
        grid,
        methods,
        series_terms,
        output_dir: raw.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        formats,
        preset,
    })
}

impl RunConfig {
    /// Fully explicit form of this config; resolving it gives back `self`.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            preset: self.preset.map(|p| p.name().to_string()),
            beta: Some(self.params.beta),
            gamma: Some(self.params.gamma),
            mu: Some(self.params.mu),
            lambda: Some(self.params.lambda),
            alpha: Some(self.params.alpha),
            i0: Some(self.params.i0),
            t_final: Some(self.grid.t_final()),
            dt: Some(self.grid.dt()),
            methods: Some(self.methods.iter().map(|m| m.name().to_string()).collect()),
            terms: Some(self.series_terms),
            out: Some(self.output_dir.clone()),
            formats: Some(self.formats.iter().map(|f| f.name().to_string()).collect()),
        }
    }

    /// Same run at another fractional order, with `i0` following the
    /// preset's initial-datum rule when there is one.
    pub fn with_alpha(&self, alpha: f64) -> Result<RunConfig> {
        let mut raw = self.to_raw();
        raw.alpha = Some(alpha);
        if self.preset.is_some() {
            raw.i0 = None;
        }
        // methods are re-derived unless they were all valid before
        let requested = raw.methods.take();
        let mut cfg = resolve(raw)?;
        if let Some(list) = requested {
            let wanted: BTreeSet<Method> = parse_list(&list)?;
            for &m in &wanted {
                check_method(m, &cfg.params, &cfg.derived)?;
            }
            cfg.methods = wanted;
        }
        Ok(cfg)
    }
}
