//! Running methods on a config and comparing the results.

use fracsis::coeffs::{a_coeffs, euler_alpha, MAX_ORDER};
use fracsis::model::{classical_sis, logistic_rhs, ZERO_CAPACITY_TOL};
use fracsis::series::{build_series_thm1, build_series_thm2, sample_trajectory};
use fracsis::solvers::{solve_l1, solve_pece};
use fracsis::{EvalPolicy, Method, RadiusEstimate, SeriesSolution, TimeGrid, Trajectory};

use crate::config::{check_series, resolve, Preset, RawConfig, RunConfig};
use crate::error::{HarnessError, Result};

/// Orders of the three-way comparison sweep.
pub const TABLE1_ALPHAS: [f64; 3] = [0.99, 0.7, 0.3];
/// Series length used by the sweep; the α = 0.99 series needs about 200
/// terms to resolve t = 5.
pub const TABLE1_TERMS: usize = 200;
/// Orders of the zero-capacity suite.
pub const C0_ALPHAS: [f64; 3] = [0.99, 0.7, 0.5];

/// Builds the series solution described by `cfg`.
pub fn build_series(cfg: &RunConfig) -> Result<SeriesSolution> {
    check_series(&cfg.params, &cfg.derived)?;
    let alpha = cfg.params.alpha;
    let s = if cfg.derived.c.abs() <= ZERO_CAPACITY_TOL {
        build_series_thm2(
            cfg.params.beta,
            &cfg.derived,
            alpha,
            a_coeffs(alpha, cfg.series_terms)?,
        )?
    } else {
        build_series_thm1(&cfg.derived, alpha, euler_alpha(alpha, cfg.series_terms)?)?
    };
    Ok(s)
}

/// Classical (α = 1) closed form sampled on the grid.
pub fn classical_trajectory(cfg: &RunConfig) -> Result<Trajectory> {
    let values = cfg
        .grid
        .nodes()
        .map(|t| classical_sis(&cfg.params, t).map(|(i, _)| i))
        .collect::<fracsis::Result<Vec<f64>>>()?;
    Ok(Trajectory::new(cfg.grid, values, Method::Classical, 1.0)?)
}

/// One method's trajectory, plus the series radius when relevant.
pub fn run_method(cfg: &RunConfig, method: Method) -> Result<(Trajectory, Option<RadiusEstimate>)> {
    let p = &cfg.params;
    let f = logistic_rhs(p, &cfg.derived);
    let out = match method {
        Method::Series => {
            let s = build_series(cfg)?;
            let tr = sample_trajectory(&s, &cfg.grid, &EvalPolicy::default())?;
            (tr, Some(*s.radius()))
        }
        Method::Pece => (solve_pece(f, p.i0, &cfg.grid, p.alpha)?, None),
        Method::L1 => (solve_l1(f, p.i0, &cfg.grid, p.alpha)?, None),
        Method::Classical => (classical_trajectory(cfg)?, None),
    };
    Ok(out)
}

/// Max-norm distance between two trajectories on the same grid.
pub fn linf_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.grid != b.grid || a.values.len() != b.values.len() {
        return Err(HarnessError::Validation(format!(
            "grid mismatch: {} vs {} nodes (dt {} vs {})",
            a.values.len(),
            b.values.len(),
            a.grid.dt(),
            b.grid.dt()
        )));
    }
    let mut worst = 0.0f64;
    for (x, y) in a.values.iter().zip(&b.values) {
        let d = (x - y).abs();
        if d.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance {
    pub a: Method,
    pub b: Method,
    pub linf: f64,
}

/// Pairwise max-norm distances between trajectories sharing a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub grid: TimeGrid,
    pub pairs: Vec<PairDistance>,
}

impl ComparisonReport {
    /// All pairs `(i, j)`, `i < j`, in the order the trajectories are given.
    pub fn from_trajectories(alpha: f64, trajectories: &[Trajectory]) -> Result<Self> {
        let grid = match trajectories.first() {
            Some(t) => t.grid,
            None => return Err(HarnessError::Validation("nothing to compare".into())),
        };
        let mut pairs = Vec::new();
        for (i, a) in trajectories.iter().enumerate() {
            for b in &trajectories[i + 1..] {
                pairs.push(PairDistance {
                    a: a.method,
                    b: b.method,
                    linf: linf_distance(a, b)?,
                });
            }
        }
        Ok(ComparisonReport { alpha, grid, pairs })
    }

    /// Distance between two methods, in either order.
    pub fn get(&self, a: Method, b: Method) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
            .map(|p| p.linf)
    }
}

/// Everything produced by running one config.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub trajectories: Vec<Trajectory>,
    pub radius: Option<RadiusEstimate>,
    pub report: ComparisonReport,
}

impl RunOutput {
    pub fn trajectory(&self, method: Method) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.method == method)
    }
}

/// Runs every method requested by `cfg` and compares them.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutput> {
    let mut trajectories = Vec::with_capacity(cfg.methods.len());
    let mut radius = None;
    for &m in &cfg.methods {
        let (tr, r) = run_method(cfg, m)?;
        radius = radius.or(r);
        trajectories.push(tr);
    }
    let report = ComparisonReport::from_trajectories(cfg.params.alpha, &trajectories)?;
    Ok(RunOutput {
        config: cfg.clone(),
        trajectories,
        radius,
        report,
    })
}

fn preset_config(
    preset: Preset,
    alpha: f64,
    methods: &[Method],
    terms: usize,
) -> Result<RunConfig> {
    resolve(RawConfig {
        preset: Some(preset.name().to_string()),
        alpha: Some(alpha),
        methods: Some(methods.iter().map(|m| m.name().to_string()).collect()),
        terms: Some(terms),
        ..RawConfig::default()
    })
}

/// Config of one row of the three-way comparison.
pub fn table1_config(alpha: f64) -> Result<RunConfig> {
    preset_config(
        Preset::CNonzero,
        alpha,
        &[Method::Series, Method::Pece, Method::L1],
        TABLE1_TERMS,
    )
}

/// Series, PECE and L1 on the carrying-capacity preset at each order.
pub fn run_table1(alphas: &[f64]) -> Result<Vec<RunOutput>> {
    alphas
        .iter()
        .map(|&a| table1_config(a).and_then(|cfg| run_config(&cfg)))
        .collect()
}

/// `(series vs pece, series vs l1, pece vs l1)` of a comparison.
pub fn table1_row(report: &ComparisonReport) -> Option<[f64; 3]> {
    Some([
        report.get(Method::Series, Method::Pece)?,
        report.get(Method::Series, Method::L1)?,
        report.get(Method::Pece, Method::L1)?,
    ])
}

/// First node at which the order of `I` and `S` differs from the order at
/// `t = 0` (the first `I ≥ S` when the epidemic starts below one half).
pub fn crossing_time(tr: &Trajectory) -> Option<f64> {
    crossing_index(tr).map(|n| tr.grid.node(n))
}

fn crossing_index(tr: &Trajectory) -> Option<usize> {
    let above = |n: usize| tr.values[n] >= tr.s(n);
    let start = above(0);
    (1..tr.values.len()).find(|&n| above(n) != start)
}

/// Crossing time, counted only when every node up to it converged.
fn trusted_crossing(tr: &Trajectory) -> Option<f64> {
    let n = crossing_index(tr)?;
    // stepping methods carry no per-node status
    tr.status
        .iter()
        .take(n + 1)
        .all(|s| s.converged)
        .then(|| tr.grid.node(n))
}

/// Per-order outcome of the zero-capacity suite.
#[derive(Debug, Clone)]
pub struct C0Run {
    pub output: RunOutput,
    /// First node where the series stops converging.
    pub series_divergence: Option<f64>,
    pub bounded: Vec<(Method, bool)>,
    pub crossing: Vec<(Method, Option<f64>)>,
}

impl C0Run {
    pub fn alpha(&self) -> f64 {
        self.output.config.params.alpha
    }

    pub fn is_bounded(&self, m: Method) -> Option<bool> {
        self.bounded.iter().find(|(x, _)| *x == m).map(|&(_, b)| b)
    }

    pub fn crossing_of(&self, m: Method) -> Option<f64> {
        self.crossing
            .iter()
            .find(|(x, _)| *x == m)
            .and_then(|&(_, c)| c)
    }
}

/// Longest A-table (up to the maximum order) that is finite in `f64`.
///
/// Near α = 1 the A-coefficients grow like `k!/2^k` and overflow before
/// `k = 200`; for smaller orders the full length is available and needed,
/// since at α = 0.7 the terms at `t = 1` decay only like `0.79^{0.7k}`.
pub fn longest_a_table(alpha: f64) -> Result<usize> {
    match a_coeffs(alpha, MAX_ORDER) {
        Ok(_) => Ok(MAX_ORDER),
        Err(fracsis::Error::CoefficientOverflow { index }) if index > 1 => Ok(index - 1),
        Err(e) => Err(e.into()),
    }
}

pub fn c0_config(alpha: f64) -> Result<RunConfig> {
    preset_config(
        Preset::CZero,
        alpha,
        &[Method::Series, Method::Pece, Method::L1],
        longest_a_table(alpha)?,
    )
}

/// Series, PECE and L1 on the zero-capacity preset at each order.
///
/// A series that stops converging is kept; its partial sums are flagged per
/// node and `series_divergence` records where. `bounded` only asks whether
/// the reported values stay in `[0, 1]`.
pub fn run_c0_suite(alphas: &[f64]) -> Result<Vec<C0Run>> {
    alphas
        .iter()
        .map(|&a| {
            let output = run_config(&c0_config(a)?)?;
            let series_divergence = output
                .trajectory(Method::Series)
                .and_then(Trajectory::first_divergence);
            let bounded = output
                .trajectories
                .iter()
                .map(|t| (t.method, t.within_unit_interval()))
                .collect();
            let crossing = output
                .trajectories
                .iter()
                .map(|t| (t.method, trusted_crossing(t)))
                .collect();
            Ok(C0Run {
                output,
                series_divergence,
                bounded,
                crossing,
            })
        })
        .collect()
}
