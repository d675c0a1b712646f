//! Files written by a run: trajectory CSV/JSON, comparison tables, SVG
//! plots and a manifest that is enough to re-run everything.
//!
//! Output is byte-deterministic: no timestamps, fixed row order, floats in
//! `{:.16e}` (17 significant digits, round-trips through `f64`).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fracsis::{Method, RadiusEstimate, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RawConfig};
use crate::error::{HarnessError, Result};
use crate::runs::{table1_row, C0Run, RunOutput};

pub const TOOL: &str = "fracsis";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub runs: Vec<RunRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            runs: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedRecord {
    pub sigma: f64,
    pub c: f64,
    pub b: f64,
    pub m: Option<f64>,
    pub r_alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusRecord {
    pub theoretical: f64,
    pub empirical: Option<f64>,
    pub k_used: usize,
}

impl From<&RadiusEstimate> for RadiusRecord {
    fn from(r: &RadiusEstimate) -> Self {
        RadiusRecord {
            theoretical: r.theoretical,
            empirical: r.empirical,
            k_used: r.k_used,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: String,
    pub b: String,
    /// `None` when the distance is NaN.
    pub linf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub t: f64,
    pub converged: bool,
    pub beyond_radius: bool,
    pub terms_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RawConfig,
    pub derived: DerivedRecord,
    pub series_radius: Option<RadiusRecord>,
    pub methods: Vec<String>,
    pub files: Vec<String>,
    pub comparisons: Vec<PairRecord>,
    /// Series only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_status: Vec<NodeRecord>,
}

fn alpha_tag(alpha: f64) -> String {
    format!("alpha{alpha}")
}

pub fn trajectory_stem(tr: &Trajectory, alpha: f64) -> String {
    format!("{}_{}", tr.method.name(), alpha_tag(alpha))
}

/// `t,I,S` rows; `S` is written as `1 − I`.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut s = String::from("t,I,S\n");
    for (t, i, sv) in tr.rows() {
        let _ = writeln!(s, "{t:.16e},{i:.16e},{sv:.16e}");
    }
    s
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    method: &'a str,
    alpha: f64,
    t: Vec<f64>,
    #[serde(rename = "I")]
    i: &'a [f64],
    #[serde(rename = "S")]
    s: Vec<f64>,
}

pub fn trajectory_json(tr: &Trajectory) -> String {
    let doc = TrajectoryJson {
        method: tr.method.name(),
        alpha: tr.alpha,
        t: tr.grid.nodes().collect(),
        i: &tr.values,
        s: tr.values.iter().map(|v| 1.0 - v).collect(),
    };
    let mut s = serde_json::to_string(&doc).expect("trajectory serializes");
    s.push('\n');
    s
}

pub fn comparison_csv(out: &RunOutput) -> String {
    let mut s = String::from("alpha,method_a,method_b,linf\n");
    for p in &out.report.pairs {
        let _ = writeln!(
            s,
            "{},{},{},{:.16e}",
            out.report.alpha,
            p.a.name(),
            p.b.name(),
            p.linf
        );
    }
    s
}

pub const TABLE1_HEADER: &str = "alpha,series_vs_pece,series_vs_l1,pece_vs_l1";

pub fn table1_csv(outputs: &[RunOutput]) -> String {
    let mut s = format!("{TABLE1_HEADER}\n");
    for out in outputs {
        if let Some([a, b, c]) = table1_row(&out.report) {
            let _ = writeln!(s, "{},{a:.16e},{b:.16e},{c:.16e}", out.report.alpha);
        }
    }
    s
}

/// Fixed-width rendering of the three-way comparison for terminals.
pub fn table1_text(outputs: &[RunOutput]) -> String {
    let mut s = format!(
        "{:>6}  {:>14}  {:>14}  {:>14}\n",
        "alpha", "series-pece", "series-l1", "pece-l1"
    );
    for out in outputs {
        if let Some([a, b, c]) = table1_row(&out.report) {
            let _ = writeln!(
                s,
                "{:>6}  {a:>14.3e}  {b:>14.3e}  {c:>14.3e}",
                out.report.alpha
            );
        }
    }
    s
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:.16e}"))
}

pub fn c0_summary_csv(runs: &[C0Run]) -> String {
    let mut s = String::from("alpha,method,bounded,crossing_time,series_divergence\n");
    for r in runs {
        for &(m, bounded) in &r.bounded {
            let div = if m == Method::Series {
                opt(r.series_divergence)
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.alpha(),
                m.name(),
                bounded,
                opt(r.crossing_of(m)),
                div
            );
        }
    }
    s
}

pub fn c0_summary_text(runs: &[C0Run]) -> String {
    let mut s = format!(
        "{:>6}  {:>9}  {:>7}  {:>10}  {:>10}\n",
        "alpha", "method", "bounded", "crossing", "diverges"
    );
    for r in runs {
        for &(m, bounded) in &r.bounded {
            let cross = r
                .crossing_of(m)
                .map_or_else(|| "-".to_string(), |t| format!("{t:.2}"));
            let div = match (m, r.series_divergence) {
                (Method::Series, Some(t)) => format!("t={t:.2}"),
                _ => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "{:>6}  {:>9}  {:>7}  {:>10}  {:>10}",
                r.alpha(),
                m.name(),
                bounded,
                cross,
                div
            );
        }
    }
    s
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 400.0;
const MARGIN: f64 = 48.0;

fn color(m: Method) -> &'static str {
    match m {
        Method::Series => "#1f77b4",
        Method::Pece => "#d62728",
        Method::L1 => "#2ca02c",
        Method::Classical => "#7f7f7f",
    }
}

/// Static line plot of `I` (solid) and `S` (dashed) for each trajectory.
pub fn svg_plot(trajectories: &[Trajectory], title: &str) -> String {
    let t_end = trajectories
        .iter()
        .map(|t| t.grid.node(t.grid.steps()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let x = |t: f64| MARGIN + (PLOT_W - 2.0 * MARGIN) * t / t_end;
    // values outside [0, 1] (divergent partial sums) are clipped to the frame
    let y = |v: f64| {
        let v = if v.is_finite() {
            v.clamp(-0.05, 1.05)
        } else {
            1.05
        };
        PLOT_H - MARGIN - (PLOT_H - 2.0 * MARGIN) * v
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        PLOT_W / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (x(0.0), x(t_end), y(0.0), y(1.0));
    let _ = writeln!(
        s,
        "<path d=\"M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}\" stroke=\"black\" fill=\"none\"/>"
    );
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{v}</text>",
            x0 - 6.0,
            y(v) + 3.0
        );
        let tv = t_end * v;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            x(tv),
            y0 + 16.0,
            trim_float(tv)
        );
    }
    for (idx, tr) in trajectories.iter().enumerate() {
        let c = color(tr.method);
        for (dash, series) in [("", 0usize), (" stroke-dasharray=\"6,4\"", 1)] {
            let mut d = String::new();
            for (n, (t, i, sv)) in tr.rows().enumerate() {
                let v = if series == 0 { i } else { sv };
                let _ = write!(
                    d,
                    "{}{:.2},{:.2}",
                    if n == 0 { "M" } else { " L" },
                    x(t),
                    y(v)
                );
            }
            let _ = writeln!(
                s,
                "<path d=\"{d}\" stroke=\"{c}\" stroke-width=\"1.5\" fill=\"none\"{dash}/>"
            );
        }
        let ly = MARGIN + 14.0 * idx as f64;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{c}\">{} (I solid, S dashed)</text>",
            PLOT_W - MARGIN - 150.0,
            tr.method.name()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn record(out: &RunOutput, files: Vec<String>) -> RunRecord {
    let d = &out.config.derived;
    let node_status = out
        .trajectory(Method::Series)
        .map(|tr| {
            tr.status
                .iter()
                .enumerate()
                .map(|(n, s)| NodeRecord {
                    t: tr.grid.node(n),
                    converged: s.converged,
                    beyond_radius: s.beyond_radius,
                    terms_used: s.terms_used,
                })
                .collect()
        })
        .unwrap_or_default();
    RunRecord {
        config: out.config.to_raw(),
        derived: DerivedRecord {
            sigma: d.sigma,
            c: d.c,
            b: d.b,
            m: d.m,
            r_alpha: d.r_alpha,
        },
        series_radius: out.radius.as_ref().map(RadiusRecord::from),
        methods: out
            .config
            .methods
            .iter()
            .map(|m| m.name().to_string())
            .collect(),
        files,
        comparisons: out
            .report
            .pairs
            .iter()
            .map(|p| PairRecord {
                a: p.a.name().into(),
                b: p.b.name().into(),
                linf: (!p.linf.is_nan()).then_some(p.linf),
            })
            .collect(),
        node_status,
    }
}

fn write_run(
    out: &RunOutput,
    dir: &Path,
    formats: &BTreeSet<Format>,
    written: &mut Vec<PathBuf>,
) -> Result<RunRecord> {
    let alpha = out.config.params.alpha;
    let mut files = Vec::new();
    let mut put = |name: String, body: String, written: &mut Vec<PathBuf>| -> Result<()> {
        write_file(dir, &name, &body, written)?;
        files.push(name);
        Ok(())
    };
    for tr in &out.trajectories {
        let stem = trajectory_stem(tr, alpha);
        if formats.contains(&Format::Csv) {
            put(format!("{stem}.csv"), trajectory_csv(tr), written)?;
        }
        if formats.contains(&Format::Json) {
            put(format!("{stem}.json"), trajectory_json(tr), written)?;
        }
    }
    if formats.contains(&Format::Svg) {
        let title = format!("I and S, alpha = {alpha}");
        put(
            format!("plot_{}.svg", alpha_tag(alpha)),
            svg_plot(&out.trajectories, &title),
            written,
        )?;
    }
    Ok(record(out, files))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Writes one run into its config's output directory.
pub fn emit(out: &RunOutput, command: &str) -> Result<Vec<PathBuf>> {
    let dir = &out.config.output_dir;
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let mut manifest = Manifest::new(command);
    manifest
        .runs
        .push(write_run(out, dir, &out.config.formats, &mut written)?);
    if out.trajectories.len() > 1 && out.config.formats.contains(&Format::Csv) {
        write_file(dir, "comparison.csv", &comparison_csv(out), &mut written)?;
        manifest.tables.push("comparison.csv".into());
    }
    write_file(dir, MANIFEST, &manifest.to_json(), &mut written)?;
    Ok(written)
}

/// Writes the comparison sweep: per-order trajectories and `table1.csv`.
pub fn emit_table1(
    outputs: &[RunOutput],
    dir: &Path,
    formats: &BTreeSet<Format>,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let mut manifest = Manifest::new("table1");
    for out in outputs {
        manifest
            .runs
            .push(write_run(out, dir, formats, &mut written)?);
    }
    write_file(dir, "table1.csv", &table1_csv(outputs), &mut written)?;
    manifest.tables.push("table1.csv".into());
    write_file(dir, MANIFEST, &manifest.to_json(), &mut written)?;
    Ok(written)
}

/// Writes the zero-capacity suite: per-order trajectories and a summary.
pub fn emit_c0(runs: &[C0Run], dir: &Path, formats: &BTreeSet<Format>) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let mut manifest = Manifest::new("c0-suite");
    for r in runs {
        manifest
            .runs
            .push(write_run(&r.output, dir, formats, &mut written)?);
    }
    write_file(dir, "c0_summary.csv", &c0_summary_csv(runs), &mut written)?;
    manifest.tables.push("c0_summary.csv".into());
    write_file(dir, MANIFEST, &manifest.to_json(), &mut written)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracsis::TimeGrid;

    fn tr() -> Trajectory {
        let g = TimeGrid::new(1.0, 0.5).unwrap();
        Trajectory::new(g, vec![0.1, 0.2, 0.30000000000000004], Method::Pece, 0.7).unwrap()
    }

    #[test]
    fn csv_rows_round_trip() {
        let text = trajectory_csv(&tr());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,I,S"));
        for (line, v) in lines.zip(&tr().values) {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[1], *v);
            assert_eq!(cols[2], 1.0 - v);
        }
    }

    #[test]
    fn json_trajectory_is_parseable() {
        let v: serde_json::Value = serde_json::from_str(&trajectory_json(&tr())).unwrap();
        assert_eq!(v["method"], "pece");
        assert_eq!(v["I"][2].as_f64().unwrap(), 0.30000000000000004);
        assert_eq!(v["t"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = svg_plot(&[tr()], "a < b");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<path").count(), 3);
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::new("solve");
        m.runs.push(RunRecord {
            config: RawConfig {
                beta: Some(0.7),
                ..RawConfig::default()
            },
            derived: DerivedRecord {
                sigma: 1.0,
                c: 0.0,
                b: 0.0,
                m: None,
                r_alpha: None,
            },
            series_radius: None,
            methods: vec!["pece".into()],
            files: vec![],
            comparisons: vec![PairRecord {
                a: "pece".into(),
                b: "l1".into(),
                linf: None,
            }],
            node_status: vec![],
        });
        let back = Manifest::from_json(&m.to_json(), Path::new("m.json")).unwrap();
        assert_eq!(back, m);
        assert!(!m.to_json().contains("time"));
    }
}
