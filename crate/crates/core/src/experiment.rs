//! Run configuration, presets, and the experiment driver that writes
//! trajectories and error tables.
//!
//! A run is described by a JSON document whose keys mirror the command-line
//! flags:
//!
//! ```json
//! { "preset": "ex1", "alpha": 0.7, "a": 0.5, "delay": 0.7, "y0": 1.0,
//!   "h": 0.001, "t_max": 120.0, "b_coeffs": [1.0, 0.2, -0.05], "K": 2,
//!   "family": "conformable", "schemes": ["series", "euler"],
//!   "output_dir": "out", "plot_data": false, "delay_indexing": "guarded" }
//! ```
//!
//! Every key is optional. Values start from the preset (or from `ex1` when no
//! preset is named) and explicit keys override them. Unknown keys are errors.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{compare, compare_from, ErrorReport, Scheme};
use crate::{DelayIndexing, Error, Family, ForcingSeries, ProblemConfig, Result, Trajectory};

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    CaputoBench,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::Ex1, Preset::Ex2, Preset::Ex3, Preset::Ex4, Preset::Ex5, Preset::CaputoBench];

    pub fn label(self) -> &'static str {
        match self {
            Preset::Ex1 => "ex1",
            Preset::Ex2 => "ex2",
            Preset::Ex3 => "ex3",
            Preset::Ex4 => "ex4",
            Preset::Ex5 => "ex5",
            Preset::CaputoBench => "caputo-bench",
        }
    }

    /// `α = 0.7`, `y0 = 1`, `h = 0.001`, `b = [1, 0.2, −0.05]` throughout.
    pub fn problem(self) -> ProblemConfig<f64> {
        let (family, a, delay, t_max) = match self {
            Preset::Ex1 => (Family::Conformable, 0.5, 0.7, 120.0),
            Preset::Ex2 => (Family::Conformable, 0.5, 2.0, 120.0),
            Preset::Ex3 => (Family::Conformable, 0.5, 3.0, 120.0),
            Preset::Ex4 => (Family::Conformable, 0.5, 5.0, 120.0),
            Preset::Ex5 => (Family::Conformable, 1.1, 3.0, 120.0),
            Preset::CaputoBench => (Family::Caputo, 0.5, 1.0, 10.0),
        };
        let forcing = ForcingSeries::new(vec![1.0, 0.2, -0.05]).expect("finite coefficients");
        ProblemConfig::new(family, 0.7, a, delay, 1.0, forcing, 0.001, t_max).expect("preset is valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown preset '{s}'")))
    }
}

/// Serialized form of a run; also used for command-line overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_coeffs: Option<Vec<f64>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_indexing: Option<String>,
}

impl RunDoc {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(mut self, over: &RunDoc) -> RunDoc {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f.clone(); } )* };
        }
        take!(preset, family, alpha, a, delay, y0, h, t_max, b_coeffs, k, schemes, output_dir, plot_data, delay_indexing);
        self
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub problem: ProblemConfig<f64>,
    pub schemes: Vec<Scheme>,
    pub output_dir: PathBuf,
    pub plot_data: bool,
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        let problem = preset.problem();
        Self {
            preset: Some(preset),
            schemes: Scheme::defaults_for(problem.family),
            problem,
            output_dir: PathBuf::from("out"),
            plot_data: false,
        }
    }

    pub fn to_doc(&self) -> RunDoc {
        let p = &self.problem;
        RunDoc {
            preset: self.preset.map(|p| p.label().to_string()),
            family: Some(p.family.label().to_string()),
            alpha: Some(p.alpha),
            a: Some(p.a),
            delay: Some(p.delay),
            y0: Some(p.y0),
            h: Some(p.h),
            t_max: Some(p.t_max),
            b_coeffs: Some(p.forcing.coeffs().to_vec()),
            k: Some(p.forcing.truncation()),
            schemes: Some(self.schemes.iter().map(|s| s.label().to_string()).collect()),
            output_dir: Some(self.output_dir.clone()),
            plot_data: Some(self.plot_data),
            delay_indexing: Some(indexing_label(p.indexing).to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("plain data serializes")
    }
}

fn indexing_label(i: DelayIndexing) -> &'static str {
    match i {
        DelayIndexing::Guarded => "guarded",
        DelayIndexing::Raw => "raw",
    }
}

/// Parses a JSON run document.
pub fn parse_config(source: &str) -> Result<RunConfig> {
    parse_config_with(source, &RunDoc::default())
}

/// Parses a JSON run document and applies `overrides` on top.
pub fn parse_config_with(source: &str, overrides: &RunDoc) -> Result<RunConfig> {
    resolve(&parse_doc(source)?.merged(overrides))
}

/// Syntax-level parse without validation.
pub fn parse_doc(source: &str) -> Result<RunDoc> {
    serde_json::from_str(source).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

/// Validates a document, reporting every problem at once.
pub fn resolve(doc: &RunDoc) -> Result<RunConfig> {
    let mut errors = Vec::new();
    let preset = match doc.preset.as_deref().map(Preset::from_str) {
        Some(Ok(p)) => Some(p),
        Some(Err(e)) => {
            errors.push(e.to_string());
            None
        }
        None => None,
    };
    let base = preset.unwrap_or(Preset::Ex1).problem();

    let schemes: Option<Vec<Scheme>> = doc.schemes.as_ref().map(|names| {
        names
            .iter()
            .filter_map(|n| match n.parse::<Scheme>() {
                Ok(s) => Some(s),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            })
            .collect()
    });

    let family = match doc.family.as_deref() {
        Some("conformable") => Family::Conformable,
        Some("caputo") => Family::Caputo,
        Some(other) => {
            errors.push(format!("unknown family '{other}' (expected conformable or caputo)"));
            base.family
        }
        None => match (&schemes, preset) {
            (Some(s), None) if !s.is_empty() && s.iter().all(|k| k.family() == Family::Caputo) => Family::Caputo,
            _ => base.family,
        },
    };

    let indexing = match doc.delay_indexing.as_deref() {
        None | Some("guarded") => DelayIndexing::Guarded,
        Some("raw") => DelayIndexing::Raw,
        Some(other) => {
            errors.push(format!("unknown delay_indexing '{other}' (expected guarded or raw)"));
            DelayIndexing::Guarded
        }
    };

    let schemes = schemes.unwrap_or_else(|| Scheme::defaults_for(family));
    if schemes.is_empty() && doc.schemes.as_ref().is_some_and(|s| s.is_empty()) {
        errors.push("schemes must not be empty".into());
    }
    for s in &schemes {
        if s.family() != family {
            errors.push(format!("scheme '{}' does not belong to family '{}'", s.label(), family.label()));
        }
    }

    let coeffs = doc.b_coeffs.clone().unwrap_or_else(|| base.forcing.coeffs().to_vec());
    let forcing = match ForcingSeries::new(coeffs) {
        Ok(f) => Some(match doc.k {
            Some(k) => f.with_truncation(k),
            None => f,
        }),
        Err(e) => {
            errors.push(format!("b_coeffs: {e}"));
            None
        }
    };

    let problem = ProblemConfig {
        alpha: doc.alpha.unwrap_or(base.alpha),
        a: doc.a.unwrap_or(base.a),
        delay: doc.delay.unwrap_or(base.delay),
        y0: doc.y0.unwrap_or(base.y0),
        forcing: forcing.unwrap_or_else(|| base.forcing.clone()),
        h: doc.h.unwrap_or(base.h),
        t_max: doc.t_max.unwrap_or(base.t_max),
        family,
        indexing,
    };
    errors.extend(problem.problems());

    if errors.is_empty() {
        let mut unique = Vec::with_capacity(schemes.len());
        for s in schemes {
            if !unique.contains(&s) {
                unique.push(s);
            }
        }
        Ok(RunConfig {
            preset,
            problem,
            schemes: unique,
            output_dir: doc.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            plot_data: doc.plot_data.unwrap_or(false),
        })
    } else {
        Err(Error::Config(errors))
    }
}

/// Errors of one non-reference scheme.
#[derive(Debug, Clone)]
pub struct SchemeReport {
    pub scheme: Scheme,
    pub all_nodes: ErrorReport<f64>,
    /// Nodes with `t ≥ T` only.
    pub after_delay: ErrorReport<f64>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub reports: Vec<SchemeReport>,
    pub trajectories: Vec<Trajectory<f64>>,
    pub diverged: bool,
}

impl RunSummary {
    /// Fixed-width table of maximum and RMS relative errors.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:>22} {:>22}", "Method", "Max. rel. error", "RMS rel. error");
        for r in &self.reports {
            let _ = writeln!(out, "{:<16} {:>22.6e} {:>22.6e}", r.scheme.label(), r.all_nodes.max_rel, r.all_nodes.rms_rel);
        }
        out
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn errors_csv(reports: &[(Scheme, &ErrorReport<f64>)]) -> String {
    let mut out = String::from("scheme,max_rel,rms_rel,max_abs,n_points,diverged_at\n");
    for (s, r) in reports {
        let div = r.diverged_at.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{:.16e},{:.16e},{:.16e},{},{}", s.label(), r.max_rel, r.rms_rel, r.max_abs, r.n_points, div);
    }
    out
}

fn plot_csv(reference: &Trajectory<f64>, others: &[&Trajectory<f64>]) -> String {
    let mut out = String::from("t,series");
    for t in others {
        let _ = write!(out, ",{}", t.scheme);
    }
    for t in others {
        let _ = write!(out, ",rel_{}", t.scheme);
    }
    out.push('\n');
    for n in 0..reference.values.len() {
        let s = reference.values[n];
        let _ = write!(out, "{:.16e},{:.16e}", reference.mesh.node(n), s);
        for t in others {
            let _ = write!(out, ",{:.16e}", t.values[n]);
        }
        for t in others {
            let rel = (t.values[n] - s).abs() / (s.abs() + 1e-14);
            let _ = write!(out, ",{rel:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Runs every selected scheme and writes `<scheme>.csv`, `errors.csv`,
/// `errors_after_delay.csv` and, if requested, `plotdata.csv`.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunSummary> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let reference = Scheme::reference_for(cfg.problem.family);
    let mut to_run = cfg.schemes.clone();
    if !to_run.contains(&reference) {
        to_run.push(reference);
    }
    let results: Vec<Result<Trajectory<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = to_run.iter().map(|s| scope.spawn(move || s.run(&cfg.problem))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let mut trajectories = Vec::with_capacity(results.len());
    for r in results {
        trajectories.push(r?);
    }
    let by_scheme = |s: Scheme| &trajectories[to_run.iter().position(|&k| k == s).expect("scheme was run")];
    let exact = by_scheme(reference);

    let mut files = Vec::new();
    for &s in &cfg.schemes {
        let path = dir.join(format!("{}.csv", s.label()));
        write_file(&path, &by_scheme(s).to_csv())?;
        files.push(path);
    }

    let m = exact.mesh.first_delayed_node();
    let mut reports = Vec::new();
    for &s in cfg.schemes.iter().filter(|s| !s.is_reference()) {
        let t = by_scheme(s);
        reports.push(SchemeReport { scheme: s, all_nodes: compare(t, exact)?, after_delay: compare_from(t, exact, m)? });
    }
    let all: Vec<_> = reports.iter().map(|r| (r.scheme, &r.all_nodes)).collect();
    let late: Vec<_> = reports.iter().map(|r| (r.scheme, &r.after_delay)).collect();
    for (name, rows) in [("errors.csv", &all), ("errors_after_delay.csv", &late)] {
        let path = dir.join(name);
        write_file(&path, &errors_csv(rows))?;
        files.push(path);
    }

    if cfg.plot_data {
        let others: Vec<&Trajectory<f64>> = cfg.schemes.iter().filter(|s| !s.is_reference()).map(|&s| by_scheme(s)).collect();
        let path = dir.join("plotdata.csv");
        write_file(&path, &plot_csv(exact, &others))?;
        files.push(path);
    }

    let diverged = trajectories.iter().any(|t| t.diverged_at.is_some());
    let keep: Vec<Trajectory<f64>> = cfg.schemes.iter().map(|&s| by_scheme(s).clone()).collect();
    Ok(RunSummary { files, reports, trajectories: keep, diverged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_ex1() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c.problem, Preset::Ex1.problem());
        assert_eq!(c.schemes, Scheme::defaults_for(Family::Conformable));
        assert_eq!(c.problem.h, 0.001);
        assert_eq!(c.problem.forcing.truncation(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        match parse_config("{\n  \"alpha\": 0.5,\n  \"beta\": 1\n}") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("beta"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(matches!(parse_config("{\"alpha\": }"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn semantic_errors_are_exhaustive() {
        let err = parse_config(r#"{"alpha": 1.5, "delay": -1, "h": 0.3, "schemes": ["rk9"], "family": "caputo", "b_coeffs": []}"#).unwrap_err();
        match err {
            Error::Config(list) => {
                assert!(list.iter().any(|e| e.contains("rk9")), "{list:?}");
                assert!(list.iter().any(|e| e.contains("alpha")), "{list:?}");
                assert!(list.iter().any(|e| e.contains("delay")), "{list:?}");
                assert!(list.iter().any(|e| e.contains("b_coeffs")), "{list:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scheme_family_mismatch_names_the_pair() {
        let err = parse_config(r#"{"family": "caputo", "schemes": ["rk4"]}"#).unwrap_err();
        assert!(err.to_string().contains("'rk4'") && err.to_string().contains("'caputo'"), "{err}");
    }

    #[test]
    fn family_inferred_from_caputo_schemes() {
        let c = parse_config(r#"{"schemes": ["caputo-l1"], "t_max": 2.0}"#).unwrap();
        assert_eq!(c.problem.family, Family::Caputo);
    }

    #[test]
    fn overrides_win() {
        let over = RunDoc { h: Some(0.01), t_max: Some(7.0), ..Default::default() };
        let c = parse_config_with(r#"{"preset": "ex2", "h": 0.002}"#, &over).unwrap();
        assert_eq!(c.problem.h, 0.01);
        assert_eq!(c.problem.t_max, 7.0);
        assert_eq!(c.problem.delay, 2.0);
    }

    #[test]
    fn k_pads_or_truncates() {
        let c = parse_config(r#"{"b_coeffs": [1.0, 2.0, 3.0], "K": 4}"#).unwrap();
        assert_eq!(c.problem.forcing.coeffs(), &[1.0, 2.0, 3.0, 0.0, 0.0]);
        let c = parse_config(r#"{"b_coeffs": [1.0, 2.0, 3.0], "K": 0}"#).unwrap();
        assert_eq!(c.problem.forcing.coeffs(), &[1.0]);
    }

    #[test]
    fn presets_round_trip() {
        for p in Preset::ALL {
            let c = RunConfig::from_preset(p);
            assert_eq!(parse_config(&c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn run_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let doc = RunDoc {
            t_max: Some(1.4),
            output_dir: Some(dir.path().to_path_buf()),
            plot_data: Some(true),
            ..Default::default()
        };
        let cfg = resolve(&doc).unwrap();
        let summary = run_experiment(&cfg).unwrap();
        assert!(!summary.diverged);
        for f in ["series.csv", "euler.csv", "rk4.csv", "rk4-interp.csv", "errors.csv", "errors_after_delay.csv", "plotdata.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let errors = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
        let mut lines = errors.lines();
        assert_eq!(lines.next(), Some("scheme,max_rel,rms_rel,max_abs,n_points,diverged_at"));
        assert!(lines.next().unwrap().ends_with(",1401,"));
        let plot = std::fs::read_to_string(dir.path().join("plotdata.csv")).unwrap();
        assert!(plot.starts_with("t,series,euler,rk4,rk4-interp,rel_euler,rel_rk4,rel_rk4-interp\n"));
        assert_eq!(plot.lines().count(), 1402);
        assert!(summary.table().contains("rk4-interp"));
    }
}
