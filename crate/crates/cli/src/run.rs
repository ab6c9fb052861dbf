//! Executing run specs, figure sets and `g2(0)` scans, and writing results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use cavcorr::nonclassicality::{classify, DEFAULT_TOLERANCE};
use cavcorr::oracle::NumericCorrelator;
use cavcorr::states::{equal_population, gaussian_state};
use cavcorr::{CorrelationSeries, Correlator, Kind, SystemParams, TauGrid, ViolationReport};

use crate::error::{CliError, Result};
use crate::figures;
use crate::spec::RunSpec;

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRecord {
    pub file: String,
    pub kind: Kind,
    pub theta: Option<f64>,
    pub first: f64,
    pub min: f64,
    pub max: f64,
    pub violations: ViolationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub file: String,
    pub sup_abs_diff: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub spec: BTreeMap<String, String>,
    pub series: Vec<SeriesRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<Vec<VerifyRecord>>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verify
            .as_ref()
            .is_none_or(|v| v.iter().all(|r| r.pass))
    }
}

/// One correlator at one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub kind: Kind,
    pub theta: f64,
}

impl Job {
    pub fn file_name(&self) -> String {
        if self.kind.is_h() {
            format!("{}_theta{}.csv", self.kind, self.theta)
        } else {
            format!("{}.csv", self.kind)
        }
    }
}

/// g2 kinds once, h kinds once per phase, in request order.
pub fn jobs(spec: &RunSpec) -> Vec<Job> {
    let mut out = Vec::new();
    for &kind in &spec.kinds {
        if kind.is_h() {
            out.extend(spec.thetas.iter().map(|&theta| Job { kind, theta }));
        } else {
            out.push(Job { kind, theta: 0.0 });
        }
    }
    out
}

pub fn compute(spec: &RunSpec, jobs: &[Job]) -> Result<Vec<CorrelationSeries>> {
    let state = spec.motional_state();
    let corr = Correlator::with_options(&spec.params, &state, spec.options())?;
    let grid = spec.grid();
    Ok(jobs
        .par_iter()
        .map(|j| corr.series(j.kind, j.theta, &grid))
        .collect::<cavcorr::Result<Vec<_>>>()?)
}

/// Sup-norm threshold for analytic versus integrator agreement.
pub fn verify_limit(analytic: &[f64], y_drive: f64) -> f64 {
    let sup = analytic.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (0.01 * sup).max(5.0 * y_drive)
}

pub fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Integrator counterparts of `series`, compared point by point.
pub fn verify(spec: &RunSpec, jobs: &[Job], series: &[CorrelationSeries]) -> Result<Vec<VerifyRecord>> {
    let numeric = NumericCorrelator::new(&spec.params, &spec.motional_state(), &spec.integration)?;
    let grid = spec.grid();
    jobs.par_iter()
        .zip(series)
        .map(|(j, s)| {
            let o = numeric.series(j.kind, j.theta, &grid)?;
            let diff = sup_abs_diff(&s.values, &o.values);
            let limit = verify_limit(&s.values, spec.integration.y_drive);
            Ok(VerifyRecord {
                file: j.file_name(),
                sup_abs_diff: diff,
                limit,
                pass: diff < limit,
            })
        })
        .collect()
}

pub fn csv_text(header: &str, series: &CorrelationSeries) -> String {
    let mut s = String::with_capacity(header.len() + 40 * series.len());
    s.push_str(header);
    s.push_str("tau,value\n");
    for (t, v) in series.taus.iter().zip(&series.values) {
        let _ = writeln!(s, "{t},{v}");
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn record(file: String, job: Job, s: &CorrelationSeries) -> Result<SeriesRecord> {
    Ok(SeriesRecord {
        file,
        kind: job.kind,
        theta: job.kind.is_h().then_some(job.theta),
        first: s.values[0],
        min: s.min().unwrap_or(f64::NAN),
        max: s.max().unwrap_or(f64::NAN),
        violations: classify(s, DEFAULT_TOLERANCE)?,
    })
}

fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Computes every requested series, writes one CSV per series plus
/// `report.json` into `spec.out`, and returns the report. A failed
/// verification is reported after the files are written.
pub fn run(spec: &RunSpec) -> Result<Report> {
    let jobs = jobs(spec);
    let series = compute(spec, &jobs)?;
    create_dir(&spec.out)?;
    let header = spec.embedded_header();
    let mut records = Vec::with_capacity(jobs.len());
    for (j, s) in jobs.iter().zip(&series) {
        let file = j.file_name();
        write(&spec.out.join(&file), &csv_text(&header, s))?;
        records.push(record(file, *j, s)?);
    }
    let verify = if spec.verify {
        Some(verify(spec, &jobs, &series)?)
    } else {
        None
    };
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        spec: spec
            .to_pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        series: records,
        verify,
    };
    write(&spec.out.join(REPORT_FILE), &report_json(&report))?;
    breach(&report)?;
    Ok(report)
}

fn breach(report: &Report) -> Result<()> {
    if let Some(v) = &report.verify {
        let bad: Vec<String> = v
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{} ({:e} >= {:e})", r.file, r.sup_abs_diff, r.limit))
            .collect();
        if !bad.is_empty() {
            return Err(CliError::VerifyBreach(bad.join(", ")));
        }
    }
    Ok(())
}

/// Run spec for one figure panel.
pub fn panel_spec(panel: &figures::Panel, out: &Path, verify: bool) -> Result<RunSpec> {
    let params = SystemParams::new(panel.g, panel.kappa, panel.delta1, figures::FIGURE_L_MAX)
        .map_err(|e| CliError::Spec(e.to_string()))?;
    Ok(RunSpec {
        params,
        state: panel.state.clone(),
        kinds: vec![panel.kind],
        thetas: vec![0.0],
        tau_max: TauGrid::DEFAULT_TAU_MAX,
        tau_points: TauGrid::DEFAULT_POINTS,
        out: out.to_path_buf(),
        verify,
        precollapse_ground: false,
        integration: Default::default(),
    })
}

/// Writes `<out>/<fig><panel>.csv` for each panel of the named figures (or
/// all of them for `"all"`) and one `<out>/<fig>_report.json` per figure.
pub fn figset(name: &str, out: &Path, verify_panels: bool) -> Result<Vec<(String, Report)>> {
    let figs = if name == "all" {
        figures::figures()
    } else {
        vec![figures::figure(name).ok_or_else(|| {
            CliError::Spec(format!(
                "unknown figure {name:?} (known: all, {})",
                figures::names().join(", ")
            ))
        })?]
    };
    create_dir(out)?;
    let mut reports = Vec::new();
    for f in figs {
        let mut records = Vec::new();
        let mut checks = Vec::new();
        let specs = f
            .panels
            .iter()
            .map(|p| panel_spec(p, out, verify_panels))
            .collect::<Result<Vec<_>>>()?;
        let results = specs
            .par_iter()
            .map(|spec| {
                let jobs = jobs(spec);
                let series = compute(spec, &jobs)?;
                let v = if verify_panels {
                    Some(verify(spec, &jobs, &series)?)
                } else {
                    None
                };
                Ok((jobs, series, v))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut spec_map = BTreeMap::new();
        for ((panel, spec), (jobs, series, v)) in f.panels.iter().zip(&specs).zip(results) {
            let file = format!("{}{}.csv", f.name, panel.label);
            write(&out.join(&file), &csv_text(&spec.embedded_header(), &series[0]))?;
            records.push(record(file.clone(), jobs[0], &series[0])?);
            spec_map.insert(
                panel.label.to_string(),
                spec.to_pairs()
                    .into_iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            if let Some(mut v) = v {
                v.iter_mut().for_each(|r| r.file = file.clone());
                checks.extend(v);
            }
        }
        let report = Report {
            version: env!("CARGO_PKG_VERSION"),
            spec: spec_map,
            series: records,
            verify: verify_panels.then_some(checks),
        };
        write(&out.join(format!("{}_report.json", f.name)), &report_json(&report))?;
        reports.push((f.name.to_string(), report));
    }
    for (_, r) in &reports {
        breach(r)?;
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Sweep {
    /// Gaussian wavepacket width relative to the ground-state width.
    Sigma,
    /// Number of equally populated levels.
    Nmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub value: f64,
    pub g2_zero_minus_one: f64,
}

pub fn default_sweep(sweep: Sweep) -> Vec<f64> {
    match sweep {
        Sweep::Sigma => vec![
            0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0,
        ],
        Sweep::Nmax => (1..=20).map(f64::from).collect(),
    }
}

/// `g2_TT(0) - 1` across motional states.
pub fn scan_g2zero(params: &SystemParams, sweep: Sweep, values: &[f64]) -> Result<Vec<ScanRow>> {
    if values.is_empty() {
        return Err(CliError::Spec("empty sweep".into()));
    }
    let states = values
        .iter()
        .map(|&v| match sweep {
            Sweep::Sigma => gaussian_state(v, params.l_max),
            Sweep::Nmax => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(cavcorr::Error::InvalidState(format!("level count must be a positive integer, got {v}")));
                }
                equal_population(v as usize, params.l_max)
            }
        })
        .collect::<cavcorr::Result<Vec<_>>>()
        .map_err(|e| CliError::Spec(e.to_string()))?;
    let zero = TauGrid::new(vec![0.0]).expect("single-point grid");
    values
        .par_iter()
        .zip(&states)
        .map(|(&value, state)| {
            let s = Correlator::new(params, state)?.series(Kind::G2Tt, 0.0, &zero)?;
            Ok(ScanRow {
                value,
                g2_zero_minus_one: s.values[0] - 1.0,
            })
        })
        .collect()
}

pub fn scan_csv(params: &SystemParams, sweep: Sweep, rows: &[ScanRow]) -> String {
    let name = match sweep {
        Sweep::Sigma => "sigma_ratio",
        Sweep::Nmax => "n_states",
    };
    let mut s = format!(
        "# cavcorr {}\n# scan: sweep={name} g={} kappa={} delta1={} l_max={}\n{name},g2_zero_minus_1\n",
        env!("CARGO_PKG_VERSION"),
        params.g,
        params.kappa,
        params.delta1,
        params.l_max
    );
    for r in rows {
        let _ = writeln!(s, "{},{}", r.value, r.g2_zero_minus_one);
    }
    s
}

pub fn write_scan(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                create_dir(dir)?;
            }
            write(p, text)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
