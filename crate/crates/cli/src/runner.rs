//! Runs a scenario, writes its CSV tables and the JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mixedopt::ode::Tolerances;
use mixedopt::params::{self, AnalyticParams, DerivedParams, ModelParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::experiments::{self, HygieneRecord, IntegratorRecord, Outcome, Table};
use crate::scenario::{Experiment, Scenario};

#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub n_b: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(n_b) = self.n_b {
            s.dims.n_b = n_b;
        }
        if let Some(rtol) = self.tol {
            s.tol = Some(Tolerances { rtol, atol: rtol * 1e-2 });
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub name: &'static str,
    pub version: &'static str,
}

pub const ARTIFACT: Artifact = Artifact { name: "mixedopt", version: env!("CARGO_PKG_VERSION") };

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceMetric {
    pub name: String,
    pub value: f64,
    pub rerun_value: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub n_b: usize,
    pub n_b_rerun: usize,
    pub metrics: Vec<ConvergenceMetric>,
    pub max_abs_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub artifact: Artifact,
    pub scenario: Scenario,
    pub resolved_params: Option<ModelParams>,
    pub derived: Option<DerivedParams>,
    pub analytic: Option<AnalyticParams>,
    pub outputs: Vec<OutputFile>,
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub integrator: Vec<IntegratorRecord>,
    pub hygiene: Vec<HygieneRecord>,
    pub convergence: Option<ConvergenceReport>,
    pub notes: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Derived quantities for the scenario's base parameters, when they exist
/// (a bath-only sweep may sit outside the stationary domain).
fn derived_dump(s: &Scenario) -> (Option<ModelParams>, Option<DerivedParams>, Option<AnalyticParams>) {
    let Ok(p) = s.params.resolve() else {
        return (None, None, None);
    };
    let d = params::effective_params(&p).ok();
    let ap = d.as_ref().and_then(|d| params::analytic_params(d).ok());
    (Some(p), d, ap)
}

fn uses_cutoff(e: &Experiment) -> bool {
    !matches!(e, Experiment::ParamSweep(_) | Experiment::FlowCheck(_) | Experiment::Convergence(_))
}

fn convergence(s: &Scenario, base: &Outcome) -> CliResult<Option<ConvergenceReport>> {
    if s.convergence_step == 0 || !uses_cutoff(&s.experiment) || base.probes.is_empty() {
        return Ok(None);
    }
    let mut rerun = s.clone();
    rerun.dims.n_b += s.convergence_step;
    let out = experiments::run_experiment(&rerun)?;
    let metrics: Vec<ConvergenceMetric> = base
        .probes
        .iter()
        .filter_map(|p| {
            let r = out.probe_value(&p.name)?;
            Some(ConvergenceMetric { name: p.name.clone(), value: p.value, rerun_value: r, abs_diff: (p.value - r).abs() })
        })
        .collect();
    let max_abs_diff = metrics.iter().map(|m| m.abs_diff).fold(0.0, f64::max);
    Ok(Some(ConvergenceReport { n_b: s.dims.n_b, n_b_rerun: rerun.dims.n_b, metrics, max_abs_diff }))
}

pub fn write_table(dir: &Path, table: &Table) -> CliResult<OutputFile> {
    let file = format!("{}.csv", table.name);
    let mut w = csv::Writer::from_path(dir.join(&file))?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(OutputFile { file, columns: table.columns.clone(), rows: table.rows.len() })
}

/// Runs `s` into `out`, which is created if missing.
pub fn run(s: &Scenario, out: &Path) -> CliResult<RunManifest> {
    let start = Instant::now();
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let outcome = experiments::run_experiment(s)?;
    let convergence = convergence(s, &outcome)?;
    let outputs = outcome.tables.iter().map(|t| write_table(out, t)).collect::<CliResult<Vec<_>>>()?;
    let (resolved_params, derived, analytic) = derived_dump(s);
    let mut notes = outcome.notes;
    if outcome.hygiene.iter().any(|h| h.report.degraded) {
        notes.push("propagation diagnostics exceeded their limits; see hygiene".into());
    }
    let manifest = RunManifest {
        artifact: ARTIFACT,
        scenario: s.clone(),
        resolved_params,
        derived,
        analytic,
        outputs,
        summary: outcome.summary,
        integrator: outcome.integrator,
        hygiene: outcome.hygiene,
        convergence,
        notes,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let path: PathBuf = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}

/// Rows of the `derive` table: resolved inputs, derived and analytic
/// quantities.
pub fn derive_rows(s: &Scenario) -> CliResult<Vec<(&'static str, f64)>> {
    let p = s.params.resolve()?;
    let d = params::effective_params(&p)?;
    let mut rows = vec![
        ("eps", p.eps),
        ("theta_d", p.theta_d),
        ("r_e", p.r_e),
        ("r", d.r),
        ("phi", d.phi),
        ("alpha_ss", d.alpha_ss),
        ("theta_d_required", d.theta_d_required),
        ("omega_a", d.omega_a_eff),
        ("omega_a_prime", d.omega_a_eff_prime),
        ("omega_b", d.omega_b_eff),
        ("g1", d.g1),
        ("g2", d.g2),
        ("g2p", d.g2p),
        ("g1_over_omega_b", d.g1 / d.omega_b_eff),
        ("g2_over_omega_b", d.g2 / d.omega_b_eff),
        ("g2p_over_omega_b", d.g2p / d.omega_b_eff),
        ("N_ss", d.n_ss),
        ("re_M_ss", d.m_ss.re),
        ("im_M_ss", d.m_ss.im),
    ];
    if let Ok(ap) = params::analytic_params(&d) {
        rows.extend([
            ("eta1", ap.eta1),
            ("beta1", ap.beta1),
            ("varpi1", ap.varpi1),
            ("eps10", ap.eps10),
            ("t_c", ap.t_c(0)),
            ("t_s", ap.t_s(0)),
            ("re_alpha1_t_c", ap.alpha1(ap.t_c(0)).re),
            ("im_alpha1_t_c", ap.alpha1(ap.t_c(0)).im),
        ]);
    }
    Ok(rows)
}
