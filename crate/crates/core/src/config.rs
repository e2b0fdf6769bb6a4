//! Batch run configuration: TOML parsing, validation, and the dispatcher
//! that turns a [`RunConfig`] into a CSV artifact.
//!
//! Every CSV starts with `#`-prefixed comment lines recording the full
//! parameter set, truncation, grid, seed, and artifact version, followed by a
//! schema header. Floats are printed in shortest round-trip form, so a rerun
//! with an identical config is byte-identical. Sweep-shaped modes carry a
//! trailing `errors` column; a failed point fills it and the sweep continues.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{classical_sweep, ClassicalState, ClassifyOptions, SweepParameter};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::liouvillian::{build_liouvillian, steady_state};
use crate::observables::{mean_phonon, negativity, partial_trace, renyi2};
use crate::params::SystemParams;
use crate::sde::{ensemble_amplitude, SdeConfig};
use crate::wigner::{lobe_report, wigner, LobeReport, PhaseGrid};

/// What a run computes; one CSV schema per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClassicalScan,
    QuantumSteady,
    QuantumSweep,
    WignerExport,
    SdeEnsemble,
    EntanglementSweep,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::ClassicalScan => "classical-scan",
            Mode::QuantumSteady => "quantum-steady",
            Mode::QuantumSweep => "quantum-sweep",
            Mode::WignerExport => "wigner-export",
            Mode::SdeEnsemble => "sde-ensemble",
            Mode::EntanglementSweep => "entanglement-sweep",
        }
    }
}

/// Swept parameter plus its value list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `"epsilon"` or `"kerr"`.
    pub parameter: String,
    pub values: Vec<f64>,
    /// Second axis for the two-parameter quantum sweep: a Kerr value list
    /// crossed with `values` (which must then be epsilon values).
    #[serde(default)]
    pub kerr_values: Option<Vec<f64>>,
    /// Classical scans only: seed each point with the previous final state.
    #[serde(default = "default_true")]
    pub continuation: bool,
}

fn default_true() -> bool {
    true
}

impl SweepSpec {
    fn parameter_kind(&self) -> Result<SweepParameter> {
        match self.parameter.as_str() {
            "epsilon" => Ok(SweepParameter::Epsilon),
            "kerr" => Ok(SweepParameter::Kerr),
            other => Err(Error::Config(format!(
                "sweep.parameter must be \"epsilon\" or \"kerr\", got \"{other}\""
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        self.parameter_kind()?;
        if self.values.is_empty() {
            return Err(Error::Config("sweep.values must be non-empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep.values must be finite".into()));
        }
        if let Some(ks) = &self.kerr_values {
            if ks.is_empty() || ks.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(
                    "sweep.kerr_values must be non-empty and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSpec {
    n_max: usize,
}

/// A full batch run description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default = "default_params")]
    pub params: SystemParams,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    space: Option<SpaceSpec>,
    #[serde(default)]
    pub grid: Option<PhaseGrid>,
    #[serde(default)]
    pub sde: Option<SdeConfig>,
    #[serde(default)]
    pub output_path: Option<String>,
}

fn default_params() -> SystemParams {
    SystemParams::weak_regime(0.0)
}

impl RunConfig {
    pub fn n_max(&self) -> usize {
        self.space.map(|s| s.n_max).unwrap_or(16)
    }

    pub fn grid_or_default(&self) -> PhaseGrid {
        self.grid.unwrap_or_else(PhaseGrid::weak_default)
    }

    pub fn sde_or_default(&self) -> SdeConfig {
        self.sde.unwrap_or_else(|| SdeConfig::defaults(&self.params))
    }

    /// CLI seed override; only the stochastic mode consumes it.
    pub fn override_seed(&mut self, seed: u64) {
        let mut sde = self.sde_or_default();
        sde.base_seed = seed;
        self.sde = Some(sde);
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
        FockSpace::new(self.n_max()).map_err(|e| Error::Config(format!("space.n_max: {e}")))?;
        if let Some(g) = &self.grid {
            PhaseGrid::new(g.x_min, g.x_max, g.y_min, g.y_max, g.n_x, g.n_y)
                .map_err(|e| Error::Config(format!("grid: {e}")))?;
        }
        if let Some(sde) = &self.sde {
            sde.validate(&self.params).map_err(|e| Error::Config(format!("sde: {e}")))?;
        }
        let needs_sweep = matches!(
            self.mode,
            Mode::ClassicalScan | Mode::QuantumSweep | Mode::SdeEnsemble | Mode::EntanglementSweep
        );
        match &self.sweep {
            Some(s) => s.validate()?,
            None if needs_sweep => {
                return Err(Error::Config(format!(
                    "mode {} requires a [sweep] table",
                    self.mode.label()
                )))
            }
            None => {}
        }
        if let Some(s) = &self.sweep {
            if s.kerr_values.is_some() && self.mode != Mode::QuantumSweep {
                return Err(Error::Config(
                    "sweep.kerr_values is only meaningful in quantum-sweep mode".into(),
                ));
            }
            if s.kerr_values.is_some() && s.parameter != "epsilon" {
                return Err(Error::Config(
                    "two-parameter sweeps vary epsilon in sweep.values".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Parse and validate a TOML run configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Outcome counters of one run.
#[derive(Clone, Copy, Debug)]
pub struct RunSummary {
    pub rows: usize,
    pub failed_rows: usize,
}

impl RunSummary {
    /// Total computational failure: a sweep where nothing succeeded.
    pub fn total_failure(&self) -> bool {
        self.rows > 0 && self.failed_rows == self.rows
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn comment_header(config: &RunConfig, out: &mut String) {
    let p = &config.params;
    let g = config.grid_or_default();
    let sde = config.sde_or_default();
    writeln!(out, "# qsl v{}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# mode = {}", config.mode.label()).unwrap();
    writeln!(
        out,
        "# params: omega={} k1={} k2={} kerr={} epsilon={}",
        p.omega, p.k1, p.k2, p.kerr, p.epsilon
    )
    .unwrap();
    writeln!(out, "# n_max = {}", config.n_max()).unwrap();
    writeln!(
        out,
        "# grid: x [{}, {}] n_x={} y [{}, {}] n_y={}",
        g.x_min, g.x_max, g.n_x, g.y_min, g.y_max, g.n_y
    )
    .unwrap();
    writeln!(
        out,
        "# sde: dt={} n_steps={} n_trajectories={} transient_fraction={} seed={}",
        sde.dt, sde.n_steps, sde.n_trajectories, sde.transient_fraction, sde.base_seed
    )
    .unwrap();
    if let Some(s) = &config.sweep {
        let values: Vec<String> = s.values.iter().map(|v| fmt_f(*v)).collect();
        writeln!(out, "# sweep: {} values = [{}]", s.parameter, values.join(", ")).unwrap();
        if let Some(ks) = &s.kerr_values {
            let values: Vec<String> = ks.iter().map(|v| fmt_f(*v)).collect();
            writeln!(out, "# sweep: kerr values = [{}]", values.join(", ")).unwrap();
        }
    }
}

struct QuantumPoint {
    mean_phonon_1: f64,
    mean_phonon_2: f64,
    report: LobeReport,
    negativity: f64,
    renyi2: f64,
}

fn quantum_point(p: &SystemParams, space: FockSpace, grid: &PhaseGrid) -> Result<QuantumPoint> {
    let l = build_liouvillian(p, space)?;
    let rho = steady_state(&l)?;
    let reduced = partial_trace(&rho, 1)?;
    let field = wigner(&reduced, grid)?;
    Ok(QuantumPoint {
        mean_phonon_1: mean_phonon(&rho, 1)?,
        mean_phonon_2: mean_phonon(&rho, 2)?,
        report: lobe_report(&field),
        negativity: negativity(&rho)?,
        renyi2: renyi2(&reduced)?,
    })
}

fn quantum_row(eps_over_k1: f64, kerr: Option<f64>, point: &Result<QuantumPoint>) -> String {
    let kerr_col = kerr.map(|k| format!("{},", fmt_f(k))).unwrap_or_default();
    match point {
        Ok(q) => format!(
            "{},{}{},{},{},{},{},{},",
            fmt_f(eps_over_k1),
            kerr_col,
            fmt_f(q.mean_phonon_1),
            fmt_f(q.mean_phonon_2),
            fmt_f(q.report.delta_y),
            q.report.classification.label(),
            fmt_f(q.negativity),
            fmt_f(q.renyi2),
        ),
        Err(e) => format!("{},{kerr_col},,,,,,{e}", fmt_f(eps_over_k1)),
    }
}

fn run_quantum_sweep(config: &RunConfig, out: &mut String) -> RunSummary {
    let sweep = config.sweep.as_ref().expect("validated");
    let space = FockSpace::new(config.n_max()).expect("validated");
    let grid = config.grid_or_default();
    let two_parameter = sweep.kerr_values.is_some();
    if two_parameter {
        out.push_str(
            "eps_over_k1,kerr,mean_phonon_1,mean_phonon_2,delta_y,classification,negativity,renyi2,errors\n",
        );
    } else {
        out.push_str(
            "eps_over_k1,mean_phonon_1,mean_phonon_2,delta_y,classification,negativity,renyi2,errors\n",
        );
    }
    let mut grid_points: Vec<(f64, Option<f64>)> = Vec::new();
    match &sweep.kerr_values {
        Some(ks) => {
            for &eps in &sweep.values {
                for &k in ks {
                    grid_points.push((eps, Some(k)));
                }
            }
        }
        None => {
            for &v in &sweep.values {
                grid_points.push((v, None));
            }
        }
    }
    let kind = sweep.parameter_kind().expect("validated");
    let results: Vec<(f64, Option<f64>, Result<QuantumPoint>)> = grid_points
        .par_iter()
        .map(|&(v, kerr)| {
            let mut p = match kind {
                SweepParameter::Epsilon => config.params.with_epsilon(v),
                SweepParameter::Kerr => config.params.with_kerr(v),
            };
            if let Some(k) = kerr {
                p = p.with_kerr(k);
            }
            let eps_over_k1 = p.epsilon / p.k1;
            let point = p.validate().and_then(|_| quantum_point(&p, space, &grid));
            (eps_over_k1, kerr, point)
        })
        .collect();
    let mut failed = 0;
    for (eps_over_k1, kerr, point) in &results {
        if point.is_err() {
            failed += 1;
        }
        out.push_str(&quantum_row(*eps_over_k1, *kerr, point));
        out.push('\n');
    }
    RunSummary { rows: results.len(), failed_rows: failed }
}

fn run_quantum_steady(config: &RunConfig, out: &mut String) -> RunSummary {
    let space = FockSpace::new(config.n_max()).expect("validated");
    let grid = config.grid_or_default();
    out.push_str(
        "eps_over_k1,mean_phonon_1,mean_phonon_2,delta_y,classification,negativity,renyi2,errors\n",
    );
    let point = quantum_point(&config.params, space, &grid);
    let failed = point.is_err() as usize;
    out.push_str(&quantum_row(config.params.epsilon / config.params.k1, None, &point));
    out.push('\n');
    RunSummary { rows: 1, failed_rows: failed }
}

fn run_classical_scan(config: &RunConfig, out: &mut String) -> Result<RunSummary> {
    let sweep = config.sweep.as_ref().expect("validated");
    out.push_str("param,classification,amplitude,x1,y1,x2,y2,errors\n");
    let opts = ClassifyOptions::defaults(&config.params);
    let initial = ClassicalState::new(1.0, 0.0, -0.9, 0.1);
    let points = classical_sweep(
        &config.params,
        sweep.parameter_kind().expect("validated"),
        &sweep.values,
        &initial,
        sweep.continuation,
        &opts,
    )?;
    let mut failed = 0;
    for pt in &points {
        match &pt.result {
            Ok(a) => {
                let label = if a.is_limit_cycle() { "limit-cycle" } else { "steady-state" };
                let s = a.final_state();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},",
                    fmt_f(pt.value),
                    label,
                    fmt_f(a.amplitude()),
                    fmt_f(s.x1),
                    fmt_f(s.y1),
                    fmt_f(s.x2),
                    fmt_f(s.y2),
                )
                .unwrap();
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "{},,,,,,,{e}", fmt_f(pt.value)).unwrap();
            }
        }
    }
    Ok(RunSummary { rows: points.len(), failed_rows: failed })
}

fn run_wigner_export(config: &RunConfig, out: &mut String) -> Result<RunSummary> {
    let space = FockSpace::new(config.n_max()).expect("validated");
    let grid = config.grid_or_default();
    let l = build_liouvillian(&config.params, space)?;
    let rho = steady_state(&l)?;
    let reduced = partial_trace(&rho, 1)?;
    let field = wigner(&reduced, &grid)?;
    out.push_str("x,y,w\n");
    for iy in 0..grid.n_y {
        for ix in 0..grid.n_x {
            writeln!(
                out,
                "{},{},{}",
                fmt_f(grid.x(ix)),
                fmt_f(grid.y(iy)),
                fmt_f(field.value(ix, iy))
            )
            .unwrap();
        }
    }
    Ok(RunSummary { rows: grid.n_x * grid.n_y, failed_rows: 0 })
}

fn run_sde_ensemble(config: &RunConfig, out: &mut String) -> RunSummary {
    let sweep = config.sweep.as_ref().expect("validated");
    let cfg = config.sde_or_default();
    out.push_str("eps_over_k1,mean_amp_sq,std_err,errors\n");
    let initial = ClassicalState::new(1.8, 0.0, 0.0, 1.8);
    let mut failed = 0;
    for &eps in &sweep.values {
        let p = config.params.with_epsilon(eps);
        let result = p.validate().and_then(|_| ensemble_amplitude(&p, &cfg, &initial));
        match result {
            Ok(e) => writeln!(
                out,
                "{},{},{},",
                fmt_f(eps / p.k1),
                fmt_f(e.mean_amp_sq),
                fmt_f(e.std_err)
            )
            .unwrap(),
            Err(e) => {
                failed += 1;
                writeln!(out, "{},,,{e}", fmt_f(eps / p.k1)).unwrap();
            }
        }
    }
    RunSummary { rows: sweep.values.len(), failed_rows: failed }
}

fn run_entanglement_sweep(config: &RunConfig, out: &mut String) -> RunSummary {
    let sweep = config.sweep.as_ref().expect("validated");
    let space = FockSpace::new(config.n_max()).expect("validated");
    out.push_str("eps_over_k1,negativity,renyi2,errors\n");
    let results: Vec<(f64, Result<(f64, f64)>)> = sweep
        .values
        .par_iter()
        .map(|&eps| {
            let p = config.params.with_epsilon(eps);
            let point = p.validate().and_then(|_| {
                let l = build_liouvillian(&p, space)?;
                let rho = steady_state(&l)?;
                let n = negativity(&rho)?;
                let s = renyi2(&partial_trace(&rho, 1)?)?;
                Ok((n, s))
            });
            (eps / p.k1, point)
        })
        .collect();
    let mut failed = 0;
    for (eps_over_k1, point) in &results {
        match point {
            Ok((n, s)) => {
                writeln!(out, "{},{},{},", fmt_f(*eps_over_k1), fmt_f(*n), fmt_f(*s)).unwrap()
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "{},,,{e}", fmt_f(*eps_over_k1)).unwrap();
            }
        }
    }
    RunSummary { rows: results.len(), failed_rows: failed }
}

/// Execute a validated config and return the CSV text.
pub fn run_to_string(config: &RunConfig) -> Result<(String, RunSummary)> {
    config.validate()?;
    let mut out = String::new();
    comment_header(config, &mut out);
    let summary = match config.mode {
        Mode::ClassicalScan => run_classical_scan(config, &mut out)?,
        Mode::QuantumSteady => run_quantum_steady(config, &mut out),
        Mode::QuantumSweep => run_quantum_sweep(config, &mut out),
        Mode::WignerExport => run_wigner_export(config, &mut out)?,
        Mode::SdeEnsemble => run_sde_ensemble(config, &mut out),
        Mode::EntanglementSweep => run_entanglement_sweep(config, &mut out),
    };
    Ok((out, summary))
}

/// Execute a validated config and write the CSV artifact to `path`.
pub fn run(config: &RunConfig, path: &Path) -> Result<RunSummary> {
    let (text, summary) = run_to_string(config)?;
    std::fs::write(path, text)?;
    Ok(summary)
}
