//! Command-line driver.
//!
//! Every subcommand evaluates one parameter point, or a grid of points when
//! scan axes are given, and writes one table as JSON or CSV. Scans run in
//! parallel; rows are always emitted in grid order (first axis outermost).
//!
//! Exit codes: 0 success, 1 configuration error, 2 assumption violation at a
//! single point, 3 numerical or validation failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bogoliubov2::two_mode_spectrum;
use crate::darkstates::{
    eigenstates, sector_eigenstates, ClassVariant, DEFAULT_CLASSIFY_TOL,
};
use crate::model::{one_excitation_matrix, validate, AtomKind, ModelParams};
use crate::observables::{duality_report_with, DualityReport};
use crate::oracle::{crosscheck_with, dense_hermitian_eig, CheckStatus, CrosscheckOptions, ValidationReport};
use crate::{Error, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Tolerance names accepted by `--tol` and the `tol` config key.
pub const TOLERANCE_NAMES: [&str; 3] = ["check", "classify", "duality"];
const DEFAULT_DUALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl ScanAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + (self.stop - self.start) * i as f64 / last).collect()
    }
}

/// Contents of the `--config` JSON file. Missing parameter keys take the
/// default fixture values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    #[serde(with = "crate::serde_complex")]
    pub lambda: C64,
    #[serde(with = "crate::serde_complex")]
    pub xi: C64,
    #[serde(with = "crate::serde_complex")]
    pub kappa: C64,
    pub atom: AtomKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<Vec<ScanAxis>>,
    pub tol: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            omega_b: 1.0,
            omega_c: 1.0,
            lambda: C64::new(0.2, 0.0),
            xi: C64::new(0.05, 0.0),
            kappa: C64::new(0.1, 0.0),
            atom: AtomKind::Oscillator,
            scan: None,
            tol: BTreeMap::new(),
            sector: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            omega_a: self.omega_a,
            omega_b: self.omega_b,
            omega_c: self.omega_c,
            lambda: self.lambda,
            xi: self.xi,
            kappa: self.kappa,
        }
    }

    pub fn axes(&self) -> &[ScanAxis] {
        self.scan.as_deref().unwrap_or(&[])
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tol.get(name).copied().unwrap_or(default)
    }

    /// Sets a parameter by name. Complex couplings accept `NAME`/`NAME_re` for
    /// the real part and `NAME_im` for the imaginary part.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        match name {
            "omega_a" => self.omega_a = value,
            "omega_b" => self.omega_b = value,
            "omega_c" => self.omega_c = value,
            _ => {
                let (base, imag) = match name.rsplit_once('_') {
                    Some((b, "re")) => (b, false),
                    Some((b, "im")) => (b, true),
                    _ => (name, false),
                };
                let z = match base {
                    "lambda" => &mut self.lambda,
                    "xi" => &mut self.xi,
                    "kappa" => &mut self.kappa,
                    _ => return Err(ConfigError::Invalid(format!("unknown parameter {name:?}"))),
                };
                if imag {
                    z.im = value;
                } else {
                    z.re = value;
                }
            }
        }
        Ok(())
    }

    /// Checks names, tolerances, axes, and the base parameters when no scan is
    /// given.
    pub fn check(&self) -> Result<(), ConfigError> {
        for (name, value) in &self.tol {
            if !TOLERANCE_NAMES.contains(&name.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "unknown tolerance {name:?} (expected one of {})",
                    TOLERANCE_NAMES.join(", ")
                )));
            }
            if !value.is_finite() || *value < 0.0 {
                return Err(ConfigError::Invalid(format!("tolerance {name} must be finite and >= 0")));
            }
        }
        for axis in self.axes() {
            if axis.steps == 0 {
                return Err(ConfigError::Invalid(format!("scan axis {} needs steps >= 1", axis.param)));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(ConfigError::Invalid(format!("scan axis {} has non-finite bounds", axis.param)));
            }
            self.clone().set(&axis.param, axis.start)?;
        }
        if self.axes().is_empty() {
            self.params().check().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Grid points in grid-major order.
    pub fn points(&self) -> Vec<ModelParams> {
        let mut out = vec![self.clone()];
        for axis in self.axes() {
            let values = axis.values();
            out = out
                .into_iter()
                .flat_map(|cfg| {
                    values.iter().map(move |&v| {
                        let mut c = cfg.clone();
                        c.set(&axis.param, v).expect("axis names checked");
                        c
                    })
                })
                .collect();
        }
        out.iter().map(RunConfig::params).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    Spectrum,
    Classify,
    Duality,
    Verify,
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance override NAME=VALUE (check, classify, duality).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Excitation sector for `classify` and `verify`.
    #[arg(long)]
    pub sector: Option<usize>,
    /// Parameter override NAME=VALUE.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
    /// Scan axis NAME=START:STOP:STEPS; replaces the config's axes.
    #[arg(long = "scan", value_name = "NAME=START:STOP:STEPS")]
    pub scan: Vec<String>,
    /// Atom kind override.
    #[arg(long, value_parser = parse_atom)]
    pub atom: Option<AtomKind>,
    /// Also report occupations normalized by the state norm (duality only).
    #[arg(long)]
    pub normalized: bool,
}

fn parse_atom(s: &str) -> Result<AtomKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "optodark", version, about = "Dark and quasi-dark eigenstates of an atom-photon-phonon model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasi-boson and dressed energies, effective couplings, interlacing.
    Spectrum(CommonArgs),
    /// Eigenstates with their dark / quasi-dark / bright classification.
    Classify(CommonArgs),
    /// Photon and phonon occupations under the coupling swap.
    Duality(CommonArgs),
    /// Evaluate a table over the scan axes.
    Scan {
        #[arg(value_enum, default_value_t = Table::Spectrum)]
        table: Table,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cross-check every closed form against the dense eigensolver.
    Verify(CommonArgs),
}

fn split_pair(s: &str) -> Result<(&str, &str), ConfigError> {
    s.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("expected NAME=VALUE, got {s:?}")))
}

fn parse_f64(s: &str) -> Result<f64, ConfigError> {
    s.trim().parse().map_err(|_| ConfigError::Invalid(format!("not a number: {s:?}")))
}

/// Reads the config file and applies command-line overrides.
pub fn build_config(args: &CommonArgs, table: Table) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| ConfigError::Io { path: path.clone(), source })?;
            serde_json::from_str(&text)?
        }
        None => RunConfig::default(),
    };
    for s in &args.set {
        let (name, value) = split_pair(s)?;
        cfg.set(name, parse_f64(value)?)?;
    }
    for s in &args.tol {
        let (name, value) = split_pair(s)?;
        cfg.tol.insert(name.to_string(), parse_f64(value)?);
    }
    if !args.scan.is_empty() {
        let axes = args
            .scan
            .iter()
            .map(|s| {
                let (name, range) = split_pair(s)?;
                let parts: Vec<&str> = range.split(':').collect();
                if parts.len() != 3 {
                    return Err(ConfigError::Invalid(format!("expected START:STOP:STEPS, got {range:?}")));
                }
                let steps = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::Invalid(format!("bad step count {:?}", parts[2])))?;
                Ok(ScanAxis { param: name.to_string(), start: parse_f64(parts[0])?, stop: parse_f64(parts[1])?, steps })
            })
            .collect::<Result<Vec<_>, _>>()?;
        cfg.scan = Some(axes);
    }
    if let Some(kind) = args.atom {
        cfg.atom = kind;
    }
    if args.sector.is_some() {
        cfg.sector = args.sector;
    }
    if table == Table::Classify && cfg.sector == Some(0) {
        return Err(ConfigError::Invalid("classify needs a sector >= 1".into()));
    }
    cfg.check()?;
    Ok(cfg)
}

/// Errors that reflect a violated assumption rather than a numerical problem.
fn is_assumption_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParams(_)
            | Error::DegenerateTwoMode
            | Error::GammaZero
            | Error::NotResonant
            | Error::ComplexCouplings
            | Error::AssumptionViolation(_)
            | Error::DegenerateSpectrum { .. }
            | Error::WrongAtomKind
            | Error::SizeLimit { .. }
    )
}

/// Per-row outcome, used to derive the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Assumption,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub point: usize,
    pub params: ModelParams,
    pub energies: Option<[f64; 3]>,
    pub eps: Option<[f64; 2]>,
    #[serde(with = "crate::serde_complex::option_array")]
    pub gamma: Option<[C64; 2]>,
    pub interlaced: Option<bool>,
    pub ass1: Option<bool>,
    pub ass2: Option<bool>,
    pub ass3: Option<bool>,
    pub ass4: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub point: usize,
    pub params: ModelParams,
    pub sector: usize,
    pub index: Option<usize>,
    pub energy: Option<f64>,
    pub class: Option<ClassVariant>,
    pub photon_amp: Option<f64>,
    pub phonon_amp: Option<f64>,
    /// (atom, photon, phonon) amplitudes; one-excitation sector only.
    #[serde(with = "crate::serde_complex::option_array")]
    pub amplitudes: Option<[C64; 3]>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub point: usize,
    pub params: ModelParams,
    pub report: Option<DualityReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub point: usize,
    pub params: ModelParams,
    pub assumptions_hold: bool,
    pub passed: bool,
    pub report: ValidationReport,
}

/// Full output document; JSON output deserializes back into this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub table: Table,
    pub config: RunConfig,
    pub rows: Vec<R>,
}

fn param_cells(p: &ModelParams) -> Vec<String> {
    vec![
        num(p.omega_a),
        num(p.omega_b),
        num(p.omega_c),
        num(p.lambda.re),
        num(p.lambda.im),
        num(p.xi.re),
        num(p.xi.im),
        num(p.kappa.re),
        num(p.kappa.im),
    ]
}

const PARAM_COLUMNS: [&str; 9] =
    ["omega_a", "omega_b", "omega_c", "lambda_re", "lambda_im", "xi_re", "xi_im", "kappa_re", "kappa_im"];

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T, F: Fn(&T) -> String>(x: &Option<T>, f: F) -> String {
    x.as_ref().map(f).unwrap_or_default()
}

trait CsvTable {
    fn columns() -> Vec<&'static str>;
    fn cells(&self) -> Vec<Vec<String>>;
}

fn header(extra: &[&'static str]) -> Vec<&'static str> {
    let mut h = vec!["point"];
    h.extend(PARAM_COLUMNS);
    h.extend(extra);
    h
}

fn prefix(point: usize, p: &ModelParams) -> Vec<String> {
    let mut v = vec![point.to_string()];
    v.extend(param_cells(p));
    v
}

impl CsvTable for SpectrumRow {
    fn columns() -> Vec<&'static str> {
        header(&[
            "e1", "e2", "e3", "eps1", "eps2", "gamma1_re", "gamma1_im", "gamma2_re", "gamma2_im", "interlaced",
            "ass1", "ass2", "ass3", "ass4", "error",
        ])
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let mut v = prefix(self.point, &self.params);
        for j in 0..3 {
            v.push(opt(&self.energies, |e| num(e[j])));
        }
        for j in 0..2 {
            v.push(opt(&self.eps, |e| num(e[j])));
        }
        for j in 0..2 {
            v.push(opt(&self.gamma, |g| num(g[j].re)));
            v.push(opt(&self.gamma, |g| num(g[j].im)));
        }
        for b in [self.interlaced, self.ass1, self.ass2, self.ass3, self.ass4] {
            v.push(opt(&b, |b| b.to_string()));
        }
        v.push(self.error.clone().unwrap_or_default());
        vec![v]
    }
}

impl CsvTable for ClassifyRow {
    fn columns() -> Vec<&'static str> {
        header(&[
            "sector", "index", "energy", "class", "photon_amp", "phonon_amp", "atom_re", "atom_im", "photon_re",
            "photon_im", "phonon_re", "phonon_im", "error",
        ])
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let mut v = prefix(self.point, &self.params);
        v.push(self.sector.to_string());
        v.push(opt(&self.index, |i| i.to_string()));
        v.push(opt(&self.energy, |e| num(*e)));
        v.push(opt(&self.class, |c| c.to_string()));
        v.push(opt(&self.photon_amp, |x| num(*x)));
        v.push(opt(&self.phonon_amp, |x| num(*x)));
        for j in 0..3 {
            v.push(opt(&self.amplitudes, |a| num(a[j].re)));
            v.push(opt(&self.amplitudes, |a| num(a[j].im)));
        }
        v.push(self.error.clone().unwrap_or_default());
        vec![v]
    }
}

impl CsvTable for DualityRow {
    fn columns() -> Vec<&'static str> {
        header(&[
            "index", "energy", "energy_swapped", "b_occ", "c_occ_swapped", "mismatch", "passed", "atom_norm",
            "photon_norm", "phonon_norm", "error",
        ])
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let Some(rep) = &self.report else {
            let mut v = prefix(self.point, &self.params);
            v.extend(std::iter::repeat_n(String::new(), 10));
            v.push(self.error.clone().unwrap_or_default());
            return vec![v];
        };
        (0..rep.energies.len())
            .map(|j| {
                let mut v = prefix(self.point, &self.params);
                v.push(j.to_string());
                v.push(num(rep.energies[j][0]));
                v.push(num(rep.energies[j][1]));
                v.push(num(rep.b_occ[j]));
                v.push(num(rep.c_occ_swapped[j]));
                v.push(num((rep.b_occ[j] - rep.c_occ_swapped[j]).abs()));
                v.push(rep.passed.to_string());
                v.push(opt(&rep.normalized, |n| num(n.atom[j])));
                v.push(opt(&rep.normalized, |n| num(n.photon[j])));
                v.push(opt(&rep.normalized, |n| num(n.phonon[j])));
                v.push(String::new());
                v
            })
            .collect()
    }
}

impl CsvTable for VerifyRow {
    fn columns() -> Vec<&'static str> {
        header(&["check", "measured", "tolerance", "status", "note"])
    }

    fn cells(&self) -> Vec<Vec<String>> {
        self.report
            .checks
            .iter()
            .map(|c| {
                let mut v = prefix(self.point, &self.params);
                v.push(c.name.clone());
                v.push(if c.measured.is_nan() { String::new() } else { num(c.measured) });
                v.push(if c.tolerance.is_nan() { String::new() } else { num(c.tolerance) });
                v.push(
                    match c.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "fail",
                        CheckStatus::Skipped => "skipped",
                    }
                    .to_string(),
                );
                v.push(c.note.clone().unwrap_or_default());
                v
            })
            .collect()
    }
}

pub fn spectrum_row(point: usize, params: &ModelParams, kind: AtomKind) -> SpectrumRow {
    let mut row = SpectrumRow {
        point,
        params: *params,
        energies: None,
        eps: None,
        gamma: None,
        interlaced: None,
        ass1: None,
        ass2: None,
        ass3: None,
        ass4: None,
        error: None,
    };
    if let Err(e) = params.check() {
        row.error = Some(e.to_string());
        return row;
    }
    row.ass1 = Some(crate::model::ass1(params).holds);
    match dense_hermitian_eig(&one_excitation_matrix(params).entries) {
        Ok(eig) => row.energies = Some([eig.values[0], eig.values[1], eig.values[2]]),
        Err(e) => row.error = Some(e.to_string()),
    }
    match two_mode_spectrum(params) {
        Ok(two) => {
            row.eps = Some(two.eps);
            row.gamma = Some(two.gamma);
            if let Some(e) = row.energies {
                let [e1, e2] = two.eps;
                row.interlaced = Some(0.0 < e[0] && e[0] < e1 && e1 < e[1] && e[1] < e2 && e2 < e[2]);
            }
        }
        Err(e) => row.error = row.error.take().or(Some(e.to_string())),
    }
    if let Ok(rep) = validate(params, kind) {
        row.ass2 = Some(rep.ass2.holds);
        row.ass3 = Some(rep.ass3.holds);
        row.ass4 = Some(rep.ass4.holds);
    }
    row
}

fn spectrum_outcome(row: &SpectrumRow) -> Outcome {
    let flags = [row.ass1, row.ass2, row.ass3, row.ass4];
    if row.energies.is_none() {
        Outcome::Failure
    } else if row.error.is_some() || flags.iter().any(|f| *f != Some(true)) {
        Outcome::Assumption
    } else {
        Outcome::Ok
    }
}

pub fn classify_rows(point: usize, params: &ModelParams, kind: AtomKind, sector: usize, tol: f64) -> Vec<ClassifyRow> {
    let base = ClassifyRow {
        point,
        params: *params,
        sector,
        index: None,
        energy: None,
        class: None,
        photon_amp: None,
        phonon_amp: None,
        amplitudes: None,
        error: None,
    };
    let err = |e: Error| vec![ClassifyRow { error: Some(e.to_string()), ..base.clone() }];
    if let Err(e) = params.check() {
        return err(e);
    }
    if sector == 1 {
        match eigenstates(params, tol) {
            Ok(recs) => recs
                .into_iter()
                .enumerate()
                .map(|(j, r)| ClassifyRow {
                    index: Some(j),
                    energy: Some(r.energy),
                    class: Some(r.class.variant),
                    photon_amp: Some(r.class.photon_amp),
                    phonon_amp: Some(r.class.phonon_amp),
                    amplitudes: Some([r.state.amps[0], r.state.amps[1], r.state.amps[2]]),
                    ..base.clone()
                })
                .collect(),
            Err(e) => err(e),
        }
    } else {
        match sector_eigenstates(params, kind, sector, tol) {
            Ok(states) => states
                .into_iter()
                .enumerate()
                .map(|(j, (energy, _, class))| ClassifyRow {
                    index: Some(j),
                    energy: Some(energy),
                    class: Some(class.variant),
                    photon_amp: Some(class.photon_amp),
                    phonon_amp: Some(class.phonon_amp),
                    ..base.clone()
                })
                .collect(),
            Err(e) => err(e),
        }
    }
}

pub fn duality_row(point: usize, params: &ModelParams, tol: f64, normalized: bool) -> (DualityRow, Outcome) {
    let mut row = DualityRow { point, params: *params, report: None, error: None };
    let outcome = match params.check().and_then(|_| duality_report_with(params, tol, normalized)) {
        Ok(rep) => {
            let o = if rep.passed { Outcome::Ok } else { Outcome::Failure };
            row.report = Some(rep);
            o
        }
        Err(e) => {
            let o = if is_assumption_error(&e) { Outcome::Assumption } else { Outcome::Failure };
            row.error = Some(e.to_string());
            o
        }
    };
    (row, outcome)
}

pub fn verify_row(point: usize, params: &ModelParams, kind: AtomKind, opts: CrosscheckOptions) -> VerifyRow {
    let report = crosscheck_with(params, kind, opts);
    let assumptions_hold = validate(params, kind).is_ok_and(|r| r.ass1.holds && r.ass3.holds && r.ass4.holds);
    VerifyRow { point, params: *params, assumptions_hold, passed: report.passed(), report }
}

fn verify_outcome(row: &VerifyRow) -> Outcome {
    // the Ass 1 entry is an assumption, not a numerical failure
    if row.report.failures().any(|c| !c.name.starts_with("ass")) {
        Outcome::Failure
    } else if !row.assumptions_hold || !row.passed {
        Outcome::Assumption
    } else {
        Outcome::Ok
    }
}

fn exit_code(outcomes: &[Outcome], single_point: bool) -> i32 {
    if outcomes.contains(&Outcome::Failure) {
        EXIT_VALIDATION
    } else if single_point && outcomes.contains(&Outcome::Assumption) {
        EXIT_ASSUMPTION
    } else {
        EXIT_OK
    }
}

fn render<R: Serialize + CsvTable>(doc: &Document<R>, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(doc).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(R::columns()).map_err(|e| e.to_string())?;
            for row in &doc.rows {
                for rec in row.cells() {
                    w.write_record(&rec).map_err(|e| e.to_string())?;
                }
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

/// Evaluates `table` for `cfg`. Returns the rendered output and exit code.
pub fn execute(table: Table, cfg: &RunConfig, format: Format, normalized: bool) -> Result<(Vec<u8>, i32), String> {
    let points = cfg.points();
    let single = cfg.axes().is_empty();
    let kind = cfg.atom;
    let indexed: Vec<(usize, ModelParams)> = points.into_iter().enumerate().collect();

    match table {
        Table::Spectrum => {
            let rows: Vec<SpectrumRow> = indexed.par_iter().map(|(i, p)| spectrum_row(*i, p, kind)).collect();
            let outcomes: Vec<Outcome> = rows.iter().map(spectrum_outcome).collect();
            let doc = Document { table, config: cfg.clone(), rows };
            Ok((render(&doc, format)?, exit_code(&outcomes, single)))
        }
        Table::Classify => {
            let tol = cfg.tolerance("classify", DEFAULT_CLASSIFY_TOL);
            let sector = cfg.sector.unwrap_or(1);
            let groups: Vec<Vec<ClassifyRow>> =
                indexed.par_iter().map(|(i, p)| classify_rows(*i, p, kind, sector, tol)).collect();
            let outcomes: Vec<Outcome> = groups
                .iter()
                .map(|g| match g.first().and_then(|r| r.error.as_ref()) {
                    Some(_) => Outcome::Assumption,
                    None => Outcome::Ok,
                })
                .collect();
            let rows = groups.into_iter().flatten().collect();
            let doc = Document { table, config: cfg.clone(), rows };
            Ok((render(&doc, format)?, exit_code(&outcomes, single)))
        }
        Table::Duality => {
            let tol = cfg.tolerance("duality", DEFAULT_DUALITY_TOL);
            let results: Vec<(DualityRow, Outcome)> =
                indexed.par_iter().map(|(i, p)| duality_row(*i, p, tol, normalized)).collect();
            let (rows, outcomes): (Vec<_>, Vec<_>) = results.into_iter().unzip();
            let doc = Document { table, config: cfg.clone(), rows };
            Ok((render(&doc, format)?, exit_code(&outcomes, single)))
        }
        Table::Verify => {
            let opts = CrosscheckOptions { scale: cfg.tolerance("check", 1.0), sector: cfg.sector };
            let rows: Vec<VerifyRow> = indexed.par_iter().map(|(i, p)| verify_row(*i, p, kind, opts)).collect();
            let outcomes: Vec<Outcome> = rows.iter().map(verify_outcome).collect();
            let doc = Document { table, config: cfg.clone(), rows };
            Ok((render(&doc, format)?, exit_code(&outcomes, single)))
        }
    }
}

/// Parses `args` (including the program name), runs, writes output and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (table, common) = match &cli.command {
        Command::Spectrum(c) => (Table::Spectrum, c),
        Command::Classify(c) => (Table::Classify, c),
        Command::Duality(c) => (Table::Duality, c),
        Command::Verify(c) => (Table::Verify, c),
        Command::Scan { table, common } => (*table, common),
    };
    let cfg = match build_config(common, table) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if matches!(cli.command, Command::Scan { .. }) && cfg.axes().is_empty() {
        eprintln!("error: scan needs at least one axis (config `scan` key or --scan)");
        return EXIT_CONFIG;
    }
    let (bytes, code) = match execute(table, &cfg, common.format, common.normalized) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let written = match &common.output {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().lock().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_CONFIG;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        let a = ScanAxis { param: "lambda".into(), start: 0.0, stop: 0.4, steps: 5 };
        assert_eq!(a.values(), vec![0.0, 0.1, 0.2, 0.30000000000000004, 0.4]);
        let one = ScanAxis { steps: 1, ..a };
        assert_eq!(one.values(), vec![0.0]);
    }

    #[test]
    fn grid_is_first_axis_major() {
        let cfg = RunConfig {
            scan: Some(vec![
                ScanAxis { param: "lambda".into(), start: 0.1, stop: 0.2, steps: 2 },
                ScanAxis { param: "kappa_im".into(), start: 0.0, stop: 0.05, steps: 3 },
            ]),
            ..RunConfig::default()
        };
        let pts = cfg.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].lambda.re, 0.1);
        assert_eq!(pts[2].lambda.re, 0.1);
        assert_eq!(pts[3].lambda.re, 0.2);
        assert_eq!(pts[1].kappa, C64::new(0.1, 0.025));
    }

    #[test]
    fn config_accepts_numbers_and_pairs() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"omega_a": 1, "omega_b": 1, "omega_c": 1, "lambda": [0.2, 0.1], "xi": 0.05, "kappa": 0.1, "atom": "two-level"}"#,
        )
        .unwrap();
        assert_eq!(cfg.lambda, C64::new(0.2, 0.1));
        assert_eq!(cfg.atom, AtomKind::TwoLevel);
        assert!(serde_json::from_str::<RunConfig>(r#"{"omega": 1}"#).is_err());
    }

    #[test]
    fn config_checks() {
        let mut cfg = RunConfig::default();
        cfg.tol.insert("bogus".into(), 1.0);
        assert!(cfg.check().is_err());
        let cfg = RunConfig {
            scan: Some(vec![ScanAxis { param: "mu".into(), start: 0.0, stop: 1.0, steps: 2 }]),
            ..RunConfig::default()
        };
        assert!(cfg.check().is_err());
        let cfg = RunConfig { omega_a: -1.0, ..RunConfig::default() };
        assert!(cfg.check().is_err());
    }

    #[test]
    fn fixture_spectrum_row() {
        let row = spectrum_row(0, &RunConfig::default().params(), AtomKind::Oscillator);
        let e = row.energies.unwrap();
        assert!((e[0] - 0.7930295020247187).abs() < 1e-12);
        assert!((e[2] - 1.2462171996010125).abs() < 1e-12);
        assert_eq!(row.interlaced, Some(true));
        assert_eq!(spectrum_outcome(&row), Outcome::Ok);
    }

    #[test]
    fn kappa_beyond_bound_flags_ass1() {
        let p = ModelParams::real(1.0, 1.0, 1.0, 0.2, 0.05, 1.2).unwrap();
        let row = spectrum_row(0, &p, AtomKind::Oscillator);
        assert_eq!(row.ass1, Some(false));
        assert_eq!(spectrum_outcome(&row), Outcome::Assumption);
    }

    #[test]
    fn classify_kappa_zero_all_bright() {
        let p = ModelParams::real(1.0, 1.1, 0.9, 0.2, 0.1, 0.0).unwrap();
        let rows = classify_rows(0, &p, AtomKind::Oscillator, 1, DEFAULT_CLASSIFY_TOL);
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.class == Some(ClassVariant::Bright)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&[Outcome::Ok], true), EXIT_OK);
        assert_eq!(exit_code(&[Outcome::Assumption], true), EXIT_ASSUMPTION);
        assert_eq!(exit_code(&[Outcome::Assumption], false), EXIT_OK);
        assert_eq!(exit_code(&[Outcome::Ok, Outcome::Failure], false), EXIT_VALIDATION);
    }
}
