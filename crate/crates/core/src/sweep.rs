//! Parameter sweeps: configuration, figure presets, parallel evaluation and CSV output.
//!
//! A sweep is described by flat `key = value` text. Values from a preset are
//! overlaid by a configuration file, which is overlaid by command-line flags.
//! Energies (`delta`, `big_delta`, `omega`, `lambda`, `sigma_*`, `gamma_*`)
//! share one unit, inverse temperatures use its inverse. Axis ranges are given
//! in units of `delta`. `#` starts a comment.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `delta`, `big_delta` | level energies | `1`, `2` |
//! | `omega`, `lambda` | drive frequency and amplitude | `1`, `0.5` |
//! | `n_qutrits` | ensemble size | `1` |
//! | `beta_cold`, `beta_hot` | inverse temperatures | `1.5`, `1` |
//! | `gamma_cold`, `gamma_hot` | bare couplings | `0.1`, `0.1` |
//! | `sigma_cold`, `sigma_hot` | Lorentz-Drude widths | `1`, `1` |
//! | `backends` | comma-separated backend names | `floquet-pauli` |
//! | `axis1`, `axis2` | `name:start:stop:count`, name one of `omega`, `lambda`, `n` | none |
//! | `grid` | `A` or `AxB`, replaces the axis counts | none |
//! | `workers` | worker threads, `0` for all cores | `0` |
//! | `redfield_cutoff_cap` | largest Redfield Fourier cutoff | `32` |
//! | `redfield_tolerance` | relative cold-current change accepted | `1e-3` |
//! | `redfield_max_n` | largest ensemble given to `redfield` | `10` |
//! | `out` | output path | stdout |

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::backend::{BackendRegistry, Point, SolveOptions};
use crate::error::{Error, Result};
use crate::floquet_lindblad::{cooling_conditions, Classification, CoolingConditions};
use crate::params::{Baths, ReservoirKind, ReservoirParams, SystemParams};
use crate::redfield::{FloquetRedfield, REDFIELD_CAP};
use crate::thermo::CurrentReport;

pub const CSV_HEADER: [&str; 10] = [
    "axis1",
    "axis2",
    "backend",
    "I_cold",
    "I_hot",
    "power",
    "cop",
    "entropy_rate",
    "classification",
    "flags",
];

pub const UNITS_ROW: &str = "# axes in units of delta; I_cold, I_hot, power in units of delta^2 (hbar = 1); \
entropy_rate in units of delta; cop relative to Carnot";

pub const CONDITIONS_HEADER: [&str; 10] = [
    "axis1",
    "axis2",
    "classification",
    "lower_gap",
    "upper_affinity",
    "lower_affinity",
    "cycles_exist",
    "first",
    "second",
    "lower_cycle",
];

pub const BOUNDARY_HEADER: [&str; 3] = ["condition", "axis1", "axis2"];

/// Recognised configuration keys.
pub const CONFIG_KEYS: [&str; 21] = [
    "delta",
    "big_delta",
    "omega",
    "lambda",
    "n_qutrits",
    "beta_cold",
    "beta_hot",
    "gamma_cold",
    "gamma_hot",
    "sigma_cold",
    "sigma_hot",
    "backends",
    "axis1",
    "axis2",
    "grid",
    "workers",
    "redfield_cutoff_cap",
    "redfield_tolerance",
    "redfield_max_n",
    "out",
    "preset",
];

pub const PRESETS: [&str; 8] = ["fig3", "fig5-top", "fig5-mid", "fig5-bot", "fig7", "fig8", "fig9", "fig10"];

/// Output numbers carry 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Map,
    Scan,
    NScale,
    CheckConditions,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Map => "map",
            Command::Scan => "scan",
            Command::NScale => "nscale",
            Command::CheckConditions => "check-conditions",
        }
    }

    pub fn axis_count(&self) -> usize {
        match self {
            Command::Map | Command::CheckConditions => 2,
            Command::Scan | Command::NScale => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Omega,
    Lambda,
    N,
}

impl FromStr for AxisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(AxisKind::Omega),
            "lambda" => Ok(AxisKind::Lambda),
            "n" => Ok(AxisKind::N),
            other => Err(usage(format!("unknown axis `{other}` (expected omega, lambda or n)"))),
        }
    }
}

impl fmt::Display for AxisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisKind::Omega => "omega",
            AxisKind::Lambda => "lambda",
            AxisKind::N => "n",
        })
    }
}

/// An evenly spaced axis, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(kind: AxisKind, start: f64, stop: f64, count: usize) -> Result<Self> {
        let a = Self {
            kind,
            start,
            stop,
            count,
        };
        a.validate()?;
        Ok(a)
    }

    /// Parse `name:start:stop:count`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [name, start, stop, count] = parts[..] else {
            return Err(usage(format!("axis `{s}` is not name:start:stop:count")));
        };
        let num = |v: &str| v.parse::<f64>().map_err(|_| usage(format!("axis `{s}`: bad number `{v}`")));
        let count = count
            .parse::<usize>()
            .map_err(|_| usage(format!("axis `{s}`: bad count `{count}`")))?;
        Self::new(name.parse()?, num(start)?, num(stop)?, count)
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(usage(format!("axis {} has zero points", self.kind)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(usage(format!("axis {} has a non-finite bound", self.kind)));
        }
        if self.kind == AxisKind::N {
            let integral = |v: f64| v >= 1.0 && v.fract() == 0.0;
            let span = self.stop - self.start;
            let steps = (self.count.max(2) - 1) as f64;
            if !integral(self.start) || !integral(self.stop) || (self.count > 1 && (span / steps).fract() != 0.0) {
                return Err(usage("axis n must consist of positive integers"));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

/// Flat key-value configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| usage(format!("config line {}: {e}", no + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !CONFIG_KEYS.contains(&key) {
            return Err(usage(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Copy every entry of `other` over this one.
    pub fn overlay(&mut self, other: &Config) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    /// Expand a `preset` entry: the preset's values sit beneath the explicit ones.
    pub fn resolved(&self) -> Result<Config> {
        match self.get("preset") {
            None => Ok(self.clone()),
            Some(name) => {
                let mut base = preset(name)?;
                base.overlay(self);
                base.entries.remove("preset");
                Ok(base)
            }
        }
    }

    fn number(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| usage(format!("`{key}`: bad number `{v}`"))),
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| usage(format!("`{key}`: bad integer `{v}`"))),
        }
    }
}

/// Parameters of the paper figures, as configuration text.
pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig3" => {
            "axis1 = omega:-3:3:61\naxis2 = lambda:-3:3:61\nbackends = floquet-pauli\n\
             beta_cold = 1.5\nbeta_hot = 1\n"
        }
        "fig5-top" => "axis1 = lambda:0:3:61\nomega = 0.8\nbackends = weak,floquet-lindblad,floquet-pauli,redfield\n",
        "fig5-mid" => "axis1 = lambda:0:3:61\nomega = 1\nbackends = weak,floquet-lindblad,floquet-pauli,redfield\n",
        "fig5-bot" => "axis1 = lambda:0:3:61\nomega = 1.2\nbackends = weak,floquet-lindblad,floquet-pauli,redfield\n",
        "fig7" => {
            "axis1 = n:1:30:30\nomega = 1\nlambda = 0.5\nbackends = weak,floquet-lindblad,floquet-pauli,redfield\n"
        }
        "fig8" => {
            "axis1 = n:1:200:200\nomega = 1\nlambda = 0.5\nbeta_cold = 0.3\nbeta_hot = 0.2\n\
             backends = floquet-pauli\n"
        }
        "fig9" => "axis1 = omega:-3:3:61\naxis2 = lambda:-3:3:61\nbackends = floquet-pauli,weak\n",
        "fig10" => "axis1 = omega:0.5:1.5:41\naxis2 = lambda:-0.5:0.5:41\nbackends = redfield,floquet-pauli\n",
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<Config> {
    let text = preset_text(name)
        .ok_or_else(|| usage(format!("unknown preset `{name}` (known: {})", PRESETS.join(", "))))?;
    Config::parse(text)
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub command: Command,
    pub backends: Vec<String>,
    pub axes: Vec<Axis>,
    pub system: SystemParams,
    pub baths: Baths,
    pub options: SolveOptions,
    pub redfield_max_n: usize,
    /// Worker threads; `0` uses every core.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl SweepSpec {
    pub fn from_config(command: Command, cfg: &Config) -> Result<Self> {
        let cfg = cfg.resolved()?;
        let delta = cfg.number("delta", 1.0)?;
        let system = SystemParams::new(
            delta,
            cfg.number("big_delta", 2.0 * delta)?,
            cfg.number("omega", delta)?,
            cfg.number("lambda", 0.5 * delta)?,
            cfg.count("n_qutrits", 1)?,
        )?;
        let reservoir = |kind, suffix: &str, beta| -> Result<ReservoirParams> {
            ReservoirParams::new(
                kind,
                cfg.number(&format!("beta_{suffix}"), beta)?,
                cfg.number(&format!("gamma_{suffix}"), 0.1 * delta)?,
                cfg.number(&format!("sigma_{suffix}"), delta)?,
            )
        };
        let baths = Baths::new(
            reservoir(ReservoirKind::Cold, "cold", 1.5 / delta)?,
            reservoir(ReservoirKind::Hot, "hot", 1.0 / delta)?,
        )?;

        let mut axes = Vec::new();
        for key in ["axis1", "axis2"] {
            if let Some(a) = cfg.get(key) {
                axes.push(Axis::parse(a)?);
            } else {
                break;
            }
        }
        if let Some(g) = cfg.get("grid") {
            let counts: Vec<usize> = g
                .split('x')
                .map(|c| c.trim().parse().map_err(|_| usage(format!("bad grid `{g}`"))))
                .collect::<Result<_>>()?;
            if counts.len() != axes.len() {
                return Err(usage(format!("grid `{g}` does not match {} swept axes", axes.len())));
            }
            for (a, c) in axes.iter_mut().zip(counts) {
                *a = Axis::new(a.kind, a.start, a.stop, c)?;
            }
        }

        let backends: Vec<String> = cfg
            .get("backends")
            .unwrap_or("floquet-pauli")
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let defaults = SolveOptions::default();
        let options = SolveOptions {
            redfield_cutoff_cap: cfg.count("redfield_cutoff_cap", defaults.redfield_cutoff_cap)?,
            redfield_tolerance: cfg.number("redfield_tolerance", defaults.redfield_tolerance)?,
            ..defaults
        };
        let spec = SweepSpec {
            command,
            backends,
            axes,
            system,
            baths,
            options,
            redfield_max_n: cfg.count("redfield_max_n", REDFIELD_CAP)?,
            workers: cfg.count("workers", 0)?,
            out: cfg.get("out").map(PathBuf::from),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let cmd = self.command.name();
        if self.axes.len() != self.command.axis_count() {
            return Err(usage(format!(
                "{cmd} needs {} swept axes, got {}",
                self.command.axis_count(),
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].kind == self.axes[1].kind {
            return Err(usage("the two axes must differ"));
        }
        let has_n = self.axes.iter().any(|a| a.kind == AxisKind::N);
        match self.command {
            Command::NScale if !has_n => return Err(usage("nscale sweeps the n axis")),
            Command::CheckConditions if has_n => return Err(usage("check-conditions sweeps omega and lambda")),
            _ => {}
        }
        if self.command == Command::CheckConditions {
            return Ok(());
        }
        if self.backends.is_empty() {
            return Err(usage("no backend selected"));
        }
        if self.options.redfield_cutoff_cap == 0 {
            return Err(usage("redfield_cutoff_cap must be at least 1"));
        }
        let registry = self.registry();
        let n_min = self
            .axes
            .iter()
            .find(|a| a.kind == AxisKind::N)
            .map(|a| a.start.min(a.stop) as usize)
            .unwrap_or(self.system.n_qutrits);
        for name in &self.backends {
            let backend = registry.get(name).map_err(|e| usage(e.to_string()))?;
            if let Some(cap) = backend.max_qutrits() {
                if n_min > cap {
                    return Err(usage(format!("{name} supports at most {cap} qutrits")));
                }
            }
        }
        Ok(())
    }

    /// Default backends, with the Redfield cap taken from the spec.
    pub fn registry(&self) -> BackendRegistry {
        let mut r = BackendRegistry::with_defaults();
        r.register(Box::new(FloquetRedfield {
            max_n: self.redfield_max_n,
        }));
        r
    }

    /// Axis coordinates of every grid point, row-major.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            let vals = axis.values();
            out = out
                .into_iter()
                .flat_map(|c| {
                    vals.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        out
    }

    /// The operating point at the given axis coordinates.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        let mut s = self.system;
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.kind {
                AxisKind::Omega => s.omega = v * s.delta,
                AxisKind::Lambda => s.lambda = v * s.delta,
                AxisKind::N => s.n_qutrits = v as usize,
            }
        }
        Point::new(s, self.baths)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Numerical(format!("worker pool: {e}")))
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub coords: Vec<f64>,
    pub backend: String,
    /// The solved point in units of δ, or the failure message.
    pub outcome: std::result::Result<CurrentReport, String>,
    pub classification: Classification,
    /// `N × I_c(N = 1)` in units of δ², `nscale` only.
    pub classical: Option<f64>,
    /// Local log-log slope of `I_c` versus `N`, `nscale` only.
    pub slope: Option<f64>,
}

impl SweepRecord {
    pub fn failed(&self) -> bool {
        self.outcome.is_err()
    }

    pub fn i_cold(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.i_cold)
    }

    /// Flag tokens for the CSV `flags` column.
    pub fn flags(&self) -> Vec<String> {
        match &self.outcome {
            Err(msg) => vec![format!("failed={}", error_token(msg))],
            Ok(r) => {
                let mut t = r.flags.tokens();
                if r.cop.is_none() {
                    t.push("cop_undefined".into());
                }
                let nums = [r.i_cold, r.i_hot, r.power, r.entropy_rate];
                if nums.iter().any(|v| !v.is_finite()) {
                    t.push("nonfinite".into());
                }
                if self.classical.is_some() && self.slope.is_none() {
                    t.push("slope_undefined".into());
                }
                t
            }
        }
    }

    fn fields(&self) -> Vec<String> {
        let axis = |i: usize| self.coords.get(i).copied().map(fmt_num).unwrap_or_default();
        let (ic, ih, p, cop, s) = match &self.outcome {
            Ok(r) => (r.i_cold, r.i_hot, r.power, r.cop.unwrap_or(f64::NAN), r.entropy_rate),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };
        let mut row = vec![axis(0), axis(1), self.backend.clone()];
        row.extend([ic, ih, p, cop, s].map(fmt_num));
        row.push(self.classification.as_str().to_string());
        row.push(self.flags().join(";"));
        if self.classical.is_some() {
            row.push(fmt_num(self.classical.unwrap_or(f64::NAN)));
            row.push(fmt_num(self.slope.unwrap_or(f64::NAN)));
        }
        row
    }
}

fn error_token(msg: &str) -> &'static str {
    if msg.contains("does not support") {
        "unsupported"
    } else if msg.contains("cutoff cap") {
        "cutoff_not_converged"
    } else if msg.contains("degenerate") {
        "degenerate_unresolved"
    } else {
        "numerical"
    }
}

/// Records of a solved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
}

impl SweepOutput {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }

    /// 0 when every point solved, 3 when some failed, 4 when all failed.
    pub fn exit_code(&self) -> i32 {
        match self.failures() {
            0 => 0,
            f if f == self.records.len() => 4,
            _ => 3,
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = w;
        writeln!(w, "{UNITS_ROW}")?;
        let extended = self.records.iter().any(|r| r.classical.is_some());
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if extended {
            header.extend(["classical", "slope"]);
        }
        csv.write_record(&header)?;
        for r in &self.records {
            csv.write_record(r.fields())?;
        }
        csv.flush()?;
        Ok(())
    }
}

fn solve_record(spec: &SweepSpec, registry: &BackendRegistry, coords: &[f64], backend: &str) -> SweepRecord {
    let point = spec.point(coords);
    let classification = point
        .as_ref()
        .map(|p| cooling_conditions(&p.system, &p.baths).classification)
        .unwrap_or(Classification::None);
    let outcome = point
        .and_then(|p| registry.solve(backend, &p, &spec.options))
        .map(|r| r.rescaled(1.0 / spec.system.delta))
        .map_err(|e| e.to_string());
    SweepRecord {
        coords: coords.to_vec(),
        backend: backend.to_string(),
        outcome,
        classification,
        classical: None,
        slope: None,
    }
}

/// Solve every grid point with every backend.
///
/// Rows are ordered row-major over the axes and by backend within a point,
/// independent of the worker count. Points above a backend's ensemble cap are
/// left out.
pub fn run(spec: &SweepSpec) -> Result<SweepOutput> {
    run_with(spec, &spec.registry())
}

/// As [`run`], resolving backend names in `registry`.
pub fn run_with(spec: &SweepSpec, registry: &BackendRegistry) -> Result<SweepOutput> {
    if spec.command == Command::CheckConditions {
        return Err(usage("check-conditions has no backend sweep; use check_conditions"));
    }
    let mut jobs = Vec::new();
    for coords in spec.grid() {
        let n = spec.point(&coords)?.system.n_qutrits;
        for name in &spec.backends {
            let cap = registry.get(name)?.max_qutrits();
            if cap.is_none_or(|c| n <= c) {
                jobs.push((coords.clone(), name.as_str()));
            }
        }
    }
    let records: Vec<SweepRecord> = spec.pool()?.install(|| {
        jobs.par_iter()
            .map(|(c, b)| solve_record(spec, registry, c, b))
            .collect()
    });
    let mut out = SweepOutput { records };
    if spec.command == Command::NScale {
        add_scaling_columns(spec, registry, &mut out)?;
    }
    Ok(out)
}

fn add_scaling_columns(spec: &SweepSpec, registry: &BackendRegistry, out: &mut SweepOutput) -> Result<()> {
    let n_axis = spec.axes.iter().position(|a| a.kind == AxisKind::N).unwrap_or(0);
    for name in &spec.backends {
        let single = {
            let mut coords = vec![0.0; spec.axes.len()];
            coords[n_axis] = 1.0;
            match out.records.iter().find(|r| &r.backend == name && r.coords[n_axis] == 1.0) {
                Some(r) => r.i_cold(),
                None => solve_record(spec, registry, &coords, name).i_cold(),
            }
        };
        let idx: Vec<usize> = (0..out.records.len()).filter(|&i| &out.records[i].backend == name).collect();
        let logs: Vec<Option<(f64, f64)>> = idx
            .iter()
            .map(|&i| {
                let r = &out.records[i];
                r.i_cold()
                    .filter(|&c| c > 0.0 && c.is_finite())
                    .map(|c| (r.coords[n_axis].ln(), c.ln()))
            })
            .collect();
        for (k, &i) in idx.iter().enumerate() {
            let n = out.records[i].coords[n_axis];
            out.records[i].classical = Some(single.map_or(f64::NAN, |s| n * s));
            let lo = if k > 0 { k - 1 } else { k };
            let hi = (k + 1).min(idx.len() - 1);
            out.records[i].slope = match (logs[lo], logs[hi]) {
                (Some(a), Some(b)) if hi > lo => Some((b.1 - a.1) / (b.0 - a.0)),
                _ => None,
            };
        }
    }
    Ok(())
}

/// Which inequality a boundary belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    LowerGap,
    UpperAffinity,
    LowerAffinity,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::LowerGap, Condition::UpperAffinity, Condition::LowerAffinity];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::LowerGap => "lower_gap",
            Condition::UpperAffinity => "upper_affinity",
            Condition::LowerAffinity => "lower_affinity",
        }
    }

    pub fn value(&self, c: &CoolingConditions) -> f64 {
        match self {
            Condition::LowerGap => c.lower_gap,
            Condition::UpperAffinity => c.upper_affinity,
            Condition::LowerAffinity => c.lower_affinity,
        }
    }
}

/// A point where one condition function changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub condition: Condition,
    pub coords: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionsOutput {
    pub points: Vec<([f64; 2], CoolingConditions)>,
    pub boundaries: Vec<BoundaryPoint>,
}

impl ConditionsOutput {
    pub fn write_points<W: Write>(&self, w: W) -> Result<()> {
        let mut w = w;
        writeln!(w, "# axes and condition values in units of delta")?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(CONDITIONS_HEADER)?;
        for (c, k) in &self.points {
            let b = |v: bool| (if v { "1" } else { "0" }).to_string();
            csv.write_record([
                fmt_num(c[0]),
                fmt_num(c[1]),
                k.classification.as_str().to_string(),
                fmt_num(k.lower_gap),
                fmt_num(k.upper_affinity),
                fmt_num(k.lower_affinity),
                b(k.cycles_exist),
                b(k.first()),
                b(k.second()),
                b(k.lower_cycle()),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write_boundaries<W: Write>(&self, w: W) -> Result<()> {
        let mut w = w;
        writeln!(w, "# sign changes of each condition function, axes in units of delta")?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(BOUNDARY_HEADER)?;
        for b in &self.boundaries {
            csv.write_record([b.condition.as_str().to_string(), fmt_num(b.coords[0]), fmt_num(b.coords[1])])?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Condition values on the grid and their zero crossings between neighbours.
///
/// Each crossing is located by bisection along the grid edge to `1e-13`
/// relative to the edge length.
pub fn check_conditions(spec: &SweepSpec) -> Result<ConditionsOutput> {
    if spec.command != Command::CheckConditions {
        return Err(usage("check_conditions needs the check-conditions command"));
    }
    let eval = |c: [f64; 2]| -> Result<CoolingConditions> {
        let p = spec.point(&c)?;
        Ok(cooling_conditions(&p.system, &p.baths))
    };
    let (v1, v2) = (spec.axes[0].values(), spec.axes[1].values());
    let mut points = Vec::with_capacity(v1.len() * v2.len());
    for &a in &v1 {
        for &b in &v2 {
            points.push(([a, b], eval([a, b])?));
        }
    }
    let at = |i: usize, j: usize| &points[i * v2.len() + j];
    let mut edges = Vec::new();
    for i in 0..v1.len() {
        for j in 0..v2.len() {
            if j + 1 < v2.len() {
                edges.push((at(i, j), at(i, j + 1)));
            }
            if i + 1 < v1.len() {
                edges.push((at(i, j), at(i + 1, j)));
            }
        }
    }
    let mut boundaries = Vec::new();
    for cond in Condition::ALL {
        for (p, q) in &edges {
            let (fp, fq) = (cond.value(&p.1), cond.value(&q.1));
            if fp == 0.0 {
                boundaries.push(BoundaryPoint {
                    condition: cond,
                    coords: p.0,
                });
                continue;
            }
            if fp.signum() == fq.signum() || fq == 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            let lerp = |t: f64| [p.0[0] + t * (q.0[0] - p.0[0]), p.0[1] + t * (q.0[1] - p.0[1])];
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                let fm = cond.value(&eval(lerp(mid))?);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if fm.signum() == fp.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            boundaries.push(BoundaryPoint {
                condition: cond,
                coords: lerp(0.5 * (lo + hi)),
            });
        }
    }
    Ok(ConditionsOutput { points, boundaries })
}
