// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `twometric` command line: reproducible experiments writing JSON and
//! CSV reports.
//!
//! Settings come from an optional JSON config (`--json-config`), overridden
//! by flags. Every report echoes the fully resolved config. Exit codes: 0 on
//! pass, 1 on failure, 2 on a bad config.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::audit::{audit, AuditConfig, Axiom, DEFAULT_TOLERANCE};
use crate::baseline;
use crate::certify::{calibrate, certify, CertInput};
use crate::dynamics::{
    detect_outcome, make_linear_map, make_sphere_map, measured_contraction_factor, orbit,
    DDecreasingMap, Outcome, SphereContractionParams,
};
use crate::error::{Error, Result};
use crate::finite::FiniteTwoMetricSpace;
use crate::linalg::rotation_z;
use crate::lines::{classify, enumerate_lines, Thresholds};
use crate::metric::{TwoMetricSpace, WitnessSet};
use crate::quasi::{
    banach_direct, banach_multcost, banach_power, ray_contraction_demo, BanachRun, QuasiSpace,
};
use crate::spaces::{
    convexity_bound, AreaBall, BallPoint, DeterminantSphere, PatchMetric, SpherePoint,
};

#[derive(Debug, Parser)]
#[command(
    name = "twometric",
    version,
    about = "Experiments on bounded 2-metric spaces"
)]
pub struct Cli {
    /// Seed for every sampler.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Numerical tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// JSON file with settings; flags take precedence.
    #[arg(long = "json-config", global = true)]
    pub json_config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit the axioms of a space.
    Audit(AuditArgs),
    /// Squeeze-and-rotate map of the sphere: fixed point or fixed equator.
    DemoEquator(SphereMapArgs),
    /// Iterate a map and measure its contraction factor.
    Iterate(IterateArgs),
    /// Classify a sequence by its LIM set.
    Classify(ClassifyArgs),
    /// Certify a planar map on the sphere patch.
    Certify(CertifyArgs),
    /// Fixed-point iteration on a quasi-metric space.
    Banach(BanachArgs),
    /// Estimate the convexity sandwich constant of the patch.
    Convexity(ConvexityArgs),
    /// List the lines of a finite space.
    EnumerateLines(LinesArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::DemoEquator(_) => "demo-equator",
            Command::Iterate(_) => "iterate",
            Command::Classify(_) => "classify",
            Command::Certify(_) => "certify",
            Command::Banach(_) => "banach",
            Command::Convexity(_) => "convexity",
            Command::EnumerateLines(_) => "enumerate-lines",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    DetSphere,
    ProjectiveSphere,
    AreaBall,
    Patch,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Sphere,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Alternating,
    Orbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Ray,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BanachMode {
    Direct,
    Power,
    Multcost,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    space: Option<SpaceKind>,
    /// JSON table of a finite space; the 5-point demo space when omitted.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    witnesses: Option<usize>,
    /// Patch radius.
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SphereMapArgs {
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    e: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Comma-separated start point.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    start: Option<Vec<f64>>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    witnesses: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long, value_enum)]
    map: Option<MapKind>,
    #[command(flatten)]
    sphere: SphereMapArgs,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum)]
    sequence: Option<SequenceKind>,
    #[command(flatten)]
    sphere: SphereMapArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Reference matrix: `sI` or row-major `a,b,c,d`.
    #[arg(long = "A", allow_negative_numbers = true)]
    matrix: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long = "r-prime")]
    r_prime: Option<f64>,
    #[arg(long = "c-a")]
    c_a: Option<f64>,
    /// Proximity budget c'; defaults to 0.01 |det A| / C_A.
    #[arg(long)]
    budget: Option<f64>,
    /// Coefficient of the quadratic perturbation `(x1^2, x1 x2)`.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Adds `planted * c' * x1` to the first component.
    #[arg(long)]
    planted: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BanachArgs {
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long, value_enum)]
    mode: Option<BanachMode>,
    #[arg(long)]
    steps: Option<usize>,
    /// Number of ray points in the finite model.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LinesArgs {
    #[arg(long)]
    table: Option<PathBuf>,
}

/// Every setting of every subcommand. Unset fields take per-command
/// defaults, which are written back before the config is echoed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted: Option<f64>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<BanachMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

macro_rules! overlay {
    ($cfg:ident, $args:expr, $($field:ident),+) => {{
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = Some(v); })+
    }};
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    fn overlay_sphere(&mut self, a: &SphereMapArgs) {
        overlay!(self, a, k, e, theta, start, steps, witnesses);
    }

    /// Applies the flags of `cli` on top of `self`.
    pub fn overlay(&mut self, cli: &Cli) -> Result<()> {
        let name = cli.command.name();
        if let Some(c) = &self.command {
            if c != name {
                return Err(Error::InvalidArgument(format!(
                    "config is for command `{c}`, not `{name}`"
                )));
            }
        }
        self.command = Some(name.into());
        overlay!(self, cli, seed, out, tolerance);
        match &cli.command {
            Command::Audit(a) => overlay!(self, a, space, table, samples, witnesses, r),
            Command::DemoEquator(a) => self.overlay_sphere(a),
            Command::Iterate(a) => {
                overlay!(self, a, map, samples);
                self.overlay_sphere(&a.sphere);
            }
            Command::Classify(a) => {
                overlay!(self, a, sequence);
                self.overlay_sphere(&a.sphere);
            }
            Command::Certify(a) => {
                overlay!(self, a, matrix, r, r_prime, c_a, budget, mu, planted, samples)
            }
            Command::Banach(a) => overlay!(self, a, c, k, model, mode, steps, points),
            Command::Convexity(a) => overlay!(self, a, r, samples),
            Command::EnumerateLines(a) => overlay!(self, a, table),
        }
        Ok(())
    }

    fn seed(&mut self) -> u64 {
        *self.seed.get_or_insert(0)
    }

    fn tolerance(&mut self) -> f64 {
        *self.tolerance.get_or_insert(DEFAULT_TOLERANCE)
    }

    fn thresholds(&mut self) -> Thresholds {
        *self.thresholds.get_or_insert_with(Thresholds::default)
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut cfg = match &cli.json_config {
        Some(p) => match ExperimentConfig::from_json_file(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", p.display());
                return 2;
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Err(e) = cfg.overlay(&cli) {
        eprintln!("error: {e}");
        return 2;
    }
    match execute(&mut cfg) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_)
                | Error::SingularBasis(_)
                | Error::NotOrthogonal(_)
                | Error::Json(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Runs the command named in `cfg`, writes its reports and returns whether
/// it passed.
pub fn execute(cfg: &mut ExperimentConfig) -> Result<bool> {
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| Error::InvalidArgument("no command given".into()))?;
    let (result, pass) = match command.as_str() {
        "audit" => cmd_audit(cfg)?,
        "demo-equator" => cmd_demo_equator(cfg)?,
        "iterate" => cmd_iterate(cfg)?,
        "classify" => cmd_classify(cfg)?,
        "certify" => cmd_certify(cfg)?,
        "banach" => cmd_banach(cfg)?,
        "convexity" => cmd_convexity(cfg)?,
        "enumerate-lines" => cmd_enumerate_lines(cfg)?,
        other => return Err(Error::InvalidArgument(format!("unknown command `{other}`"))),
    };
    let report = json!({ "command": command, "config": cfg, "pass": pass, "result": result });
    let path = out_dir(cfg)?.join(format!("{command}.json"));
    fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    println!(
        "{command}: {} ({})",
        if pass { "pass" } else { "FAIL" },
        path.display()
    );
    Ok(pass)
}

fn out_dir(cfg: &mut ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.out.get_or_insert_with(|| PathBuf::from("out")).clone();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be >= 1")));
    }
    Ok(v)
}

fn load_table(cfg: &ExperimentConfig) -> Result<FiniteTwoMetricSpace> {
    match &cfg.table {
        Some(p) => FiniteTwoMetricSpace::read_json(p),
        None => Ok(FiniteTwoMetricSpace::demo5()),
    }
}

fn lines_json(space: &FiniteTwoMetricSpace, tol: f64) -> Value {
    json!(enumerate_lines(space, tol)
        .into_iter()
        .map(|l| l.members)
        .collect::<Vec<_>>())
}

pub fn cmd_audit(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let kind = *cfg.space.get_or_insert(SpaceKind::DetSphere);
    let samples = positive("samples", *cfg.samples.get_or_insert(2000))?;
    let seed = cfg.seed();
    let tol = cfg.tolerance();
    let config = AuditConfig {
        tolerance: tol,
        ..AuditConfig::with_samples(samples, seed)
    };
    let mut extra = Value::Null;
    let (report, skip) = match kind {
        SpaceKind::DetSphere | SpaceKind::ProjectiveSphere => {
            let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
            let space = if kind == SpaceKind::DetSphere {
                DeterminantSphere::new()
            } else {
                DeterminantSphere::projective()
            };
            (
                audit(&space, &config, &DeterminantSphere::default_witnesses(nw))?,
                vec![Axiom::N],
            )
        }
        SpaceKind::AreaBall => {
            let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
            let ball = AreaBall::default();
            let w = WitnessSet::sampled(&ball, nw, seed.wrapping_add(1))?;
            (audit(&ball, &config, &w)?, vec![])
        }
        SpaceKind::Patch => {
            let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
            let patch = PatchMetric::new(*cfg.r.get_or_insert(0.2))?;
            let w = WitnessSet::sampled(&patch, nw, seed.wrapping_add(1))?;
            (audit(&patch, &config, &w)?, vec![])
        }
        SpaceKind::Finite => {
            let space = load_table(cfg)?;
            extra = lines_json(&space, tol);
            (
                audit(&space, &config, &WitnessSet::exhaustive(&space)?)?,
                vec![],
            )
        }
    };
    let failures = report.failures(&skip);
    for f in &failures {
        eprintln!(
            "{} violated by {:e} at {:?}",
            f.axiom, f.max_violation, f.witness
        );
    }
    let pass = failures.is_empty();
    let non_fatal: Vec<&str> = skip.iter().map(|a| a.name()).collect();
    Ok((
        json!({ "report": report, "non_fatal": non_fatal, "lines": extra }),
        pass,
    ))
}

fn sphere_params(
    cfg: &mut ExperimentConfig,
) -> Result<(SphereContractionParams, SpherePoint, usize, usize)> {
    let params = SphereContractionParams {
        k: *cfg.k.get_or_insert(0.1),
        e: *cfg.e.get_or_insert(0.5),
        theta: *cfg.theta.get_or_insert(std::f64::consts::PI / 7.0),
    };
    let start = cfg.start.get_or_insert_with(|| vec![0.8, 0.0, 0.6]).clone();
    let start: [f64; 3] = start
        .try_into()
        .map_err(|_| Error::InvalidArgument("start must have 3 coordinates".into()))?;
    let steps = positive("steps", *cfg.steps.get_or_insert(200))?;
    let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
    Ok((params, SpherePoint::new(start)?, steps, nw))
}

fn write_trace<S: TwoMetricSpace>(
    cfg: &mut ExperimentConfig,
    space: &S,
    trace: &crate::dynamics::OrbitTrace<S::Point>,
    x3_column: bool,
) -> Result<PathBuf> {
    let path = out_dir(cfg)?.join("orbit.csv");
    trace.write_csv(space, fs::File::create(&path)?, x3_column)?;
    Ok(path)
}

pub fn cmd_demo_equator(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let (params, x0, steps, nw) = sphere_params(cfg)?;
    let thresholds = cfg.thresholds();
    let map = make_sphere_map(params)?;
    if !map.certified {
        eprintln!(
            "warning: k = {} >= e^3 = {}; contraction factor {} is not certified",
            params.k,
            params.e.powi(3),
            params.kappa()
        );
    }
    let space = DeterminantSphere::new();
    let w = DeterminantSphere::default_witnesses(nw);
    let det = detect_outcome(&map, &space, &x0, steps, &w, &thresholds);
    if let Some(trace) = &det.trace {
        write_trace(cfg, &space, trace, true)?;
    }
    let pass = if params.theta == 0.0 {
        matches!(det.outcome, Outcome::FixedPoint { .. })
    } else {
        match &det.outcome {
            Outcome::FixedLine(ev) => {
                ev.line.members.iter().all(|m| m.coords()[2].abs() <= 1e-6)
                    && ev.invariance_defect <= 1e-6
            }
            _ => false,
        }
    };
    let mut v = det.to_json(&space);
    v["certified"] = json!(map.certified);
    v["claimed_factor"] = json!(map.claimed_factor);
    Ok((v, pass))
}

fn iterate_report<S: TwoMetricSpace>(
    cfg: &mut ExperimentConfig,
    map: &DDecreasingMap<'_, S::Point>,
    space: &S,
    x0: &S::Point,
    witnesses: &WitnessSet<S::Point>,
    x3_column: bool,
) -> Result<(Value, bool)> {
    let steps = *cfg.steps.get_or_insert(200);
    let samples = positive("samples", *cfg.samples.get_or_insert(2000))?;
    let seed = cfg.seed();
    let tol = cfg.tolerance();
    let trace = orbit(map, space, x0, steps, witnesses)?;
    write_trace(cfg, space, &trace, x3_column)?;
    let measured = measured_contraction_factor(map, space, samples, seed)?;
    let factor_ok = !map.certified
        || measured
            .factor
            .is_some_and(|f| f <= map.claimed_factor + tol);
    let decay_ok = !map.certified || trace.decay.holds(tol);
    let pass = trace.truncated.is_none() && factor_ok && decay_ok;
    Ok((
        json!({
            "map": map.name,
            "domain": map.domain_descriptor,
            "claimed_factor": map.claimed_factor,
            "certified": map.certified,
            "measured": measured,
            "steps": trace.steps(),
            "last": space.coords(trace.last()),
            "phi_step": trace.phi_step,
            "decay": trace.decay,
            "truncated": trace.truncated,
        }),
        pass,
    ))
}

pub fn cmd_iterate(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    match *cfg.map.get_or_insert(MapKind::Sphere) {
        MapKind::Sphere => {
            let (params, x0, _, nw) = sphere_params(cfg)?;
            let map = make_sphere_map(params)?;
            let w = DeterminantSphere::default_witnesses(nw);
            iterate_report(cfg, &map, &DeterminantSphere::new(), &x0, &w, true)
        }
        MapKind::Linear => {
            let k = *cfg.k.get_or_insert(0.5);
            let theta = *cfg.theta.get_or_insert(0.0);
            let start = cfg
                .start
                .get_or_insert_with(|| vec![0.3, 0.1, -0.2])
                .clone();
            if start.len() != 3 {
                return Err(Error::InvalidArgument(
                    "start must have 3 coordinates".into(),
                ));
            }
            let ball = AreaBall::default();
            let rot: Vec<Vec<f64>> = rotation_z(theta).iter().map(|r| r.to_vec()).collect();
            let map = make_linear_map(rot, k, &ball)?;
            let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
            let w = WitnessSet::sampled(&ball, nw, cfg.seed().wrapping_add(1))?;
            iterate_report(cfg, &map, &ball, &BallPoint(start), &w, false)
        }
    }
}

pub fn cmd_classify(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let kind = *cfg.sequence.get_or_insert(SequenceKind::Alternating);
    let thresholds = cfg.thresholds();
    let space = DeterminantSphere::new();
    let (sequence, nw) = match kind {
        SequenceKind::Alternating => {
            let steps = positive("steps", *cfg.steps.get_or_insert(100))?;
            let nw = positive("witnesses", *cfg.witnesses.get_or_insert(256))?;
            let seq = (0..steps)
                .map(|i| {
                    if i % 2 == 0 {
                        SpherePoint::e1()
                    } else {
                        SpherePoint::e2()
                    }
                })
                .collect::<Vec<_>>();
            (seq, nw)
        }
        SequenceKind::Orbit => {
            let (params, x0, steps, nw) = sphere_params(cfg)?;
            let map = make_sphere_map(params)?;
            let w = DeterminantSphere::default_witnesses(nw);
            (orbit(&map, &space, &x0, steps, &w)?.points, nw)
        }
    };
    let w = DeterminantSphere::default_witnesses(nw);
    let c = classify(&space, &sequence, &w, &thresholds)?;
    Ok((c.to_json(&space), true))
}

fn parse_matrix(s: &str) -> Result<[[f64; 2]; 2]> {
    let bad =
        || Error::InvalidArgument(format!("cannot parse matrix `{s}`; use `sI` or `a,b,c,d`"));
    let s = s.trim();
    if let Some(scale) = s.strip_suffix('I') {
        let v: f64 = if scale.is_empty() {
            1.0
        } else {
            scale.parse().map_err(|_| bad())?
        };
        return Ok([[v, 0.0], [0.0, v]]);
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    match v[..] {
        [a, b, c, d] => Ok([[a, b], [c, d]]),
        _ => Err(bad()),
    }
}

pub fn cmd_certify(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let a = parse_matrix(cfg.matrix.get_or_insert_with(|| "0.25I".into()))?;
    let r = *cfg.r.get_or_insert(baseline::CALIBRATION_R);
    let r_prime = *cfg.r_prime.get_or_insert(baseline::CALIBRATION_R_PRIME);
    let c_a = *cfg.c_a.get_or_insert(baseline::CALIBRATION_C_A);
    let mu = *cfg.mu.get_or_insert(0.0);
    let planted = *cfg.planted.get_or_insert(0.0);
    let samples = positive("samples", *cfg.samples.get_or_insert(1000))?;
    let seed = cfg.seed();

    let committed = baseline::committed_calibration()?;
    let calibration = if (committed.r, committed.r_prime, committed.c_a) == (r, r_prime, c_a) {
        committed
    } else {
        calibrate(
            r,
            r_prime,
            c_a,
            baseline::CALIBRATION_MAX_CONDITION,
            baseline::CALIBRATION_MATRICES,
            baseline::CALIBRATION_TRIPLES,
            seed,
        )?
    };
    let committed = baseline::committed_convexity()?;
    let convexity_c = if committed.r == r {
        committed.c
    } else {
        convexity_bound(r, baseline::CONVEXITY_SAMPLES, seed)?.c
    };
    let budget = *cfg
        .budget
        .get_or_insert(crate::certify::default_budget(&a, c_a));
    let shift = planted * budget;
    let f = move |x: &[f64; 2]| {
        [
            a[0][0] * x[0] + a[0][1] * x[1] + mu * x[0] * x[0] + shift * x[0],
            a[1][0] * x[0] + a[1][1] * x[1] + mu * x[0] * x[1],
        ]
    };
    let mut input = CertInput::new(f, a, &calibration, convexity_c)?;
    input.budget = budget;
    let res = certify(&input, samples, seed)?;
    for fail in &res.failures {
        eprintln!(
            "hypothesis {} fails: {:e} > {:e} at {:?}",
            fail.hypothesis, fail.value, fail.budget, fail.at
        );
    }
    let pass = res.pass && res.conclusion_holds == Some(true);
    Ok((
        json!({ "certificate": res, "calibration": calibration }),
        pass,
    ))
}

fn banach_run<P>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    x0: &P,
    k: f64,
    steps: usize,
    mode: BanachMode,
) -> Result<BanachRun<P>>
where
    P: Clone + PartialEq + std::fmt::Debug,
{
    match mode {
        BanachMode::Direct => banach_direct(space, f, x0, k, steps),
        BanachMode::Power => banach_power(space, f, x0, k, steps),
        BanachMode::Multcost => banach_multcost(space, f, x0, k, steps),
    }
}

pub fn cmd_banach(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let c = *cfg.c.get_or_insert(2.0);
    let k = *cfg.k.get_or_insert(0.4);
    let mode = *cfg.mode.get_or_insert(BanachMode::Direct);
    let steps = positive("steps", *cfg.steps.get_or_insert(200))?;
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in (0, 1)"
        )));
    }
    let (run, pass) = match *cfg.model.get_or_insert(ModelKind::Ray) {
        ModelKind::Ray => {
            let n = *cfg.points.get_or_insert(12);
            // the shift contracts by r / (1 - r)
            let (table, map) = ray_contraction_demo(n, k / (1.0 + k))?;
            let mut space = QuasiSpace::new(
                |x: &usize, y: &usize| table.phi(*x, *y),
                c,
                (0..table.len()).collect(),
            )?;
            if mode == BanachMode::Multcost {
                space = space.with_cost(|_: &usize, _: &usize, _: &usize| 0.0, 0.0)?;
            }
            let run = banach_run(&space, &|i: &usize| map[*i], &1, k, steps, mode)?;
            let pass = run.tail_bound_ok && run.residual <= 1e-10;
            (run.to_json(), pass)
        }
        ModelKind::Interval => {
            let mut space = QuasiSpace::interval(0.0, 1.0, 100, c)?;
            if mode == BanachMode::Multcost {
                space = space.with_cost(|_: &f64, _: &f64, z: &f64| 0.1 * z.abs(), 0.1)?;
            }
            let run = banach_run(&space, &|x: &f64| k * x, &1.0, k, steps, mode)?;
            let pass = run.tail_bound_ok && run.residual <= 1e-10;
            (run.to_json(), pass)
        }
    };
    Ok((run, pass))
}

pub fn cmd_convexity(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let r = *cfg.r.get_or_insert(baseline::CONVEXITY_R);
    let samples = positive(
        "samples",
        *cfg.samples.get_or_insert(baseline::CONVEXITY_SAMPLES),
    )?;
    let seed = cfg.seed();
    let report = convexity_bound(r, samples, seed)?;
    let committed = baseline::committed_convexity()?;
    let comparable = (committed.r, committed.samples, committed.seed) == (r, samples, seed);
    let regression_ok =
        !comparable || baseline::within(report.c, committed.c, baseline::REGRESSION_TOLERANCE);
    let pass = report.c.is_finite() && report.c >= 1.0 && regression_ok;
    Ok((
        json!({
            "report": report,
            "baseline_C": if comparable { json!(committed.c) } else { Value::Null },
            "regression_ok": regression_ok,
        }),
        pass,
    ))
}

pub fn cmd_enumerate_lines(cfg: &mut ExperimentConfig) -> Result<(Value, bool)> {
    let tol = cfg.tolerance();
    let space = load_table(cfg)?;
    Ok((
        json!({ "n": space.len(), "lines": lines_json(&space, tol) }),
        true,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_parse() {
        assert_eq!(parse_matrix("0.25I").unwrap(), [[0.25, 0.0], [0.0, 0.25]]);
        assert_eq!(parse_matrix("I").unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(parse_matrix("1,2,-3,4").unwrap(), [[1.0, 2.0], [-3.0, 4.0]]);
        assert!(parse_matrix("1,2,3").is_err());
        assert!(parse_matrix("xI").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(r#"{"seed": 3, "k": 0.2, "steps": 10}"#).unwrap();
        let cli =
            Cli::try_parse_from(["twometric", "--seed", "9", "banach", "--k", "0.3"]).unwrap();
        cfg.overlay(&cli).unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.k, Some(0.3));
        assert_eq!(cfg.steps, Some(10));
        assert_eq!(cfg.command.as_deref(), Some("banach"));
    }

    #[test]
    fn unknown_fields_and_mismatched_commands_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sead": 3}"#).is_err());
        let mut cfg: ExperimentConfig = serde_json::from_str(r#"{"command": "audit"}"#).unwrap();
        let cli = Cli::try_parse_from(["twometric", "convexity"]).unwrap();
        assert!(cfg.overlay(&cli).is_err());
    }
}
