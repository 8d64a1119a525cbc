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

//! Contractive maps, their orbits, and the fixed point / fixed line
//! dichotomy.
//!
//! A map is d-decreasing with factor `k < 1` when
//! `d(Fx, Fy, Fz) <= k d(x, y, z)`. Its orbits are tri-Cauchy, and either the
//! map has a fixed point or some line `Y` satisfies `F(Y) ⊂ Y` with `Y` the
//! only line containing `F(Y)`. [`detect_outcome`] decides which case an
//! orbit exhibits.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finite::FiniteTwoMetricSpace;
use crate::linalg::{mat3_mul_vec, mat_vec, orthogonality_defect, rotation_z};
use crate::lines::{
    classify, finite_or_null, line_json, Classification, Line, SequenceClass, Thresholds,
};
use crate::metric::{phi_best, TwoMetricSpace, WitnessSet};
use crate::spaces::{AreaBall, BallPoint, PatchMetric, PatchPoint, SpherePoint};

/// Fixed-point residual threshold on `phi(y, F(y))`.
pub const EPS_FIX: f64 = 1e-8;
/// Line members sampled for invariance and uniqueness checks.
pub const LINE_SAMPLES: usize = 64;
/// Triples below this value are skipped when measuring contraction.
const DEGENERATE: f64 = 1e-12;

type MapFn<'a, P> = Box<dyn Fn(&P) -> P + 'a>;
type DomainFn<'a, P> = Box<dyn Fn(&P) -> bool + 'a>;

/// A self-map of a restricted domain with a claimed contraction factor.
pub struct DDecreasingMap<'a, P> {
    pub name: String,
    map: MapFn<'a, P>,
    domain: DomainFn<'a, P>,
    pub domain_descriptor: String,
    pub claimed_factor: f64,
    /// False when the construction does not guarantee `claimed_factor < 1`.
    pub certified: bool,
}

impl<'a, P> DDecreasingMap<'a, P> {
    pub fn new(
        name: impl Into<String>,
        map: impl Fn(&P) -> P + 'a,
        domain: impl Fn(&P) -> bool + 'a,
        domain_descriptor: impl Into<String>,
        claimed_factor: f64,
    ) -> Self {
        Self {
            name: name.into(),
            map: Box::new(map),
            domain: Box::new(domain),
            domain_descriptor: domain_descriptor.into(),
            claimed_factor,
            certified: claimed_factor < 1.0,
        }
    }

    pub fn apply(&self, p: &P) -> P {
        (self.map)(p)
    }

    pub fn in_domain(&self, p: &P) -> bool {
        (self.domain)(p)
    }
}

impl<P> std::fmt::Debug for DDecreasingMap<'_, P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DDecreasingMap")
            .field("name", &self.name)
            .field("domain", &self.domain_descriptor)
            .field("claimed_factor", &self.claimed_factor)
            .field("certified", &self.certified)
            .finish()
    }
}

/// Vertical squeeze `G(x) = (x1, x2, k x3) / |(x1, x2, k x3)|` on the band
/// `|(x1, x2)| >= e`, followed by a rotation by `theta` about the vertical
/// axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereContractionParams {
    pub k: f64,
    pub e: f64,
    #[serde(default)]
    pub theta: f64,
}

impl SphereContractionParams {
    /// `k / e^3`, a bound on the contraction factor.
    pub fn kappa(&self) -> f64 {
        self.k / self.e.powi(3)
    }
}

/// Builds the squeeze-and-rotate map of the sphere. The map is marked
/// uncertified when `k >= e^3`.
pub fn make_sphere_map(
    params: SphereContractionParams,
) -> Result<DDecreasingMap<'static, SpherePoint>> {
    let SphereContractionParams { k, e, theta } = params;
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in (0, 1)"
        )));
    }
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "e = {e} must lie in (0, 1)"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("theta must be finite".into()));
    }
    let rot = rotation_z(theta);
    let kappa = params.kappa();
    let mut m = DDecreasingMap::new(
        format!("sphere squeeze k={k} e={e} theta={theta}"),
        move |p: &SpherePoint| {
            let [x1, x2, x3] = p.coords();
            let g =
                SpherePoint::new([x1, x2, k * x3]).expect("horizontal part is nonzero on the band");
            SpherePoint::from_unit(mat3_mul_vec(&rot, &g.coords()))
        },
        move |p: &SpherePoint| {
            let [x1, x2, _] = p.coords();
            x1.hypot(x2) >= e
        },
        format!("|(x1, x2)| >= {e}"),
        kappa,
    );
    m.certified = k < e.powi(3);
    Ok(m)
}

/// `F(x) = M(k x)` on an origin-centered ball, with factor `k^2` for the
/// area metric.
pub fn make_linear_map(
    m: Vec<Vec<f64>>,
    k: f64,
    ball: &AreaBall,
) -> Result<DDecreasingMap<'static, BallPoint>> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in (0, 1)"
        )));
    }
    let dim = ball.dim();
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidArgument(format!(
            "matrix must be {dim}x{dim}"
        )));
    }
    let defect = orthogonality_defect(&m);
    if defect > 1e-12 {
        return Err(Error::NotOrthogonal(defect));
    }
    if ball.center.iter().any(|c| c.abs() > 1e-12) {
        return Err(Error::InvalidArgument(
            "the ball must be centered at the origin to be preserved".into(),
        ));
    }
    let domain = ball.clone();
    Ok(DDecreasingMap::new(
        format!("linear k={k}"),
        move |p: &BallPoint| BallPoint(mat_vec(&m, &p.scaled(k).0)),
        move |p: &BallPoint| domain.contains(p),
        format!("ball radius {} in R^{dim}", ball.radius),
        k * k,
    ))
}

/// The patch metric tabulated on `n` seeded points of the disc of radius
/// `r`, and a map sending point 0 to 1 and every other point to 0. Lines of
/// this space have two points, so the only possible fixed line is `{0, 1}`.
pub fn swap_demo(
    n: usize,
    r: f64,
    seed: u64,
) -> Result<(FiniteTwoMetricSpace, DDecreasingMap<'static, usize>)> {
    if n < 3 {
        return Err(Error::InvalidArgument("need at least 3 points".into()));
    }
    let patch = PatchMetric::new(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<PatchPoint> = (0..n)
        .map(|_| PatchMetric::sample_disc(&mut rng, r))
        .collect();
    let space = FiniteTwoMetricSpace::tabulate(&patch, &pts);
    let map = DDecreasingMap::new(
        "swap 0 <-> 1",
        |i: &usize| usize::from(*i == 0),
        move |i: &usize| *i < n,
        format!("{n} points of the patch r={r}"),
        0.5,
    );
    Ok((space, map))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionMeasurement {
    /// Max ratio `d(Fx, Fy, Fz) / d(x, y, z)`; `None` if every triple was
    /// degenerate.
    pub factor: Option<f64>,
    pub triples: usize,
    pub skipped: usize,
    pub witness: Option<Vec<Vec<f64>>>,
}

/// Empirical contraction factor over seeded domain triples with
/// `d >= 1e-12`.
pub fn measured_contraction_factor<S: TwoMetricSpace>(
    map: &DDecreasingMap<'_, S::Point>,
    space: &S,
    samples: usize,
    seed: u64,
) -> Result<ContractionMeasurement> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Result<S::Point> {
        for _ in 0..10_000 {
            let p = space.sample(&mut rng);
            if map.in_domain(&p) {
                return Ok(p);
            }
        }
        Err(Error::Sampling(format!(
            "no domain point found for {}",
            map.domain_descriptor
        )))
    };
    let mut out = ContractionMeasurement {
        factor: None,
        triples: 0,
        skipped: 0,
        witness: None,
    };
    for _ in 0..samples {
        let (x, y, z) = (draw()?, draw()?, draw()?);
        let before = space.d(&x, &y, &z);
        if before < DEGENERATE {
            out.skipped += 1;
            continue;
        }
        out.triples += 1;
        let ratio = space.d(&map.apply(&x), &map.apply(&y), &map.apply(&z)) / before;
        if out.factor.is_none_or(|f| ratio > f) {
            out.factor = Some(ratio);
            out.witness = Some(vec![space.coords(&x), space.coords(&y), space.coords(&z)]);
        }
    }
    Ok(out)
}

/// Sampled check of `d(x_i, x_j, x_l) <= kappa^min(i, j, l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub kappa: f64,
    pub triples: usize,
    /// Max of `d(x_i, x_j, x_l) - kappa^min(i, j, l)`.
    pub max_excess: f64,
}

impl DecayCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_excess <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace<P> {
    /// `x_0, ..., x_n` with `x_{i+1} = F(x_i)`.
    pub points: Vec<P>,
    /// `phi(x_i, x_{i+1})`.
    pub phi_step: Vec<f64>,
    pub decay: DecayCheck,
    /// Set when an iterate left the domain; the trace stops before it.
    pub truncated: Option<String>,
}

impl<P> OrbitTrace<P> {
    pub fn start(&self) -> &P {
        &self.points[0]
    }

    pub fn last(&self) -> &P {
        self.points.last().expect("orbit is non-empty")
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    /// CSV with columns `step, x1.., phi_step` and, if requested, `x3_abs`.
    /// The last row has an empty `phi_step`.
    pub fn write_csv<S, W>(&self, space: &S, writer: W, x3_column: bool) -> Result<()>
    where
        S: TwoMetricSpace<Point = P>,
        W: Write,
    {
        let mut w = csv::Writer::from_writer(writer);
        let dim = space.coords(&self.points[0]).len();
        let mut header = vec!["step".to_string()];
        header.extend((1..=dim).map(|i| format!("x{i}")));
        header.push("phi_step".into());
        if x3_column {
            header.push("x3_abs".into());
        }
        w.write_record(&header)?;
        for (i, p) in self.points.iter().enumerate() {
            let c = space.coords(p);
            let mut row = vec![i.to_string()];
            row.extend(c.iter().map(|v| v.to_string()));
            row.push(
                self.phi_step
                    .get(i)
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
            if x3_column {
                row.push(c.get(2).map(|v| v.abs().to_string()).unwrap_or_default());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

const DECAY_EXHAUSTIVE: usize = 130;
const DECAY_SAMPLES: usize = 20_000;

/// Iterates the map `n` times from `x0`. Iterates are never projected back
/// into the domain; the first one outside ends the trace.
pub fn orbit<S: TwoMetricSpace>(
    map: &DDecreasingMap<'_, S::Point>,
    space: &S,
    x0: &S::Point,
    n: usize,
    witnesses: &WitnessSet<S::Point>,
) -> Result<OrbitTrace<S::Point>> {
    if !map.in_domain(x0) {
        return Err(Error::InvalidArgument(format!(
            "start {:?} is outside {}",
            space.coords(x0),
            map.domain_descriptor
        )));
    }
    let mut points = vec![x0.clone()];
    let mut phi_step = Vec::with_capacity(n);
    let mut truncated = None;
    for i in 0..n {
        let x = &points[i];
        let fx = map.apply(x);
        if !map.in_domain(&fx) {
            truncated = Some(format!("iterate {} left {}", i + 1, map.domain_descriptor));
            break;
        }
        phi_step.push(phi_best(space, x, &fx, witnesses));
        points.push(fx);
    }
    let decay = decay_check(space, &points, map.claimed_factor);
    Ok(OrbitTrace {
        points,
        phi_step,
        decay,
        truncated,
    })
}

fn decay_check<S: TwoMetricSpace>(space: &S, xs: &[S::Point], kappa: f64) -> DecayCheck {
    let mut check = DecayCheck {
        kappa,
        triples: 0,
        max_excess: f64::NEG_INFINITY,
    };
    let mut visit = |i: usize, j: usize, l: usize| {
        let m = i.min(j).min(l);
        let excess = space.d(&xs[i], &xs[j], &xs[l]) - kappa.powi(m as i32);
        check.max_excess = check.max_excess.max(excess);
        check.triples += 1;
    };
    let n = xs.len();
    if n <= DECAY_EXHAUSTIVE {
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    visit(i, j, l);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..DECAY_SAMPLES {
            visit(
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
        }
    }
    check
}

/// Two images of line members, far apart, that generate the same line.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessCertificate<P> {
    pub images: (P, P),
    pub phi: f64,
    /// Max `d(a, F(m1), F(m2))` over the generators and sampled members.
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedLineEvidence<P> {
    pub line: Line<P>,
    pub sampled_members: usize,
    /// Max over sampled members `m` of `d(F(m), g1, g2)`.
    pub invariance_defect: f64,
    pub uniqueness: Option<UniquenessCertificate<P>>,
    /// Min over sampled members of `phi(m, F(m))`.
    pub min_fixed_residual: f64,
}

impl<P> FixedLineEvidence<P> {
    pub fn verified(&self, eps_col: f64) -> bool {
        self.invariance_defect <= eps_col
            && self
                .uniqueness
                .as_ref()
                .is_some_and(|u| u.max_defect <= eps_col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<P> {
    /// When the orbit's line also passes its checks it is attached as
    /// auxiliary evidence.
    FixedPoint {
        point: P,
        residual: f64,
        auxiliary_line: Option<FixedLineEvidence<P>>,
    },
    FixedLine(FixedLineEvidence<P>),
    Indeterminate {
        reason: String,
    },
}

impl<P> Outcome<P> {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::FixedPoint { .. } => "FixedPoint",
            Outcome::FixedLine(_) => "FixedLine",
            Outcome::Indeterminate { .. } => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection<P> {
    pub outcome: Outcome<P>,
    pub classification: Option<Classification<P>>,
    pub trace: Option<OrbitTrace<P>>,
    pub eps_fix: f64,
}

impl<P: Clone + PartialEq> Detection<P> {
    pub fn to_json<S: TwoMetricSpace<Point = P>>(&self, space: &S) -> Value {
        let line_ev = |ev: &FixedLineEvidence<P>| {
            json!({
                "line": line_json(space, &ev.line),
                "sampled_members": ev.sampled_members,
                "invariance_defect": ev.invariance_defect,
                "uniqueness": ev.uniqueness.as_ref().map(|u| json!({
                    "images": [space.coords(&u.images.0), space.coords(&u.images.1)],
                    "phi": u.phi,
                    "max_defect": u.max_defect,
                })),
                "min_fixed_residual": finite_or_null(ev.min_fixed_residual),
            })
        };
        let mut v = json!({ "tag": self.outcome.tag(), "eps_fix": self.eps_fix });
        match &self.outcome {
            Outcome::FixedPoint {
                point,
                residual,
                auxiliary_line,
            } => {
                v["point"] = json!(space.coords(point));
                v["residual"] = json!(residual);
                v["auxiliary_line"] = auxiliary_line.as_ref().map_or(Value::Null, line_ev);
            }
            Outcome::FixedLine(ev) => v["fixed_line"] = line_ev(ev),
            Outcome::Indeterminate { reason } => v["reason"] = json!(reason),
        }
        if let Some(c) = &self.classification {
            v["classification"] = c.to_json(space);
        }
        if let Some(t) = &self.trace {
            v["orbit"] = json!({
                "steps": t.steps(),
                "last": space.coords(t.last()),
                "truncated": t.truncated,
                "decay": t.decay,
            });
        }
        v
    }
}

fn line_evidence<S: TwoMetricSpace>(
    map: &DDecreasingMap<'_, S::Point>,
    space: &S,
    line: &Line<S::Point>,
    witnesses: &WitnessSet<S::Point>,
    delta: f64,
) -> FixedLineEvidence<S::Point> {
    let stride = line.members.len().div_ceil(LINE_SAMPLES).max(1);
    let members: Vec<&S::Point> = line.members.iter().step_by(stride).collect();
    let images: Vec<S::Point> = members.iter().map(|m| map.apply(m)).collect();
    let (g1, g2) = &line.generators;
    let invariance_defect = images
        .iter()
        .map(|f| space.d(f, g1, g2))
        .fold(0.0, f64::max);
    let min_fixed_residual = members
        .iter()
        .zip(&images)
        .map(|(m, f)| phi_best(space, m, f, witnesses))
        .fold(f64::INFINITY, f64::min);

    let mut best: Option<(usize, usize, f64)> = None;
    for a in 0..images.len() {
        for b in (a + 1)..images.len() {
            let phi = phi_best(space, &images[a], &images[b], witnesses);
            if best.is_none_or(|(_, _, p)| phi > p) {
                best = Some((a, b, phi));
            }
        }
    }
    let uniqueness = best.filter(|&(_, _, phi)| phi > delta).map(|(a, b, phi)| {
        let (fa, fb) = (&images[a], &images[b]);
        let max_defect = [g1, g2]
            .into_iter()
            .chain(members.iter().copied())
            .map(|p| space.d(p, fa, fb))
            .fold(0.0, f64::max);
        UniquenessCertificate {
            images: (fa.clone(), fb.clone()),
            phi,
            max_defect,
        }
    });
    FixedLineEvidence {
        line: line.clone(),
        sampled_members: members.len(),
        invariance_defect,
        uniqueness,
        min_fixed_residual,
    }
}

/// Runs an orbit of length `n` from `x0`, classifies it and decides between
/// a fixed point and a fixed line.
///
/// A fixed point is reported only from the residual `phi(y, F(y)) <= eps_fix`,
/// never from convergence alone. A fixed line needs the invariance defect and
/// the uniqueness certificate both within `thresholds.colinear`. Anything
/// else, including invalid input, is `Indeterminate`.
pub fn detect_outcome<S: TwoMetricSpace>(
    map: &DDecreasingMap<'_, S::Point>,
    space: &S,
    x0: &S::Point,
    n: usize,
    witnesses: &WitnessSet<S::Point>,
    thresholds: &Thresholds,
) -> Detection<S::Point> {
    let indeterminate = |reason: String, classification, trace| Detection {
        outcome: Outcome::Indeterminate { reason },
        classification,
        trace,
        eps_fix: EPS_FIX,
    };
    let trace = match orbit(map, space, x0, n, witnesses) {
        Ok(t) => t,
        Err(e) => return indeterminate(e.to_string(), None, None),
    };
    if let Some(reason) = &trace.truncated {
        return indeterminate(reason.clone(), None, Some(trace));
    }
    let class = match classify(space, &trace.points, witnesses, thresholds) {
        Ok(c) => c,
        Err(e) => return indeterminate(e.to_string(), None, Some(trace)),
    };
    let residual = |y: &S::Point| phi_best(space, y, &map.apply(y), witnesses);

    let line = class
        .line()
        .map(|l| line_evidence(map, space, l, witnesses, thresholds.delta));
    let verified_line = line.filter(|ev| ev.verified(thresholds.colinear));

    let fixed = match &class.class {
        SequenceClass::CauchySequence { limit } => Some(limit.clone()),
        SequenceClass::UniquePoint { point } => Some(point.clone()),
        SequenceClass::LineCase { .. } => class
            .evidence
            .passers
            .iter()
            .map(|p| &p.point)
            .find(|p| residual(p) <= EPS_FIX)
            .cloned(),
        SequenceClass::NoPoint => None,
    }
    .map(|y| (residual(&y), y))
    .filter(|(r, _)| *r <= EPS_FIX);

    let outcome = match (fixed, verified_line) {
        (Some((residual, point)), auxiliary_line) => Outcome::FixedPoint {
            point,
            residual,
            auxiliary_line,
        },
        (None, Some(ev)) => Outcome::FixedLine(ev),
        (None, None) => Outcome::Indeterminate {
            reason: format!(
                "classified {} without a verified fixed point or line",
                class.tag()
            ),
        },
    };
    Detection {
        outcome,
        classification: Some(class),
        trace: Some(trace),
        eps_fix: EPS_FIX,
    }
}
