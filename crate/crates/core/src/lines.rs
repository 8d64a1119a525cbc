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

//! Colinearity, lines, the `LIM` predicate and sequence classification.
//!
//! Three points are colinear when `d` vanishes on them; numerically, when it
//! is at most a tolerance `eps_col`. A line is a maximal set of pairwise
//! colinear points. For a sequence `(x_i)` and a point `y`, `LIM(y)` holds
//! when `d(y, x_i, x_j)` tends to 0 over tails; finite sequences are judged
//! on their last half against declared thresholds.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finite::FiniteTwoMetricSpace;
use crate::metric::{phi_best, TwoMetricSpace, WitnessSet};

/// Decision thresholds for classification. All are recorded in the evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// A candidate passes `LIM` when its tail residual is at most this.
    pub lim: f64,
    /// Tail Cauchy modulus (max `phi` over tail pairs) at or below this
    /// classifies the sequence as Cauchy.
    pub cauchy: f64,
    /// Tail tri-Cauchy modulus at or below this marks the tail tri-Cauchy.
    pub tri: f64,
    /// Points with `phi` at most `delta` are treated as equal.
    pub delta: f64,
    /// Membership tolerance of lines.
    pub colinear: f64,
    /// Minimum sequence length accepted by [`classify`].
    pub min_len: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            lim: 1e-6,
            cauchy: 1e-8,
            tri: 1e-8,
            delta: 1e-6,
            colinear: 1e-6,
            min_len: 50,
        }
    }
}

/// A line given by two generators, with its materialized members.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<P> {
    pub generators: (P, P),
    pub tolerance: f64,
    /// On finite spaces every member; otherwise the members found among the
    /// points that were examined.
    pub members: Vec<P>,
}

impl<P: Clone + PartialEq> Line<P> {
    /// Membership predicate `d(a, g1, g2) <= tolerance`.
    pub fn contains<S: TwoMetricSpace<Point = P>>(&self, space: &S, a: &P) -> bool {
        self.defect(space, a) <= self.tolerance
    }

    pub fn defect<S: TwoMetricSpace<Point = P>>(&self, space: &S, a: &P) -> f64 {
        space.d(a, &self.generators.0, &self.generators.1)
    }
}

impl<P> Line<P> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn is_colinear<S: TwoMetricSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    eps_col: f64,
) -> bool {
    space.d(x, y, z) <= eps_col
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOutcome {
    /// Both conclusions hold within `bound = 2 eps_col / phi(y, z)`.
    Held {
        bound: f64,
    },
    Violated {
        bound: f64,
        worst: f64,
    },
    /// The hypotheses were not met.
    Inconclusive(String),
}

/// Checks the transitivity of colinearity on one configuration: when
/// `(x, y, z)` and `(y, z, w)` are colinear and `y`, `z` are distinct, then
/// `(x, y, w)` and `(x, z, w)` are colinear within `2 eps_col / phi(y, z)`.
pub fn transitivity_probe<S: TwoMetricSpace>(
    space: &S,
    [x, y, z, w]: [&S::Point; 4],
    eps_col: f64,
    delta: f64,
    witnesses: &WitnessSet<S::Point>,
) -> ProbeOutcome {
    let ext = witnesses.extended([x.clone(), w.clone()]);
    let phi_yz = phi_best(space, y, z, &ext);
    if phi_yz < delta {
        return ProbeOutcome::Inconclusive(format!("phi(y, z) = {phi_yz:e} below delta"));
    }
    if !is_colinear(space, x, y, z, eps_col) || !is_colinear(space, y, z, w, eps_col) {
        return ProbeOutcome::Inconclusive("hypotheses are not colinear".into());
    }
    let bound = 2.0 * eps_col / phi_yz;
    let worst = space.d(x, y, w).max(space.d(x, z, w));
    if worst <= bound {
        ProbeOutcome::Held { bound }
    } else {
        ProbeOutcome::Violated { bound, worst }
    }
}

/// The unique line through two distinguishable points: every examined point
/// `a` with `d(a, x, y) <= eps_col`.
///
/// On finite spaces every point is examined and the members are checked to
/// be pairwise colinear. Elsewhere the candidates are the witnesses.
pub fn line_through<S: TwoMetricSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    witnesses: &WitnessSet<S::Point>,
    eps_col: f64,
    delta: f64,
) -> Result<Line<S::Point>> {
    let phi = phi_best(space, x, y, witnesses);
    if phi <= delta {
        return Err(Error::LineUndefined { phi, delta });
    }
    let line = |members| Line {
        generators: (x.clone(), y.clone()),
        tolerance: eps_col,
        members,
    };
    if let Some(all) = space.points() {
        let members: Vec<S::Point> = all
            .into_iter()
            .filter(|a| space.d(a, x, y) <= eps_col)
            .collect();
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate().skip(i + 1) {
                for c in &members[(j + 1)..] {
                    if space.d(a, b, c) > eps_col {
                        return Err(Error::InvalidArgument(format!(
                            "points colinear with {x:?} and {y:?} are not pairwise colinear; \
                             transitivity fails"
                        )));
                    }
                }
            }
        }
        return Ok(line(members));
    }
    let mut members = vec![x.clone(), y.clone()];
    for a in witnesses.points() {
        if space.d(a, x, y) <= eps_col && !members.contains(a) {
            members.push(a.clone());
        }
    }
    Ok(line(members))
}

/// All lines of a finite space: the maximal subsets whose triples all have
/// `d <= tol`.
///
/// Uses Bron–Kerbosch on the 3-uniform colinearity hypergraph; colinearity
/// is hereditary, so a candidate only has to be checked against pairs that
/// contain the newly added vertex. Lines are returned with sorted members,
/// in lexicographic order.
pub fn enumerate_lines(space: &FiniteTwoMetricSpace, tol: f64) -> Vec<Line<usize>> {
    fn extend(
        space: &FiniteTwoMetricSpace,
        tol: f64,
        current: &mut Vec<usize>,
        mut candidates: Vec<usize>,
        mut excluded: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if candidates.is_empty() && excluded.is_empty() {
            if !current.is_empty() {
                let mut m = current.clone();
                m.sort_unstable();
                out.push(m);
            }
            return;
        }
        while let Some(v) = candidates.pop() {
            let compatible = |p: &usize| current.iter().all(|&r| space.get(v, r, *p) <= tol);
            let next_candidates: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|p| compatible(p))
                .collect();
            let next_excluded: Vec<usize> =
                excluded.iter().copied().filter(|p| compatible(p)).collect();
            current.push(v);
            extend(space, tol, current, next_candidates, next_excluded, out);
            current.pop();
            excluded.push(v);
        }
    }

    let mut out = Vec::new();
    let all: Vec<usize> = (0..space.len()).rev().collect();
    extend(space, tol, &mut Vec::new(), all, Vec::new(), &mut out);
    out.sort();
    out.into_iter()
        .map(|members| Line {
            generators: (members[0], *members.get(1).unwrap_or(&members[0])),
            tolerance: tol,
            members,
        })
        .collect()
}

/// Tail residual of the `LIM` predicate for a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct LimEstimate<P> {
    pub candidate: P,
    pub tail_start: usize,
    /// Maximum of `d(y, x_i, x_j)` over `tail_start <= i < j`.
    pub residual: f64,
}

pub fn lim_residual<S: TwoMetricSpace>(
    space: &S,
    y: &S::Point,
    sequence: &[S::Point],
    tail_start: usize,
) -> Result<LimEstimate<S::Point>> {
    if sequence.len() <= tail_start {
        return Err(Error::InvalidArgument(format!(
            "sequence of length {} has no tail after index {tail_start}",
            sequence.len()
        )));
    }
    Ok(LimEstimate {
        candidate: y.clone(),
        tail_start,
        residual: tail_residual(space, y, &sequence[tail_start..]),
    })
}

fn tail_residual<S: TwoMetricSpace>(space: &S, y: &S::Point, tail: &[S::Point]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[(i + 1)..] {
            worst = worst.max(space.d(y, a, b));
        }
    }
    worst
}

/// Outcome of [`classify`], in priority order Cauchy > line > point > none.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceClass<P> {
    CauchySequence { limit: P },
    LineCase { line: Line<P> },
    UniquePoint { point: P },
    NoPoint,
}

impl<P> SequenceClass<P> {
    pub fn tag(&self) -> &'static str {
        match self {
            SequenceClass::CauchySequence { .. } => "CauchySequence",
            SequenceClass::LineCase { .. } => "LineCase",
            SequenceClass::UniquePoint { .. } => "UniquePoint",
            SequenceClass::NoPoint => "NoPoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Passer<P> {
    pub point: P,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<P> {
    pub thresholds: Thresholds,
    pub tail_start: usize,
    /// Max `phi(x_i, x_j)` over tail pairs.
    pub cauchy_modulus: f64,
    /// Max `d(x_i, x_j, x_k)` over tail triples.
    pub tri_cauchy_modulus: f64,
    pub is_tri_cauchy: bool,
    /// Candidates passing the `LIM` threshold, one per equivalence class.
    pub passers: Vec<Passer<P>>,
    pub candidates_examined: usize,
    /// Largest `d(y, g1, g2)` over passers; 0 unless a line was built.
    pub max_member_defect: f64,
    /// Bound on `d(y, y', y'')` for any three passers, derived from the
    /// passers' residuals and the anti-Cauchy gap through transitivity and
    /// the tetrahedral inequality. Infinite when the tail is Cauchy.
    pub lim_colinearity_bound: f64,
    /// Some modulus lies within a factor 10 of its threshold.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<P> {
    pub class: SequenceClass<P>,
    pub evidence: Evidence<P>,
}

impl<P: Clone + PartialEq> Classification<P> {
    pub fn tag(&self) -> &'static str {
        self.class.tag()
    }

    pub fn line(&self) -> Option<&Line<P>> {
        match &self.class {
            SequenceClass::LineCase { line } => Some(line),
            _ => None,
        }
    }

    /// JSON form, with points written as coordinates.
    pub fn to_json<S: TwoMetricSpace<Point = P>>(&self, space: &S) -> Value {
        let e = &self.evidence;
        let mut v = json!({
            "tag": self.tag(),
            "cauchy_modulus": e.cauchy_modulus,
            "tri_cauchy_modulus": e.tri_cauchy_modulus,
            "is_tri_cauchy": e.is_tri_cauchy,
            "tail_start": e.tail_start,
            "thresholds": e.thresholds,
            "passers": e.passers.iter().map(|p| json!({
                "point": space.coords(&p.point),
                "residual": p.residual,
            })).collect::<Vec<_>>(),
            "candidates_examined": e.candidates_examined,
            "max_member_defect": e.max_member_defect,
            "lim_colinearity_bound": finite_or_null(e.lim_colinearity_bound),
            "low_confidence": e.low_confidence,
        });
        match &self.class {
            SequenceClass::CauchySequence { limit } => v["limit"] = json!(space.coords(limit)),
            SequenceClass::UniquePoint { point } => v["limit"] = json!(space.coords(point)),
            SequenceClass::LineCase { line } => v["line"] = line_json(space, line),
            SequenceClass::NoPoint => {}
        }
        v
    }
}

pub(crate) fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn line_json<S: TwoMetricSpace>(space: &S, line: &Line<S::Point>) -> Value {
    json!({
        "generators": [space.coords(&line.generators.0), space.coords(&line.generators.1)],
        "tolerance": line.tolerance,
        "members": line.members.iter().map(|m| space.coords(m)).collect::<Vec<_>>(),
    })
}

fn near(value: f64, threshold: f64) -> bool {
    value >= threshold / 10.0 && value <= threshold * 10.0
}

/// Classifies a finite sequence by its last half.
///
/// Candidates for `LIM` are the witnesses plus the tail points. The result
/// is `CauchySequence` when the tail Cauchy modulus is within threshold;
/// otherwise `LineCase` when two distinguishable candidates pass (the line is
/// generated by the passing pair farthest apart in `phi`), `UniquePoint` when
/// one does and `NoPoint` when none does.
pub fn classify<S: TwoMetricSpace>(
    space: &S,
    sequence: &[S::Point],
    witnesses: &WitnessSet<S::Point>,
    thresholds: &Thresholds,
) -> Result<Classification<S::Point>> {
    if sequence.len() < thresholds.min_len.max(2) {
        return Err(Error::InvalidArgument(format!(
            "sequence length {} is below the minimum {}",
            sequence.len(),
            thresholds.min_len.max(2)
        )));
    }
    let tail_start = sequence.len() / 2;
    let tail = &sequence[tail_start..];
    let w = witnesses.points();

    let mut cauchy_modulus = 0.0f64;
    let mut tri = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for (j, b) in tail.iter().enumerate().skip(i + 1) {
            cauchy_modulus = cauchy_modulus.max(phi_best(space, a, b, witnesses));
            for c in &tail[(j + 1)..] {
                tri = tri.max(space.d(a, b, c));
            }
        }
    }

    let mut candidates: Vec<S::Point> = Vec::new();
    let mut seen: Vec<S::Point> = Vec::new();
    for p in w.iter().chain(tail.iter()) {
        let c = space.canonical(p);
        if !seen.contains(&c) {
            seen.push(c);
            candidates.push(p.clone());
        }
    }
    let passers: Vec<Passer<S::Point>> = candidates
        .iter()
        .filter_map(|y| {
            let residual = tail_residual(space, y, tail);
            (residual <= thresholds.lim).then(|| Passer {
                point: y.clone(),
                residual,
            })
        })
        .collect();

    let max_residual = passers.iter().map(|p| p.residual).fold(0.0, f64::max);
    let lim_colinearity_bound = if cauchy_modulus > 0.0 {
        6.0 * max_residual * (1.0 + 1.0 / cauchy_modulus)
    } else {
        f64::INFINITY
    };
    let low_confidence = near(cauchy_modulus, thresholds.cauchy) || near(tri, thresholds.tri);

    let mut evidence = Evidence {
        thresholds: *thresholds,
        tail_start,
        cauchy_modulus,
        tri_cauchy_modulus: tri,
        is_tri_cauchy: tri <= thresholds.tri,
        passers,
        candidates_examined: candidates.len(),
        max_member_defect: 0.0,
        lim_colinearity_bound,
        low_confidence,
    };

    let class = if cauchy_modulus <= thresholds.cauchy {
        SequenceClass::CauchySequence {
            limit: sequence[sequence.len() - 1].clone(),
        }
    } else {
        let ps = &evidence.passers;
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                let phi = phi_best(space, &ps[i].point, &ps[j].point, witnesses);
                if best.is_none_or(|(_, _, b)| phi > b) {
                    best = Some((i, j, phi));
                }
            }
        }
        match best {
            Some((i, j, phi)) if phi > thresholds.delta => {
                let line = Line {
                    generators: (ps[i].point.clone(), ps[j].point.clone()),
                    tolerance: thresholds.colinear,
                    members: ps.iter().map(|p| p.point.clone()).collect(),
                };
                evidence.max_member_defect = line
                    .members
                    .iter()
                    .map(|m| line.defect(space, m))
                    .fold(0.0, f64::max);
                SequenceClass::LineCase { line }
            }
            _ if !ps.is_empty() => SequenceClass::UniquePoint {
                point: ps[0].point.clone(),
            },
            _ => SequenceClass::NoPoint,
        }
    };
    Ok(Classification { class, evidence })
}
