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

//! Numeric axiom auditor.
//!
//! Each axiom is scored by a violation functional `max(0, LHS - RHS)`
//! (absolute deviation for the equalities Sym and Z) maximized over sampled
//! tuples, together with the worst tuple. Finite spaces small enough are
//! audited exhaustively with the full point set as witnesses, which makes
//! every inequality exact.
//!
//! Inequalities involving `phi` are evaluated with the witness set extended
//! by the tuple's own points. That keeps them exact under sup truncation:
//! e.g. the asymmetric triangle inequality needs `d(x, y, z) <= phi(z, y)`,
//! which holds once `x` is a witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{phi_over, witness_truncation_error, TwoMetricSpace, WitnessSet};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    Sym,
    Tetr,
    Z,
    Positivity,
    N,
    B,
    Trans,
    #[serde(rename = "AT")]
    AsymmetricTriangle,
    CostTriangle,
    DphiLipschitz,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::Sym,
        Axiom::Tetr,
        Axiom::Z,
        Axiom::Positivity,
        Axiom::N,
        Axiom::B,
        Axiom::Trans,
        Axiom::AsymmetricTriangle,
        Axiom::CostTriangle,
        Axiom::DphiLipschitz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Sym => "Sym",
            Axiom::Tetr => "Tetr",
            Axiom::Z => "Z",
            Axiom::Positivity => "Positivity",
            Axiom::N => "N",
            Axiom::B => "B",
            Axiom::Trans => "Trans",
            Axiom::AsymmetricTriangle => "AT",
            Axiom::CostTriangle => "CostTriangle",
            Axiom::DphiLipschitz => "DphiLipschitz",
        }
    }
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub triples: usize,
    pub quadruples: usize,
    pub quintuples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Finite spaces with `n^5` at most this are audited exhaustively.
    pub exhaustive_limit: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            triples: 2000,
            quadruples: 2000,
            quintuples: 2000,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            exhaustive_limit: 1 << 20,
        }
    }
}

impl AuditConfig {
    pub fn with_samples(samples: usize, seed: u64) -> Self {
        Self {
            triples: samples,
            quadruples: samples,
            quintuples: samples,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomRecord {
    pub axiom: Axiom,
    pub max_violation: f64,
    /// Coordinates of the worst tuple; empty when nothing was violated.
    pub witness: Vec<Vec<f64>>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub tolerance: f64,
    pub exhaustive: bool,
    /// Largest increase of `phi` when the witness set is doubled; `None`
    /// when the witness set is exhaustive.
    pub witness_error: Option<f64>,
    pub axioms: Vec<AxiomRecord>,
}

impl AxiomReport {
    pub fn record(&self, axiom: Axiom) -> &AxiomRecord {
        self.axioms
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom is recorded")
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        self.record(axiom).max_violation <= self.tolerance
    }

    /// Axioms violated beyond tolerance, ignoring those in `skip`.
    pub fn failures(&self, skip: &[Axiom]) -> Vec<&AxiomRecord> {
        self.axioms
            .iter()
            .filter(|r| !skip.contains(&r.axiom) && r.max_violation > self.tolerance)
            .collect()
    }

    pub fn passes(&self, skip: &[Axiom]) -> bool {
        self.failures(skip).is_empty()
    }
}

struct Tracker {
    max: f64,
    witness: Vec<Vec<f64>>,
    samples: usize,
}

impl Tracker {
    fn new() -> Self {
        Self {
            max: 0.0,
            witness: Vec::new(),
            samples: 0,
        }
    }

    fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Vec<Vec<f64>>) {
        self.samples += 1;
        // NaN counts as an infinite violation.
        let v = if violation.is_nan() {
            f64::INFINITY
        } else {
            violation
        };
        if v > self.max {
            self.max = v;
            self.witness = witness();
        }
    }

    fn finish(self, axiom: Axiom) -> AxiomRecord {
        AxiomRecord {
            axiom,
            max_violation: self.max,
            witness: self.witness,
            samples: self.samples,
        }
    }
}

/// Source of K-tuples: either every tuple of a finite point list, or `count`
/// tuples sampled from the space.
fn for_each_tuple<S, const K: usize>(
    space: &S,
    all: Option<&[S::Point]>,
    count: usize,
    rng: &mut ChaCha8Rng,
    mut f: impl FnMut(&[S::Point; K]),
) where
    S: TwoMetricSpace,
{
    match all {
        Some(pts) if !pts.is_empty() => {
            let n = pts.len();
            let mut idx = [0usize; K];
            loop {
                let tuple: [S::Point; K] = std::array::from_fn(|i| pts[idx[i]].clone());
                f(&tuple);
                let mut pos = 0;
                loop {
                    if pos == K {
                        return;
                    }
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        }
        Some(_) => {}
        None => {
            for _ in 0..count {
                let tuple: [S::Point; K] = std::array::from_fn(|_| space.sample(rng));
                f(&tuple);
            }
        }
    }
}

/// Audits every axiom of [`Axiom::ALL`] on `space`.
pub fn audit<S: TwoMetricSpace>(
    space: &S,
    config: &AuditConfig,
    witnesses: &WitnessSet<S::Point>,
) -> Result<AxiomReport> {
    if config.triples == 0 || config.quadruples == 0 || config.quintuples == 0 {
        return Err(Error::InvalidArgument("sample counts must be >= 1".into()));
    }
    if witnesses.is_empty() {
        return Err(Error::InvalidArgument("empty witness set".into()));
    }
    let finite = space.points();
    let exhaustive = finite
        .as_ref()
        .map(|p| (p.len() as f64).powi(5) <= config.exhaustive_limit as f64)
        .unwrap_or(false);
    let all = if exhaustive { finite.as_deref() } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let coords = |pts: &[&S::Point]| pts.iter().map(|p| space.coords(p)).collect::<Vec<_>>();
    let w = witnesses.points();
    let phi_with = |x: &S::Point, y: &S::Point, extra: &[&S::Point]| {
        let base = phi_over(space, x, y, w);
        extra.iter().map(|e| space.d(x, y, e)).fold(base, f64::max)
    };

    let mut sym = Tracker::new();
    let mut zero = Tracker::new();
    let mut pos = Tracker::new();
    let mut nondeg = Tracker::new();
    let mut bound = Tracker::new();
    let mut at = Tracker::new();
    let mut cost = Tracker::new();
    let mut sample_pairs: Vec<(S::Point, S::Point)> = Vec::new();

    for_each_tuple::<S, 3>(space, all, config.triples, &mut rng, |[x, y, z]| {
        let v = space.d(x, y, z);
        let perms = [
            space.d(x, z, y),
            space.d(y, x, z),
            space.d(y, z, x),
            space.d(z, x, y),
            space.d(z, y, x),
        ];
        let dev = perms.iter().map(|p| (p - v).abs()).fold(0.0, f64::max);
        sym.observe(dev, || coords(&[x, y, z]));
        let zdev = [space.d(x, y, y), space.d(y, x, y), space.d(y, y, x)]
            .iter()
            .map(|d| d.abs())
            .fold(0.0, f64::max);
        zero.observe(zdev, || coords(&[x, y]));
        pos.observe((-v).max(0.0), || coords(&[x, y, z]));
        bound.observe((v - 1.0).max(0.0), || coords(&[x, y, z]));

        let ext = [x, y, z];
        let pxy = phi_with(x, y, &ext);
        let pxz = phi_with(x, z, &ext);
        let pzy = phi_with(z, y, &ext);
        at.observe((pxy - pxz - 2.0 * pzy).max(0.0), || coords(&[x, y, z]));
        cost.observe((pxy - pxz - pzy - v).max(0.0), || coords(&[x, y, z]));

        if space.canonical(x) != space.canonical(y) {
            let degenerate = if pxy <= config.tolerance { 1.0 } else { 0.0 };
            nondeg.observe(degenerate, || coords(&[x, y]));
            if sample_pairs.len() < 200 {
                sample_pairs.push((x.clone(), y.clone()));
            }
        }
    });

    let mut tetr = Tracker::new();
    let mut dphi = Tracker::new();
    for_each_tuple::<S, 4>(space, all, config.quadruples, &mut rng, |[a, b, c, x]| {
        let lhs = space.d(a, b, c);
        let rhs = space.d(a, b, x) + space.d(b, c, x) + space.d(a, c, x);
        tetr.observe((lhs - rhs).max(0.0), || coords(&[a, b, c, x]));
        // reuse the quadruple as (a, b, x, y)
        let (x2, y2) = (c, x);
        let diff = (space.d(a, b, x2) - space.d(a, b, y2)).abs();
        let p = phi_with(x2, y2, &[a, b, x2, y2]);
        dphi.observe((diff - 2.0 * p).max(0.0), || coords(&[a, b, x2, y2]));
    });

    let mut trans = Tracker::new();
    for_each_tuple::<S, 5>(space, all, config.quintuples, &mut rng, |[a, b, c, x, y]| {
        let lhs = space.d(a, b, x) * space.d(c, x, y);
        let rhs = space.d(a, x, y) + space.d(b, x, y);
        trans.observe((lhs - rhs).max(0.0), || coords(&[a, b, c, x, y]));
    });

    let witness_error = if exhaustive || witnesses.is_exhaustive() {
        None
    } else {
        let extra = WitnessSet::sampled(space, witnesses.len(), config.seed.wrapping_add(1))?;
        let fine = witnesses.extended(extra.points().iter().cloned());
        Some(witness_truncation_error(
            space,
            &sample_pairs,
            witnesses,
            &fine,
        )?)
    };

    Ok(AxiomReport {
        seed: config.seed,
        tolerance: config.tolerance,
        exhaustive,
        witness_error,
        axioms: vec![
            sym.finish(Axiom::Sym),
            tetr.finish(Axiom::Tetr),
            zero.finish(Axiom::Z),
            pos.finish(Axiom::Positivity),
            nondeg.finish(Axiom::N),
            bound.finish(Axiom::B),
            trans.finish(Axiom::Trans),
            at.finish(Axiom::AsymmetricTriangle),
            cost.finish(Axiom::CostTriangle),
            dphi.finish(Axiom::DphiLipschitz),
        ],
    })
}
