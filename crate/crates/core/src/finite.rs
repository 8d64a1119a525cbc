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

//! Finite 2-metric spaces backed by a table of unordered triples.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Domain, TwoMetricSpace};
use crate::spaces::{area_metric, BallPoint};

/// A finite 2-metric space on the indices `0..n`.
///
/// Values are stored once per unordered triple `i <= j <= k`, so symmetry
/// holds by construction. Triples with a repeated index are always 0. The
/// `[0, 1]` range is not enforced here; [`crate::audit`] reports it.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTwoMetricSpace {
    n: usize,
    table: Vec<f64>,
}

fn sorted3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let mut t = [i, j, k];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

fn slot(i: usize, j: usize, k: usize) -> usize {
    let (a, b, c) = sorted3(i, j, k);
    c * (c + 1) * (c + 2) / 6 + b * (b + 1) / 2 + a
}

impl FiniteTwoMetricSpace {
    /// The space with `d` identically zero.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            table: vec![0.0; n * (n + 1) * (n + 2) / 6],
        }
    }

    /// Tabulates `space` on an explicit list of points.
    pub fn tabulate<S: TwoMetricSpace>(space: &S, points: &[S::Point]) -> Self {
        let mut t = Self::zeros(points.len());
        for k in 0..points.len() {
            for j in 0..k {
                for i in 0..j {
                    let v = space.d(&points[i], &points[j], &points[k]);
                    t.table[slot(i, j, k)] = v;
                }
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.table[slot(i, j, k)]
    }

    /// Sets the value on a triple of distinct indices.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) -> Result<()> {
        if i >= self.n || j >= self.n || k >= self.n {
            return Err(Error::InvalidArgument(format!(
                "triple ({i}, {j}, {k}) out of range for n = {}",
                self.n
            )));
        }
        if i == j || j == k || i == k {
            return Err(Error::InvalidArgument(format!(
                "triple ({i}, {j}, {k}) repeats an index; its value is fixed at 0"
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite value {value}")));
        }
        self.table[slot(i, j, k)] = value;
        Ok(())
    }

    /// Iterates over distinct triples `i < j < k` with their values.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            ((i + 1)..n).flat_map(move |j| ((j + 1)..n).map(move |k| (i, j, k, self.get(i, j, k))))
        })
    }

    /// Exact associated distance: maximum of `d(x, y, w)` over all points.
    pub fn phi(&self, x: usize, y: usize) -> f64 {
        (0..self.n).map(|w| self.get(x, y, w)).fold(0.0, f64::max)
    }

    /// Five points `{a, b, c, p, q} = {0, .., 4}`: `d = 0` on `{a, b, c}` and
    /// on triples with a repeat, `d = 1` on every other distinct triple.
    pub fn demo5() -> Self {
        let mut s = Self::zeros(5);
        for (i, j, k, _) in s.clone().triples() {
            if (i, j, k) != (0, 1, 2) {
                s.set(i, j, k, 1.0).expect("distinct");
            }
        }
        s
    }

    pub fn to_json_table(&self) -> JsonTable {
        JsonTable {
            n: self.n,
            entries: self
                .triples()
                .map(|(i, j, k, d)| JsonEntry { i, j, k, d })
                .collect(),
        }
    }

    pub fn from_json_table(t: &JsonTable) -> Result<Self> {
        let mut s = Self::zeros(t.n);
        let mut seen = BTreeMap::new();
        for e in &t.entries {
            let key = sorted3(e.i, e.j, e.k);
            if let Some(prev) = seen.insert(key, e.d) {
                if prev != e.d {
                    return Err(Error::InvalidArgument(format!(
                        "conflicting entries for triple {key:?}: {prev} and {}",
                        e.d
                    )));
                }
            }
            s.set(e.i, e.j, e.k, e.d)?;
        }
        Ok(s)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let t: JsonTable = serde_json::from_str(&text)?;
        Self::from_json_table(&t)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json_table())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Merges points at zero associated distance (`phi <= tol`).
    ///
    /// The table descends to the classes because `phi(x, y) = 0` forces
    /// `d(a, b, x) = d(a, b, y)`; each class is represented by its smallest
    /// index.
    pub fn quotient_by_zero_phi(&self, tol: f64) -> Quotient {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if self.phi(x, y) <= tol {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    if rx != ry {
                        parent[rx.max(ry)] = rx.min(ry);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; n];
        for x in 0..n {
            let r = find(&mut parent, x);
            if class_of[r] == usize::MAX {
                class_of[r] = classes.len();
                classes.push(Vec::new());
            }
            class_of[x] = class_of[r];
            classes[class_of[r]].push(x);
        }
        let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let mut space = Self::zeros(reps.len());
        for k in 0..reps.len() {
            for j in 0..k {
                for i in 0..j {
                    space.table[slot(i, j, k)] = self.get(reps[i], reps[j], reps[k]);
                }
            }
        }
        Quotient {
            space,
            classes,
            class_of,
        }
    }

    /// Contraction ratio of a self-map over triples with positive `d`.
    pub fn surjective_contraction_check(&self, map: &[usize]) -> Result<SurjectiveCheck> {
        if map.len() != self.n || map.iter().any(|&m| m >= self.n) {
            return Err(Error::InvalidArgument(
                "map must send every index of the space into the space".into(),
            ));
        }
        let mut hit = vec![false; self.n];
        for &m in map {
            hit[m] = true;
        }
        let is_surjective = hit.iter().all(|&h| h);
        let mut measured_k: Option<f64> = None;
        for (i, j, k, d) in self.triples() {
            if d > 0.0 {
                let ratio = self.get(map[i], map[j], map[k]) / d;
                measured_k = Some(measured_k.map_or(ratio, |m| m.max(ratio)));
            }
        }
        Ok(SurjectiveCheck {
            is_surjective,
            measured_k,
        })
    }
}

/// Result of [`FiniteTwoMetricSpace::quotient_by_zero_phi`].
#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    pub space: FiniteTwoMetricSpace,
    /// Members of each class, ascending; the first member is the representative.
    pub classes: Vec<Vec<usize>>,
    /// Class index of each original point.
    pub class_of: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurjectiveCheck {
    pub is_surjective: bool,
    /// `None` when `d` vanishes on every triple.
    pub measured_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub d: f64,
}

/// On-disk table format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonTable {
    pub n: usize,
    pub entries: Vec<JsonEntry>,
}

impl TwoMetricSpace for FiniteTwoMetricSpace {
    type Point = usize;

    fn domain(&self) -> Domain {
        Domain::Finite {
            cardinality: self.n,
        }
    }

    fn d(&self, x: &usize, y: &usize, z: &usize) -> f64 {
        self.get(*x, *y, *z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> usize {
        rng.gen_range(0..self.n)
    }

    fn coords(&self, p: &usize) -> Vec<f64> {
        vec![*p as f64]
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.n).collect())
    }

    fn phi_exact(&self, x: &usize, y: &usize) -> Option<f64> {
        Some(self.phi(*x, *y))
    }
}

/// Random 0/1 space from a partial linear space on `n` points.
///
/// Every pair of points lies on exactly one block; `d = 0` on triples inside
/// a block and `d = 1` otherwise. Such tables satisfy every axiom including
/// transitivity.
pub fn random_linear_space(n: usize, rng: &mut dyn RngCore) -> FiniteTwoMetricSpace {
    let mut covered = vec![vec![false; n]; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    for (i, j) in pairs {
        if covered[i][j] {
            continue;
        }
        let mut block = vec![i, j];
        covered[i][j] = true;
        covered[j][i] = true;
        let mut others: Vec<usize> = (0..n).filter(|&p| p != i && p != j).collect();
        others.shuffle(rng);
        for p in others {
            if rng.gen_bool(0.5) && block.iter().all(|&b| !covered[b][p]) {
                for &b in &block {
                    covered[b][p] = true;
                    covered[p][b] = true;
                }
                block.push(p);
            }
        }
        blocks.push(block);
    }
    let mut s = FiniteTwoMetricSpace::zeros(n);
    let mut inside = vec![false; s.table.len()];
    for block in &blocks {
        for (a, &x) in block.iter().enumerate() {
            for (b, &y) in block.iter().enumerate().skip(a + 1) {
                for &z in &block[(b + 1)..] {
                    inside[slot(x, y, z)] = true;
                }
            }
        }
    }
    for (i, j, k, _) in s.clone().triples() {
        if !inside[slot(i, j, k)] {
            s.table[slot(i, j, k)] = 1.0;
        }
    }
    s
}

/// Tabulated planar area metric on `n` distinct lattice points with spacing
/// `1/8` inside the disc of diameter 1. Lattice coordinates make colinear
/// triples exactly zero.
pub fn random_lattice_area_space(n: usize, rng: &mut dyn RngCore) -> FiniteTwoMetricSpace {
    let mut lattice: Vec<BallPoint> = Vec::new();
    for a in -4i32..=4 {
        for b in -4i32..=4 {
            if a * a + b * b <= 16 {
                lattice.push(BallPoint(vec![a as f64 / 8.0, b as f64 / 8.0]));
            }
        }
    }
    let chosen: Vec<BallPoint> = lattice.choose_multiple(rng, n).cloned().collect();
    let mut s = FiniteTwoMetricSpace::zeros(chosen.len());
    for k in 0..chosen.len() {
        for j in 0..k {
            for i in 0..j {
                s.table[slot(i, j, k)] = area_metric(&chosen[i], &chosen[j], &chosen[k]);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slots_are_a_bijection() {
        let n = 7;
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..n {
            for j in 0..=k {
                for i in 0..=j {
                    assert!(seen.insert(slot(i, j, k)));
                }
            }
        }
        assert_eq!(seen.len(), n * (n + 1) * (n + 2) / 6);
        assert_eq!(*seen.iter().max().unwrap(), seen.len() - 1);
    }

    #[test]
    fn set_rejects_repeats_and_range() {
        let mut s = FiniteTwoMetricSpace::zeros(3);
        assert!(s.set(0, 0, 1, 0.5).is_err());
        assert!(s.set(0, 1, 3, 0.5).is_err());
        assert!(s.set(0, 1, 2, f64::NAN).is_err());
        s.set(2, 0, 1, 0.5).unwrap();
        assert_eq!(s.get(1, 2, 0), 0.5);
    }

    #[test]
    fn json_table_round_trip() {
        let s = FiniteTwoMetricSpace::demo5();
        let t = s.to_json_table();
        assert_eq!(t.entries.len(), 10);
        let back = FiniteTwoMetricSpace::from_json_table(&t).unwrap();
        assert_eq!(back, s);
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.starts_with(r#"{"n":5,"entries":[{"i":0,"j":1,"k":2,"d":0.0}"#));
    }

    #[test]
    fn json_rejects_unknown_fields_and_conflicts() {
        let bad = r#"{"n":3,"entries":[],"extra":1}"#;
        assert!(serde_json::from_str::<JsonTable>(bad).is_err());
        let t = JsonTable {
            n: 3,
            entries: vec![
                JsonEntry {
                    i: 0,
                    j: 1,
                    k: 2,
                    d: 0.5,
                },
                JsonEntry {
                    i: 2,
                    j: 1,
                    k: 0,
                    d: 0.7,
                },
            ],
        };
        assert!(FiniteTwoMetricSpace::from_json_table(&t).is_err());
    }

    #[test]
    fn quotient_identity_when_strictly_reflexive() {
        let s = FiniteTwoMetricSpace::demo5();
        let q = s.quotient_by_zero_phi(0.0);
        assert_eq!(q.space, s);
        assert_eq!(q.classes.len(), 5);
    }

    #[test]
    fn quotient_collapses_null_space() {
        let s = FiniteTwoMetricSpace::zeros(3);
        let q = s.quotient_by_zero_phi(0.0);
        assert_eq!(q.space.len(), 1);
        assert_eq!(q.classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn surjective_identity_and_constant() {
        let s = FiniteTwoMetricSpace::demo5();
        let id: Vec<usize> = (0..5).collect();
        let c = s.surjective_contraction_check(&id).unwrap();
        assert!(c.is_surjective);
        assert_eq!(c.measured_k, Some(1.0));
        let c = s.surjective_contraction_check(&[3; 5]).unwrap();
        assert!(!c.is_surjective);
        assert_eq!(c.measured_k, Some(0.0));
        let z = FiniteTwoMetricSpace::zeros(4);
        assert_eq!(
            z.surjective_contraction_check(&[0, 1, 2, 3])
                .unwrap()
                .measured_k,
            None
        );
    }

    #[test]
    fn line_preserving_permutation_of_demo() {
        // swap a <-> b and p <-> q, exhaustive ratio oracle gives 1
        let s = FiniteTwoMetricSpace::demo5();
        let perm = [1, 0, 2, 4, 3];
        let c = s.surjective_contraction_check(&perm).unwrap();
        assert!(c.is_surjective);
        let mut oracle = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let d = s.get(i, j, k);
                    if d > 0.0 {
                        oracle = oracle.max(s.get(perm[i], perm[j], perm[k]) / d);
                    }
                }
            }
        }
        assert_eq!(c.measured_k, Some(oracle));
        assert!(oracle >= 1.0);
    }

    #[test]
    fn generators_produce_tables_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=6 {
            for s in [
                random_linear_space(n, &mut rng),
                random_lattice_area_space(n, &mut rng),
            ] {
                assert_eq!(s.len(), n);
                assert!(s.triples().all(|(_, _, _, d)| (0.0..=1.0).contains(&d)));
            }
        }
    }
}
