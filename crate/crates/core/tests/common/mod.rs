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

//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twometric::audit::{audit, AuditConfig};
use twometric::finite::{random_lattice_area_space, random_linear_space, FiniteTwoMetricSpace};
use twometric::WitnessSet;

pub fn det(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

pub fn cross_norm(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

pub fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return unit(v);
        }
    }
}

/// Maximal subsets all of whose triples have `d <= tol`, by scanning all
/// `2^n` subsets. Sorted members, lexicographic order.
pub fn brute_force_lines(space: &FiniteTwoMetricSpace, tol: f64) -> Vec<Vec<usize>> {
    let n = space.len();
    let colinear = |mask: u32| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        idx.iter().enumerate().all(|(a, &i)| {
            idx[a + 1..].iter().enumerate().all(|(b, &j)| {
                idx[a + 1 + b + 1..]
                    .iter()
                    .all(|&k| space.get(i, j, k) <= tol)
            })
        })
    };
    let good: Vec<u32> = (1..(1u32 << n)).filter(|&m| colinear(m)).collect();
    let mut out: Vec<Vec<usize>> = good
        .iter()
        .filter(|&&m| !good.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

/// A random finite space passing every audited axiom exactly, alternating
/// between 0/1 linear spaces and lattice area spaces.
pub fn random_valid_space(rng: &mut ChaCha8Rng, n: usize, flavor: usize) -> FiniteTwoMetricSpace {
    loop {
        let space = if flavor.is_multiple_of(2) {
            random_linear_space(n, rng)
        } else {
            random_lattice_area_space(n, rng)
        };
        let w = WitnessSet::exhaustive(&space).expect("non-empty");
        let report = audit(&space, &AuditConfig::default(), &w).expect("audit runs");
        if report.passes(&[]) {
            return space;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
