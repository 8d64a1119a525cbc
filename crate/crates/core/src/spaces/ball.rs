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

use std::cmp::Ordering;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Domain, TwoMetricSpace};

/// A point of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint(pub Vec<f64>);

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Area of the triangle spanned by three points of `R^n`,
/// `1/2 |(y - x) ∧ (z - x)|`.
///
/// The wedge norm is summed over coordinate planes, so lattice inputs give
/// exact zeros on colinear triples. Arguments are sorted first, which makes
/// the value exactly permutation invariant.
pub fn area_metric(x: &BallPoint, y: &BallPoint, z: &BallPoint) -> f64 {
    let mut pts = [&x.0[..], &y.0[..], &z.0[..]];
    pts.sort_by(|a, b| lexicographic(a, b));
    if pts[0] == pts[1] || pts[1] == pts[2] {
        return 0.0;
    }
    let n = pts[0].len();
    let u: Vec<f64> = (0..n).map(|i| pts[1][i] - pts[0][i]).collect();
    let v: Vec<f64> = (0..n).map(|i| pts[2][i] - pts[0][i]).collect();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = u[i] * v[j] - u[j] * v[i];
            s += w * w;
        }
    }
    0.5 * s.sqrt()
}

/// The Euclidean area 2-metric on a closed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Default for AreaBall {
    /// The ball of diameter 1 centered at the origin of `R^3`.
    fn default() -> Self {
        Self {
            center: vec![0.0; 3],
            radius: 0.5,
        }
    }
}

impl AreaBall {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidArgument("ball dimension must be >= 1".into()));
        }
        if !(radius > 0.0 && radius <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "ball diameter must lie in (0, 1], got {}",
                2.0 * radius
            )));
        }
        Ok(Self { center, radius })
    }

    /// Origin-centered ball of the given dimension and diameter 1.
    pub fn unit_diameter(dim: usize) -> Self {
        Self {
            center: vec![0.0; dim],
            radius: 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, p: &BallPoint) -> bool {
        p.dim() == self.dim()
            && p.0
                .iter()
                .zip(&self.center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
                .sqrt()
                <= self.radius * (1.0 + 1e-12)
    }
}

impl TwoMetricSpace for AreaBall {
    type Point = BallPoint;

    fn domain(&self) -> Domain {
        Domain::Continuous {
            dimension: self.dim(),
        }
    }

    fn d(&self, x: &BallPoint, y: &BallPoint, z: &BallPoint) -> f64 {
        area_metric(x, y, z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BallPoint {
        let n = self.dim();
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
                return BallPoint(
                    v.iter()
                        .zip(&self.center)
                        .map(|(c, o)| o + self.radius * c)
                        .collect(),
                );
            }
        }
    }

    fn coords(&self, p: &BallPoint) -> Vec<f64> {
        p.0.clone()
    }
}
