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

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cross3, norm3, Vec3};
use crate::metric::{Domain, TwoMetricSpace};

/// A point of the planar disc `V`, the vertical projection of a patch of the
/// unit sphere around the south pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchPoint(pub [f64; 2]);

impl PatchPoint {
    pub fn norm(&self) -> f64 {
        self.0[0].hypot(self.0[1])
    }
}

/// Lift to the lower hemisphere: `(x1, x2, -sqrt(1 - x1^2 - x2^2))`.
pub fn lift(p: &PatchPoint) -> Vec3 {
    let [a, b] = p.0;
    [a, b, -(1.0 - a * a - b * b).sqrt()]
}

/// Height difference `lift(q)_3 - lift(p)_3` without cancellation.
fn height_gap(p: &PatchPoint, q: &PatchPoint) -> f64 {
    let sp = 1.0 - p.0[0] * p.0[0] - p.0[1] * p.0[1];
    let sq = 1.0 - q.0[0] * q.0[0] - q.0[1] * q.0[1];
    // -sqrt(sq) + sqrt(sp) = (sp - sq) / (sqrt(sp) + sqrt(sq))
    let num = (q.0[0] - p.0[0]) * (q.0[0] + p.0[0]) + (q.0[1] - p.0[1]) * (q.0[1] + p.0[1]);
    num / (sp.sqrt() + sq.sqrt())
}

fn lifted_area(x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
    if x == y || y == z || x == z {
        return 0.0;
    }
    let u: Vec3 = [y.0[0] - x.0[0], y.0[1] - x.0[1], height_gap(x, y)];
    let v: Vec3 = [z.0[0] - x.0[0], z.0[1] - x.0[1], height_gap(x, z)];
    0.5 * norm3(&cross3(&u, &v))
}

/// Flat triangle area in the plane.
pub fn flat_area(x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
    let u = [y.0[0] - x.0[0], y.0[1] - x.0[1]];
    let v = [z.0[0] - x.0[0], z.0[1] - x.0[1]];
    0.5 * (u[0] * v[1] - u[1] * v[0]).abs()
}

/// Product of the three pairwise distances.
pub fn rho(x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
    let dist = |a: &PatchPoint, b: &PatchPoint| (a.0[0] - b.0[0]).hypot(a.0[1] - b.0[1]);
    dist(x, y) * dist(x, z) * dist(y, z)
}

/// The pulled-back area 2-metric on a disc of radius `r < 1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchMetric {
    pub radius: f64,
}

impl PatchMetric {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.25) {
            return Err(Error::InvalidArgument(format!(
                "patch radius must lie in (0, 1/4), got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn contains(&self, p: &PatchPoint) -> bool {
        p.norm() <= self.radius * (1.0 + 1e-12)
    }

    /// Uniform point of the disc of radius `r`.
    pub fn sample_disc(rng: &mut dyn RngCore, r: f64) -> PatchPoint {
        loop {
            let a: f64 = rng.gen_range(-1.0..=1.0);
            let b: f64 = rng.gen_range(-1.0..=1.0);
            if a * a + b * b <= 1.0 {
                return PatchPoint([r * a, r * b]);
            }
        }
    }
}

/// Area of the triangle spanned by the lifts of three patch points.
pub fn patch_metric(
    patch: &PatchMetric,
    x: &PatchPoint,
    y: &PatchPoint,
    z: &PatchPoint,
) -> Result<f64> {
    for p in [x, y, z] {
        if !patch.contains(p) {
            return Err(Error::InvalidArgument(format!(
                "point {:?} lies outside the patch of radius {}",
                p.0, patch.radius
            )));
        }
    }
    Ok(lifted_area(x, y, z))
}

impl TwoMetricSpace for PatchMetric {
    type Point = PatchPoint;

    fn domain(&self) -> Domain {
        Domain::Continuous { dimension: 2 }
    }

    fn d(&self, x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
        lifted_area(x, y, z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> PatchPoint {
        Self::sample_disc(rng, self.radius)
    }

    fn coords(&self, p: &PatchPoint) -> Vec<f64> {
        p.0.to_vec()
    }
}

/// Empirical constant of the two-sided bound
/// `(alpha2 + rho) / C <= h <= C (alpha2 + rho)` over sampled triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityBoundReport {
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
    /// Largest `h / (alpha2 + rho)`.
    pub upper_ratio: f64,
    /// Largest `(alpha2 + rho) / h`.
    pub lower_ratio: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Triples skipped because two points coincide.
    pub skipped: usize,
}

pub fn convexity_bound(r: f64, samples: usize, seed: u64) -> Result<ConvexityBoundReport> {
    let patch = PatchMetric::new(r)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut upper = 0.0f64;
    let mut lower = 0.0f64;
    let mut skipped = 0;
    for _ in 0..samples {
        let x = patch.sample(&mut rng);
        let y = patch.sample(&mut rng);
        let z = patch.sample(&mut rng);
        let flat = flat_area(&x, &y, &z) + rho(&x, &y, &z);
        let h = lifted_area(&x, &y, &z);
        if x == y || y == z || x == z || flat == 0.0 || h == 0.0 {
            skipped += 1;
            continue;
        }
        upper = upper.max(h / flat);
        lower = lower.max(flat / h);
    }
    if skipped == samples {
        return Err(Error::Sampling(
            "every sampled triple was degenerate".into(),
        ));
    }
    Ok(ConvexityBoundReport {
        r,
        samples,
        seed,
        upper_ratio: upper,
        lower_ratio: lower,
        c: upper.max(lower).max(1.0),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_lifted_area(x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
        let (a, b, c) = (lift(x), lift(y), lift(z));
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        0.5 * norm3(&cross3(&u, &v))
    }

    #[test]
    fn lift_lands_on_lower_hemisphere() {
        let p = PatchPoint([0.1, -0.05]);
        let l = lift(&p);
        assert!((norm3(&l) - 1.0).abs() < 1e-15);
        assert!(l[2] < 0.0);
    }

    #[test]
    fn stable_area_matches_naive_lift() {
        let patch = PatchMetric::new(0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (x, y, z) = (
                patch.sample(&mut rng),
                patch.sample(&mut rng),
                patch.sample(&mut rng),
            );
            let a = lifted_area(&x, &y, &z);
            let b = naive_lifted_area(&x, &y, &z);
            assert!((a - b).abs() <= 1e-13 * (1.0 + b), "{a} vs {b}");
        }
    }

    #[test]
    fn repeated_point_is_zero() {
        let p = PatchMetric::new(0.2).unwrap();
        let a = PatchPoint([0.1, 0.0]);
        let b = PatchPoint([0.0, 0.1]);
        assert_eq!(patch_metric(&p, &a, &a, &b).unwrap(), 0.0);
        assert_eq!(rho(&a, &b, &b), 0.0);
    }

    #[test]
    fn flat_colinear_triple_lifts_to_positive_area() {
        let p = PatchMetric::new(0.2).unwrap();
        let (x, y, z) = (
            PatchPoint([-0.1, 0.0]),
            PatchPoint([0.0, 0.0]),
            PatchPoint([0.1, 0.0]),
        );
        assert_eq!(flat_area(&x, &y, &z), 0.0);
        assert!(patch_metric(&p, &x, &y, &z).unwrap() > 0.0);
    }

    #[test]
    fn outside_patch_is_rejected() {
        let p = PatchMetric::new(0.2).unwrap();
        let far = PatchPoint([0.3, 0.0]);
        let o = PatchPoint([0.0, 0.0]);
        assert!(patch_metric(&p, &far, &o, &o).is_err());
        assert!(PatchMetric::new(0.25).is_err());
    }

    #[test]
    fn rho_small_right_triangle() {
        let v = rho(
            &PatchPoint([0.0, 0.0]),
            &PatchPoint([0.1, 0.0]),
            &PatchPoint([0.0, 0.1]),
        );
        assert!((v - 0.1 * 0.1 * 0.1 * 2f64.sqrt()).abs() < 1e-17);
        assert!((v - 1.41421e-3).abs() < 1e-8);
    }

    #[test]
    fn rho_matches_squared_norm_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x = PatchMetric::sample_disc(&mut rng, 0.2);
            let y = PatchMetric::sample_disc(&mut rng, 0.2);
            let z = PatchMetric::sample_disc(&mut rng, 0.2);
            let sq = |a: &PatchPoint, b: &PatchPoint| {
                (a.0[0] - b.0[0]).powi(2) + (a.0[1] - b.0[1]).powi(2)
            };
            let other = (sq(&x, &y) * sq(&x, &z) * sq(&y, &z)).sqrt();
            assert!((rho(&x, &y, &z) - other).abs() <= 1e-15 * other.max(1e-300) + 1e-300);
        }
    }
}
