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

//! Contractivity certificates for planar maps on the sphere patch.
//!
//! A C² map `F: V' -> V` whose Jacobian stays within `c'` of a fixed
//! invertible matrix `A`, and whose second derivatives are bounded by `c'`,
//! satisfies `h(Fx, Fy, Fz) <= C' |det A| h(x, y, z)` for the patch metric
//! `h`. Both hypotheses are checked by finite differences at sampled points;
//! the conclusion is then checked on sampled triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det2, mat2_sub, spectral_norm2, Mat2};
use crate::metric::TwoMetricSpace;
use crate::spaces::{patch_metric, PatchMetric, PatchPoint};

/// Step of the central-difference Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Step of the second differences; larger than the Jacobian step because
/// rounding error grows like `eps / h^2`.
pub const HESSIAN_STEP: f64 = 1e-4;
/// Triples whose patch metric is below this are skipped.
const DEGENERATE: f64 = 1e-15;

pub type PlanarMap<'a> = Box<dyn Fn(&[f64; 2]) -> [f64; 2] + 'a>;

fn require_margin(x: &[f64; 2], margin: f64, radius: f64) -> Result<()> {
    if x[0].hypot(x[1]) + margin > radius {
        return Err(Error::InvalidArgument(format!(
            "point {x:?} is within {margin} of the boundary of the disc of radius {radius}"
        )));
    }
    Ok(())
}

/// Central-difference Jacobian at `x`, a point of the disc of radius
/// `radius` at distance at least `h` from its boundary.
pub fn jacobian_fd(
    f: &dyn Fn(&[f64; 2]) -> [f64; 2],
    x: &[f64; 2],
    h: f64,
    radius: f64,
) -> Result<Mat2> {
    require_margin(x, h, radius)?;
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let (mut plus, mut minus) = (*x, *x);
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (f(&plus), f(&minus));
        for row in 0..2 {
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Frobenius norm of the second-derivative tensor `d^2 F_i / dx_j dx_k` at `x`.
pub fn second_derivative_norm(
    f: &dyn Fn(&[f64; 2]) -> [f64; 2],
    x: &[f64; 2],
    h: f64,
    radius: f64,
) -> Result<f64> {
    require_margin(x, 2.0 * h, radius)?;
    let at = |dx: f64, dy: f64| f(&[x[0] + dx, x[1] + dy]);
    let f0 = f(x);
    let mut sum = 0.0;
    for j in 0..2 {
        let e = |s: f64| if j == 0 { (s, 0.0) } else { (0.0, s) };
        let (p, m) = (at(e(h).0, e(h).1), at(e(-h).0, e(-h).1));
        for i in 0..2 {
            let v = (p[i] - 2.0 * f0[i] + m[i]) / (h * h);
            sum += v * v;
        }
    }
    let (pp, pm, mp, mm) = (at(h, h), at(h, -h), at(-h, h), at(-h, -h));
    for i in 0..2 {
        let v = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
        // the mixed partial appears twice in the tensor
        sum += 2.0 * v * v;
    }
    Ok(sum.sqrt())
}

/// Max of [`second_derivative_norm`] over the given points.
pub fn hessian_bound_fd(
    f: &dyn Fn(&[f64; 2]) -> [f64; 2],
    points: &[[f64; 2]],
    h: f64,
    radius: f64,
) -> Result<f64> {
    points.iter().try_fold(0.0f64, |acc, x| {
        Ok(acc.max(second_derivative_norm(f, x, h, radius)?))
    })
}

/// Ratio of singular values of a 2×2 matrix.
pub fn condition_number(a: &Mat2) -> f64 {
    let s1 = spectral_norm2(a);
    let det = det2(a).abs();
    if det == 0.0 {
        f64::INFINITY
    } else {
        s1 * s1 / det
    }
}

/// Default proximity budget `c' = 0.01 |det A| / C_A`.
pub fn default_budget(a: &Mat2, c_a: f64) -> f64 {
    0.01 * det2(a).abs() / c_a
}

/// Calibrated constant `C'` for a patch configuration: the largest
/// `h(Ax, Ay, Az) / (|det A| h(x, y, z))` over sampled matrices and triples.
///
/// Matrices are restricted to condition number at most `max_condition`:
/// for nearly singular `A` the ratio grows without bound on nearly colinear
/// triples, so no uniform constant exists over all `A` with `|A| <= C_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub r: f64,
    pub r_prime: f64,
    pub c_a: f64,
    pub max_condition: f64,
    pub matrices: usize,
    pub triples: usize,
    pub seed: u64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    pub worst_matrix: Mat2,
}

pub fn calibrate(
    r: f64,
    r_prime: f64,
    c_a: f64,
    max_condition: f64,
    matrices: usize,
    triples: usize,
    seed: u64,
) -> Result<Calibration> {
    let patch = PatchMetric::new(r)?;
    if !(r_prime > 0.0 && r_prime <= r) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r' <= r, got r' = {r_prime}"
        )));
    }
    if c_a * r_prime > r {
        return Err(Error::InvalidArgument(format!(
            "matrices of norm {c_a} do not map the disc of radius {r_prime} into radius {r}"
        )));
    }
    if max_condition < 1.0 || matrices == 0 || triples == 0 {
        return Err(Error::InvalidArgument(
            "need max_condition >= 1 and positive sample counts".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = |t: f64| [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
    let mul = |a: &Mat2, b: &Mat2| {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        m
    };
    let mut mats: Vec<Mat2> = [0.25, 0.5, 1.0, c_a]
        .iter()
        .map(|&s| [[s, 0.0], [0.0, s]])
        .collect();
    while mats.len() < matrices.max(4) {
        let s1 = rng.gen_range(0.1 * c_a..=c_a);
        let s2 = s1 / rng.gen_range(1.0..=max_condition);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let diag = [[s1, 0.0], [0.0, sign * s2]];
        let a = mul(
            &mul(&rot(rng.gen_range(0.0..std::f64::consts::TAU)), &diag),
            &rot(rng.gen_range(0.0..std::f64::consts::TAU)),
        );
        mats.push(a);
    }
    let sample = |rng: &mut ChaCha8Rng| PatchMetric::sample_disc(rng, r_prime);
    let mut best = (0.0f64, mats[0]);
    for a in &mats {
        let det = det2(a).abs();
        let apply = |p: &PatchPoint| {
            let [x, y] = p.0;
            PatchPoint([a[0][0] * x + a[0][1] * y, a[1][0] * x + a[1][1] * y])
        };
        for _ in 0..triples {
            let (x, y, z) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
            let before = patch.d(&x, &y, &z);
            if before < DEGENERATE {
                continue;
            }
            let ratio = patch.d(&apply(&x), &apply(&y), &apply(&z)) / (det * before);
            if ratio > best.0 {
                best = (ratio, *a);
            }
        }
    }
    Ok(Calibration {
        r,
        r_prime,
        c_a,
        max_condition,
        matrices: mats.len(),
        triples,
        seed,
        c_prime: best.0,
        worst_matrix: best.1,
    })
}

/// A map to certify together with its reference matrix and constants.
pub struct CertInput<'a> {
    pub map: PlanarMap<'a>,
    pub a: Mat2,
    pub c_a: f64,
    /// Proximity budget `c'` for both hypotheses.
    pub budget: f64,
    /// Radius of `V`.
    pub r: f64,
    /// Radius of `V'`.
    pub r_prime: f64,
    /// Convexity sandwich constant of the patch, for reference.
    pub convexity_c: f64,
    /// Calibrated `C'`.
    pub c_prime: f64,
}

impl<'a> CertInput<'a> {
    /// Input with the calibration's patch configuration and the default
    /// budget.
    pub fn new(
        map: impl Fn(&[f64; 2]) -> [f64; 2] + 'a,
        a: Mat2,
        calibration: &Calibration,
        convexity_c: f64,
    ) -> Result<Self> {
        let input = Self {
            map: Box::new(map),
            a,
            c_a: calibration.c_a,
            budget: default_budget(&a, calibration.c_a),
            r: calibration.r,
            r_prime: calibration.r_prime,
            convexity_c,
            c_prime: calibration.c_prime,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        let det = det2(&self.a);
        if det.abs() < 1e-12 {
            return Err(Error::SingularBasis(det.abs()));
        }
        let norm = spectral_norm2(&self.a);
        if norm > self.c_a {
            return Err(Error::InvalidArgument(format!(
                "|A| = {norm} exceeds C_A = {}",
                self.c_a
            )));
        }
        if !(self.budget > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "budget c' = {} must be positive",
                self.budget
            )));
        }
        PatchMetric::new(self.r)?;
        if !(self.r_prime > 2.0 * HESSIAN_STEP && self.r_prime <= self.r) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r' <= r, got r' = {}",
                self.r_prime
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFailure {
    /// `"jacobian"`, `"hessian"` or `"image"`.
    pub hypothesis: String,
    pub value: f64,
    pub budget: f64,
    pub at: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertResult {
    pub pass: bool,
    /// Max over samples of `|J(F, x) - A|` (spectral norm).
    pub max_jac_dev: f64,
    pub max_hessian: f64,
    pub c_prime: f64,
    #[serde(rename = "C_prime")]
    pub calibrated: f64,
    #[serde(rename = "det_A")]
    pub det_a: f64,
    /// Worst sampled `h(Fx, Fy, Fz) / h(x, y, z)`; only computed on pass.
    pub worst_ratio: Option<f64>,
    /// `C' |det A|`.
    pub bound: f64,
    pub conclusion_holds: Option<bool>,
    pub convexity_c: f64,
    pub samples: usize,
    pub seed: u64,
    /// The worst point of each failed hypothesis.
    pub failures: Vec<HypothesisFailure>,
}

/// Checks the hypotheses at `samples` seeded points of `V'` and, on pass,
/// the conclusion on `samples` seeded triples.
pub fn certify(input: &CertInput<'_>, samples: usize, seed: u64) -> Result<CertResult> {
    input.validate()?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let f = &*input.map;
    let patch = PatchMetric::new(input.r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = input.r_prime - 2.0 * HESSIAN_STEP;
    let points: Vec<[f64; 2]> = (0..samples)
        .map(|_| PatchMetric::sample_disc(&mut rng, inner).0)
        .collect();

    let mut jac = (0.0f64, points[0]);
    let mut hess = (0.0f64, points[0]);
    let mut image = (0.0f64, points[0]);
    for x in &points {
        let dev = spectral_norm2(&mat2_sub(
            &jacobian_fd(f, x, JACOBIAN_STEP, input.r_prime)?,
            &input.a,
        ));
        if dev > jac.0 {
            jac = (dev, *x);
        }
        let h = second_derivative_norm(f, x, HESSIAN_STEP, input.r_prime)?;
        if h > hess.0 {
            hess = (h, *x);
        }
        let fx = f(x);
        let radius = fx[0].hypot(fx[1]);
        if radius > image.0 {
            image = (radius, *x);
        }
    }
    let mut failures = Vec::new();
    for (name, (value, at), budget) in [
        ("jacobian", jac, input.budget),
        ("hessian", hess, input.budget),
        ("image", image, input.r),
    ] {
        if value > budget {
            failures.push(HypothesisFailure {
                hypothesis: name.into(),
                value,
                budget,
                at,
            });
        }
    }
    let pass = failures.is_empty();
    let det_a = det2(&input.a);
    let bound = input.c_prime * det_a.abs();

    let mut worst_ratio = None;
    if pass {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let t: Vec<PatchPoint> = (0..3)
                .map(|_| PatchMetric::sample_disc(&mut rng, input.r_prime))
                .collect();
            let before = patch.d(&t[0], &t[1], &t[2]);
            if before < DEGENERATE {
                continue;
            }
            let img: Vec<PatchPoint> = t.iter().map(|p| PatchPoint(f(&p.0))).collect();
            let after = patch_metric(&patch, &img[0], &img[1], &img[2])?;
            worst = worst.max(after / before);
        }
        worst_ratio = Some(worst);
    }
    Ok(CertResult {
        pass,
        max_jac_dev: jac.0,
        max_hessian: hess.0,
        c_prime: input.budget,
        calibrated: input.c_prime,
        det_a,
        worst_ratio,
        bound,
        conclusion_holds: worst_ratio.map(|w| w <= bound * (1.0 + 1e-9)),
        convexity_c: input.convexity_c,
        samples,
        seed,
        failures,
    })
}
