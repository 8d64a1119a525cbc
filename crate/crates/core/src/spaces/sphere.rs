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
use crate::linalg::{cross3, det3, norm3, Vec3};
use crate::metric::{Domain, TwoMetricSpace, WitnessSet};

/// Coordinates below this magnitude are treated as zero when choosing the
/// antipodal representative.
const CANONICAL_EPS: f64 = 1e-12;

/// A unit vector in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Normalizes `v` onto the sphere.
    pub fn new(v: Vec3) -> Result<Self> {
        let n = norm3(&v);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize {v:?} onto the sphere"
            )));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// Wraps `v` without renormalizing. The caller guarantees `|v| = 1`.
    pub const fn from_unit(v: Vec3) -> Self {
        Self(v)
    }

    pub const fn e1() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub const fn e2() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub const fn e3() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    /// Point on the equator `x3 = 0` at longitude `t`.
    pub fn equatorial(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self([c, s, 0.0])
    }

    pub fn coords(&self) -> Vec3 {
        self.0
    }

    pub fn antipode(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Antipodal representative: the first coordinate with magnitude above
    /// `1e-12` is made positive.
    pub fn canonical(&self) -> Self {
        match self.0.iter().find(|c| c.abs() > CANONICAL_EPS) {
            Some(&c) if c < 0.0 => self.antipode(),
            _ => *self,
        }
    }
}

fn lexicographic(a: &Vec3, b: &Vec3) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// `|det[x y z]|` for unit vectors `x`, `y`, `z`.
///
/// Arguments are reduced to their antipodal representatives and sorted
/// before evaluation, so the value is exactly invariant under permutations
/// and sign flips, and exactly zero when two arguments coincide up to sign.
pub fn det_metric(x: &SpherePoint, y: &SpherePoint, z: &SpherePoint) -> f64 {
    let mut cols = [x.canonical().0, y.canonical().0, z.canonical().0];
    cols.sort_by(lexicographic);
    if cols[0] == cols[1] || cols[1] == cols[2] {
        return 0.0;
    }
    det3(&cols[0], &cols[1], &cols[2]).abs()
}

/// Coefficients of `a` in the basis `(x, y, z)` together with the worst
/// deviation of the ratio identities `d(a,y,z)/d(x,y,z) = |alpha|` etc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CramerCheck {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub residual: f64,
    /// `|alpha| + |beta| + |gamma|`, at least 1 since `|a| = 1`.
    pub coefficient_sum: f64,
}

impl CramerCheck {
    /// Whether the tetrahedral inequality follows, i.e. the coefficient sum
    /// is at least `1 - tol`.
    pub fn tetrahedral_holds(&self, tol: f64) -> bool {
        self.coefficient_sum >= 1.0 - tol
    }
}

/// Solves `m c = rhs` for a 3×3 column matrix by Gaussian elimination with
/// partial pivoting.
fn solve3(cols: [Vec3; 3], rhs: Vec3) -> Option<Vec3> {
    let mut a = [[0.0; 4]; 3];
    for (r, row) in a.iter_mut().enumerate() {
        for (c, col) in cols.iter().enumerate() {
            row[c] = col[r];
        }
        row[3] = rhs[r];
    }
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        for i in (k + 1)..3 {
            let f = a[i][k] / a[k][k];
            let pivot = a[k];
            for (dst, src) in a[i][k..].iter_mut().zip(&pivot[k..]) {
                *dst -= f * src;
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = ((k + 1)..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (a[k][3] - s) / a[k][k];
    }
    Some(x)
}

/// Expresses `a = alpha x + beta y + gamma z` by elimination and checks the
/// three determinant ratio identities against it.
pub fn cramer_check(
    x: &SpherePoint,
    y: &SpherePoint,
    z: &SpherePoint,
    a: &SpherePoint,
) -> Result<CramerCheck> {
    let base = det_metric(x, y, z);
    if base < 1e-12 {
        return Err(Error::SingularBasis(base));
    }
    let [alpha, beta, gamma] = solve3([x.0, y.0, z.0], a.0).ok_or(Error::SingularBasis(base))?;
    let residual = [
        (det_metric(a, y, z) / base - alpha.abs()).abs(),
        (det_metric(x, a, z) / base - beta.abs()).abs(),
        (det_metric(x, y, a) / base - gamma.abs()).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(CramerCheck {
        alpha,
        beta,
        gamma,
        residual,
        coefficient_sum: alpha.abs() + beta.abs() + gamma.abs(),
    })
}

/// The determinant 2-metric on the unit sphere.
///
/// With `antipodal_quotient` set, points are canonicalized to one
/// representative per antipodal pair, which makes the associated distance
/// strictly reflexive.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterminantSphere {
    pub antipodal_quotient: bool,
}

impl DeterminantSphere {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn projective() -> Self {
        Self {
            antipodal_quotient: true,
        }
    }

    /// Closed form of the associated distance: `|x × y|`.
    pub fn phi_exact(x: &SpherePoint, y: &SpherePoint) -> f64 {
        norm3(&cross3(&x.0, &y.0))
    }

    /// The six axis points followed by a Fibonacci lattice of `n` points.
    pub fn default_witnesses(n: usize) -> WitnessSet<SpherePoint> {
        let mut pts = vec![
            SpherePoint::e1(),
            SpherePoint::e2(),
            SpherePoint::e3(),
            SpherePoint::e1().antipode(),
            SpherePoint::e2().antipode(),
            SpherePoint::e3().antipode(),
        ];
        pts.extend(fibonacci_sphere(n));
        WitnessSet::grid(pts).expect("nonempty")
    }
}

/// Fibonacci lattice on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            SpherePoint::from_unit([r * t.cos(), r * t.sin(), z])
        })
        .collect()
}

/// Uniform point on the sphere by rejection from the cube.
pub(crate) fn sample_sphere(rng: &mut dyn RngCore) -> SpherePoint {
    loop {
        let v = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return SpherePoint::new(v).expect("nonzero");
        }
    }
}

impl TwoMetricSpace for DeterminantSphere {
    type Point = SpherePoint;

    fn domain(&self) -> Domain {
        Domain::Continuous { dimension: 3 }
    }

    fn d(&self, x: &SpherePoint, y: &SpherePoint, z: &SpherePoint) -> f64 {
        det_metric(x, y, z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> SpherePoint {
        self.canonical(&sample_sphere(rng))
    }

    fn canonical(&self, p: &SpherePoint) -> SpherePoint {
        if self.antipodal_quotient {
            p.canonical()
        } else {
            *p
        }
    }

    fn coords(&self, p: &SpherePoint) -> Vec<f64> {
        p.0.to_vec()
    }

    fn phi_exact(&self, x: &SpherePoint, y: &SpherePoint) -> Option<f64> {
        Some(DeterminantSphere::phi_exact(x, y))
    }
}
