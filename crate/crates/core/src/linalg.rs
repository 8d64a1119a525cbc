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

//! Small fixed-size vector and matrix helpers.

pub type Vec3 = [f64; 3];
pub type Mat2 = [[f64; 2]; 2];

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Determinant of the matrix with columns `a`, `b`, `c`.
#[inline]
pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    dot3(a, &cross3(b, c))
}

pub fn mat3_mul_vec(m: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
}

/// Rotation by `angle` about the vertical axis.
pub fn rotation_z(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Largest absolute entry of `MᵀM − I` for a square row-major matrix.
pub fn orthogonality_defect(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|r| m[r][i] * m[r][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[inline]
pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[inline]
pub fn mat2_vec(m: &Mat2, v: &[f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

/// Spectral norm (largest singular value) of a 2×2 matrix, in closed form.
pub fn spectral_norm2(m: &Mat2) -> f64 {
    let [[a, b], [c, d]] = *m;
    let frob2 = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    ((frob2 + disc) / 2.0).sqrt()
}
