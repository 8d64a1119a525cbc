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

//! The 2-metric abstraction and its associated distance.
//!
//! A 2-metric is a ternary function `d(x, y, z)` measuring how far three
//! points are from being colinear. When `d` is bounded by 1, the associated
//! distance `phi(x, y) = sup_z d(x, y, z)` is a binary distance satisfying
//! the reflexivity, symmetry and asymmetric triangle axioms. Everywhere in
//! this crate the supremum is taken over an explicit [`WitnessSet`], which is
//! exact on finite spaces.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a point domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Domain {
    /// Continuous domain embedded in `R^dimension`.
    Continuous { dimension: usize },
    /// Finite domain `{0, .., cardinality - 1}`.
    Finite { cardinality: usize },
}

/// A space carrying an evaluable 2-metric and a seeded point sampler.
///
/// Implementations must be pure: `d` is total, finite and reentrant.
/// Bounds and the axioms themselves are checked by [`crate::audit`], not
/// enforced here.
pub trait TwoMetricSpace {
    type Point: Clone + PartialEq + std::fmt::Debug;

    fn domain(&self) -> Domain;

    fn d(&self, x: &Self::Point, y: &Self::Point, z: &Self::Point) -> f64;

    /// Draws a point uniformly from the domain.
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Point;

    /// Representative of the equivalence class of `p`. Must be idempotent.
    fn canonical(&self, p: &Self::Point) -> Self::Point {
        p.clone()
    }

    /// Coordinates used when reporting witnesses.
    fn coords(&self, p: &Self::Point) -> Vec<f64>;

    /// Every point of the domain, for finite spaces.
    fn points(&self) -> Option<Vec<Self::Point>> {
        None
    }

    /// `phi(x, y)` in closed form, when the space knows it.
    fn phi_exact(&self, _x: &Self::Point, _y: &Self::Point) -> Option<f64> {
        None
    }
}

/// The closed form of `phi` when available, otherwise the max over `witnesses`.
pub fn phi_best<S: TwoMetricSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    witnesses: &WitnessSet<S::Point>,
) -> f64 {
    space
        .phi_exact(x, y)
        .unwrap_or_else(|| phi_over(space, x, y, witnesses.points()))
}

/// How a witness set was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WitnessDescriptor {
    /// A deterministic grid with `count` points.
    Grid { count: usize },
    /// `count` points drawn from the space sampler with `seed`.
    Sampled { count: usize, seed: u64 },
    /// Every point of a finite space.
    Exhaustive { count: usize },
    /// Caller-supplied points.
    Explicit { count: usize },
}

/// Finite stand-in for the supremum index in `phi`.
#[derive(Debug, Clone)]
pub struct WitnessSet<P> {
    points: Vec<P>,
    descriptor: WitnessDescriptor,
}

impl<P: Clone> WitnessSet<P> {
    pub fn explicit(points: Vec<P>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty witness set".into()));
        }
        let descriptor = WitnessDescriptor::Explicit {
            count: points.len(),
        };
        Ok(Self { points, descriptor })
    }

    pub fn grid(points: Vec<P>) -> Result<Self> {
        let mut w = Self::explicit(points)?;
        w.descriptor = WitnessDescriptor::Grid {
            count: w.points.len(),
        };
        Ok(w)
    }

    pub fn sampled<S>(space: &S, count: usize, seed: u64) -> Result<Self>
    where
        S: TwoMetricSpace<Point = P>,
    {
        if count == 0 {
            return Err(Error::InvalidArgument("empty witness set".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count).map(|_| space.sample(&mut rng)).collect();
        Ok(Self {
            points,
            descriptor: WitnessDescriptor::Sampled { count, seed },
        })
    }

    /// All points of a finite space. Fails on continuous spaces.
    pub fn exhaustive<S>(space: &S) -> Result<Self>
    where
        S: TwoMetricSpace<Point = P>,
    {
        let points = space
            .points()
            .ok_or_else(|| Error::InvalidArgument("space is not finite".into()))?;
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty witness set".into()));
        }
        let count = points.len();
        Ok(Self {
            points,
            descriptor: WitnessDescriptor::Exhaustive { count },
        })
    }

    /// Appends extra points, keeping the descriptor as `Explicit`.
    pub fn extended(&self, extra: impl IntoIterator<Item = P>) -> Self {
        let mut points = self.points.clone();
        points.extend(extra);
        let count = points.len();
        Self {
            points,
            descriptor: WitnessDescriptor::Explicit { count },
        }
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn descriptor(&self) -> &WitnessDescriptor {
        &self.descriptor
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self.descriptor, WitnessDescriptor::Exhaustive { .. })
    }
}

/// Associated distance `phi(x, y)` approximated as the maximum of
/// `d(x, y, w)` over the witness set.
pub fn eval_phi<S: TwoMetricSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    witnesses: &WitnessSet<S::Point>,
) -> Result<f64> {
    if witnesses.is_empty() {
        return Err(Error::InvalidArgument("empty witness set".into()));
    }
    Ok(phi_over(space, x, y, witnesses.points()))
}

/// Maximum of `d(x, y, w)` over `points`; 0 for an empty slice.
pub(crate) fn phi_over<S: TwoMetricSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    points: &[S::Point],
) -> f64 {
    points
        .iter()
        .map(|w| space.d(x, y, w))
        .fold(0.0f64, f64::max)
}

/// Empirical sup-truncation error: the largest increase of `phi` over
/// `pairs` when `coarse` is replaced by `fine` (normally `fine` doubles
/// `coarse`).
pub fn witness_truncation_error<S: TwoMetricSpace>(
    space: &S,
    pairs: &[(S::Point, S::Point)],
    coarse: &WitnessSet<S::Point>,
    fine: &WitnessSet<S::Point>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        let a = eval_phi(space, x, y, coarse)?;
        let b = eval_phi(space, x, y, fine)?;
        worst = worst.max(b - a);
    }
    Ok(worst)
}
