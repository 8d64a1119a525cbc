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

//! Computational toolkit for bounded 2-metric spaces with the transitivity
//! axiom.
//!
//! * [`metric`]: the [`TwoMetricSpace`] trait, witness sets and the
//!   associated distance `phi`.
//! * [`finite`]: table-backed finite spaces, the zero-distance quotient and
//!   the surjective-map check.
//! * [`audit`]: numeric audit of the axioms (Sym, Tetr, Z, N, B, Trans and
//!   the derived triangle inequalities for `phi`).
//! * [`spaces`]: the determinant metric on the sphere, the Euclidean area
//!   metric on a ball and the spherical patch metric.
//! * [`lines`]: colinearity, lines, the `LIM` predicate and classification
//!   of sequences.
//! * [`dynamics`]: contracting maps, orbits and fixed point / fixed line
//!   detection.
//! * [`certify`]: Jacobian-based contractivity certificates on patch metrics.
//! * [`quasi`]: Banach-type solvers for distances with an asymmetric triangle
//!   inequality or a multiplicative cost.
//! * [`cli`]: the experiment harness behind the `twometric` binary.

// NaN has to fail range checks, hence the negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod baseline;
pub mod certify;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod finite;
pub mod linalg;
pub mod lines;
pub mod metric;
pub mod quasi;
pub mod spaces;

pub use error::{Error, Result};
pub use metric::{eval_phi, phi_best, Domain, TwoMetricSpace, WitnessDescriptor, WitnessSet};
