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

//! Committed reference values for the convexity constant and the calibrated
//! certificate constant, with the configurations that produced them.
//!
//! Regenerate with `cargo run --example baselines`.

use crate::certify::{calibrate, Calibration};
use crate::error::Result;
use crate::spaces::{convexity_bound, ConvexityBoundReport};

/// Relative tolerance for regression checks against a baseline.
pub const REGRESSION_TOLERANCE: f64 = 0.05;

pub const CONVEXITY_R: f64 = 0.2;
pub const CONVEXITY_SAMPLES: usize = 10_000;
pub const CONVEXITY_SEED: u64 = 0;

pub const CALIBRATION_R: f64 = 0.2;
pub const CALIBRATION_R_PRIME: f64 = 0.1;
pub const CALIBRATION_C_A: f64 = 2.0;
pub const CALIBRATION_MAX_CONDITION: f64 = 2.0;
pub const CALIBRATION_MATRICES: usize = 200;
pub const CALIBRATION_TRIPLES: usize = 2_000;
pub const CALIBRATION_SEED: u64 = 7;

const CONVEXITY_JSON: &str = include_str!("../baselines/convexity.json");
const CALIBRATION_JSON: &str = include_str!("../baselines/c_prime.json");

pub fn committed_convexity() -> Result<ConvexityBoundReport> {
    Ok(serde_json::from_str(CONVEXITY_JSON)?)
}

pub fn committed_calibration() -> Result<Calibration> {
    Ok(serde_json::from_str(CALIBRATION_JSON)?)
}

pub fn compute_convexity() -> Result<ConvexityBoundReport> {
    convexity_bound(CONVEXITY_R, CONVEXITY_SAMPLES, CONVEXITY_SEED)
}

pub fn compute_calibration() -> Result<Calibration> {
    calibrate(
        CALIBRATION_R,
        CALIBRATION_R_PRIME,
        CALIBRATION_C_A,
        CALIBRATION_MAX_CONDITION,
        CALIBRATION_MATRICES,
        CALIBRATION_TRIPLES,
        CALIBRATION_SEED,
    )
}

/// `|value - reference| <= tol |reference|`.
pub fn within(value: f64, reference: f64, tol: f64) -> bool {
    (value - reference).abs() <= tol * reference.abs()
}
