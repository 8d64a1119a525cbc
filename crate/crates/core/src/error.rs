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

use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line undefined: points are indistinguishable (phi = {phi:e} <= {delta:e})")]
    LineUndefined { phi: f64, delta: f64 },

    #[error("singular basis: determinant {0:e}")]
    SingularBasis(f64),

    #[error("not orthogonal: |M^T M - I| = {0:e}")]
    NotOrthogonal(f64),

    #[error("precondition refused: {0}")]
    Refused(String),

    #[error("contraction violated: {0}")]
    ContractionViolated(String),

    #[error("cost function unbounded: |psi| = {value} exceeds {bound}")]
    CostUnbounded { value: f64, bound: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
