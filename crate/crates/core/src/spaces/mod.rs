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

//! Concrete 2-metric spaces.
//!
//! * [`DeterminantSphere`]: `|det[x y z]|` on the unit sphere, optionally
//!   quotiented by the antipodal map.
//! * [`AreaBall`]: Euclidean triangle area on a ball of diameter at most 1.
//! * [`PatchMetric`]: triangle area of points lifted from a planar disc onto
//!   the lower hemisphere near the south pole.

mod ball;
mod patch;
mod sphere;

pub use ball::{area_metric, AreaBall, BallPoint};
pub use patch::{
    convexity_bound, flat_area, lift, patch_metric, rho, ConvexityBoundReport, PatchMetric,
    PatchPoint,
};
pub use sphere::{cramer_check, det_metric, CramerCheck, DeterminantSphere, SpherePoint};
