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

//! Squeeze the sphere toward the equator and rotate about the pole. With a
//! rotation there is no fixed point, only the fixed equator; without one the
//! orbit settles on a point.

use std::f64::consts::PI;
use std::io::stdout;

use twometric::dynamics::{detect_outcome, make_sphere_map, Outcome, SphereContractionParams};
use twometric::lines::Thresholds;
use twometric::spaces::{DeterminantSphere, SpherePoint};

fn main() -> twometric::Result<()> {
    let space = DeterminantSphere::new();
    let w = DeterminantSphere::default_witnesses(256);
    let x0 = SpherePoint::new([0.8, 0.0, 0.6])?;

    for theta in [PI / 7.0, 0.0] {
        let map = make_sphere_map(SphereContractionParams {
            k: 0.1,
            e: 0.5,
            theta,
        })?;
        let det = detect_outcome(&map, &space, &x0, 200, &w, &Thresholds::default());
        print!("theta = {theta:.4}: {}", det.outcome.tag());
        match &det.outcome {
            Outcome::FixedLine(ev) => println!(
                ", {} members, invariance defect {:.1e}, min phi(y, F(y)) {:.4}",
                ev.line.len(),
                ev.invariance_defect,
                ev.min_fixed_residual
            ),
            Outcome::FixedPoint {
                point, residual, ..
            } => {
                println!(" at {:?}, residual {residual:.1e}", point.coords())
            }
            Outcome::Indeterminate { reason } => println!(" ({reason})"),
        }
    }

    // first iterates of the rotating orbit as CSV
    let map = make_sphere_map(SphereContractionParams {
        k: 0.1,
        e: 0.5,
        theta: PI / 7.0,
    })?;
    let trace = twometric::dynamics::orbit(&map, &space, &x0, 5, &w)?;
    trace.write_csv(&space, stdout(), true)?;
    Ok(())
}
