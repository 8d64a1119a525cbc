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

//! Lines of the five-point demo space, a line through two sphere points,
//! and a transitivity probe.

use twometric::finite::FiniteTwoMetricSpace;
use twometric::lines::{enumerate_lines, line_through, transitivity_probe};
use twometric::spaces::{DeterminantSphere, SpherePoint};

fn main() -> twometric::Result<()> {
    let demo = FiniteTwoMetricSpace::demo5();
    println!("lines of the demo space:");
    for line in enumerate_lines(&demo, 0.0) {
        println!("  {:?}", line.members);
    }

    let sphere = DeterminantSphere::new();
    let w = DeterminantSphere::default_witnesses(256);
    let (x, y) = (SpherePoint::e1(), SpherePoint::e2());
    let line = line_through(&sphere, &x, &y, &w, 1e-6, 1e-6)?;
    println!(
        "line through e1, e2 keeps {} of {} witnesses",
        line.len(),
        w.len()
    );
    println!(
        "  pole on it: {}",
        line.contains(&sphere, &SpherePoint::e3())
    );

    let z = SpherePoint::equatorial(0.7);
    let v = SpherePoint::equatorial(2.0);
    println!(
        "probe on the equator: {:?}",
        transitivity_probe(&sphere, [&x, &y, &z, &v], 1e-6, 1e-6, &w)
    );
    Ok(())
}
