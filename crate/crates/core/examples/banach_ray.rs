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

//! Fixed-point iteration on a finite quasi-metric space built from points
//! on a ray, where the shift contracts the associated distance by exactly k.

use twometric::quasi::{banach_direct, ray_contraction_demo, QuasiSpace};

fn main() -> twometric::Result<()> {
    // ratio 2/7 gives k = 0.4 < 1/C = 0.5
    let (table, map) = ray_contraction_demo(12, 2.0 / 7.0)?;
    let space = QuasiSpace::from_finite(&table)?;
    println!("audit holds: {}", space.audit().holds(1e-12));

    let shift = |i: &usize| map[*i];
    let run = banach_direct(&space, &shift, &1, 0.4, 100)?;
    println!("iterates {:?}", run.iterates);
    println!(
        "fixed point {} after {} steps, measured k = {:.6}",
        run.fixed_point, run.steps, run.k_measured
    );
    println!("tail bound holds: {}", run.tail_bound_ok);

    // k = 0.6 is too large for the direct route
    let interval = QuasiSpace::interval(0.0, 1.0, 50, 2.0)?;
    match banach_direct(&interval, &|x: &f64| 0.6 * x, &1.0, 0.6, 100) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("k = 0.6: {e}"),
    }
    Ok(())
}
