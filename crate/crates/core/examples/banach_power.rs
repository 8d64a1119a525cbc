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

//! When k >= 1/C, iterate F^a for the least a with k^a < 1/C. Also runs the
//! multiplicative-cost variant.

use twometric::quasi::{banach_multcost, banach_power, minimal_power, QuasiSpace};

fn main() -> twometric::Result<()> {
    let (k, c) = (0.9, 2.0);
    println!("k = {k}, C = {c}: a = {}", minimal_power(k, c)?);

    let space = QuasiSpace::interval(0.0, 1.0, 100, c)?;
    let f = |x: &f64| k * x;
    let run = banach_power(&space, &f, &1.0, k, 500)?;
    println!(
        "power run: {} steps, fixed point {:.3e}, residual {:.3e}",
        run.steps, run.fixed_point, run.residual
    );

    let priced = QuasiSpace::interval(0.0, 1.0, 100, 1.0)?
        .with_cost(|x, y, z| 0.01 * (x - y).abs() * (y - z).abs(), 0.01)?;
    let run = banach_multcost(&priced, &|x: &f64| 0.5 * x + 0.1, &1.0, 0.5, 200)?;
    println!(
        "cost run: fixed point {:.12}, steps {}, tail bound {}",
        run.fixed_point, run.steps, run.tail_bound_ok
    );
    Ok(())
}
