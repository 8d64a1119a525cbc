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

//! An orthogonal matrix after scaling by k contracts areas by k^2.

use twometric::dynamics::{make_linear_map, measured_contraction_factor, orbit};
use twometric::spaces::{AreaBall, BallPoint};
use twometric::WitnessSet;

fn main() -> twometric::Result<()> {
    let ball = AreaBall::default();
    let (c, s) = (0.6, 0.8);
    let rot = vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]];
    let map = make_linear_map(rot, 0.5, &ball)?;

    let m = measured_contraction_factor(&map, &ball, 2000, 1)?;
    println!("claimed {} measured {:?}", map.claimed_factor, m.factor);

    let w = WitnessSet::sampled(&ball, 64, 3)?;
    let trace = orbit(&map, &ball, &BallPoint(vec![0.3, 0.1, -0.2]), 30, &w)?;
    println!("after {} steps: {:?}", trace.steps(), trace.last().0);
    println!("decay excess {:.2e}", trace.decay.max_excess);

    let skew = vec![
        vec![1.0, 0.1, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    println!(
        "non-orthogonal: {}",
        make_linear_map(skew, 0.5, &ball).unwrap_err()
    );
    Ok(())
}
