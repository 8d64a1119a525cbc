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

//! A map with no fixed point whose image is a single line.

use twometric::dynamics::{detect_outcome, swap_demo};
use twometric::lines::Thresholds;
use twometric::WitnessSet;

fn main() -> twometric::Result<()> {
    let (space, map) = swap_demo(8, 0.2, 4)?;
    let w = WitnessSet::exhaustive(&space)?;
    let det = detect_outcome(&map, &space, &2, 60, &w, &Thresholds::default());
    println!("outcome {}", det.outcome.tag());
    println!("{}", serde_json::to_string_pretty(&det.to_json(&space))?);
    Ok(())
}
