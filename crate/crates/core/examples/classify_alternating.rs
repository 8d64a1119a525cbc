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

//! The sequence e1, e2, e1, e2, ... is tri-Cauchy without being Cauchy;
//! its LIM set is the equator.

use twometric::lines::{classify, Thresholds};
use twometric::spaces::{DeterminantSphere, SpherePoint};

fn main() -> twometric::Result<()> {
    let space = DeterminantSphere::new();
    let seq: Vec<SpherePoint> = (0..100)
        .map(|i| {
            if i % 2 == 0 {
                SpherePoint::e1()
            } else {
                SpherePoint::e2()
            }
        })
        .collect();
    let c = classify(
        &space,
        &seq,
        &DeterminantSphere::default_witnesses(256),
        &Thresholds::default(),
    )?;

    println!("class: {}", c.tag());
    println!("tri-Cauchy modulus {}", c.evidence.tri_cauchy_modulus);
    println!("Cauchy modulus {}", c.evidence.cauchy_modulus);
    if let Some(line) = c.line() {
        let off = line
            .members
            .iter()
            .map(|m| m.coords()[2].abs())
            .fold(0.0, f64::max);
        println!("{} candidates on the line, max |x3| = {off}", line.len());
    }
    println!("{}", serde_json::to_string_pretty(&c.to_json(&space))?);
    Ok(())
}
