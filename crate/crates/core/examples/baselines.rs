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

//! Recomputes the committed baselines and writes them to `baselines/`.

use std::fs;
use std::path::Path;

use twometric::baseline::{compute_calibration, compute_convexity};

fn main() -> twometric::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("baselines");
    let conv = compute_convexity()?;
    println!(
        "convexity C = {} (r = {}, {} samples)",
        conv.c, conv.r, conv.samples
    );
    fs::write(
        dir.join("convexity.json"),
        serde_json::to_string_pretty(&conv)? + "\n",
    )?;

    let cal = compute_calibration()?;
    println!(
        "calibrated C' = {} over {} matrices",
        cal.c_prime, cal.matrices
    );
    fs::write(
        dir.join("c_prime.json"),
        serde_json::to_string_pretty(&cal)? + "\n",
    )?;
    Ok(())
}
