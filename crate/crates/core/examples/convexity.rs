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

//! Two-sided comparison of the lifted patch area with flat area plus the
//! product of side lengths.

use twometric::spaces::convexity_bound;

fn main() -> twometric::Result<()> {
    for r in [0.05, 0.1, 0.2, 0.24] {
        let rep = convexity_bound(r, 10_000, 0)?;
        println!(
            "r = {r:<5} C = {:.4} (upper {:.4}, lower {:.4}, skipped {})",
            rep.c, rep.upper_ratio, rep.lower_ratio, rep.skipped
        );
    }
    Ok(())
}
