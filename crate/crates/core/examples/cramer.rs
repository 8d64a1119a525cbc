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

//! Determinant ratios recover the coordinates of a point in a basis of
//! three sphere points.

use twometric::spaces::{cramer_check, SpherePoint};

fn main() -> twometric::Result<()> {
    let x = SpherePoint::new([1.0, 0.2, 0.0])?;
    let y = SpherePoint::new([0.0, 1.0, 0.3])?;
    let z = SpherePoint::new([0.1, 0.0, 1.0])?;
    let a = SpherePoint::new([0.5, -0.4, 0.7])?;

    let c = cramer_check(&x, &y, &z, &a)?;
    println!("a = {:.6} x + {:.6} y + {:.6} z", c.alpha, c.beta, c.gamma);
    println!("ratio residual {:.2e}", c.residual);
    println!(
        "|alpha| + |beta| + |gamma| = {:.6} (>= 1)",
        c.coefficient_sum
    );

    // a basis point in the third slot has coordinates (0, 0, 1)
    let same = cramer_check(&x, &y, &z, &z)?;
    println!(
        "z itself: ({:.1e}, {:.1e}, {:.6})",
        same.alpha, same.beta, same.gamma
    );
    Ok(())
}
