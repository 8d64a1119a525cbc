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

//! Certifies planar maps near a linear reference on the sphere patch.

use twometric::baseline::{committed_calibration, committed_convexity};
use twometric::certify::{certify, default_budget, CertInput};

fn main() -> twometric::Result<()> {
    let cal = committed_calibration()?;
    let conv = committed_convexity()?.c;
    let a = [[0.25, 0.0], [0.0, 0.25]];
    let c = default_budget(&a, cal.c_a);
    println!("C' = {:.4}, budget c' = {c:.3e}", cal.c_prime);

    let small = |x: &[f64; 2]| {
        [
            0.25 * x[0] + 5e-5 * x[0] * x[0],
            0.25 * x[1] + 5e-5 * x[0] * x[1],
        ]
    };
    let res = certify(&CertInput::new(small, a, &cal, conv)?, 1000, 1)?;
    println!(
        "quadratic perturbation: pass {}, worst ratio {:?}, bound {:.4}",
        res.pass, res.worst_ratio, res.bound
    );
    for f in &res.failures {
        println!(
            "  {} = {:.3e} > {:.3e} at {:?}",
            f.hypothesis, f.value, f.budget, f.at
        );
    }

    let planted = move |x: &[f64; 2]| [(0.25 + 10.0 * c) * x[0], 0.25 * x[1]];
    let res = certify(&CertInput::new(planted, a, &cal, conv)?, 1000, 1)?;
    println!("planted 10 c': pass {}", res.pass);
    for f in &res.failures {
        println!(
            "  {} = {:.3e} > {:.3e} at {:?}",
            f.hypothesis, f.value, f.budget, f.at
        );
    }
    Ok(())
}
