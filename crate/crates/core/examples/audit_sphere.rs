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

//! Audits the axioms on the determinant sphere and on an area ball.

use twometric::audit::{audit, AuditConfig};
use twometric::spaces::{AreaBall, DeterminantSphere};
use twometric::WitnessSet;

fn main() -> twometric::Result<()> {
    let cfg = AuditConfig::with_samples(2000, 1);

    let sphere = DeterminantSphere::new();
    let report = audit(&sphere, &cfg, &DeterminantSphere::default_witnesses(256))?;
    println!("determinant sphere");
    for rec in &report.axioms {
        println!(
            "  {:<20} max violation {:.3e} over {} tuples",
            rec.axiom.name(),
            rec.max_violation,
            rec.samples
        );
    }

    let ball = AreaBall::default();
    let report = audit(&ball, &cfg, &WitnessSet::sampled(&ball, 256, 2)?)?;
    println!("area ball, diameter 1 in R^3");
    for rec in &report.axioms {
        println!(
            "  {:<20} max violation {:.3e}",
            rec.axiom.name(),
            rec.max_violation
        );
    }
    if let Some(err) = report.witness_error {
        println!("  phi truncation estimate {err:.3e}");
    }
    Ok(())
}
