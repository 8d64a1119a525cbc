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

//! A surjective self-map of a finite space never contracts every triple.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twometric::finite::FiniteTwoMetricSpace;

fn main() -> twometric::Result<()> {
    let space = FiniteTwoMetricSpace::demo5();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let mut perm: Vec<usize> = (0..space.len()).collect();
        perm.shuffle(&mut rng);
        let check = space.surjective_contraction_check(&perm)?;
        println!(
            "{perm:?}: surjective {}, measured k {:?}",
            check.is_surjective, check.measured_k
        );
    }
    let constant = vec![0; space.len()];
    let check = space.surjective_contraction_check(&constant)?;
    println!(
        "{constant:?}: surjective {}, measured k {:?}",
        check.is_surjective, check.measured_k
    );
    Ok(())
}
