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

use proptest::prelude::*;
use twometric::finite::FiniteTwoMetricSpace;
use twometric::spaces::{area_metric, BallPoint, DeterminantSphere, SpherePoint};
use twometric::TwoMetricSpace;

fn sphere_point() -> impl Strategy<Value = SpherePoint> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_filter("away from zero", |v| {
            v.iter().map(|c| c * c).sum::<f64>() > 1e-2
        })
        .prop_map(|v| SpherePoint::new(v).unwrap())
}

fn ball_point() -> impl Strategy<Value = BallPoint> {
    prop::array::uniform3(-0.28f64..0.28).prop_map(|v| BallPoint(v.to_vec()))
}

fn rotate_z(p: &SpherePoint, t: f64) -> SpherePoint {
    let [a, b, c] = p.coords();
    SpherePoint::new([a * t.cos() - b * t.sin(), a * t.sin() + b * t.cos(), c]).unwrap()
}

proptest! {
    #[test]
    fn sphere_metric_is_symmetric(x in sphere_point(), y in sphere_point(), z in sphere_point()) {
        let s = DeterminantSphere::new();
        let v = s.d(&x, &y, &z);
        for w in [s.d(&y, &x, &z), s.d(&z, &y, &x), s.d(&x, &z, &y), s.d(&y, &z, &x)] {
            prop_assert!((v - w).abs() <= 1e-15);
        }
        prop_assert!(v <= 1.0 + 1e-15);
    }

    #[test]
    fn rotation_is_an_isometry(x in sphere_point(), y in sphere_point(), z in sphere_point(), t in 0.0f64..6.3) {
        let s = DeterminantSphere::new();
        let moved = s.d(&rotate_z(&x, t), &rotate_z(&y, t), &rotate_z(&z, t));
        prop_assert!((moved - s.d(&x, &y, &z)).abs() <= 1e-14);
    }

    #[test]
    fn phi_is_the_cross_product_norm(x in sphere_point(), y in sphere_point(), z in sphere_point()) {
        let s = DeterminantSphere::new();
        let phi = DeterminantSphere::phi_exact(&x, &y);
        prop_assert!(s.d(&x, &y, &z) <= phi + 1e-14);
        prop_assert!((phi - DeterminantSphere::phi_exact(&y, &x)).abs() <= 1e-15);
    }

    #[test]
    fn area_scales_quadratically(x in ball_point(), y in ball_point(), z in ball_point(), l in 0.0f64..1.0) {
        let lhs = area_metric(&x.scaled(l), &y.scaled(l), &z.scaled(l));
        let rhs = l * l * area_metric(&x, &y, &z);
        prop_assert!((lhs - rhs).abs() <= 1e-15);
    }

    #[test]
    fn finite_table_is_permutation_invariant(i in 0usize..5, j in 0usize..5, k in 0usize..5) {
        let s = FiniteTwoMetricSpace::demo5();
        let v = s.get(i, j, k);
        prop_assert_eq!(v, s.get(j, i, k));
        prop_assert_eq!(v, s.get(k, j, i));
        prop_assert_eq!(v, s.get(i, k, j));
        if i == j || j == k || i == k {
            prop_assert_eq!(v, 0.0);
        }
    }
}
