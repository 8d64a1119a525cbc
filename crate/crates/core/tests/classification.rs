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

//! Properties of sequence classification and of the lines of finite spaces.

mod common;

use std::f64::consts::PI;

use common::{random_valid_space, rng};
use twometric::audit::{audit, AuditConfig, Axiom};
use twometric::finite::FiniteTwoMetricSpace;
use twometric::lines::{classify, enumerate_lines, lim_residual, SequenceClass, Thresholds};
use twometric::spaces::{DeterminantSphere, SpherePoint};
use twometric::WitnessSet;

fn alternating(n: usize) -> Vec<SpherePoint> {
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                SpherePoint::e1()
            } else {
                SpherePoint::e2()
            }
        })
        .collect()
}

#[test]
fn whole_equator_passes_for_the_alternating_sequence() {
    let space = DeterminantSphere::new();
    let seq = alternating(100);
    let eps = Thresholds::default().lim;
    for i in 0..360 {
        let y = SpherePoint::equatorial(i as f64 * PI / 180.0);
        let est = lim_residual(&space, &y, &seq, 50).unwrap();
        assert!(
            est.residual <= eps,
            "equatorial point {i} deg: {}",
            est.residual
        );
    }
    // d(y, e1, e2) = |y3|, so a point just off the equator fails
    let off = SpherePoint::new([1.0, 0.0, 1e-3]).unwrap();
    let r = lim_residual(&space, &off, &seq, 50).unwrap().residual;
    assert!((r - off.coords()[2]).abs() < 1e-15 && r > eps);
}

#[test]
fn passers_are_colinear_within_the_derived_bound() {
    let space = DeterminantSphere::new();
    let c = classify(
        &space,
        &alternating(100),
        &DeterminantSphere::default_witnesses(256),
        &Thresholds::default(),
    )
    .unwrap();
    let p = &c.evidence.passers;
    assert!(p.len() >= 3);
    let bound = c.evidence.lim_colinearity_bound;
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate().skip(i + 1) {
            for q in &p[(j + 1)..] {
                let d = twometric::spaces::det_metric(&a.point, &b.point, &q.point);
                assert!(d <= bound + 1e-15, "{d} > {bound}");
            }
        }
    }
}

#[test]
fn convergent_sequence_is_cauchy() {
    let space = DeterminantSphere::new();
    let seq: Vec<SpherePoint> = (0..80)
        .map(|i| SpherePoint::new([1.0, 0.5f64.powi(i), 0.3 * 0.5f64.powi(i)]).unwrap())
        .collect();
    let c = classify(
        &space,
        &seq,
        &DeterminantSphere::default_witnesses(64),
        &Thresholds::default(),
    )
    .unwrap();
    let SequenceClass::CauchySequence { limit } = &c.class else {
        panic!("classified {}", c.tag());
    };
    assert!((limit.coords()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn accumulation_points_pass() {
    // even terms converge to e1, odd terms to e2
    let space = DeterminantSphere::new();
    let seq: Vec<SpherePoint> = (0..100)
        .map(|i| {
            let t = 0.5f64.powi(i);
            if i % 2 == 0 {
                SpherePoint::new([1.0, 0.0, t]).unwrap()
            } else {
                SpherePoint::new([t, 1.0, t]).unwrap()
            }
        })
        .collect();
    for y in [SpherePoint::e1(), SpherePoint::e2()] {
        let r = lim_residual(&space, &y, &seq, 50).unwrap().residual;
        assert!(r <= Thresholds::default().lim, "{r}");
    }
    let c = classify(
        &space,
        &seq,
        &DeterminantSphere::default_witnesses(64),
        &Thresholds::default(),
    )
    .unwrap();
    assert_eq!(c.tag(), "LineCase");
    assert!(!c.line().unwrap().contains(&space, &SpherePoint::e3()));
}

#[test]
fn distinct_lines_share_at_most_one_distinguishable_point() {
    let mut g = rng(7);
    for t in 0..60 {
        let space = random_valid_space(&mut g, 3 + t % 5, t);
        let lines = enumerate_lines(&space, 1e-12);
        for (i, l) in lines.iter().enumerate() {
            for m in &lines[(i + 1)..] {
                let common: Vec<usize> = l
                    .members
                    .iter()
                    .copied()
                    .filter(|a| m.members.contains(a))
                    .collect();
                for (k, &a) in common.iter().enumerate() {
                    for &b in &common[(k + 1)..] {
                        assert_eq!(
                            space.phi(a, b),
                            0.0,
                            "lines {:?} and {:?} share {a}, {b}",
                            l.members,
                            m.members
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn great_circle_subset_fails_only_nondegeneracy() {
    let circle: Vec<SpherePoint> = (0..12)
        .map(|i| SpherePoint::equatorial(i as f64 * PI / 12.0))
        .collect();
    let space = FiniteTwoMetricSpace::tabulate(&DeterminantSphere::new(), &circle);
    let w = WitnessSet::exhaustive(&space).unwrap();
    let report = audit(&space, &AuditConfig::default(), &w).unwrap();
    assert!(report.exhaustive);
    for a in [Axiom::Sym, Axiom::Tetr, Axiom::Z, Axiom::B, Axiom::Trans] {
        assert!(report.holds(a), "{a}");
    }
    assert!(!report.holds(Axiom::N));
    assert_eq!(report.failures(&[Axiom::N]).len(), 0);
}
