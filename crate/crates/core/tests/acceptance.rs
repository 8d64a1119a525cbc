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

//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

// NaN has to fail range checks, hence the negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{brute_force_lines, cross_norm, det, random_unit, random_valid_space, rng};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twometric::audit::{audit, AuditConfig, Axiom};
use twometric::baseline;
use twometric::certify::{certify, default_budget, CertInput};
use twometric::dynamics::{
    detect_outcome, make_sphere_map, measured_contraction_factor, orbit, Outcome,
    SphereContractionParams,
};
use twometric::finite::FiniteTwoMetricSpace;
use twometric::lines::{classify, enumerate_lines, Thresholds};
use twometric::quasi::{
    banach_direct, banach_multcost, banach_power, ray_contraction_demo, BanachRun, QuasiSpace,
};
use twometric::spaces::{
    cramer_check, lift, AreaBall, DeterminantSphere, PatchMetric, PatchPoint, SpherePoint,
};
use twometric::{TwoMetricSpace, WitnessSet};

type Check = Result<String, String>;
type Criterion = fn() -> Check;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let cfg = AuditConfig::with_samples(2000, 1);
    let axioms = [
        Axiom::Sym,
        Axiom::Tetr,
        Axiom::Z,
        Axiom::B,
        Axiom::Trans,
        Axiom::AsymmetricTriangle,
        Axiom::CostTriangle,
        Axiom::DphiLipschitz,
    ];
    let sphere = DeterminantSphere::new();
    let r1 = audit(&sphere, &cfg, &DeterminantSphere::default_witnesses(256)).map_err(err)?;
    let ball = AreaBall::default();
    let r2 = audit(
        &ball,
        &cfg,
        &WitnessSet::sampled(&ball, 256, 2).map_err(err)?,
    )
    .map_err(err)?;
    let elapsed = start.elapsed();
    let mut worst = 0.0f64;
    for (name, report) in [("det-sphere", &r1), ("area-ball", &r2)] {
        for a in axioms {
            let rec = report.record(a);
            ensure!(
                rec.samples >= 2000,
                "{name} {a}: only {} tuples",
                rec.samples
            );
            ensure!(
                rec.max_violation <= 1e-9,
                "{name} {a}: violation {:e} at {:?}",
                rec.max_violation,
                rec.witness
            );
            worst = worst.max(rec.max_violation);
        }
    }

    // independent check of Tetr and Trans on the sphere with a direct determinant
    let mut g = rng(10);
    for _ in 0..2000 {
        let [a, b, c, x, y] = [(); 5].map(|_| random_unit(&mut g));
        let d = |p, q, r| det(p, q, r).abs();
        ensure!(
            d(a, b, c) <= d(a, b, x) + d(b, c, x) + d(a, c, x) + 1e-12,
            "oracle Tetr"
        );
        ensure!(
            d(a, b, x) * d(c, x, y) <= d(a, x, y) + d(b, x, y) + 1e-12,
            "oracle Trans"
        );
    }
    ensure!(elapsed < Duration::from_secs(5), "runtime {elapsed:?}");
    Ok(format!(
        "max violation {worst:e} over 2 spaces, {elapsed:.2?}"
    ))
}

fn criterion_2() -> Check {
    let mut g = rng(20);
    let (mut count, mut worst, mut min_sum) = (0, 0.0f64, f64::INFINITY);
    while count < 500 {
        let [x, y, z, a] = [(); 4].map(|_| random_unit(&mut g));
        let base = det(x, y, z);
        if base.abs() < 1e-2 {
            continue;
        }
        let p = |v| SpherePoint::new(v).unwrap();
        let c = cramer_check(&p(x), &p(y), &p(z), &p(a)).map_err(err)?;
        // signed Cramer's rule as oracle for the eliminated coefficients
        let oracle = [
            det(a, y, z) / base,
            det(x, a, z) / base,
            det(x, y, a) / base,
        ];
        for (got, want) in [c.alpha, c.beta, c.gamma].iter().zip(oracle) {
            ensure!(
                (got - want).abs() <= 1e-9,
                "coefficient {got} vs Cramer {want}"
            );
        }
        worst = worst.max(c.residual);
        min_sum = min_sum.min(c.coefficient_sum);
        count += 1;
    }
    ensure!(worst <= 1e-9, "ratio residual {worst:e}");
    ensure!(min_sum >= 1.0 - 1e-12, "coefficient sum {min_sum}");
    Ok(format!(
        "500 quadruples, residual {worst:e}, min |a|+|b|+|c| {min_sum:.4}"
    ))
}

fn sphere_map(theta: f64) -> twometric::dynamics::DDecreasingMap<'static, SpherePoint> {
    make_sphere_map(SphereContractionParams {
        k: 0.1,
        e: 0.5,
        theta,
    })
    .unwrap()
}

fn criterion_3() -> Check {
    let space = DeterminantSphere::new();
    let map = sphere_map(PI / 7.0);
    let m = measured_contraction_factor(&map, &space, 2000, 3).map_err(err)?;
    let factor = m.factor.ok_or("no nondegenerate triple")?;
    ensure!(
        m.triples + m.skipped == 2000,
        "sampled {} triples",
        m.triples + m.skipped
    );
    ensure!(factor <= 0.8 + 1e-9, "measured factor {factor}");

    let w = DeterminantSphere::default_witnesses(64);
    let x0 = SpherePoint::new([0.8, 0.0, 0.6]).map_err(err)?;
    let trace = orbit(&map, &space, &x0, 200, &w).map_err(err)?;
    ensure!(
        trace.decay.holds(1e-9),
        "decay excess {:e}",
        trace.decay.max_excess
    );
    let pts: Vec<[f64; 3]> = trace.points.iter().take(60).map(|p| p.coords()).collect();
    let mut oracle_excess = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            for k in (j + 1)..pts.len() {
                oracle_excess =
                    oracle_excess.max(det(pts[i], pts[j], pts[k]).abs() - 0.8f64.powi(i as i32));
            }
        }
    }
    ensure!(
        oracle_excess <= 1e-9,
        "oracle decay excess {oracle_excess:e}"
    );
    Ok(format!(
        "measured factor {factor:.4} <= 0.8, decay excess {:e}",
        trace.decay.max_excess
    ))
}

fn criterion_4() -> Check {
    let space = DeterminantSphere::new();
    let w = DeterminantSphere::default_witnesses(256);
    let th = Thresholds::default();

    let start = Instant::now();
    let map = sphere_map(PI / 7.0);
    let det_line = detect_outcome(
        &map,
        &space,
        &SpherePoint::new([0.8, 0.0, 0.6]).map_err(err)?,
        200,
        &w,
        &th,
    );
    let t_line = start.elapsed();
    let Outcome::FixedLine(ev) = &det_line.outcome else {
        return Err(format!("theta = pi/7 gave {}", det_line.outcome.tag()));
    };
    let max_x3 = ev
        .line
        .members
        .iter()
        .map(|m| m.coords()[2].abs())
        .fold(0.0, f64::max);
    ensure!(
        max_x3 <= 1e-6,
        "line member off the equator: |x3| = {max_x3:e}"
    );
    ensure!(
        ev.invariance_defect <= 1e-6,
        "invariance defect {:e}",
        ev.invariance_defect
    );
    ensure!(ev.uniqueness.is_some(), "no uniqueness certificate");
    let bound = (PI / 7.0).sin();
    let mut min_res = f64::INFINITY;
    for i in 0..720 {
        let y = SpherePoint::equatorial(i as f64 * PI / 360.0);
        min_res = min_res.min(cross_norm(y.coords(), map.apply(&y).coords()));
    }
    ensure!(
        min_res >= 0.43 && min_res >= bound - 1e-6,
        "equatorial residual {min_res}"
    );
    ensure!(
        ev.min_fixed_residual >= 0.43,
        "member residual {}",
        ev.min_fixed_residual
    );

    let start = Instant::now();
    let det_point = detect_outcome(
        &sphere_map(0.0),
        &space,
        &SpherePoint::equatorial(0.9),
        200,
        &w,
        &th,
    );
    let t_point = start.elapsed();
    let Outcome::FixedPoint { residual, .. } = det_point.outcome else {
        return Err(format!("theta = 0 gave {}", det_point.outcome.tag()));
    };
    ensure!(residual <= 1e-10, "fixed point residual {residual:e}");
    ensure!(
        t_line < Duration::from_secs(2) && t_point < Duration::from_secs(2),
        "runtimes {t_line:?}, {t_point:?}"
    );
    Ok(format!(
        "FixedLine = equator ({} members, min phi(y,F(y)) {min_res:.4} >= sin(pi/7)); FixedPoint residual {residual:e}; {t_line:.2?} / {t_point:.2?}",
        ev.line.members.len()
    ))
}

fn criterion_5() -> Check {
    let mut g = rng(50);
    for t in 0..100 {
        let n = 3 + t % 4;
        let space = random_valid_space(&mut g, n, t);
        let got: Vec<Vec<usize>> = enumerate_lines(&space, 1e-12)
            .into_iter()
            .map(|l| l.members)
            .collect();
        let want = brute_force_lines(&space, 1e-12);
        ensure!(
            got == want,
            "space {t} (n = {n}): {got:?} vs oracle {want:?}"
        );
    }
    let demo: Vec<Vec<usize>> = enumerate_lines(&FiniteTwoMetricSpace::demo5(), 0.0)
        .into_iter()
        .map(|l| l.members)
        .collect();
    // a, b, c, p, q = 0..5
    let listed = vec![
        vec![0, 1, 2],
        vec![0, 3],
        vec![0, 4],
        vec![1, 3],
        vec![1, 4],
        vec![2, 3],
        vec![2, 4],
        vec![3, 4],
    ];
    ensure!(demo == listed, "demo lines {demo:?}");
    Ok("100 random spaces match the 2^n oracle; demo space has the 8 listed lines".into())
}

fn criterion_6() -> Check {
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
    )
    .map_err(err)?;
    let line = c.line().ok_or_else(|| format!("classified {}", c.tag()))?;
    ensure!(
        c.evidence.tri_cauchy_modulus == 0.0,
        "tri-Cauchy modulus {}",
        c.evidence.tri_cauchy_modulus
    );
    ensure!(
        c.evidence.cauchy_modulus == 1.0,
        "Cauchy modulus {}",
        c.evidence.cauchy_modulus
    );
    for m in &line.members {
        ensure!(m.coords()[2] == 0.0, "member {m:?} off the equator");
    }
    for t in [0.3, 1.1, 2.9] {
        ensure!(
            line.contains(&space, &SpherePoint::equatorial(t)),
            "equatorial point {t} not on the line"
        );
    }
    ensure!(
        !line.contains(&space, &SpherePoint::e3()),
        "pole on the line"
    );
    Ok(format!(
        "LineCase = equator, {} members; tri-Cauchy 0, Cauchy 1",
        line.members.len()
    ))
}

fn check_tail<P>(
    run: &BanachRun<P>,
    phi: impl Fn(&P, &P) -> f64,
    k: f64,
    c: f64,
) -> Result<usize, String> {
    let xs = &run.iterates;
    let phi01 = phi(&xs[0], &xs[1]);
    let mut pairs = 0;
    for n in 0..xs.len() {
        for m in (n + 1)..xs.len() {
            let bound = k.powi(n as i32) / (1.0 - c * k) * phi01 + 1e-12;
            ensure!(
                phi(&xs[n], &xs[m]) < bound,
                "tail bound fails at ({n}, {m})"
            );
            pairs += 1;
        }
    }
    Ok(pairs)
}

fn criterion_7() -> Check {
    let interval = QuasiSpace::interval(0.0, 1.0, 100, 1.0).map_err(err)?;
    let third = |x: &f64| x / 3.0;
    let run = banach_direct(&interval, &third, &1.0, 1.0 / 3.0, 30).map_err(err)?;
    ensure!(
        run.residual <= 1e-12 && run.fixed_point.abs() <= 1e-12,
        "interval run {run:?}"
    );
    let p1 = check_tail(&run, |a, b| (a - b).abs(), 1.0 / 3.0, 1.0)?;

    let (table, map) = ray_contraction_demo(12, 2.0 / 7.0).map_err(err)?;
    let q = QuasiSpace::from_finite(&table).map_err(err)?;
    let shift = |i: &usize| map[*i];
    let finite_run = banach_direct(&q, &shift, &1, 0.4, 100).map_err(err)?;
    ensure!(
        finite_run.fixed_point == 0 && finite_run.residual == 0.0,
        "finite run {finite_run:?}"
    );
    ensure!(
        (finite_run.k_measured - 0.4).abs() < 1e-12,
        "measured k {}",
        finite_run.k_measured
    );
    let p2 = check_tail(&finite_run, |a, b| table.phi(*a, *b), 0.4, 2.0)?;

    let q2 = QuasiSpace::interval(0.0, 1.0, 100, 2.0).map_err(err)?;
    let power = banach_power(&q2, &|x: &f64| 0.6 * x, &1.0, 0.6, 200).map_err(err)?;
    ensure!(power.power == Some(2), "power {:?}", power.power);
    ensure!(
        power.residual <= 1e-10,
        "power residual {:e}",
        power.residual
    );

    let with_cost = QuasiSpace::from_finite(&table)
        .map_err(err)?
        .with_cost(|_: &usize, _: &usize, _: &usize| 0.0, 0.0)
        .map_err(err)?;
    let mc = banach_multcost(&with_cost, &shift, &1, 0.4, 100).map_err(err)?;
    ensure!(
        mc.iterates == finite_run.iterates
            && mc.fixed_point == finite_run.fixed_point
            && mc.residual == finite_run.residual
            && mc.steps == finite_run.steps,
        "multiplicative-cost run differs from the direct run"
    );
    Ok(format!(
        "tail bound on {} pairs; power a = 2, residual {:e}; psi = 0 run identical",
        p1 + p2,
        power.residual
    ))
}

fn naive_patch(x: &PatchPoint, y: &PatchPoint, z: &PatchPoint) -> f64 {
    let (a, b, c) = (lift(x), lift(y), lift(z));
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    0.5 * cross_norm(u, v)
}

fn criterion_8() -> Check {
    let report = baseline::compute_convexity().map_err(err)?;
    let committed = baseline::committed_convexity().map_err(err)?;
    ensure!(report.c.is_finite() && report.c >= 1.0, "C = {}", report.c);
    ensure!(
        baseline::within(report.c, committed.c, baseline::REGRESSION_TOLERANCE),
        "C = {} vs baseline {}",
        report.c,
        committed.c
    );
    // replay the same seeded triples with the naive lifted area
    let patch = PatchMetric::new(report.r).map_err(err)?;
    let mut g = ChaCha8Rng::seed_from_u64(report.seed);
    let mut oracle = 1.0f64;
    for _ in 0..report.samples {
        let [x, y, z] = [(); 3].map(|_| patch.sample(&mut g));
        let u = [y.0[0] - x.0[0], y.0[1] - x.0[1]];
        let v = [z.0[0] - x.0[0], z.0[1] - x.0[1]];
        let dist = |a: &PatchPoint, b: &PatchPoint| (a.0[0] - b.0[0]).hypot(a.0[1] - b.0[1]);
        let flat =
            0.5 * (u[0] * v[1] - u[1] * v[0]).abs() + dist(&x, &y) * dist(&x, &z) * dist(&y, &z);
        let h = naive_patch(&x, &y, &z);
        if flat > 0.0 && h > 0.0 {
            oracle = oracle.max(h / flat).max(flat / h);
        }
    }
    ensure!(
        baseline::within(report.c, oracle, 1e-6),
        "C = {} vs naive replay {oracle}",
        report.c
    );
    Ok(format!(
        "C = {:.4} (baseline {:.4}, naive replay {oracle:.4})",
        report.c, committed.c
    ))
}

fn criterion_9() -> Check {
    let cal = baseline::committed_calibration().map_err(err)?;
    let fresh = baseline::compute_calibration().map_err(err)?;
    ensure!(
        baseline::within(fresh.c_prime, cal.c_prime, baseline::REGRESSION_TOLERANCE),
        "recalibrated C' = {} vs baseline {}",
        fresh.c_prime,
        cal.c_prime
    );
    let conv = baseline::committed_convexity().map_err(err)?.c;
    let a = [[0.25, 0.0], [0.0, 0.25]];
    let input =
        CertInput::new(|x: &[f64; 2]| [0.25 * x[0], 0.25 * x[1]], a, &cal, conv).map_err(err)?;
    let res = certify(&input, 1000, 9).map_err(err)?;
    ensure!(res.pass, "F = A rejected: {:?}", res.failures);
    let worst = res.worst_ratio.ok_or("no ratio")?;
    ensure!(
        worst <= cal.c_prime * 0.0625,
        "worst ratio {worst} > C' * 0.0625 = {}",
        cal.c_prime * 0.0625
    );

    let c = default_budget(&a, cal.c_a);
    let planted = move |x: &[f64; 2]| [(0.25 + 10.0 * c) * x[0], 0.25 * x[1]];
    let bad = certify(
        &CertInput::new(planted, a, &cal, conv).map_err(err)?,
        1000,
        9,
    )
    .map_err(err)?;
    ensure!(
        !bad.pass && bad.worst_ratio.is_none(),
        "planted map accepted"
    );
    let f = bad
        .failures
        .iter()
        .find(|f| f.hypothesis == "jacobian")
        .ok_or("no jacobian failure")?;
    ensure!(
        (f.value - 10.0 * c).abs() <= 1e-8,
        "reported deviation {} vs 10c' = {}",
        f.value,
        10.0 * c
    );
    // recompute the Jacobian at the witness by forward differences
    let h = 1e-7;
    let x = f.at;
    let fx = planted(&x);
    let d1 = planted(&[x[0] + h, x[1]]);
    let j11 = (d1[0] - fx[0]) / h;
    ensure!(
        (j11 - 0.25 - 10.0 * c).abs() < 1e-6,
        "witness Jacobian entry {j11}"
    );
    ensure!(
        bad.failures.iter().all(|f| f.hypothesis == "jacobian"),
        "spurious failures {:?}",
        bad.failures
    );
    Ok(format!(
        "A = 0.25I passes, worst {worst:.5} <= C' * 0.0625 = {:.5}; planted 10c' rejected at {:?}",
        cal.c_prime * 0.0625,
        f.at
    ))
}

fn criterion_10() -> Check {
    let mut g = rng(100);
    let mut min_k = f64::INFINITY;
    for t in 0..50 {
        let n = 3 + t % 5;
        let space = random_valid_space(&mut g, n, t);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut g);
        let check = space.surjective_contraction_check(&perm).map_err(err)?;
        ensure!(check.is_surjective, "permutation not surjective");
        let k = check.measured_k.ok_or("all triples degenerate")?;
        ensure!(
            k >= 1.0,
            "space {t}: measured k = {k} for permutation {perm:?}"
        );
        min_k = min_k.min(k);
    }
    Ok(format!("50 permutations, min measured k = {min_k}"))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("axiom suite", criterion_1),
        ("Cramer identities", criterion_2),
        ("contraction bound", criterion_3),
        ("fixed line vs fixed point", criterion_4),
        ("line enumeration oracle", criterion_5),
        ("alternating-sequence classification", criterion_6),
        ("quasi Banach", criterion_7),
        ("convexity sandwich", criterion_8),
        ("certifier", criterion_9),
        ("surjective lemma", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
