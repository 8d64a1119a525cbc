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

//! Fixed-point iteration on spaces with an asymmetric triangle inequality
//! `phi(x, y) <= phi(x, z) + C phi(z, y)`.
//!
//! [`banach_direct`] needs `k < 1/C`; [`banach_power`] handles any `k < 1`
//! by iterating `F^a` with `k^a < 1/C`; [`banach_multcost`] replaces the
//! constant `C` by a multiplicative cost `exp(psi)`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finite::FiniteTwoMetricSpace;
use crate::spaces::{area_metric, BallPoint};

/// Residual at which iteration stops.
pub const STOP_RESIDUAL: f64 = 1e-12;
/// Slack added to every sampled inequality.
const SLACK: f64 = 1e-12;

type Dist<'a, P> = Box<dyn Fn(&P, &P) -> f64 + 'a>;
type Cost<'a, P> = Box<dyn Fn(&P, &P, &P) -> f64 + 'a>;

/// A distance `phi` with asymmetric triangle constant `C`, the points on
/// which hypotheses are sampled, and optionally a cost `psi` bounded by `M`.
pub struct QuasiSpace<'a, P> {
    phi: Dist<'a, P>,
    c: f64,
    /// `phi(x, y) = 0` only when `x == y`.
    pub strict_reflexive: bool,
    samples: Vec<P>,
    cost: Option<(Cost<'a, P>, f64)>,
}

impl<P> QuasiSpace<'_, P> {
    pub fn phi(&self, x: &P, y: &P) -> f64 {
        (self.phi)(x, y)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn samples(&self) -> &[P] {
        &self.samples
    }

    pub fn cost_bound(&self) -> Option<f64> {
        self.cost.as_ref().map(|(_, m)| *m)
    }

    pub fn psi(&self, x: &P, y: &P, z: &P) -> Option<f64> {
        self.cost.as_ref().map(|(f, _)| f(x, y, z))
    }
}

impl<'a, P: Clone + PartialEq + std::fmt::Debug> QuasiSpace<'a, P> {
    pub fn new(phi: impl Fn(&P, &P) -> f64 + 'a, c: f64, samples: Vec<P>) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "C = {c} must be finite and >= 1"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument("no sample points".into()));
        }
        Ok(Self {
            phi: Box::new(phi),
            c,
            strict_reflexive: false,
            samples,
            cost: None,
        })
    }

    /// Attaches a cost `psi` with declared bound `M`.
    pub fn with_cost(mut self, psi: impl Fn(&P, &P, &P) -> f64 + 'a, m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cost bound M = {m} must be finite and >= 0"
            )));
        }
        self.cost = Some((Box::new(psi), m));
        Ok(self)
    }

    /// Sampled check of the space axioms.
    pub fn audit(&self) -> QuasiAudit {
        let s = &self.samples;
        let mut a = QuasiAudit::default();
        for x in s {
            a.max_self_distance = a.max_self_distance.max(self.phi(x, x).abs());
            for y in s {
                let pxy = self.phi(x, y);
                a.min_value = a.min_value.min(pxy);
                a.max_asymmetry = a.max_asymmetry.max((pxy - self.phi(y, x)).abs());
                for z in s {
                    let at = pxy - self.phi(x, z) - self.c * self.phi(z, y);
                    a.max_at_violation = a.max_at_violation.max(at);
                    if let Some((psi, _)) = &self.cost {
                        let p = psi(x, y, z);
                        a.max_abs_psi = a.max_abs_psi.max(p.abs());
                        let mc = pxy - (self.phi(x, z) + self.phi(z, y)) * p.exp();
                        a.max_multcost_violation = a.max_multcost_violation.max(mc);
                    }
                }
            }
        }
        a
    }

    /// `max phi(Fx, Fy) / phi(x, y)` over sample pairs and the extra points,
    /// with the pair attaining it. Pairs with `phi(x, y) = 0` must map to
    /// pairs with `phi = 0`; otherwise the factor is infinite.
    pub fn measure_contraction(&self, f: &dyn Fn(&P) -> P, extra: &[P]) -> (f64, Option<(P, P)>) {
        let pts: Vec<&P> = self.samples.iter().chain(extra.iter()).collect();
        let images: Vec<P> = pts.iter().map(|p| f(p)).collect();
        let mut best = (0.0f64, None);
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if i == j {
                    continue;
                }
                let num = self.phi(&images[i], &images[j]);
                let den = self.phi(pts[i], pts[j]);
                let ratio = if den > 0.0 {
                    num / den
                } else if num > 0.0 {
                    f64::INFINITY
                } else {
                    continue;
                };
                if ratio > best.0 {
                    best = (ratio, Some((pts[i].clone(), pts[j].clone())));
                }
            }
        }
        best
    }

    fn require_contraction(&self, f: &dyn Fn(&P) -> P, k: f64) -> Result<f64> {
        let (measured, witness) = self.measure_contraction(f, &[]);
        if measured > k + SLACK {
            let (x, y) = witness.expect("a ratio above k has a witness");
            return Err(Error::ContractionViolated(format!(
                "phi(Fx, Fy) / phi(x, y) = {measured} > k = {k} at x = {x:?}, y = {y:?}"
            )));
        }
        Ok(measured)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiAudit {
    pub min_value: f64,
    pub max_self_distance: f64,
    pub max_asymmetry: f64,
    pub max_at_violation: f64,
    pub max_multcost_violation: f64,
    pub max_abs_psi: f64,
}

impl Default for QuasiAudit {
    fn default() -> Self {
        Self {
            min_value: f64::INFINITY,
            max_self_distance: 0.0,
            max_asymmetry: 0.0,
            max_at_violation: f64::NEG_INFINITY,
            max_multcost_violation: f64::NEG_INFINITY,
            max_abs_psi: 0.0,
        }
    }
}

impl QuasiAudit {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_value >= -tol
            && self.max_self_distance <= tol
            && self.max_asymmetry <= tol
            && self.max_at_violation <= tol
            && self.max_multcost_violation <= tol
    }
}

impl<'a> QuasiSpace<'a, f64> {
    /// `[lo, hi]` with `phi = |x - y|`, sampled on `n + 1` grid points.
    pub fn interval(lo: f64, hi: f64, n: usize, c: f64) -> Result<Self> {
        if !(lo < hi) || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad interval [{lo}, {hi}] with {n} cells"
            )));
        }
        let samples = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        let mut s = Self::new(|x: &f64, y: &f64| (x - y).abs(), c, samples)?;
        s.strict_reflexive = true;
        Ok(s)
    }
}

impl<'a> QuasiSpace<'a, usize> {
    /// The associated distance of a finite 2-metric, with `C = 2`.
    pub fn from_finite(space: &'a FiniteTwoMetricSpace) -> Result<Self> {
        Self::new(
            move |x: &usize, y: &usize| space.phi(*x, *y),
            2.0,
            (0..space.len()).collect(),
        )
    }
}

/// Origin, a ray of `n` points `0.5 r^i` on the first axis and the point
/// `(0, 0.5)`, under the area metric; with the map sending each ray point to
/// the next, the last ray point and `(0, 0.5)` to the origin.
///
/// Indices: 0 is the origin, `1..=n` the ray, `n + 1` the off-ray point. The
/// map contracts the associated distance by `max(r, r / (1 - r))`.
pub fn ray_contraction_demo(n: usize, ratio: f64) -> Result<(FiniteTwoMetricSpace, Vec<usize>)> {
    if n < 2 || !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and 0 < ratio < 1, got {n}, {ratio}"
        )));
    }
    let mut pts = vec![BallPoint(vec![0.0, 0.0])];
    pts.extend((0..n).map(|i| BallPoint(vec![0.5 * ratio.powi(i as i32), 0.0])));
    pts.push(BallPoint(vec![0.0, 0.5]));
    let mut space = FiniteTwoMetricSpace::zeros(pts.len());
    for (i, j, k, _) in space.clone().triples() {
        space.set(i, j, k, area_metric(&pts[i], &pts[j], &pts[k]))?;
    }
    let mut map = vec![0; n + 2];
    for (i, m) in map.iter_mut().enumerate().take(n).skip(1) {
        *m = i + 1;
    }
    Ok((space, map))
}

/// Outcome of a fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct BanachRun<P> {
    pub start: P,
    /// `x_0, ..., x_steps` of the iterated map (`F^a` for power runs).
    pub iterates: Vec<P>,
    pub fixed_point: P,
    /// `phi(z, F(z))` for the final point `z` and the original `F`.
    pub residual: f64,
    pub steps: usize,
    pub k_claimed: f64,
    pub k_measured: f64,
    pub c: f64,
    /// Iteration exponent of the power trick.
    pub power: Option<u32>,
    /// Every recorded pair `n < m` satisfied the tail bound.
    pub tail_bound_ok: bool,
    /// Largest `phi(x_n, x_m) - bound(n, m)`; negative when the bound holds.
    pub max_tail_excess: f64,
}

impl<P: Serialize> BanachRun<P> {
    pub fn to_json(&self) -> Value {
        json!({
            "fixed_point": self.fixed_point,
            "residual": self.residual,
            "steps": self.steps,
            "k_claimed": self.k_claimed,
            "k_measured": self.k_measured,
            "C": self.c,
            "power": self.power,
            "tail_bound_ok": self.tail_bound_ok,
            "max_tail_excess": self.max_tail_excess,
        })
    }
}

fn iterate<P: Clone>(space: &QuasiSpace<'_, P>, f: &dyn Fn(&P) -> P, x0: &P, n: usize) -> Vec<P> {
    let mut xs = vec![x0.clone()];
    while xs.len() <= n {
        let x = xs.last().expect("non-empty");
        let fx = f(x);
        let done = space.phi(x, &fx) <= STOP_RESIDUAL;
        xs.push(fx);
        if done {
            break;
        }
    }
    xs
}

/// Max over recorded `n < m` of `phi(x_n, x_m) - bound(n, m)`.
fn tail_excess<P>(space: &QuasiSpace<'_, P>, xs: &[P], bound: impl Fn(usize, usize) -> f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for n in 0..xs.len() {
        for m in (n + 1)..xs.len() {
            worst = worst.max(space.phi(&xs[n], &xs[m]) - bound(n, m));
        }
    }
    worst
}

fn finish<P: Clone>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    xs: Vec<P>,
    k: f64,
    k_measured: f64,
    power: Option<u32>,
    excess: f64,
) -> BanachRun<P> {
    let z = xs.last().expect("non-empty").clone();
    BanachRun {
        start: xs[0].clone(),
        residual: space.phi(&z, &f(&z)),
        steps: xs.len() - 1,
        fixed_point: z,
        iterates: xs,
        k_claimed: k,
        k_measured,
        c: space.c,
        power,
        tail_bound_ok: excess <= SLACK,
        max_tail_excess: excess,
    }
}

fn run_direct<P: Clone + PartialEq + std::fmt::Debug>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    x0: &P,
    k: f64,
    n: usize,
) -> (Vec<P>, f64, f64) {
    let xs = iterate(space, f, x0, n);
    let (k_orbit, _) = space.measure_contraction(f, &xs);
    let phi01 = space.phi(&xs[0], &xs[1]);
    let scale = phi01 / (1.0 - space.c * k);
    let excess = tail_excess(space, &xs, |n, _| k.powi(n as i32) * scale);
    (xs, k_orbit, excess)
}

/// Iterates `F` from `x0` for at most `n` steps, stopping once
/// `phi(x, F(x)) <= 1e-12`.
///
/// Requires `k < 1/C` and checks `phi(Fx, Fy) <= k phi(x, y)` on the sample
/// points. The run records whether `phi(x_n, x_m) < k^n / (1 - Ck) phi(x_0, x_1)`
/// held on every recorded pair.
pub fn banach_direct<P: Clone + PartialEq + std::fmt::Debug>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    x0: &P,
    k: f64,
    n: usize,
) -> Result<BanachRun<P>> {
    if !(k >= 0.0 && k * space.c < 1.0) {
        return Err(Error::Refused(format!(
            "k = {k} is not below 1/C = {}; use the power iteration",
            1.0 / space.c
        )));
    }
    space.require_contraction(f, k)?;
    let (xs, k_measured, excess) = run_direct(space, f, x0, k, n);
    Ok(finish(space, f, xs, k, k_measured, None, excess))
}

/// Smallest `a >= 1` with `k^a < 1/C`.
pub fn minimal_power(k: f64, c: f64) -> Result<u32> {
    if !(0.0..1.0).contains(&k) || c < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= k < 1 and C >= 1, got k = {k}, C = {c}"
        )));
    }
    let mut a = 1u32;
    let mut ka = k;
    while ka >= 1.0 / c {
        a += 1;
        ka *= k;
    }
    Ok(a)
}

/// Fixed point of a contraction with any `k < 1`: runs [`banach_direct`]
/// on `F^a` for the minimal `a` with `k^a < 1/C`. The residual reported is
/// that of `F` itself.
pub fn banach_power<P: Clone + PartialEq + std::fmt::Debug>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    x0: &P,
    k: f64,
    n: usize,
) -> Result<BanachRun<P>> {
    let a = minimal_power(k, space.c)?;
    space.require_contraction(f, k)?;
    let fa = |x: &P| (0..a).fold(x.clone(), |y, _| f(&y));
    let ka = k.powi(a as i32);
    let (xs, _, excess) = run_direct(space, &fa, x0, ka, n);
    let (k_measured, _) = space.measure_contraction(f, &xs);
    Ok(finish(space, f, xs, k, k_measured, Some(a), excess))
}

/// Fixed point under the multiplicative-cost triangle inequality
/// `phi(x, y) <= (phi(x, z) + phi(z, y)) exp(psi(x, y, z))`.
///
/// Checks the `phi`-contraction, the `psi`-contraction
/// `psi(Fx, Fy, Fz) <= k psi(x, y, z)` on sample triples where both sides
/// are positive, and `|psi| <= M`. The tail bound is
/// `phi(x_n, x_m) <= phi(x_0, x_1) sum_{j < m-n} k^(n+j) exp(M (k^n + ... + k^(n+j)))`.
pub fn banach_multcost<P: Clone + PartialEq + std::fmt::Debug>(
    space: &QuasiSpace<'_, P>,
    f: &dyn Fn(&P) -> P,
    x0: &P,
    k: f64,
    n: usize,
) -> Result<BanachRun<P>> {
    let Some((psi, m)) = &space.cost else {
        return Err(Error::InvalidArgument("space has no cost function".into()));
    };
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in [0, 1)"
        )));
    }
    space.require_contraction(f, k)?;
    let s = &space.samples;
    let images: Vec<P> = s.iter().map(f).collect();
    for (i, x) in s.iter().enumerate() {
        for (j, y) in s.iter().enumerate() {
            for (l, z) in s.iter().enumerate() {
                let before = psi(x, y, z);
                if before.abs() > *m {
                    return Err(Error::CostUnbounded {
                        value: before.abs(),
                        bound: *m,
                    });
                }
                let after = psi(&images[i], &images[j], &images[l]);
                if before > 0.0 && after > 0.0 && after > k * before + SLACK {
                    return Err(Error::ContractionViolated(format!(
                        "psi(Fx, Fy, Fz) = {after} > k psi(x, y, z) = {} at ({x:?}, {y:?}, {z:?})",
                        k * before
                    )));
                }
            }
        }
    }

    let xs = iterate(space, f, x0, n);
    let (k_measured, _) = space.measure_contraction(f, &xs);
    let phi01 = space.phi(&xs[0], &xs[1]);
    let len = xs.len();
    let mut bounds = vec![vec![0.0; len]; len];
    for (start, row) in bounds.iter_mut().enumerate() {
        let (mut kpow, mut exponent, mut total) = (k.powi(start as i32), 0.0, 0.0);
        for entry in row.iter_mut().skip(start + 1) {
            exponent += kpow;
            total += kpow * (m * exponent).exp();
            *entry = phi01 * total;
            kpow *= k;
        }
    }
    let excess = tail_excess(space, &xs, |a, b| bounds[a][b]);
    Ok(finish(space, f, xs, k, k_measured, None, excess))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_third() {
        let s = QuasiSpace::interval(0.0, 1.0, 100, 1.0).unwrap();
        let run = banach_direct(&s, &|x: &f64| x / 3.0, &1.0, 1.0 / 3.0, 30).unwrap();
        assert!(run.residual <= 1e-12);
        assert!(run.fixed_point.abs() <= 1e-12);
        assert!(run.steps <= 30);
        assert!(run.tail_bound_ok);
    }

    #[test]
    fn refusal_and_violation() {
        let s = QuasiSpace::interval(0.0, 1.0, 10, 2.0).unwrap();
        let r = banach_direct(&s, &|x: &f64| 0.6 * x, &1.0, 0.6, 10);
        assert!(matches!(r, Err(Error::Refused(_))));
        let r = banach_direct(&s, &|x: &f64| 0.45 * x, &1.0, 0.4, 10);
        assert!(matches!(r, Err(Error::ContractionViolated(_))));
    }

    #[test]
    fn minimal_powers() {
        assert_eq!(minimal_power(0.6, 2.0).unwrap(), 2);
        assert_eq!(minimal_power(0.6, 1.0).unwrap(), 1);
        assert_eq!(minimal_power(0.99, 2.0).unwrap(), 69);
        assert!(minimal_power(1.0, 2.0).is_err());
    }

    #[test]
    fn power_runs() {
        let s = QuasiSpace::interval(0.0, 1.0, 50, 2.0).unwrap();
        let run = banach_power(&s, &|x: &f64| 0.6 * x, &1.0, 0.6, 200).unwrap();
        assert_eq!(run.power, Some(2));
        assert!(run.residual <= 1e-10);
        assert!(run.tail_bound_ok);
        let run = banach_power(&s, &|x: &f64| 0.99 * x, &1.0, 0.99, 400).unwrap();
        assert_eq!(run.power, Some(69));
        assert!(run.residual <= 1e-10, "{}", run.residual);
    }

    #[test]
    fn multcost_interval() {
        let s = QuasiSpace::interval(0.0, 1.0, 20, 1.0)
            .unwrap()
            .with_cost(|_: &f64, _: &f64, z: &f64| 0.1 * z.abs(), 0.1)
            .unwrap();
        assert!(s.audit().holds(1e-12));
        let run = banach_multcost(&s, &|x: &f64| x / 2.0, &1.0, 0.5, 100).unwrap();
        assert!(run.fixed_point.abs() <= 1e-12);
        assert!(run.tail_bound_ok);

        let bad = QuasiSpace::interval(0.0, 1.0, 20, 1.0)
            .unwrap()
            .with_cost(
                |x: &f64, _: &f64, _: &f64| if *x > 0.25 { 0.1 } else { 0.2 },
                1.0,
            )
            .unwrap();
        let r = banach_multcost(&bad, &|x: &f64| x / 2.0, &1.0, 0.5, 100);
        assert!(matches!(r, Err(Error::ContractionViolated(_))));

        let unbounded = QuasiSpace::interval(0.0, 1.0, 20, 1.0)
            .unwrap()
            .with_cost(|_: &f64, _: &f64, z: &f64| 5.0 * z, 1.0)
            .unwrap();
        let r = banach_multcost(&unbounded, &|x: &f64| x / 2.0, &1.0, 0.5, 100);
        assert!(matches!(r, Err(Error::CostUnbounded { .. })));
    }

    #[test]
    fn ray_demo_contracts_by_ratio_over_complement() {
        let (space, map) = ray_contraction_demo(12, 2.0 / 7.0).unwrap();
        let q = QuasiSpace::from_finite(&space).unwrap();
        assert!(q.audit().holds(1e-12));
        let f = |i: &usize| map[*i];
        let (k, _) = q.measure_contraction(&f, &[]);
        assert!((k - 0.4).abs() < 1e-12, "{k}");
        let run = banach_direct(&q, &f, &13, 0.4, 50).unwrap();
        assert_eq!(run.fixed_point, 0);
        assert_eq!(run.residual, 0.0);
        assert!(run.tail_bound_ok);
    }
}
