//! Numeric checks of the geometric facts the coreset relies on.
//!
//! Each `check_*`/`*_slack` function evaluates one inequality on given
//! points; each `sweep_*` function runs one over seeded random inputs and
//! returns a [`SweepReport`]. Trial `i` of a sweep draws from
//! [`substream`]`(seed, i)`, so results do not depend on thread scheduling.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::Coreset;
use crate::error::{Error, Result};
use crate::hyperbolic::{
    angle_at_origin, dist_h, dist_h_arcosh, dist_origin, geodesic_distance_to_origin, gromov_product, midpoint,
    BallPoint, GeodesicParam, Translation, LOG3,
};
use crate::point_set::PointSet;
use crate::queries::{approx_diametral_pair, diameter_exact, farthest_approx, farthest_exact};
use crate::sampling::{generate, random_direction, random_point, substream, Generator};

/// Hyperbolicity constant of the ball.
pub const DELTA: f64 = LOG3;
/// Every geodesic triangle of the ball is this thin.
pub const THINNESS: f64 = LOG3;
/// Largest sampling radius for [`sweep_isometry`]. Images of translations
/// then stay within radius 16, where `f64` coordinates still fix distances
/// to about `1e-11` relative; farther out the representation itself is off
/// by more than the `1e-10` tolerance.
pub const ISOMETRY_RADIUS: f64 = 8.0;

/// Half the gap between the two largest of the three pair sums, the smallest
/// `δ` for which the four-point condition holds on this quadruple.
#[derive(Debug, Clone, PartialEq)]
pub struct FourPointWitness {
    pub points: [BallPoint; 4],
    pub delta_witness: f64,
}

impl FourPointWitness {
    pub fn new(t: BallPoint, u: BallPoint, v: BallPoint, w: BallPoint) -> Self {
        let delta_witness = four_point_delta(&t, &u, &v, &w);
        FourPointWitness {
            points: [t, u, v, w],
            delta_witness,
        }
    }
}

pub fn four_point_delta(t: &BallPoint, u: &BallPoint, v: &BallPoint, w: &BallPoint) -> f64 {
    let mut s = [
        dist_h(t, u) + dist_h(v, w),
        dist_h(t, v) + dist_h(u, w),
        dist_h(t, w) + dist_h(u, v),
    ];
    s.sort_by(|a, b| b.total_cmp(a));
    ((s[0] - s[1]) / 2.0).max(0.0)
}

/// The tripod a triangle folds onto: leg `x` has length `(y|z)_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripodMap {
    pub triangle: [BallPoint; 3],
    pub legs: [f64; 3],
}

impl TripodMap {
    pub fn new(u: BallPoint, v: BallPoint, w: BallPoint) -> Self {
        let legs = [
            gromov_product(&v, &w, &u).max(0.0),
            gromov_product(&u, &w, &v).max(0.0),
            gromov_product(&u, &v, &w).max(0.0),
        ];
        TripodMap {
            triangle: [u, v, w],
            legs,
        }
    }

    /// Largest distance between two points of different sides that map to
    /// the same tripod point, over `samples` positions on each leg.
    pub fn defect(&self, samples: usize) -> f64 {
        let [u, v, w] = &self.triangle;
        let sides = [
            (
                u,
                GeodesicParam::new(u.clone(), v.clone()),
                GeodesicParam::new(u.clone(), w.clone()),
            ),
            (
                v,
                GeodesicParam::new(v.clone(), u.clone()),
                GeodesicParam::new(v.clone(), w.clone()),
            ),
            (
                w,
                GeodesicParam::new(w.clone(), u.clone()),
                GeodesicParam::new(w.clone(), v.clone()),
            ),
        ];
        let mut worst = 0.0f64;
        for (leg, (_, a, b)) in self.legs.iter().zip(&sides) {
            let leg = leg.min(a.length()).min(b.length());
            if leg <= 0.0 || samples == 0 {
                continue;
            }
            for i in 0..samples {
                let s = if samples == 1 {
                    leg
                } else {
                    leg * i as f64 / (samples - 1) as f64
                };
                if let (Ok(x), Ok(y)) = (a.point_at(s), b.point_at(s)) {
                    worst = worst.max(dist_h(&x, &y));
                }
            }
        }
        worst
    }
}

/// Thinness defect of the triangle `u, v, w`; see [`TripodMap::defect`].
pub fn thin_triangle_defect(u: &BallPoint, v: &BallPoint, w: &BallPoint, samples: usize) -> f64 {
    TripodMap::new(u.clone(), v.clone(), w.clone()).defect(samples)
}

/// `d(u, v) <= max(d(t, u), d(t, v)) + 2δ`, for quadruples with
/// `d(s, t) >= max(d(s, u), d(s, v))`. Inputs violating that are rejected.
pub fn check_lemma_chepoi(s: &BallPoint, t: &BallPoint, u: &BallPoint, v: &BallPoint) -> Result<bool> {
    if dist_h(s, t) < dist_h(s, u).max(dist_h(s, v)) {
        return Err(Error::Domain("requires d(s,t) >= max(d(s,u), d(s,v))".into()));
    }
    Ok(chepoi_excess(t, u, v) <= 1e-9)
}

fn chepoi_excess(t: &BallPoint, u: &BallPoint, v: &BallPoint) -> f64 {
    dist_h(u, v) - dist_h(t, u).max(dist_h(t, v)) - 2.0 * DELTA
}

/// Distances from the point `m` of `[q, f(q)]` at distance
/// `diam/2 - log 3` from `f(q)` to two midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointCheck {
    /// To the midpoint of the two-scan approximate diametral pair;
    /// at most `3δ + 4δ' = 7 log 3`.
    pub to_approx_midpoint: f64,
    /// To the midpoint of an exact diametral pair; at most `δ + 2δ' = 3 log 3`.
    pub to_exact_midpoint: f64,
}

/// Returns `None` when `diam/2 - log 3` falls outside `[0, d(q, f(q))]`.
/// Uses the quadratic diameter oracle.
pub fn check_midpoint_lemma(points: &PointSet, q: &BallPoint) -> Result<Option<MidpointCheck>> {
    let far = farthest_exact(points, q)?;
    let diam = diameter_exact(points)?;
    let approx = approx_diametral_pair(points)?;
    let qp = points.get(far.index);
    let s = diam.distance / 2.0 - DELTA;
    if s < 0.0 || s > far.distance {
        return Ok(None);
    }
    // walk from f(q) toward q
    let m = GeodesicParam::new(qp.clone(), q.clone()).point_at(s)?;
    let m_hat = midpoint(points.get(approx.i), points.get(approx.j))?;
    let m_star = midpoint(points.get(diam.i), points.get(diam.j))?;
    Ok(Some(MidpointCheck {
        to_approx_midpoint: dist_h(&m, &m_hat),
        to_exact_midpoint: dist_h(&m, &m_star),
    }))
}

/// `d(u, O) + d(O, v) - d(u, v) - θ²` with `θ = π - ∠uOv`; `None` unless
/// `θ < 1`. Nonpositive values confirm the bound.
pub fn angle_slack(u: &BallPoint, v: &BallPoint) -> Option<f64> {
    let theta = PI - angle_at_origin(u, v).ok()?;
    if theta >= 1.0 {
        return None;
    }
    Some(dist_origin(u) + dist_origin(v) - dist_h(u, v) - theta * theta)
}

/// For a geodesic whose endpoints approach the sphere at angle
/// `π - φ` around the origin, realized by points of norm `1 - 1e-9`:
/// its Euclidean distance `β` to the origin, with `φ - πβ` and `4β - φ`.
/// Both margins are nonnegative up to the finite-endpoint error.
pub fn chord_angle_margins(phi: f64, plane: (&[f64], &[f64])) -> Result<(f64, f64, f64)> {
    let (e1, e2) = plane;
    let half = (PI - phi) / 2.0;
    let r = 1.0 - 1e-9;
    let at = |a: f64| -> Result<BallPoint> {
        BallPoint::new(
            e1.iter()
                .zip(e2)
                .map(|(x, y)| r * (a.cos() * x + a.sin() * y))
                .collect(),
        )
    };
    let (u, v) = (at(half)?, at(-half)?);
    let d = geodesic_distance_to_origin(&u, &v);
    let beta = (d / 2.0).tanh();
    Ok((beta, phi - PI * beta, 4.0 * beta - phi))
}

/// `ψ - 4πβ`, with `ψ = π - ∠uOv` and `β` the hyperbolic distance from the
/// origin to `[u, v]`; `None` unless both points are at least `log 3` from
/// the origin and `β < log 3`. Negative values confirm the bound.
pub fn near_geodesic_angle_excess(u: &BallPoint, v: &BallPoint) -> Option<f64> {
    if dist_origin(u) < LOG3 || dist_origin(v) < LOG3 {
        return None;
    }
    let beta = geodesic_distance_to_origin(u, v);
    if beta >= LOG3 {
        return None;
    }
    let psi = PI - angle_at_origin(u, v).ok()?;
    Some(psi - 4.0 * PI * beta)
}

/// Outcome of one seeded sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub check: String,
    pub trials: usize,
    /// Trials whose inputs met the check's preconditions.
    pub applicable: usize,
    pub violations: usize,
    /// Largest observed value of the checked quantity.
    pub worst: f64,
    /// The quantity must not exceed this.
    pub bound: f64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// `bound - worst`; negative on failure.
    pub fn margin(&self) -> f64 {
        self.bound - self.worst
    }
}

/// Runs `trial` for every index and compares each applicable value to
/// `bound`. NaN counts as a violation.
pub fn sweep<F>(check: &str, seed: u64, trials: usize, bound: f64, trial: F) -> SweepReport
where
    F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync,
{
    let values: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut substream(seed, i as u64)))
        .collect();
    let mut report = SweepReport {
        check: check.to_string(),
        trials,
        applicable: 0,
        violations: 0,
        worst: f64::NEG_INFINITY,
        bound,
    };
    for v in values.into_iter().flatten() {
        report.applicable += 1;
        if v.is_nan() || v > bound {
            report.violations += 1;
        }
        if v.is_nan() {
            report.worst = f64::NAN;
        } else if !report.worst.is_nan() {
            report.worst = report.worst.max(v);
        }
    }
    report
}

/// Point at hyperbolic radius `r` in direction `dir`.
fn polar(dir: &[f64], r: f64) -> BallPoint {
    BallPoint::from_polar(dir, r).expect("radius below the guard")
}

/// Largest triangle-inequality violation and asymmetry over random triples.
pub fn sweep_metric(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("metric axioms", seed, trials, 1e-10, |rng| {
        let [u, v, w] = [0, 1, 2].map(|_| random_point(rng, dim, r_max));
        let tri = dist_h(&u, &w) - dist_h(&u, &v) - dist_h(&v, &w);
        let sym = (dist_h(&u, &v) - dist_h(&v, &u)).abs();
        let zero = dist_h(&u, &u);
        let positive = if u != v && dist_h(&u, &v) <= 0.0 { 1.0 } else { 0.0 };
        Some(tri.max(sym).max(zero).max(positive))
    })
}

/// Largest relative disagreement between the log and arcosh forms of the
/// distance, for norms up to `max_norm`.
pub fn sweep_formula_agreement(seed: u64, trials: usize, dim: usize, max_norm: f64) -> SweepReport {
    sweep("log and arcosh forms agree", seed, trials, 1e-8, |rng| {
        let mut pt = || {
            let dir = random_direction(rng, dim);
            let r: f64 = rng.random_range(0.0..=max_norm);
            BallPoint::new(dir.iter().map(|x| x * r).collect()).expect("inside the guard")
        };
        let (u, v) = (pt(), pt());
        let a = dist_h(&u, &v);
        let b = dist_h_arcosh(&u, &v);
        Some(if a == 0.0 && b == 0.0 {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        })
    })
}

/// Round-trip error of translations and their relative distortion of
/// distances.
pub fn sweep_isometry(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("translation round trip and isometry", seed, trials, 1e-10, |rng| {
        let h = random_point(rng, dim, r_max);
        let u = random_point(rng, dim, r_max);
        let v = random_point(rng, dim, r_max);
        let fwd = Translation::forward(h.clone());
        let inv = Translation::inverse(h).ok()?;
        let (tu, tv) = (fwd.apply(&u).ok()?, fwd.apply(&v).ok()?);
        let back = inv.apply(&tu).ok()?;
        let round: f64 = back
            .coords()
            .iter()
            .zip(u.coords())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let d0 = dist_h(&u, &v);
        let d1 = dist_h(&tu, &tv);
        let rel = if d0 == 0.0 { d1 } else { (d1 - d0).abs() / d0 };
        Some(round.max(rel))
    })
}

/// Largest four-point witness over random quadruples.
pub fn sweep_four_point(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("four-point condition", seed, trials, DELTA + 1e-9, |rng| {
        let [t, u, v, w] = [0, 1, 2, 3].map(|_| random_point(rng, dim, r_max));
        Some(four_point_delta(&t, &u, &v, &w))
    })
}

/// Largest thinness defect over random triangles.
pub fn sweep_thin_triangles(seed: u64, trials: usize, samples: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("thin triangles", seed, trials, THINNESS + 1e-6, |rng| {
        let [u, v, w] = [0, 1, 2].map(|_| random_point(rng, dim, r_max));
        Some(thin_triangle_defect(&u, &v, &w, samples))
    })
}

/// Pairs with `θ < 1`: `θ` drawn uniformly, the second point placed at
/// angle `π - θ` from the first in a random plane.
pub fn sweep_angle_slack(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("triangle slack at the origin <= θ²", seed, trials, 1e-12, |rng| {
        let e1 = random_direction(rng, dim);
        let e2 = orthonormal_to(rng, &e1);
        let theta: f64 = rng.random_range(0.0..1.0);
        let a = PI - theta;
        let dir2: Vec<f64> = e1.iter().zip(&e2).map(|(x, y)| a.cos() * x + a.sin() * y).collect();
        let ru: f64 = rng.random_range(1e-6..=r_max);
        let rv: f64 = rng.random_range(1e-6..=r_max);
        angle_slack(&polar(&e1, ru), &polar(&dir2, rv))
    })
}

/// Largest violation of `πβ <= φ <= 4β` for near-ideal geodesics.
pub fn sweep_chord_angle(seed: u64, trials: usize, dim: usize) -> SweepReport {
    sweep("πβ <= φ <= 4β", seed, trials, 1e-6, |rng| {
        let e1 = random_direction(rng, dim);
        let e2 = orthonormal_to(rng, &e1);
        let phi: f64 = rng.random_range(1e-3..PI - 1e-3);
        let (_, lower, upper) = chord_angle_margins(phi, (&e1, &e2)).ok()?;
        Some((-lower).max(-upper))
    })
}

/// Pairs on a random geodesic through a point within `log 3` of the
/// origin; the excess `ψ - 4πβ` must stay nonpositive.
pub fn sweep_near_geodesic_angle(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("ψ < 4πβ", seed, trials, 0.0, |rng| {
        let c_dir = random_direction(rng, dim);
        let c_r: f64 = rng.random_range(1e-3..LOG3);
        let through = Translation::forward(polar(&c_dir, c_r));
        let e = random_direction(rng, dim);
        let neg: Vec<f64> = e.iter().map(|x| -x).collect();
        let t1: f64 = rng.random_range(0.0..=r_max);
        let t2: f64 = rng.random_range(0.0..=r_max);
        let u = through.apply(&polar(&e, t1)).ok()?;
        let v = through.apply(&polar(&neg, t2)).ok()?;
        near_geodesic_angle_excess(&u, &v)
    })
}

/// Quadruples with the labels chosen so that the precondition holds: `t` is
/// the point farthest from `s` among the other three.
pub fn sweep_chepoi(seed: u64, trials: usize, dim: usize, r_max: f64) -> SweepReport {
    sweep("d(u,v) <= max(d(t,u), d(t,v)) + 2δ", seed, trials, 1e-9, |rng| {
        let s = random_point(rng, dim, r_max);
        let mut rest: Vec<BallPoint> = (0..3).map(|_| random_point(rng, dim, r_max)).collect();
        let far = (0..3)
            .max_by(|&i, &j| dist_h(&s, &rest[i]).total_cmp(&dist_h(&s, &rest[j])))
            .expect("three points");
        let t = rest.remove(far);
        Some(chepoi_excess(&t, &rest[0], &rest[1]))
    })
}

/// `diam - d(â, b̂)` on random instances; must lie in `[0, 2δ]`.
/// Reports the larger of `diam - d(â, b̂) - 2δ` and `d(â, b̂) - diam`.
pub fn sweep_diametral_pair(seed: u64, instances: usize, n: usize, dim: usize, radius: f64) -> SweepReport {
    sweep("approximate diametral pair within 2δ", seed, instances, 1e-9, |rng| {
        let gen = Generator::ALL[rng.random_range(0..3)];
        let points = generate(gen, n, dim, radius, rng.random()).ok()?;
        let exact = diameter_exact(&points).ok()?.distance;
        let approx = approx_diametral_pair(&points).ok()?.distance;
        Some((exact - approx - 2.0 * DELTA).max(approx - exact))
    })
}

/// Both midpoint bounds over `queries` random queries on each of
/// `instances` uniform instances. The reported value is the larger of
/// `d(m, m̂) - 7 log 3` and `d(m, m*) - 3 log 3`.
pub fn sweep_midpoint(seed: u64, instances: usize, queries: usize, n: usize, dim: usize, radius: f64) -> SweepReport {
    let per_instance: Vec<Vec<Option<f64>>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let points = generate(Generator::UniformBall, n, dim, radius, rng.random()).expect("valid radius");
            (0..queries)
                .map(|_| {
                    let q = random_point(&mut rng, dim, radius);
                    check_midpoint_lemma(&points, &q)
                        .ok()
                        .flatten()
                        .map(|c| (c.to_approx_midpoint - 7.0 * LOG3).max(c.to_exact_midpoint - 3.0 * LOG3))
                })
                .collect()
        })
        .collect();
    let mut report = SweepReport {
        check: "midpoint of [q, f(q)] near the diametral midpoints".into(),
        trials: instances * queries,
        applicable: 0,
        violations: 0,
        worst: f64::NEG_INFINITY,
        bound: 0.0,
    };
    for v in per_instance.into_iter().flatten().flatten() {
        report.applicable += 1;
        if !(v <= 0.0) {
            report.violations += 1;
        }
        report.worst = report.worst.max(v);
    }
    report
}

/// Both coreset bounds over random queries with hyperbolic radius up to
/// `query_radius`. The reported value is the larger of `F - ε - F̃` and
/// `(1 - ε) F - F̃`, where `F` is the exact farthest distance and `F̃` the
/// coreset answer.
pub fn sweep_coreset_bounds(coreset: &Coreset<'_>, seed: u64, queries: usize, query_radius: f64) -> SweepReport {
    let eps = coreset.epsilon();
    let points = coreset.source();
    sweep("coreset bounds", seed, queries, 1e-9, |rng| {
        let q = random_point(rng, points.dim(), query_radius);
        Some(coreset_violation(coreset, &q, eps))
    })
}

/// `max(F - ε - F̃, (1 - ε) F - F̃)` at one query; nonpositive when both
/// bounds hold.
pub fn coreset_violation(coreset: &Coreset<'_>, q: &BallPoint, eps: f64) -> f64 {
    let exact = farthest_exact(coreset.source(), q).expect("nonempty source").distance;
    let approx = farthest_approx(coreset, q).expect("same dimension").distance;
    (exact - eps - approx).max((1.0 - eps) * exact - approx)
}

fn orthonormal_to(rng: &mut ChaCha8Rng, e: &[f64]) -> Vec<f64> {
    loop {
        let mut v = random_direction(rng, e.len());
        let p: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
        for (x, y) in v.iter_mut().zip(e) {
            *x -= p * y;
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-6 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}
