//! Checking a candidate coreset on a whole region of queries at once.
//!
//! Lift the ball onto the hyperboloid about a centre `m`. A point `p` at
//! distance `d` from `m` in direction `ξ` becomes `(cosh d, sinh d ξ)`. For a
//! query `q` with Klein coordinates `k` (relative to `m`),
//!
//! ```text
//! cosh d(q, p) = X(q) A_p(k),   A_p(k) = cosh d - sinh d <k, ξ>,
//! X(q) = 1 / sqrt(1 - |k|^2) >= 1.
//! ```
//!
//! `A_p` is affine in `k`, so its range over an axis-aligned box of Klein
//! coordinates is read off coordinate by coordinate.
//!
//! To show `d(q, s) >= d(q, p) - ε` it suffices that
//! `cosh d(q, s) >= cosh(d(q, p) - ε) = y τ(y)` with `y = cosh d(q, p)` and
//! `τ(y) = cosh ε - sqrt(1 - 1/y^2) sinh ε`. `τ` is decreasing, so any lower
//! bound on `y` over the box gives one `τ` valid for the whole box, and the
//! condition becomes the affine inequality `A_s(k) >= τ A_p(k)`.

use crate::hyperbolic::{direction_from, dist_h, BallPoint};
use crate::point_set::PointSet;

/// Relative rounding allowance on lifted values.
const REL_ERR: f64 = 1e-13;

/// Hyperboloid lifts of a point set about a centre.
#[derive(Debug, Clone)]
pub(crate) struct Lifts {
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    /// Poincaré coordinates relative to the centre, clamped under the guard.
    local: Vec<f64>,
}

impl Lifts {
    pub fn new(points: &PointSet, centre: &BallPoint) -> Lifts {
        let dim = points.dim();
        let n = points.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n * dim);
        let mut local = Vec::with_capacity(n * dim);
        for p in points {
            let d = dist_h(centre, p);
            if d == 0.0 {
                a.push(1.0);
                b.extend(std::iter::repeat_n(0.0, dim));
                local.extend(std::iter::repeat_n(0.0, dim));
                continue;
            }
            let dir = direction_from(centre, p);
            let (sh, ch) = (d.sinh(), d.cosh());
            let r = (d / 2.0).tanh().min(1.0 - 2e-12);
            a.push(ch);
            b.extend(dir.iter().map(|x| sh * x));
            local.extend(dir.iter().map(|x| r * x));
        }
        Lifts { dim, a, b, local }
    }

    #[inline]
    pub fn a(&self, i: usize) -> f64 {
        self.a[i]
    }

    #[inline]
    pub fn b(&self, i: usize) -> &[f64] {
        &self.b[i * self.dim..(i + 1) * self.dim]
    }

    /// Recentred Poincaré coordinates.
    #[inline]
    pub fn local(&self, i: usize) -> &[f64] {
        &self.local[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn value(&self, i: usize, k: &[f64]) -> f64 {
        self.a[i] - self.b(i).iter().zip(k).map(|(b, k)| b * k).sum::<f64>()
    }

    /// Index maximizing `A_i(k)` over `candidates`, lowest index on ties.
    pub fn argmax(&self, candidates: &[u32], k: &[f64]) -> u32 {
        let mut best = candidates[0];
        let mut best_v = self.value(best as usize, k);
        for &i in &candidates[1..] {
            let v = self.value(i as usize, k);
            if v > best_v || (v == best_v && i < best) {
                best = i;
                best_v = v;
            }
        }
        best
    }

    #[inline]
    fn err(&self, i: usize) -> f64 {
        REL_ERR * self.a[i]
    }
}

/// An axis-aligned box of Klein coordinates: the dyadic cell `idx` at `depth`
/// in `[-1, 1]^D`.
#[derive(Debug, Clone)]
pub(crate) struct KleinBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl KleinBox {
    pub fn dyadic(idx: &[i64], depth: u32) -> KleinBox {
        let w = 2.0 / (1u64 << depth) as f64;
        let lo: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 * w).collect();
        let hi = lo.iter().map(|l| l + w).collect();
        KleinBox { lo, hi }
    }

    pub fn centre(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// Smallest `|k|^2` over the box.
    pub fn min_norm_sq(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| if l <= 0.0 && h >= 0.0 { 0.0 } else { (l * l).min(h * h) })
            .sum()
    }

    /// Smallest value over the box of the affine map `a - <k, b>`.
    #[inline]
    fn min_affine(&self, a: f64, b: impl Iterator<Item = f64>) -> f64 {
        let mut s = a;
        for ((l, h), bj) in self.lo.iter().zip(&self.hi).zip(b) {
            s -= (l * bj).max(h * bj);
        }
        s
    }

    #[inline]
    fn max_affine(&self, a: f64, b: impl Iterator<Item = f64>) -> f64 {
        let mut s = a;
        for ((l, h), bj) in self.lo.iter().zip(&self.hi).zip(b) {
            s -= (l * bj).min(h * bj);
        }
        s
    }
}

/// `τ(y) = cosh ε - sqrt(1 - 1/y^2) sinh ε`, so that `y τ(y) = cosh(arcosh y - ε)`.
#[inline]
pub(crate) fn tau(y: f64, cosh_eps: f64, sinh_eps: f64) -> f64 {
    let t = (1.0 - 1.0 / (y * y)).max(0.0).sqrt();
    cosh_eps - t * sinh_eps
}

/// The current coreset during construction.
#[derive(Debug, Clone)]
pub(crate) struct Members {
    pub list: Vec<u32>,
    pub flag: Vec<bool>,
}

impl Members {
    pub fn new(n: usize) -> Members {
        Members {
            list: Vec::new(),
            flag: vec![false; n],
        }
    }

    /// Adds indices; returns how many were new.
    pub fn extend(&mut self, items: impl IntoIterator<Item = u32>) -> usize {
        let mut added = 0;
        for i in items {
            if !self.flag[i as usize] {
                self.flag[i as usize] = true;
                self.list.push(i);
                added += 1;
            }
        }
        self.list.sort_unstable();
        added
    }
}

/// Outcome of checking one box.
pub(crate) struct Check {
    /// Points not yet shown to be within `ε` of a member for every query in
    /// the box.
    pub remaining: Vec<u32>,
}

/// Checks that for every Klein point `k` of `bx` (inside the unit ball) and
/// every `p` in `dangerous`, some member `s` satisfies
/// `d(q, s) >= d(q, p) - ε`. Points that pass are dropped; the rest are
/// returned. Both tests used stay valid on sub-boxes and for larger member
/// sets, so the survivors are all a sub-box needs to re-examine.
pub(crate) fn check_box(
    bx: &KleinBox,
    dangerous: &[u32],
    members: &Members,
    lifts: &Lifts,
    cosh_eps: f64,
    sinh_eps: f64,
) -> Check {
    let min_sq = bx.min_norm_sq();
    if min_sq >= 1.0 {
        return Check { remaining: Vec::new() };
    }
    let x_min = 1.0 / (1.0 - min_sq).sqrt();

    // best guaranteed member value over the box
    let mut lo_s = f64::NEG_INFINITY;
    for &s in &members.list {
        let s = s as usize;
        let v = bx.min_affine(lifts.a(s), lifts.b(s).iter().copied()) - lifts.err(s);
        lo_s = lo_s.max(v);
    }

    let centre = bx.centre();
    let mut ranked: Option<Vec<(f64, u32)>> = None;
    let mut remaining = Vec::new();
    for &p in dangerous {
        let pu = p as usize;
        if members.flag[pu] {
            continue;
        }
        let (ap, bp) = (lifts.a(pu), lifts.b(pu));
        let min_p = bx.min_affine(ap, bp.iter().copied()) - lifts.err(pu);
        let max_p = bx.max_affine(ap, bp.iter().copied()) + lifts.err(pu);
        let t = tau((x_min * min_p).max(1.0), cosh_eps, sinh_eps);
        if max_p * t <= lo_s {
            continue;
        }
        // pair test against members ranked by their value at the centre
        let ranked = ranked.get_or_insert_with(|| {
            let mut r: Vec<(f64, u32)> = members
                .list
                .iter()
                .map(|&s| (lifts.value(s as usize, &centre), s))
                .collect();
            r.sort_unstable_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            r
        });
        let target = t * lifts.value(pu, &centre);
        let mut dominated = false;
        for &(vc, s) in ranked.iter() {
            if vc < target {
                break;
            }
            let su = s as usize;
            let bs = lifts.b(su);
            let m = bx.min_affine(lifts.a(su) - t * ap, bs.iter().zip(bp).map(|(x, y)| x - t * y));
            if m >= lifts.err(su) + t * lifts.err(pu) {
                dominated = true;
                break;
            }
        }
        if !dominated {
            remaining.push(p);
        }
    }
    Check { remaining }
}
