//! Coreset for point sets of large diameter.
//!
//! The set is recentred at the midpoint `m̂` of an approximate diametral
//! pair. Candidates come from three sources:
//!
//! * farthest points of grid points `g` of the ball `B₀ = B(m̂, 8 log 3)`
//!   on the grid with hyperbolic covering radius `ε/2`;
//! * for queries outside `B₀`, the net point `h` of the sphere
//!   `S₀ = S(m̂, 7 log 3)` nearest to where `[q, f(q)]` crosses it, and the
//!   point farthest from `h` in the cone around `h` containing `f(q)`;
//! * the exact farthest point of a query, when the two above do not suffice.
//!
//! Neither the grid (about 10⁹ points at ε = 0.5 in the plane) nor the net
//! fits in memory, so both are evaluated lazily. The space of queries is
//! covered by dyadic boxes of Klein coordinates; a box is split only while
//! [`check_box`] cannot prove the current candidates good for every query in
//! it, and each failing box asks for the candidates of its centre.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::certify::{check_box, KleinBox, Lifts, Members};
use super::cone::{ConeId, ConePartition};
use super::grid::{cover_spacing, nearest_inside};
use super::net::SphereNet;
use super::CoresetStats;
use crate::error::Result;
use crate::hyperbolic::{
    direction_between, dist_origin, euclidean_radius_of, golden_section_min, midpoint, norm, BallPoint, GeodesicParam,
    Translation, LOG3,
};
use crate::point_set::PointSet;
use crate::queries::farthest_index;

/// Depth added past the fallback depth before a box is given up on.
const EXTRA_DEPTH: u32 = 10;
/// Upper limit on boxes examined in one level.
const LEVEL_CAP: usize = 4_000_000;

pub(crate) struct LargeBuild {
    pub members: Vec<usize>,
    pub recenter: Translation,
    pub stats: CoresetStats,
}

struct Cell {
    idx: Vec<i64>,
    depth: u32,
    dangerous: Arc<Vec<u32>>,
}

impl Cell {
    fn bx(&self) -> KleinBox {
        KleinBox::dyadic(&self.idx, self.depth)
    }

    /// Klein centre, pulled inside the unit ball if needed.
    fn representative(&self) -> Vec<f64> {
        let mut c = self.bx().centre();
        let s: f64 = c.iter().map(|x| x * x).sum();
        let cap = 1.0 - 1e-15;
        if s > cap {
            let f = cap.sqrt() / s.sqrt();
            for x in &mut c {
                *x *= f;
            }
        }
        c
    }

    fn children(&self, dangerous: Arc<Vec<u32>>) -> Vec<Cell> {
        let dim = self.idx.len();
        (0..1usize << dim)
            .map(|bits| Cell {
                idx: self
                    .idx
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| 2 * x + ((bits >> i) & 1) as i64)
                    .collect(),
                depth: self.depth + 1,
                dangerous: dangerous.clone(),
            })
            .filter(|c| c.bx().min_norm_sq() < 1.0)
            .collect()
    }
}

fn klein_to_poincare(k: &[f64]) -> Vec<f64> {
    let s: f64 = k.iter().map(|x| x * x).sum();
    let f = 1.0 + (1.0 - s).max(0.0).sqrt();
    k.iter().map(|x| x / f).collect()
}

fn poincare_to_klein(u: &[f64]) -> Vec<f64> {
    let s: f64 = u.iter().map(|x| x * x).sum();
    u.iter().map(|x| 2.0 * x / (1.0 + s)).collect()
}

fn bits_key(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Lowest index of every group of points with identical coordinates.
fn canonical(points: &PointSet) -> Vec<u32> {
    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points.get(i as usize).coords(), points.get(j as usize).coords());
        bits_key(a).cmp(&bits_key(b)).then(i.cmp(&j))
    });
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if pos == 0 || points.get(order[pos - 1] as usize) != points.get(i as usize) {
            out.push(i);
        }
    }
    out.sort_unstable();
    out
}

enum Request {
    Grid { key: Vec<i64>, index: u32 },
    Net { key: Vec<u64>, h: Vec<f64>, cone: ConeId },
    Nothing,
}

struct Builder {
    lifts: Lifts,
    unique: Vec<u32>,
    cosh_eps: f64,
    sinh_eps: f64,
    inner_radius: f64,
    alpha: f64,
    net: SphereNet,
    net_radius: f64,
    cones: ConePartition,
}

impl Builder {
    fn request(&self, cell: &Cell) -> Request {
        let k = cell.representative();
        let u = klein_to_poincare(&k);
        if norm(&u) < self.inner_radius {
            let key = nearest_inside(&u, self.alpha, self.inner_radius);
            let g: Vec<f64> = key.iter().map(|&c| c as f64 * self.alpha).collect();
            let index = self.lifts.argmax(&self.unique, &poincare_to_klein(&g));
            return Request::Grid { key, index };
        }
        let far = self.lifts.argmax(&self.unique, &k);
        self.net_request(&u, far).unwrap_or(Request::Nothing)
    }

    /// Crossing of `[q, f(q)]` with the net sphere, the nearest net point
    /// `h`, and the cone about `h` containing `f(q)`.
    fn net_request(&self, u: &[f64], far: u32) -> Option<Request> {
        let q = BallPoint::new(u.to_vec()).ok()?;
        let target = BallPoint::new(self.lifts.local(far as usize).to_vec()).ok()?;
        if q == target {
            return None;
        }
        let seg = GeodesicParam::new(q, target.clone());
        let f = |s: f64| seg.point_at(s).map(|p| dist_origin(&p)).unwrap_or(f64::INFINITY);
        let (s_min, f_min) = golden_section_min(f, 0.0, seg.length(), 1e-12);
        if f_min > self.net_radius {
            return None;
        }
        let (mut lo, mut hi) = (0.0, s_min);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > self.net_radius {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let crossing = seg.point_at(hi).ok()?;
        if crossing.is_origin() {
            return None;
        }
        let h = self.net.nearest(crossing.coords());
        let dir = direction_between(h.coords(), defect_of(&h), target.coords());
        if !dir.iter().all(|x| x.is_finite()) {
            return None;
        }
        let cone = self.cones.cone_of_nonzero(&dir);
        Some(Request::Net {
            key: bits_key(h.coords()),
            h: h.coords().to_vec(),
            cone,
        })
    }

    /// For every occupied cone about `h`, the point farthest from `h`.
    fn cone_picks(&self, h: &[f64]) -> HashMap<ConeId, u32> {
        let hd = {
            let r = norm(h);
            (1.0 - r) * (1.0 + r)
        };
        let kh = poincare_to_klein(h);
        let mut best: HashMap<ConeId, (f64, u32)> = HashMap::new();
        for &p in &self.unique {
            let local = self.lifts.local(p as usize);
            if local == h {
                continue;
            }
            let dir = direction_between(h, hd, local);
            if !dir.iter().all(|x| x.is_finite()) {
                continue;
            }
            let cone = self.cones.cone_of_nonzero(&dir);
            let v = self.lifts.value(p as usize, &kh);
            best.entry(cone)
                .and_modify(|e| {
                    if v > e.0 {
                        *e = (v, p);
                    }
                })
                .or_insert((v, p));
        }
        best.into_iter().map(|(c, (_, p))| (c, p)).collect()
    }
}

fn defect_of(p: &BallPoint) -> f64 {
    let r = p.norm();
    (1.0 - r) * (1.0 + r)
}

pub(crate) fn build(points: &PointSet, epsilon: f64) -> Result<LargeBuild> {
    let n = points.len();
    let dim = points.dim();
    let a = farthest_index(points, points.get(0));
    let b = farthest_index(points, points.get(a));
    let centre = midpoint(points.get(a), points.get(b))?;
    let recenter = Translation::inverse(centre.clone())?;

    let inner_hyp = 8.0 * LOG3;
    let builder = Builder {
        lifts: Lifts::new(points, &centre),
        unique: canonical(points),
        cosh_eps: epsilon.cosh(),
        sinh_eps: epsilon.sinh(),
        inner_radius: euclidean_radius_of(inner_hyp),
        alpha: cover_spacing(dim, inner_hyp, epsilon / 2.0),
        net: SphereNet::new(dim, 7.0 * LOG3, epsilon.sqrt() / (8.0 * PI))?,
        net_radius: 7.0 * LOG3,
        cones: ConePartition::new(dim, epsilon.sqrt() / 2.0)?,
    };
    let fallback_depth = (16.0 / epsilon).log2().ceil() as u32;
    let max_depth = fallback_depth + EXTRA_DEPTH;

    let mut stats = CoresetStats {
        grid_spacing: builder.alpha,
        ..CoresetStats::default()
    };
    let mut members = Members::new(n);
    let mut grid_keys: HashSet<Vec<i64>> = HashSet::new();
    let mut picks: HashMap<Vec<u64>, HashMap<ConeId, u32>> = HashMap::new();

    // the grid point at the centre
    let origin = vec![0.0; dim];
    members.extend([builder.lifts.argmax(&builder.unique, &origin)]);
    grid_keys.insert(vec![0; dim]);

    let check = |cell: &Cell, dangerous: &[u32], members: &Members| {
        check_box(
            &cell.bx(),
            dangerous,
            members,
            &builder.lifts,
            builder.cosh_eps,
            builder.sinh_eps,
        )
        .remaining
    };

    let mut level = vec![Cell {
        idx: vec![0; dim],
        depth: 0,
        dangerous: Arc::new(builder.unique.clone()),
    }];
    while !level.is_empty() {
        let depth = level[0].depth;
        let level_len = level.len();
        stats.cells_visited += level_len;
        stats.max_depth = depth;

        let remaining: Vec<Vec<u32>> = level.par_iter().map(|c| check(c, &c.dangerous, &members)).collect();
        let mut failing: Vec<(Cell, Vec<u32>)> = level
            .into_iter()
            .zip(remaining)
            .filter(|(_, r)| !r.is_empty())
            .collect();
        if failing.is_empty() {
            stats.cells_certified += level_len;
            break;
        }

        let requests: Vec<Request> = failing.par_iter().map(|(c, _)| builder.request(c)).collect();
        let mut new_h: Vec<(Vec<u64>, Vec<f64>)> = Vec::new();
        for r in &requests {
            if let Request::Net { key, h, .. } = r {
                if !picks.contains_key(key) && !new_h.iter().any(|(k, _)| k == key) {
                    new_h.push((key.clone(), h.clone()));
                }
            }
        }
        let computed: Vec<(Vec<u64>, HashMap<ConeId, u32>)> = new_h
            .into_par_iter()
            .map(|(k, h)| (k, builder.cone_picks(&h)))
            .collect();
        for (k, m) in computed {
            stats.cones_occupied += m.len();
            picks.insert(k, m);
        }
        let mut adds = Vec::new();
        for r in requests {
            match r {
                Request::Grid { key, index } => {
                    grid_keys.insert(key);
                    adds.push(index);
                }
                Request::Net { key, cone, .. } => {
                    if let Some(&p) = picks[&key].get(&cone) {
                        adds.push(p);
                    }
                }
                Request::Nothing => {}
            }
        }
        members.extend(adds);
        failing = recheck(failing, &members, &check);

        if depth >= fallback_depth && !failing.is_empty() {
            let extra: Vec<u32> = failing
                .par_iter()
                .map(|(c, _)| builder.lifts.argmax(&builder.unique, &c.representative()))
                .collect();
            stats.fallback_points += members.extend(extra);
            failing = recheck(failing, &members, &check);
        }

        stats.cells_certified += level_len - failing.len();
        let mut next = Vec::new();
        for (cell, rest) in failing {
            if depth >= max_depth {
                stats.uncertified_cells += 1;
                continue;
            }
            next.extend(cell.children(Arc::new(rest)));
        }
        if next.len() > LEVEL_CAP {
            stats.uncertified_cells += next.len();
            break;
        }
        level = next;
    }
    stats.grid_points = grid_keys.len();
    stats.net_points = picks.len();

    let mut out: Vec<usize> = members.list.iter().map(|&i| i as usize).collect();
    out.sort_unstable();
    Ok(LargeBuild {
        members: out,
        recenter,
        stats,
    })
}

fn recheck<F>(failing: Vec<(Cell, Vec<u32>)>, members: &Members, check: &F) -> Vec<(Cell, Vec<u32>)>
where
    F: Fn(&Cell, &[u32], &Members) -> Vec<u32> + Sync,
{
    let again: Vec<Vec<u32>> = failing.par_iter().map(|(c, r)| check(c, r, members)).collect();
    failing
        .into_iter()
        .zip(again)
        .filter(|(_, r)| !r.is_empty())
        .map(|((c, _), r)| (c, r))
        .collect()
}
