//! Farthest-point coresets.
//!
//! [`build_coreset`] picks one of two constructions from
//! `Δ₁ = d(p₁, f(p₁))`, the eccentricity of the first input point:
//!
//! * `Δ₁ <= 5`: [`build_small`] with `ε/10`, grid bucketing around `p₁`.
//! * `Δ₁ > 5`: [`build_large`], grid, net and cone candidates around the
//!   midpoint of an approximate diametral pair.
//!
//! Either way, for every query `q` some member `s` satisfies
//! `d(q, s) >= d(q, f(q)) - ε` and `d(q, s) >= (1 - ε) d(q, f(q))`.

mod certify;
pub mod cone;
pub mod grid;
mod large;
pub mod net;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_epsilon, Error, Result};
use crate::hyperbolic::{dist_h, BallPoint, Translation};
use crate::point_set::PointSet;

pub use cone::{ConeId, ConePartition};
pub use grid::{grid_cover, GridKey};
pub use net::{sphere_net, SphereNet};

/// Eccentricity of the first point up to which the small construction is used.
pub const REGIME_THRESHOLD: f64 = 5.0;

/// Constant in the bucket width `α = ε Δ₁ / (304 √D)`.
pub const BUCKET_CONSTANT: f64 = 304.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SmallDiameter,
    LargeDiameter,
}

/// Counters describing how a coreset was built.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoresetStats {
    /// Grid spacing α.
    pub grid_spacing: f64,
    /// Nonempty buckets (small regime).
    pub buckets: usize,
    /// Grid points whose farthest point was requested (large regime).
    pub grid_points: usize,
    /// Net points whose cones were scanned.
    pub net_points: usize,
    /// Occupied cones summed over scanned net points.
    pub cones_occupied: usize,
    /// Query boxes examined.
    pub cells_visited: usize,
    pub cells_certified: usize,
    pub max_depth: u32,
    /// Members added as exact farthest points of box centres.
    pub fallback_points: usize,
    /// Boxes left unproven. Nonzero means the guarantee is not certified.
    pub uncertified_cells: usize,
}

/// A subset of a point set answering farthest-point queries.
#[derive(Debug, Clone)]
pub struct Coreset<'a> {
    source: &'a PointSet,
    members: Vec<usize>,
    epsilon: f64,
    regime: Regime,
    delta1: f64,
    recenter: Translation,
    stats: CoresetStats,
}

impl<'a> Coreset<'a> {
    pub fn source(&self) -> &'a PointSet {
        self.source
    }

    /// Sorted indices into the source set.
    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false: a coreset has at least one member.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Eccentricity of the first source point.
    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    /// Isometry applied to the source before building (internal frame only).
    pub fn recenter(&self) -> &Translation {
        &self.recenter
    }

    pub fn stats(&self) -> &CoresetStats {
        &self.stats
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, &'a BallPoint)> + '_ {
        self.members.iter().map(|&i| (i, self.source.get(i)))
    }

    pub fn record(&self) -> CoresetRecord {
        CoresetRecord {
            dim: self.source.dim(),
            n: self.source.len(),
            epsilon: self.epsilon,
            regime: self.regime,
            delta1: self.delta1,
            recenter: self.recenter.parameter().coords().to_vec(),
            indices: self.members.clone(),
            stats: self.stats.clone(),
        }
    }

    /// Reattaches a stored coreset to its source set.
    pub fn from_record(source: &'a PointSet, record: &CoresetRecord) -> Result<Self> {
        if record.dim != source.dim() {
            return Err(Error::DimensionMismatch {
                expected: source.dim(),
                found: record.dim,
            });
        }
        if record.n != source.len() {
            return Err(Error::Domain(format!(
                "record is for {} points, source has {}",
                record.n,
                source.len()
            )));
        }
        check_epsilon(record.epsilon)?;
        let idx = &record.indices;
        if idx.is_empty() {
            return Err(Error::Empty);
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) || idx[idx.len() - 1] >= source.len() {
            return Err(Error::Domain("indices must be sorted, unique and in range".into()));
        }
        let recenter = if record.recenter.len() == source.dim() {
            Translation::inverse(BallPoint::new(record.recenter.clone())?)?
        } else {
            return Err(Error::DimensionMismatch {
                expected: source.dim(),
                found: record.recenter.len(),
            });
        };
        Ok(Coreset {
            source,
            members: idx.clone(),
            epsilon: record.epsilon,
            regime: record.regime,
            delta1: record.delta1,
            recenter,
            stats: record.stats.clone(),
        })
    }
}

/// Serializable form of a [`Coreset`], without the source points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetRecord {
    pub dim: usize,
    pub n: usize,
    pub epsilon: f64,
    pub regime: Regime,
    pub delta1: f64,
    pub recenter: Vec<f64>,
    pub indices: Vec<usize>,
    pub stats: CoresetStats,
}

fn check_input(points: &PointSet, epsilon: f64) -> Result<()> {
    check_epsilon(epsilon)?;
    if points.is_empty() {
        return Err(Error::Empty);
    }
    if points.dim() < 2 {
        return Err(Error::Domain("coresets need dimension at least 2".into()));
    }
    Ok(())
}

fn first_eccentricity(points: &PointSet) -> f64 {
    let p1 = points.get(0);
    points.iter().map(|p| dist_h(p1, p)).fold(0.0, f64::max)
}

/// Builds a coreset with additive and multiplicative error `epsilon`.
pub fn build_coreset(points: &PointSet, epsilon: f64) -> Result<Coreset<'_>> {
    check_input(points, epsilon)?;
    let delta1 = first_eccentricity(points);
    if delta1 <= REGIME_THRESHOLD {
        let mut c = build_small(points, epsilon / 10.0)?;
        c.epsilon = epsilon;
        Ok(c)
    } else {
        build_large(points, epsilon)
    }
}

/// Grid bucketing around the first point.
///
/// The set is translated so that `p₁` sits at the origin, and points are
/// bucketed by [`GridKey`] at spacing `α = ε Δ₁ / (304 √D)`; the lowest index
/// of each bucket is kept. Every point is then within `ε Δ₁ / 4` of a member,
/// which gives the multiplicative bound `(1 - ε)` since every query has
/// eccentricity at least `Δ₁ / 2`.
pub fn build_small(points: &PointSet, epsilon: f64) -> Result<Coreset<'_>> {
    check_input(points, epsilon)?;
    let p1 = points.get(0).clone();
    let delta1 = first_eccentricity(points);
    let recenter = Translation::inverse(p1)?;
    let mut stats = CoresetStats::default();
    if delta1 == 0.0 {
        stats.buckets = 1;
        return Ok(Coreset {
            source: points,
            members: vec![0],
            epsilon,
            regime: Regime::SmallDiameter,
            delta1,
            recenter,
            stats,
        });
    }
    let dim = points.dim();
    let alpha = epsilon * delta1 / (BUCKET_CONSTANT * (dim as f64).sqrt());
    let mut buckets: HashMap<GridKey, usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let local = recenter.apply_raw(p.coords());
        buckets.entry(GridKey::of(&local, alpha)).or_insert(i);
    }
    let mut members: Vec<usize> = buckets.values().copied().collect();
    members.sort_unstable();
    stats.grid_spacing = alpha;
    stats.buckets = buckets.len();
    Ok(Coreset {
        source: points,
        members,
        epsilon,
        regime: Regime::SmallDiameter,
        delta1,
        recenter,
        stats,
    })
}

/// Construction for large diameter; see the module documentation of the
/// large regime in the crate guide. Valid for any input, but the
/// multiplicative bound relies on `Δ₁ >= 2`.
pub fn build_large(points: &PointSet, epsilon: f64) -> Result<Coreset<'_>> {
    check_input(points, epsilon)?;
    let delta1 = first_eccentricity(points);
    let built = large::build(points, epsilon)?;
    Ok(Coreset {
        source: points,
        members: built.members,
        epsilon,
        regime: Regime::LargeDiameter,
        delta1,
        recenter: built.recenter,
        stats: built.stats,
    })
}
