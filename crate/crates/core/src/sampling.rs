//! Seeded point generators.
//!
//! Random points take a uniform direction and a hyperbolic radius drawn
//! uniformly from `[0, max_radius]`. This is not volume-uniform: it puts
//! plenty of points both near the origin and close to the rim.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hyperbolic::{norm, BallPoint, Translation};
use crate::point_set::PointSet;

/// Largest hyperbolic radius the generators accept. Points farther from the
/// origin do not fit under the boundary guard with room to spare.
pub const MAX_SAMPLE_RADIUS: f64 = 28.0;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for trial `index`, so parallel sweeps do not depend
/// on scheduling.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Uniform direction, hyperbolic radius uniform in `[0, max_radius]`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_radius: f64) -> BallPoint {
    let dir = random_direction(rng, dim);
    let r = rng.random_range(0.0..=max_radius);
    BallPoint::from_polar(&dir, r).expect("radius below the guard")
}

/// Uniform direction at exactly hyperbolic radius `radius`.
pub fn random_sphere_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> BallPoint {
    let dir = random_direction(rng, dim);
    BallPoint::from_polar(&dir, radius).expect("radius below the guard")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    UniformBall,
    Clusters,
    Antipodal,
    GeodesicLine,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::UniformBall,
        Generator::Clusters,
        Generator::Antipodal,
        Generator::GeodesicLine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::UniformBall => "uniform-ball",
            Generator::Clusters => "clusters",
            Generator::Antipodal => "antipodal",
            Generator::GeodesicLine => "geodesic-line",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown generator {s:?}")))
    }
}

/// Number of cluster centres used by [`Generator::Clusters`].
pub const CLUSTER_COUNT: usize = 4;
/// Standard deviation of the tangent offsets around each cluster centre.
pub const CLUSTER_SPREAD: f64 = 0.5;

/// Generates `n` points of dimension `dim`.
///
/// * `uniform-ball`: [`random_point`] with `max_radius = radius`.
/// * `clusters`: centres from `uniform-ball`, then Gaussian tangent offsets
///   moved to each centre by a translation.
/// * `antipodal`: pairs `u, -u` at hyperbolic radius `radius`; the first pair
///   lies on the first axis.
/// * `geodesic-line`: points on one geodesic through the origin, signed
///   positions uniform in `[-radius, radius]`.
pub fn generate(gen: Generator, n: usize, dim: usize, radius: f64, seed: u64) -> Result<PointSet> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(0.0..=MAX_SAMPLE_RADIUS).contains(&radius) {
        return Err(Error::Range {
            what: "radius",
            value: radius,
            range: format!("[0, {MAX_SAMPLE_RADIUS}]"),
        });
    }
    let mut rng = seeded_rng(seed);
    let points = match gen {
        Generator::UniformBall => (0..n).map(|_| random_point(&mut rng, dim, radius)).collect(),
        Generator::Clusters => clusters(&mut rng, n, dim, radius),
        Generator::Antipodal => {
            let mut out = Vec::with_capacity(n);
            let mut first = vec![0.0; dim];
            first[0] = 1.0;
            let mut dir = first;
            while out.len() < n {
                let u = BallPoint::from_polar(&dir, radius)?;
                let v = u.negated();
                out.push(u);
                if out.len() < n {
                    out.push(v);
                }
                dir = random_direction(&mut rng, dim);
            }
            out
        }
        Generator::GeodesicLine => {
            let dir = random_direction(&mut rng, dim);
            let neg: Vec<f64> = dir.iter().map(|x| -x).collect();
            (0..n)
                .map(|_| {
                    let t: f64 = rng.random_range(-radius..=radius);
                    let d = if t < 0.0 { &neg } else { &dir };
                    BallPoint::from_polar(d, t.abs()).expect("radius below the guard")
                })
                .collect()
        }
    };
    PointSet::new(dim, points)
}

fn clusters(rng: &mut ChaCha8Rng, n: usize, dim: usize, radius: f64) -> Vec<BallPoint> {
    let centres: Vec<Translation> = (0..CLUSTER_COUNT)
        .map(|_| Translation::forward(random_point(rng, dim, radius)))
        .collect();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let c = &centres[rng.random_range(0..CLUSTER_COUNT)];
        let v: Vec<f64> = (0..dim)
            .map(|_| CLUSTER_SPREAD * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let len = norm(&v);
        let local = if len == 0.0 {
            BallPoint::origin(dim)
        } else {
            match BallPoint::from_polar(&v, len) {
                Ok(p) => p,
                Err(_) => continue,
            }
        };
        // offsets that would cross the guard are redrawn
        if let Ok(p) = c.apply(&local) {
            if crate::hyperbolic::dist_origin(&p) <= MAX_SAMPLE_RADIUS + 2.0 {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{dist_h, dist_origin};

    #[test]
    fn generator_names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), g);
        }
        assert!("ring".parse::<Generator>().is_err());
    }

    #[test]
    fn antipodal_pair_sits_at_radius() {
        let p = generate(Generator::Antipodal, 2, 3, 5.0, 0).unwrap();
        assert_eq!(p.len(), 2);
        for x in p.iter() {
            assert!((dist_origin(x) - 5.0).abs() < 1e-12);
        }
        assert!((dist_h(p.get(0), p.get(1)) - 10.0).abs() < 1e-11);
    }

    #[test]
    fn same_seed_same_points() {
        for g in Generator::ALL {
            let a = generate(g, 50, 3, 6.0, 9).unwrap();
            let b = generate(g, 50, 3, 6.0, 9).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 50);
        }
        assert!(generate(Generator::UniformBall, 0, 2, 1.0, 0).unwrap().is_empty());
        assert!(generate(Generator::UniformBall, 1, 2, 29.0, 0).is_err());
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 1).random();
        assert_ne!(a, b);
    }
}
