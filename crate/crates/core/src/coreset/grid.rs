//! Euclidean α-grids inside the ball.

use crate::error::{Error, Result};
use crate::hyperbolic::{euclidean_radius_of, norm, BallPoint};

/// Largest number of grid points [`grid_cover`] will enumerate.
pub const GRID_CAP: usize = 5_000_000;

/// Integer cell of a point on the α-grid: every coordinate divided by α and
/// floored. The cell corner is `α * cell`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridKey {
    pub cell: Vec<i64>,
}

impl GridKey {
    pub fn of(coords: &[f64], alpha: f64) -> GridKey {
        GridKey {
            cell: coords.iter().map(|x| (x / alpha).floor() as i64).collect(),
        }
    }

    pub fn corner(&self, alpha: f64) -> Vec<f64> {
        self.cell.iter().map(|&c| c as f64 * alpha).collect()
    }
}

/// Grid spacing giving hyperbolic covering radius `covering_radius` inside
/// the hyperbolic ball of radius `hyperbolic_radius` about the origin.
///
/// On the Euclidean ball of radius `R = tanh(radius / 2)` the metric density
/// is at most `2 / (1 - R^2)`, and rounding a point toward zero onto the grid
/// moves it at most `α √D` without leaving that ball.
pub fn cover_spacing(dim: usize, hyperbolic_radius: f64, covering_radius: f64) -> f64 {
    let r = euclidean_radius_of(hyperbolic_radius);
    covering_radius * (1.0 - r) * (1.0 + r) / (2.0 * (dim as f64).sqrt())
}

/// Grid point obtained by rounding each coordinate toward zero.
pub(crate) fn toward_zero(coords: &[f64], alpha: f64) -> Vec<i64> {
    coords.iter().map(|x| (x / alpha).trunc() as i64).collect()
}

/// Nearest grid point, falling back to rounding toward zero when the nearest
/// one lies outside `max_norm`.
pub(crate) fn nearest_inside(coords: &[f64], alpha: f64, max_norm: f64) -> Vec<i64> {
    let near: Vec<i64> = coords.iter().map(|x| (x / alpha).round() as i64).collect();
    let n = norm(&near.iter().map(|&c| c as f64 * alpha).collect::<Vec<_>>());
    if n <= max_norm {
        near
    } else {
        toward_zero(coords, alpha)
    }
}

/// All α-grid points inside the hyperbolic ball of radius `hyperbolic_radius`,
/// with α from [`cover_spacing`], so that every point of the ball lies within
/// hyperbolic distance `covering_radius` of a returned point.
///
/// When `covering_radius >= hyperbolic_radius` the origin alone suffices.
pub fn grid_cover(dim: usize, hyperbolic_radius: f64, covering_radius: f64) -> Result<Vec<BallPoint>> {
    for (what, value) in [
        ("hyperbolic radius", hyperbolic_radius),
        ("covering radius", covering_radius),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Range {
                what,
                value,
                range: "(0, inf)".into(),
            });
        }
    }
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if covering_radius >= hyperbolic_radius {
        return Ok(vec![BallPoint::origin(dim)]);
    }
    let r = euclidean_radius_of(hyperbolic_radius);
    let alpha = cover_spacing(dim, hyperbolic_radius, covering_radius);
    let m = (r / alpha).floor() as i64;
    let side = (2 * m + 1) as f64;
    let estimate = side.powi(dim as i32);
    if estimate > GRID_CAP as f64 {
        return Err(Error::TooLarge {
            what: "grid points",
            size: estimate.min(usize::MAX as f64) as usize,
            cap: GRID_CAP,
        });
    }
    let mut out = Vec::new();
    let mut cell = vec![-m; dim];
    loop {
        let coords: Vec<f64> = cell.iter().map(|&c| c as f64 * alpha).collect();
        if norm(&coords) <= r {
            out.push(BallPoint::new(coords)?);
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == dim {
                return Ok(out);
            }
            cell[axis] += 1;
            if cell[axis] <= m {
                break;
            }
            cell[axis] = -m;
            axis += 1;
        }
    }
}
