//! Nets on hyperbolic spheres about the origin.
//!
//! Vertices of a regular grid on the faces of the cube circumscribing the
//! sphere are projected onto it. Two points of the sphere of hyperbolic
//! radius `ρ` at angle `φ` are at distance `d` with
//! `sinh(d / 2) = sinh(ρ) sin(φ / 2)`, so a chord of length at most
//! `2 sinh(δ / 2) / sinh(ρ)` between the unit directions keeps them within
//! `δ`. Chords are no longer than distances on the cube face.

use std::collections::HashSet;

use super::cone::face_coords;
use crate::error::{Error, Result};
use crate::hyperbolic::{euclidean_radius_of, norm, BallPoint};

/// Largest number of face-grid vertices [`sphere_net`] will enumerate.
pub const NET_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereNet {
    dim: usize,
    radius: f64,
    spacing: f64,
    cells_per_axis: usize,
    euclidean_radius: f64,
}

impl SphereNet {
    pub fn new(dim: usize, hyperbolic_radius: f64, spacing: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        for (what, value) in [("hyperbolic radius", hyperbolic_radius), ("spacing", spacing)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Range {
                    what,
                    value,
                    range: "(0, inf)".into(),
                });
            }
        }
        let chord = (2.0 * (spacing / 2.0).sinh() / hyperbolic_radius.sinh()).min(2.0);
        let cells_per_axis = if dim == 1 {
            1
        } else {
            // the nearest vertex is within w √(D-1) / 2 on the face
            let w = chord / ((dim - 1) as f64).sqrt();
            (2.0 / w).ceil().max(1.0) as usize
        };
        Ok(SphereNet {
            dim,
            radius: hyperbolic_radius,
            spacing,
            cells_per_axis,
            euclidean_radius: euclidean_radius_of(hyperbolic_radius),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Upper bound on the net size (vertices shared by faces counted twice).
    pub fn vertex_count(&self) -> f64 {
        2.0 * self.dim as f64 * ((self.cells_per_axis + 1) as f64).powi(self.dim as i32 - 1)
    }

    fn vertex(&self, face: usize, grid: &[i64]) -> BallPoint {
        let axis = face / 2;
        let m = self.cells_per_axis as f64;
        let mut v = Vec::with_capacity(self.dim);
        let mut it = grid.iter();
        for i in 0..self.dim {
            if i == axis {
                v.push(if face.is_multiple_of(2) { 1.0 } else { -1.0 });
            } else {
                let j = *it.next().expect("grid length");
                v.push(-1.0 + 2.0 * j as f64 / m);
            }
        }
        let len = norm(&v);
        let r = self.euclidean_radius;
        BallPoint::new(v.iter().map(|x| x / len * r).collect()).expect("net point inside the ball")
    }

    /// The net point whose face-grid vertex is nearest to `direction`.
    pub fn nearest(&self, direction: &[f64]) -> BallPoint {
        let (face, coords) = face_coords(direction);
        let m = self.cells_per_axis as f64;
        let grid: Vec<i64> = coords.iter().map(|y| ((y + 1.0) * m / 2.0).round() as i64).collect();
        self.vertex(face, &grid)
    }

    /// Every net point, deduplicated.
    pub fn points(&self) -> Result<Vec<BallPoint>> {
        let count = self.vertex_count();
        if count > NET_CAP as f64 {
            return Err(Error::TooLarge {
                what: "net points",
                size: count.min(usize::MAX as f64) as usize,
                cap: NET_CAP,
            });
        }
        let m = self.cells_per_axis as i64;
        let free = self.dim - 1;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for face in 0..2 * self.dim {
            let mut grid = vec![0i64; free];
            loop {
                let p = self.vertex(face, &grid);
                let key: Vec<u64> = p.coords().iter().map(|x| x.to_bits()).collect();
                if seen.insert(key) {
                    out.push(p);
                }
                let mut axis = 0;
                loop {
                    if axis == free {
                        break;
                    }
                    grid[axis] += 1;
                    if grid[axis] <= m {
                        break;
                    }
                    grid[axis] = 0;
                    axis += 1;
                }
                if axis == free {
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// A net of the hyperbolic sphere of radius `hyperbolic_radius` about the
/// origin: every point of the sphere is within `spacing` of a returned point.
pub fn sphere_net(dim: usize, hyperbolic_radius: f64, spacing: f64) -> Result<Vec<BallPoint>> {
    SphereNet::new(dim, hyperbolic_radius, spacing)?.points()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{dist_h, dist_origin};
    use crate::sampling::{random_sphere_point, seeded_rng};
    use std::f64::consts::PI;

    #[test]
    fn net_points_lie_on_the_sphere() {
        for p in sphere_net(3, 4.0, 0.5).unwrap() {
            assert!((dist_origin(&p) - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn circle_count_exceeds_circumference_over_spacing() {
        let (rho, spacing) = (3.0, 0.8);
        let net = sphere_net(2, rho, spacing).unwrap();
        let circumference = 2.0 * PI * f64::sinh(rho);
        assert!(net.len() as f64 >= circumference / spacing);
    }

    #[test]
    fn nearest_is_within_spacing() {
        let (rho, spacing) = (2.5, 0.3);
        let net = SphereNet::new(3, rho, spacing).unwrap();
        let all = net.points().unwrap();
        let mut rng = seeded_rng(5);
        for _ in 0..500 {
            let s = random_sphere_point(&mut rng, 3, rho);
            let h = net.nearest(s.coords());
            assert!(dist_h(&s, &h) <= spacing);
            assert!(all.contains(&h));
        }
    }
}
