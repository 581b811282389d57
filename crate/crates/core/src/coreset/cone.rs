//! Partition of directions into narrow cones.
//!
//! A direction is centrally projected onto the face of the cube `[-1, 1]^D`
//! it exits through, and the face is cut into a regular grid. The inverse
//! central projection from a face to the unit sphere does not increase
//! lengths, so a face cell of diameter `w` yields a cone whose directions are
//! pairwise within angle `w`.

use crate::error::{Error, Result};
use crate::hyperbolic::norm;

/// A cone: the cube face (`2 * axis`, plus one for the negative side) and
/// the grid cell on that face.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConeId {
    pub face: usize,
    pub cell: Vec<i64>,
}

/// Face, axis, and coordinates on the face plane of a nonzero vector.
/// Ties between axes go to the lowest axis.
pub(crate) fn face_coords(v: &[f64]) -> (usize, Vec<f64>) {
    let mut axis = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[axis].abs() {
            axis = i;
        }
    }
    let lead = v[axis];
    let face = 2 * axis + usize::from(lead < 0.0);
    let scale = lead.abs();
    let coords = v
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != axis)
        .map(|(_, x)| (x / scale).clamp(-1.0, 1.0))
        .collect();
    (face, coords)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConePartition {
    dim: usize,
    cells_per_axis: usize,
}

impl ConePartition {
    /// Cones whose directions are pairwise within `angular_diameter`.
    pub fn new(dim: usize, angular_diameter: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if !(angular_diameter > 0.0) || !angular_diameter.is_finite() {
            return Err(Error::Range {
                what: "angular diameter",
                value: angular_diameter,
                range: "(0, inf)".into(),
            });
        }
        let cells_per_axis = if dim == 1 {
            1
        } else {
            let w = angular_diameter / ((dim - 1) as f64).sqrt();
            (2.0 / w).ceil().max(1.0) as usize
        };
        Ok(ConePartition { dim, cells_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// Total number of cones.
    pub fn cone_count(&self) -> f64 {
        2.0 * self.dim as f64 * (self.cells_per_axis as f64).powi(self.dim as i32 - 1)
    }

    pub fn cone_of(&self, direction: &[f64]) -> Result<ConeId> {
        if direction.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: direction.len(),
            });
        }
        let len = norm(direction);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Domain("cone of a zero or non-finite vector".into()));
        }
        Ok(self.cone_of_nonzero(direction))
    }

    pub(crate) fn cone_of_nonzero(&self, direction: &[f64]) -> ConeId {
        let (face, coords) = face_coords(direction);
        let m = self.cells_per_axis as f64;
        let cell = coords
            .iter()
            .map(|y| (((y + 1.0) * m / 2.0).floor() as i64).clamp(0, self.cells_per_axis as i64 - 1))
            .collect();
        ConeId { face, cell }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::unit_angle;
    use crate::sampling::{random_direction, seeded_rng};

    #[test]
    fn scale_invariant_and_antipodes_split() {
        let c = ConePartition::new(3, 0.3).unwrap();
        let v = [0.3, -0.2, 0.9];
        let w = [0.6, -0.4, 1.8];
        let neg = [-0.3, 0.2, -0.9];
        assert_eq!(c.cone_of(&v).unwrap(), c.cone_of(&w).unwrap());
        assert_ne!(c.cone_of(&v).unwrap(), c.cone_of(&neg).unwrap());
        assert!(c.cone_of(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn same_cone_means_small_angle() {
        let diam = 0.25;
        let c = ConePartition::new(3, diam).unwrap();
        let mut rng = seeded_rng(11);
        let dirs: Vec<Vec<f64>> = (0..4000).map(|_| random_direction(&mut rng, 3)).collect();
        let ids: Vec<ConeId> = dirs.iter().map(|d| c.cone_of(d).unwrap()).collect();
        let mut checked = 0;
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                if ids[i] == ids[j] {
                    checked += 1;
                    assert!(unit_angle(&dirs[i], 1.0, &dirs[j], 1.0) <= diam + 1e-12);
                }
            }
        }
        assert!(checked > 0);
    }
}
