use crate::error::{Error, Result};
use crate::hyperbolic::BallPoint;

/// An indexed, immutable collection of points of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<BallPoint>,
    dim: usize,
}

impl PointSet {
    /// Builds a set of dimension `dim`. An empty set is allowed.
    pub fn new(dim: usize, points: Vec<BallPoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(PointSet { points, dim })
    }

    /// Builds a set from raw coordinate rows.
    pub fn from_rows(dim: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let points = rows
            .into_iter()
            .map(|r| {
                if r.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: r.len(),
                    });
                }
                BallPoint::new(r)
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(dim, points)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> &BallPoint {
        &self.points[i]
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BallPoint> {
        self.points.iter()
    }

    pub(crate) fn check_point(&self, q: &BallPoint) -> Result<()> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.dim(),
            });
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a BallPoint;
    type IntoIter = std::slice::Iter<'a, BallPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
