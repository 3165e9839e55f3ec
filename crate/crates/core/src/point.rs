use crate::error::{data, usage, Result};

/// Stable point identifier; ids in a [`Dataset`] are `0..n`.
pub type PointId = u32;

/// Borrowed view of one dataset row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<'a> {
    pub id: PointId,
    pub coords: &'a [f64],
}

/// `n` points in `R^d`, stored row-major. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
}

impl Dataset {
    /// Wraps a row-major coordinate buffer of `n * dim` finite values.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(usage("dataset must contain at least one point"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(usage(format!(
                "coordinate buffer of length {} is not a multiple of d = {dim}",
                coords.len()
            )));
        }
        if coords.len() / dim > PointId::MAX as usize {
            return Err(usage("too many points for 32-bit ids"));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(data(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or_else(|| usage("dataset must contain at least one point"))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(usage(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn coords(&self, id: PointId) -> &[f64] {
        let start = id as usize * self.dim;
        &self.coords[start..start + self.dim]
    }

    pub fn point(&self, id: PointId) -> Point<'_> {
        Point {
            id,
            coords: self.coords(id),
        }
    }

    pub fn get(&self, id: PointId) -> Option<Point<'_>> {
        ((id as usize) < self.len()).then(|| self.point(id))
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point<'_>> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(i, coords)| Point {
                id: i as PointId,
                coords,
            })
    }

    pub fn ids(&self) -> std::ops::Range<PointId> {
        0..self.len() as PointId
    }

    /// Row-major coordinate buffer.
    pub fn raw(&self) -> &[f64] {
        &self.coords
    }

    /// New dataset made of the given rows, renumbered from 0.
    pub fn subset(&self, ids: &[PointId]) -> Result<Self> {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &id in ids {
            if id as usize >= self.len() {
                return Err(usage(format!("point id {id} out of range")));
            }
            coords.extend_from_slice(self.coords(id));
        }
        Self::new(self.dim, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn rejects_non_finite() {
        let err = Dataset::new(2, vec![0.0, 1.0, f64::NAN, 2.0]).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
        assert!(Dataset::new(1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_ragged_and_empty() {
        assert!(Dataset::new(3, vec![1.0, 2.0]).is_err());
        assert!(Dataset::new(2, vec![]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn ids_are_contiguous() {
        let ds = Dataset::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(ds.len(), 3);
        let ids: Vec<_> = ds.points().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(ds.coords(2), &[5.0, 6.0]);
        assert!(ds.get(3).is_none());
    }
}
