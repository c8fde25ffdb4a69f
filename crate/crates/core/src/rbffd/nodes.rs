use crate::error::{Error, Result};
use crate::rbffd::knn::KdTree;

/// A set of distinct points in one or two dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dim: usize,
    coords: Vec<f64>,
}

impl NodeSet {
    /// Builds a node set from flat coordinates, rejecting non-finite values and
    /// coincident points.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let set = Self::new_unchecked(dim, coords)?;
        if let Some((i, j)) = set.find_duplicate() {
            return Err(Error::InvalidNodes(format!(
                "points {i} and {j} coincide"
            )));
        }
        Ok(set)
    }

    /// Like [`NodeSet::new`] but skips the pairwise-distinctness check. Finite
    /// coordinates are still enforced.
    pub fn new_unchecked(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidNodes(format!("dimension {dim} not in {{1, 2}}")));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidNodes(format!(
                "{} coordinates do not divide into dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidNodes(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points_1d(points: &[f64]) -> Result<Self> {
        Self::new(1, points.to_vec())
    }

    pub fn from_points_2d(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().flat_map(|p| *p).collect())
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Point `i` of a two-dimensional set.
    #[inline]
    pub fn point2(&self, i: usize) -> [f64; 2] {
        debug_assert_eq!(self.dim, 2);
        [self.coords[2 * i], self.coords[2 * i + 1]]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Subset of the points, in the given index order.
    pub fn select(&self, indices: &[usize]) -> NodeSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        NodeSet {
            dim: self.dim,
            coords,
        }
    }

    /// Concatenation of two sets of equal dimension. Distinctness across the
    /// two parts is re-checked.
    pub fn concat(&self, other: &NodeSet) -> Result<NodeSet> {
        if self.dim != other.dim {
            return Err(Error::InvalidNodes("dimension mismatch in concat".into()));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        NodeSet::new(self.dim, coords)
    }

    fn find_duplicate(&self) -> Option<(usize, usize)> {
        if self.len() < 2 {
            return None;
        }
        let tree = KdTree::new(self);
        for i in 0..self.len() {
            let nn = tree.nearest_k(self.point(i), 2);
            let j = if nn[0] == i { nn[1] } else { nn[0] };
            if self.point(i) == self.point(j) {
                return Some((i.min(j), i.max(j)));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nan() {
        assert!(NodeSet::from_points_2d(&[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]).is_err());
        assert!(NodeSet::from_points_1d(&[0.0, f64::NAN]).is_err());
        assert!(NodeSet::new(3, vec![0.0; 3]).is_err());
        assert!(NodeSet::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn select_and_concat() {
        let a = NodeSet::from_points_1d(&[0.0, 1.0, 2.0]).unwrap();
        let s = a.select(&[2, 0]);
        assert_eq!(s.coords(), &[2.0, 0.0]);
        let b = NodeSet::from_points_1d(&[5.0]).unwrap();
        assert_eq!(a.concat(&b).unwrap().len(), 4);
        assert!(a.concat(&s).is_err());
    }
}
