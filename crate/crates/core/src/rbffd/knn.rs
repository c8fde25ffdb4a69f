//! Exact k-nearest-neighbour search.
//!
//! Neighbours are ordered by squared Euclidean distance, ties broken by
//! ascending point index. The ordering is total, so results are reproducible
//! bit for bit and agree with a brute-force scan using the same distance
//! formula.

use crate::error::{Error, Result};
use crate::rbffd::nodes::NodeSet;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum KdNode {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Static k-d tree over a [`NodeSet`].
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    perm: Vec<usize>,
    nodes: Vec<KdNode>,
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sorted, bounded list of the best candidates seen so far.
struct Candidates {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Candidates {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    #[inline]
    fn worst_distance(&self) -> f64 {
        if self.is_full() {
            self.items[self.k - 1].0
        } else {
            f64::INFINITY
        }
    }

    #[inline]
    fn offer(&mut self, d: f64, idx: usize) {
        if self.is_full() {
            let w = self.items[self.k - 1];
            if !(d < w.0 || (d == w.0 && idx < w.1)) {
                return;
            }
        }
        let pos = self
            .items
            .partition_point(|a| a.0 < d || (a.0 == d && a.1 < idx));
        self.items.insert(pos, (d, idx));
        self.items.truncate(self.k);
    }
}

impl KdTree {
    pub fn new(points: &NodeSet) -> Self {
        let dim = points.dim();
        let coords = points.coords().to_vec();
        let mut perm: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        if !perm.is_empty() {
            let n = perm.len();
            build(&coords, dim, &mut perm, 0, n, &mut nodes);
        }
        Self {
            dim,
            coords,
            perm,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices of the `k` nearest points to `query`, closest first. Returns
    /// fewer than `k` indices only if the tree holds fewer points.
    pub fn nearest_k(&self, query: &[f64], k: usize) -> Vec<usize> {
        self.nearest_k_with_distances(query, k)
            .into_iter()
            .map(|(_, i)| i)
            .collect()
    }

    /// Like [`KdTree::nearest_k`] but also returns squared distances.
    pub fn nearest_k_with_distances(&self, query: &[f64], k: usize) -> Vec<(f64, usize)> {
        debug_assert_eq!(query.len(), self.dim);
        if k == 0 || self.nodes.is_empty() {
            return Vec::new();
        }
        let mut cand = Candidates::new(k.min(self.len()));
        self.search(0, query, &mut cand);
        cand.items
    }

    /// Index of the closest point.
    pub fn nearest(&self, query: &[f64]) -> usize {
        self.nearest_k(query, 1)[0]
    }

    fn search(&self, node: usize, query: &[f64], cand: &mut Candidates) {
        match self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for &idx in &self.perm[start..end] {
                    cand.offer(squared_distance(self.point(idx), query), idx);
                }
            }
            KdNode::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, cand);
                // `<=` keeps equal-distance points with smaller indices reachable.
                if diff * diff <= cand.worst_distance() {
                    self.search(far, query, cand);
                }
            }
        }
    }
}

fn build(
    coords: &[f64],
    dim: usize,
    perm: &mut [usize],
    offset: usize,
    end: usize,
    nodes: &mut Vec<KdNode>,
) -> usize {
    let id = nodes.len();
    let len = end - offset;
    if len <= LEAF_SIZE {
        nodes.push(KdNode::Leaf { start: offset, end });
        return id;
    }
    let slice = &mut perm[offset..end];
    let mut axis = 0;
    let mut best_spread = -1.0;
    for a in 0..dim {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in slice.iter() {
            let c = coords[i * dim + a];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            axis = a;
        }
    }
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        coords[a * dim + axis]
            .total_cmp(&coords[b * dim + axis])
            .then(a.cmp(&b))
    });
    let value = coords[slice[mid] * dim + axis];
    nodes.push(KdNode::Leaf { start: 0, end: 0 });
    // Left holds coordinates <= value, right holds coordinates >= value.
    let left = build(coords, dim, perm, offset, offset + mid, nodes);
    let right = build(coords, dim, perm, offset + mid, end, nodes);
    nodes[id] = KdNode::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

/// For every query point, the indices of its `k` nearest base points sorted by
/// distance (ties by ascending index).
pub fn knn(base: &NodeSet, queries: &NodeSet, k: usize) -> Result<Vec<Vec<usize>>> {
    if k > base.len() {
        return Err(Error::Size(format!(
            "k = {k} exceeds the {} available base points",
            base.len()
        )));
    }
    if base.dim() != queries.dim() {
        return Err(Error::Size("base and query dimensions differ".into()));
    }
    let tree = KdTree::new(base);
    Ok(queries.iter().map(|q| tree.nearest_k(q, k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(base: &NodeSet, q: &[f64], k: usize) -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = base
            .iter()
            .enumerate()
            .map(|(i, p)| (squared_distance(p, q), i))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.into_iter().take(k).map(|(_, i)| i).collect()
    }

    #[test]
    fn line_example() {
        let base = NodeSet::from_points_1d(&[0.0, 1.0, 2.0]).unwrap();
        let q = NodeSet::from_points_1d(&[0.6]).unwrap();
        assert_eq!(knn(&base, &q, 2).unwrap(), vec![vec![1, 0]]);
    }

    #[test]
    fn coincident_query() {
        let base = NodeSet::from_points_2d(&[[0.0, 0.0], [0.3, 0.1], [1.0, 1.0]]).unwrap();
        let q = NodeSet::from_points_2d(&[[0.3, 0.1]]).unwrap();
        assert_eq!(knn(&base, &q, 1).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn square_ties_by_index() {
        let base =
            NodeSet::from_points_2d(&[[1.0, 1.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let q = NodeSet::from_points_2d(&[[0.5, 0.5]]).unwrap();
        assert_eq!(knn(&base, &q, 4).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(knn(&base, &q, 2).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn k_too_large() {
        let base = NodeSet::from_points_1d(&[0.0, 1.0]).unwrap();
        assert!(matches!(knn(&base, &base, 3), Err(Error::Size(_))));
    }

    #[test]
    fn grid_ties_match_brute_force() {
        let mut pts = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                pts.push([i as f64 * 0.1, j as f64 * 0.1]);
            }
        }
        let base = NodeSet::from_points_2d(&pts).unwrap();
        let tree = KdTree::new(&base);
        for (qi, q) in base.iter().enumerate().step_by(7) {
            for k in [1, 5, 12, 21] {
                assert_eq!(tree.nearest_k(q, k), brute_force(&base, q, k), "query {qi} k {k}");
            }
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 20..120),
            qs in prop::collection::vec((-1.2f64..1.2, -1.2f64..1.2), 1..10),
            k in 1usize..20,
        ) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let base = NodeSet::new_unchecked(2, pts.iter().flat_map(|p| *p).collect()).unwrap();
            let tree = KdTree::new(&base);
            for (x, y) in qs {
                let q = [x, y];
                prop_assert_eq!(tree.nearest_k(&q, k), brute_force(&base, &q, k));
            }
        }
    }
}
