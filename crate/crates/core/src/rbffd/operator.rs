//! Global evaluation and differentiation operators assembled from local
//! stencil weights.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rbffd::basis::DiffSpec;
use crate::rbffd::knn::KdTree;
use crate::rbffd::nodes::NodeSet;
use crate::rbffd::stencil::{Stencil, StencilConfig};
use crate::sparse::CsrMatrix;

/// Number of stencil centres processed per parallel batch. Bounds the weight
/// buffer held between the parallel solve and the sequential scatter.
const CENTER_BATCH: usize = 4096;

/// Sparse `M x N` matrix mapping nodal values to (differentiated) values at
/// evaluation points. Every row has exactly `n` slots.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    matrix: CsrMatrix,
    nearest_center: Vec<usize>,
    stencil_size: usize,
}

impl SparseOperator {
    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn stencil_size(&self) -> usize {
        self.stencil_size
    }

    /// Closest stencil centre of every evaluation point.
    pub fn nearest_center(&self) -> &[usize] {
        &self.nearest_center
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        self.matrix.row(r)
    }

    pub fn apply(&self, nodal: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(nodal)
    }
}

/// Stencil neighbourhoods over a fixed node set, ready to produce weights for
/// arbitrary evaluation points.
#[derive(Debug, Clone)]
pub struct OperatorBuilder {
    nodes: NodeSet,
    cfg: StencilConfig,
    tree: KdTree,
    neighbors: Vec<usize>,
}

impl OperatorBuilder {
    pub fn new(nodes: &NodeSet, cfg: StencilConfig) -> Result<Self> {
        let n = cfg.stencil_size;
        if nodes.len() < n {
            return Err(Error::Size(format!(
                "{} nodes cannot support stencils of size {n}",
                nodes.len()
            )));
        }
        if n < cfg.monomial_count(nodes.dim()) {
            return Err(Error::param(
                "stencil_size",
                format!("{n} is smaller than the monomial count"),
            ));
        }
        let tree = KdTree::new(nodes);
        let neighbors: Vec<usize> = (0..nodes.len())
            .into_par_iter()
            .flat_map_iter(|i| tree.nearest_k(nodes.point(i), n))
            .collect();
        Ok(Self {
            nodes: nodes.clone(),
            cfg,
            tree,
            neighbors,
        })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn config(&self) -> &StencilConfig {
        &self.cfg
    }

    pub fn tree(&self) -> &KdTree {
        &self.tree
    }

    /// Neighbour list of the stencil centred at node `center`.
    pub fn neighbors(&self, center: usize) -> &[usize] {
        let n = self.cfg.stencil_size;
        &self.neighbors[center * n..(center + 1) * n]
    }

    pub fn stencil(&self, center: usize) -> Result<Stencil> {
        Stencil::new(
            self.nodes.coords(),
            self.nodes.dim(),
            center,
            self.neighbors(center).to_vec(),
            &self.cfg,
        )
    }

    /// Closest node of every evaluation point.
    pub fn nearest_centers(&self, eval: &NodeSet) -> Vec<usize> {
        (0..eval.len())
            .into_par_iter()
            .map(|l| self.tree.nearest(eval.point(l)))
            .collect()
    }

    /// Computes the weights of every operator in `ops` at every evaluation
    /// point, handing them to `sink(point, neighbours, weights)` where
    /// `weights` holds `ops.len()` consecutive blocks of `n` values. Each
    /// stencil is factorized once for all the points it serves. Returns the
    /// nearest-centre list.
    pub fn for_each_weights<F>(&self, eval: &NodeSet, ops: &[DiffSpec], mut sink: F) -> Result<Vec<usize>>
    where
        F: FnMut(usize, &[usize], &[f64]),
    {
        if eval.dim() != self.nodes.dim() {
            return Err(Error::Size("evaluation and node dimensions differ".into()));
        }
        for op in ops {
            op.terms(self.nodes.dim())?;
        }
        let kappa = self.nearest_centers(eval);
        // Group evaluation points by centre, keeping ascending point order.
        let n_nodes = self.nodes.len();
        let mut start = vec![0usize; n_nodes + 1];
        for &c in &kappa {
            start[c + 1] += 1;
        }
        for i in 0..n_nodes {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut order = vec![0usize; kappa.len()];
        for (l, &c) in kappa.iter().enumerate() {
            order[fill[c]] = l;
            fill[c] += 1;
        }
        let active: Vec<usize> = (0..n_nodes).filter(|&c| start[c + 1] > start[c]).collect();
        let n = self.cfg.stencil_size;
        let block = ops.len() * n;

        for batch in active.chunks(CENTER_BATCH) {
            let results: Vec<Result<Vec<f64>>> = batch
                .par_iter()
                .map(|&c| {
                    let stencil = self.stencil(c)?;
                    let pts = &order[start[c]..start[c + 1]];
                    let points: Vec<&[f64]> = pts.iter().map(|&l| eval.point(l)).collect();
                    let mut w = vec![0.0; pts.len() * block];
                    stencil.weights_into(&points, ops, &mut w)?;
                    Ok(w)
                })
                .collect();
            for (&c, res) in batch.iter().zip(results) {
                let w = res?;
                let nb = self.neighbors(c);
                for (k, &l) in order[start[c]..start[c + 1]].iter().enumerate() {
                    sink(l, nb, &w[k * block..(k + 1) * block]);
                }
            }
        }
        Ok(kappa)
    }

    /// Assembles one sparse operator per entry of `ops` on the evaluation set.
    pub fn assemble(&self, eval: &NodeSet, ops: &[DiffSpec]) -> Result<Vec<SparseOperator>> {
        let n = self.cfg.stencil_size;
        let m = eval.len();
        let mut cols = vec![0u32; m * n];
        let mut vals: Vec<Vec<f64>> = vec![vec![0.0; m * n]; ops.len()];
        let kappa = self.for_each_weights(eval, ops, |l, nb, w| {
            for (dst, &j) in cols[l * n..(l + 1) * n].iter_mut().zip(nb) {
                *dst = j as u32;
            }
            for (o, v) in vals.iter_mut().enumerate() {
                v[l * n..(l + 1) * n].copy_from_slice(&w[o * n..(o + 1) * n]);
            }
        })?;
        vals.into_iter()
            .map(|v| {
                Ok(SparseOperator {
                    matrix: CsrMatrix::fixed_width(m, self.nodes.len(), n, cols.clone(), v)?,
                    nearest_center: kappa.clone(),
                    stencil_size: n,
                })
            })
            .collect()
    }
}

/// One stencil per node.
pub fn build_stencils(nodes: &NodeSet, cfg: StencilConfig) -> Result<Vec<Stencil>> {
    let builder = OperatorBuilder::new(nodes, cfg)?;
    (0..nodes.len())
        .into_par_iter()
        .map(|c| builder.stencil(c))
        .collect()
}

/// Assembles the operator `op` mapping values at `nodes` to `eval_points`.
pub fn assemble_operator(
    nodes: &NodeSet,
    eval_points: &NodeSet,
    cfg: StencilConfig,
    op: DiffSpec,
) -> Result<SparseOperator> {
    let builder = OperatorBuilder::new(nodes, cfg)?;
    Ok(builder.assemble(eval_points, &[op])?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, h: f64) -> NodeSet {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push([i as f64 * h + 0.01 * (j as f64).sin(), j as f64 * h + 0.01 * (i as f64).cos()]);
            }
        }
        NodeSet::from_points_2d(&pts).unwrap()
    }

    #[test]
    fn identity_on_nodes() {
        let nodes = grid(8, 0.1);
        let op = assemble_operator(&nodes, &nodes, StencilConfig::cubic_2d(2), DiffSpec::Identity).unwrap();
        let f: Vec<f64> = (0..nodes.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let g = op.apply(&f);
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(op.nearest_center(), (0..nodes.len()).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn laplacian_of_quadratic() {
        let nodes = grid(12, 0.1);
        let eval = NodeSet::from_points_2d(&[[0.45, 0.52], [0.61, 0.33], [0.2, 0.8]]).unwrap();
        let op = assemble_operator(&nodes, &eval, StencilConfig::cubic_2d(2), DiffSpec::Laplacian).unwrap();
        let f: Vec<f64> = nodes.iter().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
        for v in op.apply(&f) {
            assert!((v - 4.0).abs() <= 1e-7 * 4.0, "{v}");
        }
        for r in 0..op.n_rows() {
            assert_eq!(op.row(r).0.len(), 12);
        }
    }

    #[test]
    fn rows_sum_to_one_and_are_local() {
        let nodes = grid(10, 0.1);
        let eval = NodeSet::from_points_2d(&[[0.33, 0.41], [0.05, 0.87]]).unwrap();
        let builder = OperatorBuilder::new(&nodes, StencilConfig::cubic_2d(3)).unwrap();
        let op = builder.assemble(&eval, &[DiffSpec::Identity]).unwrap().remove(0);
        for r in 0..op.n_rows() {
            let (cols, vals) = op.row(r);
            assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let nb = builder.neighbors(op.nearest_center()[r]);
            assert!(cols.iter().all(|c| nb.contains(&(*c as usize))));
        }
    }

    #[test]
    fn too_few_nodes() {
        let nodes = grid(3, 0.1);
        assert!(matches!(
            OperatorBuilder::new(&nodes, StencilConfig::cubic_2d(2)),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn all_nodes_in_every_stencil_when_n_equals_count() {
        let nodes = NodeSet::from_points_1d(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let cfg = StencilConfig::new(1, 1, 3).unwrap();
        let stencils = build_stencils(&nodes, cfg).unwrap();
        for st in &stencils {
            let mut nb = st.neighbors.clone();
            nb.sort();
            assert_eq!(nb, vec![0, 1, 2, 3]);
            assert_eq!(st.neighbors[0], st.center);
        }
    }
}
