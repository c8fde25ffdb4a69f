//! RBF-FD building blocks: nearest-neighbour search, local PHS + polynomial
//! stencils and the sparse global operators assembled from them.

mod basis;
mod knn;
mod nodes;
mod operator;
mod stencil;

pub use basis::{DiffSpec, MonomialBasis};
pub use knn::{knn, KdTree};
pub use nodes::NodeSet;
pub use operator::{assemble_operator, build_stencils, OperatorBuilder, SparseOperator};
pub use stencil::{stencil_size, Stencil, StencilConfig, MAX_STENCIL_CONDITION};
