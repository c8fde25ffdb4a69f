//! k-d tree queries used for stencil selection.

use unfitted_rbffd::rbffd::{knn, KdTree, NodeSet};

fn main() -> unfitted_rbffd::Result<()> {
    let pts: Vec<[f64; 2]> = (0..2000)
        .map(|i| {
            let a = i as f64 * 2.399_963;
            let r = (i as f64 / 2000.0).sqrt();
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let nodes = NodeSet::from_points_2d(&pts)?;
    let tree = KdTree::new(&nodes);
    let q = [0.25, -0.1];
    for (d2, i) in tree.nearest_k_with_distances(&q, 6) {
        println!("node {i:5} at ({:+.4}, {:+.4}), distance {:.5}", pts[i][0], pts[i][1], d2.sqrt());
    }
    let queries = NodeSet::from_points_2d(&[[0.0, 0.0], [0.9, 0.0]])?;
    for (l, nb) in knn(&nodes, &queries, 4)?.iter().enumerate() {
        println!("query {l}: {nb:?}");
    }
    Ok(())
}
