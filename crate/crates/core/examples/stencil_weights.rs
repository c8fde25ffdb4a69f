//! RBF-FD differentiation on a scattered 2D point cloud: builds Laplacian
//! and gradient operators with cubic splines plus degree-4 monomials and
//! checks them on a smooth function.

use unfitted_rbffd::rbffd::{DiffSpec, NodeSet, OperatorBuilder, StencilConfig};

fn main() -> unfitted_rbffd::Result<()> {
    // jittered 40x40 lattice on the unit square
    let n = 40;
    let h = 1.0 / (n - 1) as f64;
    let mut coords = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let jitter = 0.2 * h * ((i * 7 + j * 13) as f64).sin();
            coords.extend([i as f64 * h + jitter, j as f64 * h - jitter]);
        }
    }
    let nodes = NodeSet::new(2, coords)?;
    let eval = NodeSet::from_points_2d(&[[0.31, 0.47], [0.5, 0.5], [0.72, 0.18]])?;

    let cfg = StencilConfig::cubic_2d(4);
    println!("stencil size {} for degree {}", cfg.stencil_size, cfg.poly_degree);
    let builder = OperatorBuilder::new(&nodes, cfg)?;
    let ops = builder.assemble(&eval, &[DiffSpec::Laplacian, DiffSpec::Partial(0)])?;

    let f = |x: f64, y: f64| (2.0 * x).sin() * (3.0 * y).cos();
    let lap = |x: f64, y: f64| -13.0 * f(x, y);
    let fx = |x: f64, y: f64| 2.0 * (2.0 * x).cos() * (3.0 * y).cos();
    let values: Vec<f64> = nodes.iter().map(|p| f(p[0], p[1])).collect();
    let approx_lap = ops[0].apply(&values);
    let approx_dx = ops[1].apply(&values);
    for l in 0..eval.len() {
        let [x, y] = eval.point2(l);
        println!(
            "({x:.2}, {y:.2})  laplacian {:+.6} (exact {:+.6})  d/dx {:+.6} (exact {:+.6})",
            approx_lap[l],
            lap(x, y),
            approx_dx[l],
            fx(x, y)
        );
    }
    Ok(())
}
