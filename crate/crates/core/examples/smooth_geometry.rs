//! Smooths the shipped noisy dome-shaped outline and prints samples of the
//! fitted curve with outward normals.

use unfitted_rbffd::cli::builtin_dataset;
use unfitted_rbffd::rbffd::StencilConfig;
use unfitted_rbffd::smoothing::smooth_boundary;

fn main() -> unfitted_rbffd::Result<()> {
    let data = builtin_dataset();
    let geom = smooth_boundary(&data.vertices, data.scale, 120, StencilConfig::quintic_1d(6))?;
    println!("{} raw vertices, scale {:.6}", data.vertices.len(), data.scale);
    println!("perimeter {:.4}, bounding box {:?}", geom.perimeter(), geom.bounding_box()?);
    let ts = geom.uniform_arclength_params(12);
    let pts = geom.points(&ts)?;
    let nrm = geom.normals(&ts)?;
    println!("       t        x        y       nx       ny");
    for i in 0..ts.len() {
        println!(
            "{:8.4} {:8.4} {:8.4} {:8.4} {:8.4}",
            ts[i], pts[i][0], pts[i][1], nrm[i][0], nrm[i][1]
        );
    }
    Ok(())
}
