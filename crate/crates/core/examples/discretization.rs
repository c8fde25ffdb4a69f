//! Unfitted discretization of the star domain: background grid, oversampled
//! evaluation points and the trimmed node set.

use unfitted_rbffd::harness::Domain;
use unfitted_rbffd::pointset::{Discretization, DiscretizationParams};
use unfitted_rbffd::rbffd::StencilConfig;

fn main() -> unfitted_rbffd::Result<()> {
    let geom = Domain::Star.geometry(512, StencilConfig::quintic_1d(6))?;
    println!("     h  p   nodes  interior  boundary  measured h  measured h_y");
    for p in [3, 5] {
        let n = StencilConfig::cubic_2d(p).stencil_size;
        for h in [0.08, 0.04, 0.02] {
            let d = Discretization::build(&geom, DiscretizationParams::new(h, 5, n))?;
            println!(
                "{h:6.3} {p:2} {:7} {:9} {:9} {:11.5} {:13.5}",
                d.n_nodes(),
                d.y_interior.len(),
                d.y_boundary.len(),
                d.h,
                d.h_y
            );
        }
    }
    Ok(())
}
