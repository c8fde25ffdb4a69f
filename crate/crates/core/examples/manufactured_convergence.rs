//! Convergence of the trigonometric manufactured field on the star domain,
//! with displacement data and with a blended traction window.

use unfitted_rbffd::harness::{convergence_csv, run_manufactured, BoundaryMode, Domain, ManufacturedField, StudyConfig};
use unfitted_rbffd::rbffd::StencilConfig;
use unfitted_rbffd::smoothing::RobinCoefficients;

fn main() -> unfitted_rbffd::Result<()> {
    let geom = Domain::Star.geometry(512, StencilConfig::quintic_1d(6))?;
    let cfg = StudyConfig {
        h_list: vec![0.08, 0.04, 0.02],
        p_list: vec![3, 4],
        ..Default::default()
    };
    let robin = RobinCoefficients::new(vec![1.5, 2.3], 20.0, vec![0])?;
    for mode in [BoundaryMode::Dirichlet, BoundaryMode::Robin(robin)] {
        let r = run_manufactured(ManufacturedField::Trig, &geom, &mode, &cfg)?;
        print!("{}{}", r.summary(), convergence_csv(&r.records));
    }
    Ok(())
}
