//! One displacement-boundary elasticity solve on the star domain with a
//! manufactured trigonometric field, compared with the exact displacement
//! and von Mises stress.

use unfitted_rbffd::harness::{relative_l2, solve_case, Domain, ManufacturedField, StudyConfig};
use unfitted_rbffd::rbffd::StencilConfig;

fn main() -> unfitted_rbffd::Result<()> {
    let geom = Domain::Star.geometry(512, StencilConfig::quintic_1d(6))?;
    let cfg = StudyConfig::default();
    let m = cfg.material;
    let field = ManufacturedField::Trig;
    println!("E = {}, nu = {}, lambda = {:.1}, mu = {:.1}", m.youngs_modulus, m.poisson_ratio, m.lambda, m.mu);
    for p in [3, 4, 5] {
        let sol = solve_case(
            &geom,
            0.02,
            p,
            &cfg,
            |d| Ok(field.boundary_values(d, &m, None)),
            |y| field.body_force(y, &m),
        )?;
        let pts = &sol.field.points;
        let exact_u1: Vec<f64> = pts.iter().map(|&y| field.displacement(y)[0]).collect();
        let exact_u2: Vec<f64> = pts.iter().map(|&y| field.displacement(y)[1]).collect();
        let exact_vm: Vec<f64> = pts.iter().map(|&y| field.von_mises(y, &m)).collect();
        println!(
            "p={p}: N={} M={}  err u1 {:.3e}  u2 {:.3e}  von Mises {:.3e}  (normal residual {:.1e})",
            sol.disc.n_nodes(),
            sol.disc.n_eval(),
            relative_l2(&sol.field.u1, &exact_u1)?,
            relative_l2(&sol.field.u2, &exact_u2)?,
            relative_l2(&sol.field.von_mises, &exact_vm)?,
            sol.report.normal_residual
        );
    }
    Ok(())
}
