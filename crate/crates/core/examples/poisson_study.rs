//! Scalar Poisson problem on the circle and the star: rates on the smooth
//! circle grow with the degree, the star's inward corners hold them back.

use unfitted_rbffd::harness::{run_poisson_study, Domain, PoissonCase, StudyConfig};
use unfitted_rbffd::rbffd::StencilConfig;

fn main() -> unfitted_rbffd::Result<()> {
    for domain in [Domain::Circle, Domain::Star] {
        let geom = domain.geometry(512, StencilConfig::quintic_1d(6))?;
        let cfg = StudyConfig {
            h_list: vec![0.1, 0.05, 0.025],
            p_list: vec![2, 3, 4],
            h_ref: 0.01,
            p_ref: 5,
            ..Default::default()
        };
        let r = run_poisson_study(domain, PoissonCase::Study, &geom, &cfg)?;
        print!("{}", r.summary());
        for (p, rows) in &r.spatial {
            let worst = rows.iter().max_by(|a, b| a.err[0].total_cmp(&b.err[0])).expect("rows");
            println!("p={p}: largest error {:.2e} at ({:+.3}, {:+.3})", worst.err[0], worst.point[0], worst.point[1]);
        }
    }
    Ok(())
}
