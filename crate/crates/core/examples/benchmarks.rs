//! Self-referenced convergence on the shipped dome geometry: pure
//! displacement data, then displacement data blended with a traction window.

use unfitted_rbffd::cli::{benchmark_inputs, RunConfig};
use unfitted_rbffd::harness::{run_benchmark_1, run_benchmark_2, StudyConfig};

fn main() -> unfitted_rbffd::Result<()> {
    let inputs = benchmark_inputs(&RunConfig::default())?;
    let cfg = StudyConfig {
        h_list: vec![0.04, 0.02, 0.01],
        p_list: vec![4],
        h_ref: 0.004,
        ..Default::default()
    };
    for r in [run_benchmark_1(&inputs, &cfg)?, run_benchmark_2(&inputs, &cfg)?] {
        print!("{}", r.summary());
        if let Some(sol) = &r.solution {
            let vm = sol.field.von_mises.iter().cloned().fold(0.0, f64::max);
            let dip = sol.field.u2.iter().cloned().fold(0.0, f64::min);
            println!("reference: N={} max von Mises {vm:.1}, lowest u2 {dip:.4}", sol.disc.n_nodes());
        }
    }
    Ok(())
}
