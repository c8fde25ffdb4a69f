//! Sparse overdetermined least squares: a 1D Poisson problem collocated at
//! twice as many points as unknowns.

use unfitted_rbffd::elasticity::{lstsq, SolveMethod};
use unfitted_rbffd::sparse::CsrMatrix;

fn main() -> unfitted_rbffd::Result<()> {
    // unknowns u_0..u_n on [0, 1]; rows: second differences at midpoints and
    // nodes, plus both end values
    let n = 50;
    let h = 1.0 / n as f64;
    let f = |x: f64| -(std::f64::consts::PI * x).sin() * std::f64::consts::PI.powi(2);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 1..n {
        let mut r = vec![0.0; n + 1];
        r[i - 1] = 1.0 / (h * h);
        r[i] = -2.0 / (h * h);
        r[i + 1] = 1.0 / (h * h);
        rows.push(r);
        rhs.push(f(i as f64 * h));
        // averaged stencil at the midpoint to the right
        if i + 2 <= n {
            let mut r = vec![0.0; n + 1];
            for (k, w) in [(i - 1, 0.5), (i, -0.5), (i + 1, -0.5), (i + 2, 0.5)] {
                r[k] = w / (h * h);
            }
            rows.push(r);
            rhs.push(f((i as f64 + 0.5) * h));
        }
    }
    for end in [0, n] {
        let mut r = vec![0.0; n + 1];
        r[end] = 1.0;
        rows.push(r);
        rhs.push(0.0);
    }
    let a = CsrMatrix::from_dense(&rows);
    println!("{} x {} system, {} stored entries", a.nrows(), a.ncols(), a.nnz());
    for method in [SolveMethod::Qr, SolveMethod::SemiNormal] {
        let (x, report) = lstsq(&a, &rhs, method)?;
        let err = (0..=n)
            .map(|i| (x[i] - (std::f64::consts::PI * i as f64 * h).sin()).abs())
            .fold(0.0, f64::max);
        println!(
            "{method:?}: residual {:.3e}, normal residual {:.1e}, max error vs sin(pi x) {err:.3e}",
            report.residual_norm, report.normal_residual
        );
    }
    Ok(())
}
