//! Convergence studies: manufactured solutions, self-referenced benchmarks
//! and the scalar Poisson study, with error norms, order estimates and CSV
//! output.

mod domains;
mod manufactured;
mod output;
mod studies;

use crate::error::{Error, Result};

pub use domains::{inward_corners, Domain, STAR_AMPLITUDE, STAR_LOBES, STAR_RADIUS};
pub use manufactured::ManufacturedField;
pub use output::{
    convergence_csv, parse_convergence_csv, spatial_csv, write_convergence_csv, write_spatial_csv, ConvergenceRecord, SpatialRow,
    CONVERGENCE_HEADER, SPATIAL_HEADER,
};
pub use studies::{
    run_benchmark, run_benchmark_1, run_benchmark_2, run_manufactured, run_poisson_study, solve_case,
    solve_poisson_case, BenchmarkInputs, BoundaryMode, CaseSolution, PoissonCase, StudyConfig, StudyResult,
};

/// `||candidate - reference|| / ||reference||` in the Euclidean norm.
pub fn relative_l2(candidate: &[f64], reference: &[f64]) -> Result<f64> {
    if candidate.len() != reference.len() {
        return Err(Error::Size(format!(
            "{} candidate values for {} reference values",
            candidate.len(),
            reference.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (c, r) in candidate.iter().zip(reference) {
        num += (c - r) * (c - r);
        den += r * r;
    }
    if den == 0.0 {
        return Err(Error::ZeroNorm("reference field is identically zero".into()));
    }
    Ok((num / den).sqrt())
}

/// Relative errors of the displacement components and von Mises stress,
/// plus pointwise absolute errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub err_u1: f64,
    pub err_u2: f64,
    pub err_vm: f64,
    /// `|e_u1|, |e_u2|, |e_vm|` at every reference point.
    pub pointwise: Vec<[f64; 3]>,
}

impl ErrorReport {
    /// Compares candidate fields with reference fields at the same points.
    /// Scalar problems pass empty second and third fields.
    pub fn compare(candidate: [&[f64]; 3], reference: [&[f64]; 3]) -> Result<Self> {
        let m = reference[0].len();
        let mut errs = [0.0; 3];
        for f in 0..3 {
            if reference[f].is_empty() && candidate[f].is_empty() {
                continue;
            }
            errs[f] = relative_l2(candidate[f], reference[f])?;
        }
        let pointwise = (0..m)
            .map(|i| {
                let mut e = [0.0; 3];
                for f in 0..3 {
                    if !reference[f].is_empty() {
                        e[f] = (candidate[f][i] - reference[f][i]).abs();
                    }
                }
                e
            })
            .collect();
        Ok(Self {
            err_u1: errs[0],
            err_u2: errs[1],
            err_vm: errs[2],
            pointwise,
        })
    }
}

/// Evaluates a solved elastic field at the reference points with the
/// candidate's own operators and compares.
pub fn relative_error(
    candidate: &CaseSolution,
    reference: &crate::elasticity::ElasticField,
) -> Result<ErrorReport> {
    let points = crate::rbffd::NodeSet::from_points_2d(&reference.points)?;
    let c = candidate.evaluate_at(&points)?;
    ErrorReport::compare(
        [&c.u1, &c.u2, &c.von_mises],
        [&reference.u1, &reference.u2, &reference.von_mises],
    )
}

/// Slope estimate over the tail of a refinement sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub order: f64,
    /// False when the errors do not strictly decrease over the tail.
    pub converging: bool,
}

/// Points used by [`estimate_order`].
pub const ORDER_TAIL: usize = 3;

/// Least-squares slope of `log(err)` against `log(1/h)` over the last three
/// points.
pub fn estimate_order(h: &[f64], err: &[f64]) -> Result<OrderEstimate> {
    if h.len() != err.len() {
        return Err(Error::Size("h and error lists differ in length".into()));
    }
    if h.len() < ORDER_TAIL {
        return Err(Error::Size(format!("{} points, need {ORDER_TAIL}", h.len())));
    }
    let k = h.len() - ORDER_TAIL;
    let (h, err) = (&h[k..], &err[k..]);
    if h.iter().chain(err).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Ok(OrderEstimate {
            order: f64::NAN,
            converging: false,
        });
    }
    let xs: Vec<f64> = h.iter().map(|v| -v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = ORDER_TAIL as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("h_list", "spacings must differ"));
    }
    Ok(OrderEstimate {
        order: -sxy / sxx,
        converging: err.windows(2).all(|w| w[1] < w[0]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_l2_examples() {
        let r = [1.0, -2.0, 3.0];
        assert_eq!(relative_l2(&r, &r).unwrap(), 0.0);
        let c: Vec<f64> = r.iter().map(|v| 2.0 * v).collect();
        assert!((relative_l2(&c, &r).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(relative_l2(&[1.0], &[0.0]), Err(Error::ZeroNorm(_))));
    }

    #[test]
    fn power_law_orders() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        for p in [2.0, 3.5] {
            let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(p)).collect();
            let est = estimate_order(&h, &e).unwrap();
            assert!((est.order - p).abs() < 1e-10);
            assert!(est.converging);
        }
        let flat = estimate_order(&h, &[1.0; 4]).unwrap();
        assert!(!flat.converging);
        assert!(estimate_order(&h[..2], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn only_tail_counts() {
        let h = [0.2, 0.1, 0.05, 0.025];
        let e = [1e-9, 1e-1, 1e-1 / 8.0, 1e-1 / 64.0];
        let est = estimate_order(&h, &e).unwrap();
        assert!((est.order - 3.0).abs() < 1e-10 && est.converging);
    }
}
