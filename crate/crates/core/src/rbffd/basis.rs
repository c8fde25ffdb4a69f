//! Monomial and polyharmonic-spline building blocks for the local stencil
//! systems, together with the differential operators they can be hit with.

use crate::error::{Error, Result};

/// Differential operator applied to the local interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiffSpec {
    Identity,
    /// First partial derivative along the given axis (0-based).
    Partial(usize),
    /// Mixed or pure second partial derivative along the two axes.
    SecondPartial(usize, usize),
    Laplacian,
    /// `d^s/dt^s` for one-dimensional node sets.
    Derivative1d(u32),
}

impl DiffSpec {
    /// Terms of the operator as (multi-index, coefficient) pairs.
    pub(crate) fn terms(&self, dim: usize) -> Result<Vec<([u32; 2], f64)>> {
        let unit = |axis: usize| -> [u32; 2] {
            let mut a = [0; 2];
            a[axis] = 1;
            a
        };
        let check_axis = |axis: usize| -> Result<()> {
            if axis < dim {
                Ok(())
            } else {
                Err(Error::UnsupportedOperator(format!(
                    "axis {axis} in dimension {dim}"
                )))
            }
        };
        match *self {
            DiffSpec::Identity => Ok(vec![([0, 0], 1.0)]),
            DiffSpec::Partial(i) => {
                check_axis(i)?;
                Ok(vec![(unit(i), 1.0)])
            }
            DiffSpec::SecondPartial(i, j) => {
                check_axis(i)?;
                check_axis(j)?;
                let mut a = unit(i);
                a[j] += 1;
                Ok(vec![(a, 1.0)])
            }
            DiffSpec::Laplacian => Ok((0..dim)
                .map(|i| {
                    let mut a = [0; 2];
                    a[i] = 2;
                    (a, 1.0)
                })
                .collect()),
            DiffSpec::Derivative1d(s) => {
                if dim != 1 {
                    return Err(Error::UnsupportedOperator(
                        "d^s/dt^s requires a one-dimensional node set".into(),
                    ));
                }
                Ok(vec![([s, 0], 1.0)])
            }
        }
    }

    /// Total differentiation order.
    pub fn order(&self) -> u32 {
        match *self {
            DiffSpec::Identity => 0,
            DiffSpec::Partial(_) => 1,
            DiffSpec::SecondPartial(..) | DiffSpec::Laplacian => 2,
            DiffSpec::Derivative1d(s) => s,
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Multivariate monomials of total degree <= `degree`, graded lexicographic.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    dim: usize,
    exponents: Vec<[u32; 2]>,
}

impl MonomialBasis {
    pub fn new(dim: usize, degree: u32) -> Self {
        let mut exponents = Vec::new();
        for total in 0..=degree {
            if dim == 1 {
                exponents.push([total, 0]);
            } else {
                for a in (0..=total).rev() {
                    exponents.push([a, total - a]);
                }
            }
        }
        Self { dim, exponents }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u32; 2]] {
        &self.exponents
    }

    /// Values of every monomial at `x`.
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            *o = monomial_derivative(x, *e, [0, 0], self.dim);
        }
    }

    /// Derivative `alpha` of every monomial at `x`, accumulated with weight
    /// `coeff` into `out`.
    pub fn accumulate_derivative(&self, x: &[f64], alpha: [u32; 2], coeff: f64, out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            *o += coeff * monomial_derivative(x, *e, alpha, self.dim);
        }
    }
}

/// `d^alpha x^e` evaluated at `x`.
pub(crate) fn monomial_derivative(x: &[f64], e: [u32; 2], alpha: [u32; 2], dim: usize) -> f64 {
    let mut value = 1.0;
    for axis in 0..dim {
        let (p, a) = (e[axis], alpha[axis]);
        if a > p {
            return 0.0;
        }
        let falling: f64 = ((p - a + 1)..=p).map(f64::from).product();
        value *= falling * x[axis].powi((p - a) as i32);
    }
    if dim == 1 && alpha[1] > 0 {
        return 0.0;
    }
    value
}

/// Derivative `alpha` (with respect to the evaluation point) of the
/// polyharmonic spline `r^k`, where `diff` is evaluation point minus centre.
pub(crate) fn phs_derivative(diff: &[f64], alpha: [u32; 2], k: u32) -> Result<f64> {
    let kf = f64::from(k);
    match diff.len() {
        1 => {
            let u = diff[0];
            let s = alpha[0];
            if s > k {
                return Err(Error::UnsupportedOperator(format!(
                    "derivative order {s} exceeds the spline exponent {k}"
                )));
            }
            let falling: f64 = ((k - s + 1)..=k).map(f64::from).product();
            let sign = if s % 2 == 1 { u.signum() } else { 1.0 };
            let sign = if u == 0.0 && s % 2 == 1 { 0.0 } else { sign };
            Ok(falling * u.abs().powi((k - s) as i32) * sign)
        }
        2 => {
            let r2 = diff[0] * diff[0] + diff[1] * diff[1];
            let r = r2.sqrt();
            match alpha {
                [0, 0] => Ok(r.powi(k as i32)),
                [1, 0] | [0, 1] => {
                    let axis = if alpha[0] == 1 { 0 } else { 1 };
                    Ok(kf * r.powi(k as i32 - 2) * diff[axis])
                }
                [2, 0] | [0, 2] | [1, 1] => {
                    let (i, j) = match alpha {
                        [2, 0] => (0, 0),
                        [0, 2] => (1, 1),
                        _ => (0, 1),
                    };
                    // k(k-2) r^(k-4) d_i d_j vanishes at r = 0 for k >= 3.
                    let cross = if r == 0.0 {
                        0.0
                    } else {
                        kf * (kf - 2.0) * r.powi(k as i32 - 4) * diff[i] * diff[j]
                    };
                    let diag = if i == j { kf * r.powi(k as i32 - 2) } else { 0.0 };
                    Ok(diag + cross)
                }
                _ => Err(Error::UnsupportedOperator(format!(
                    "spline derivative {alpha:?} in two dimensions"
                ))),
            }
        }
        d => Err(Error::UnsupportedOperator(format!("dimension {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.exponents(), &[[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]);
        assert_eq!(MonomialBasis::new(1, 3).len(), 4);
        assert_eq!(MonomialBasis::new(2, 5).len(), binomial(7, 2));
    }

    #[test]
    fn monomial_derivatives() {
        // d/dx (x^3 y^2) = 3 x^2 y^2 at (2, 3) = 108
        assert_eq!(monomial_derivative(&[2.0, 3.0], [3, 2], [1, 0], 2), 108.0);
        // d2/dxdy (x^3 y^2) = 6 x^2 y = 72
        assert_eq!(monomial_derivative(&[2.0, 3.0], [3, 2], [1, 1], 2), 72.0);
        assert_eq!(monomial_derivative(&[2.0, 3.0], [1, 2], [2, 0], 2), 0.0);
        // d^3/dt^3 t^5 = 60 t^2
        assert_eq!(monomial_derivative(&[2.0], [5, 0], [3, 0], 1), 240.0);
    }

    fn fd_check(diff: [f64; 2], alpha: [u32; 2], k: u32) {
        let h = 1e-5;
        let f = |d: [f64; 2], a: [u32; 2]| phs_derivative(&d, a, k).unwrap();
        let expected = match alpha {
            [1, 0] => (f([diff[0] + h, diff[1]], [0, 0]) - f([diff[0] - h, diff[1]], [0, 0])) / (2.0 * h),
            [0, 1] => (f([diff[0], diff[1] + h], [0, 0]) - f([diff[0], diff[1] - h], [0, 0])) / (2.0 * h),
            [2, 0] => (f([diff[0] + h, diff[1]], [1, 0]) - f([diff[0] - h, diff[1]], [1, 0])) / (2.0 * h),
            [0, 2] => (f([diff[0], diff[1] + h], [0, 1]) - f([diff[0], diff[1] - h], [0, 1])) / (2.0 * h),
            [1, 1] => (f([diff[0], diff[1] + h], [1, 0]) - f([diff[0], diff[1] - h], [1, 0])) / (2.0 * h),
            _ => unreachable!(),
        };
        let got = f(diff, alpha);
        assert!((got - expected).abs() <= 1e-6 * (1.0 + expected.abs()), "{alpha:?} k={k}: {got} vs {expected}");
    }

    #[test]
    fn phs_derivatives_match_finite_differences() {
        for k in [3, 5] {
            for alpha in [[1, 0], [0, 1], [2, 0], [0, 2], [1, 1]] {
                fd_check([0.3, -0.7], alpha, k);
                fd_check([-1.1, 0.2], alpha, k);
            }
        }
    }

    #[test]
    fn phs_1d_high_derivatives() {
        // |u|^5 derivatives at u = -0.5
        let u = [-0.5];
        let d = |s| phs_derivative(&u, [s, 0], 5).unwrap();
        assert!((d(0) - 0.03125).abs() < 1e-15);
        assert!((d(1) - 5.0 * 0.0625 * -1.0).abs() < 1e-15);
        assert!((d(2) - 20.0 * 0.125).abs() < 1e-15);
        assert!((d(5) - -120.0).abs() < 1e-12);
        assert_eq!(phs_derivative(&[0.0], [5, 0], 5).unwrap(), 0.0);
        assert!(phs_derivative(&[0.1], [6, 0], 5).is_err());
    }

    #[test]
    fn laplacian_terms() {
        assert_eq!(DiffSpec::Laplacian.terms(2).unwrap().len(), 2);
        assert!(DiffSpec::Derivative1d(2).terms(2).is_err());
        assert!(DiffSpec::Partial(1).terms(1).is_err());
        assert_eq!(DiffSpec::Laplacian.order(), 2);
    }
}
