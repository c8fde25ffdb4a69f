//! Local stencils: PHS + monomial interpolation on the `n` nearest nodes of a
//! centre, in a frame scaled to `[-1, 1]^d`.

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;

use crate::error::{Error, Result};
use crate::rbffd::basis::{binomial, phs_derivative, DiffSpec, MonomialBasis};

/// Condition estimates above this reject the stencil.
pub const MAX_STENCIL_CONDITION: f64 = 1e14;

/// Stencil size `2 * C(p + d, d)`.
pub fn stencil_size(poly_degree: u32, dim: usize) -> usize {
    2 * binomial(poly_degree as usize + dim, dim)
}

/// Polynomial degree, spline exponent and stencil size of an RBF-FD
/// approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StencilConfig {
    pub poly_degree: u32,
    pub phs_exponent: u32,
    pub stencil_size: usize,
}

impl StencilConfig {
    /// Configuration with the default stencil size for dimension `dim`.
    pub fn new(poly_degree: u32, dim: usize, phs_exponent: u32) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::param("dim", format!("{dim} not in {{1, 2}}")));
        }
        if phs_exponent != 3 && phs_exponent != 5 {
            return Err(Error::param(
                "phs_exponent",
                format!("{phs_exponent} not in {{3, 5}}"),
            ));
        }
        Ok(Self {
            poly_degree,
            phs_exponent,
            stencil_size: stencil_size(poly_degree, dim),
        })
    }

    /// Cubic spline configuration used for the PDE operators in 2D.
    pub fn cubic_2d(poly_degree: u32) -> Self {
        Self::new(poly_degree, 2, 3).expect("valid configuration")
    }

    /// Quintic spline configuration used for periodic 1D fits.
    pub fn quintic_1d(poly_degree: u32) -> Self {
        Self::new(poly_degree, 1, 5).expect("valid configuration")
    }

    /// Overrides the stencil size. The override may not go below the default.
    pub fn with_stencil_size(mut self, n: usize, dim: usize) -> Result<Self> {
        let min = stencil_size(self.poly_degree, dim);
        if n < min {
            return Err(Error::param(
                "stencil_size",
                format!("{n} is below 2*C(p+d,d) = {min}"),
            ));
        }
        self.stencil_size = n;
        Ok(self)
    }

    pub fn monomial_count(&self, dim: usize) -> usize {
        binomial(self.poly_degree as usize + dim, dim)
    }
}

/// One stencil with its factorized augmented interpolation matrix.
#[derive(Debug)]
pub struct Stencil {
    pub center: usize,
    /// Node indices of the stencil; the first entry is the centre.
    pub neighbors: Vec<usize>,
    /// Maps original to local coordinates: `local = (x - shift) * scale`.
    pub scale: f64,
    pub shift: Vec<f64>,
    /// 1-norm condition estimate of the augmented matrix.
    pub condition: f64,
    dim: usize,
    phs_exponent: u32,
    scaled: Vec<f64>,
    basis: MonomialBasis,
    lu: PartialPivLu<f64>,
}

impl Stencil {
    /// Builds and factorizes the stencil for `center` over the given
    /// neighbour list (first entry must be the centre).
    pub fn new(
        coords: &[f64],
        dim: usize,
        center: usize,
        neighbors: Vec<usize>,
        cfg: &StencilConfig,
    ) -> Result<Self> {
        debug_assert_eq!(neighbors[0], center);
        let n = neighbors.len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &j in &neighbors {
            for a in 0..dim {
                let c = coords[j * dim + a];
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
        }
        let shift: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let extent = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| h - l)
            .fold(0.0f64, f64::max);
        if extent <= 0.0 {
            return Err(Error::StencilSingular {
                center,
                condition: f64::INFINITY,
            });
        }
        let scale = 2.0 / extent;
        let mut scaled = Vec::with_capacity(n * dim);
        for &j in &neighbors {
            for a in 0..dim {
                scaled.push((coords[j * dim + a] - shift[a]) * scale);
            }
        }

        let basis = MonomialBasis::new(dim, cfg.poly_degree);
        let a = augmented_matrix(&scaled, dim, cfg.phs_exponent, &basis);
        let lu = a.partial_piv_lu();
        let condition = condition_estimate(&a, &lu);
        if !condition.is_finite() || condition > MAX_STENCIL_CONDITION {
            return Err(Error::StencilSingular { center, condition });
        }
        Ok(Self {
            center,
            neighbors,
            scale,
            shift,
            condition,
            dim,
            phs_exponent: cfg.phs_exponent,
            scaled,
            basis,
            lu,
        })
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// Stencil points in the local frame.
    pub fn local_points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.scaled.chunks_exact(self.dim)
    }

    /// The (unfactorized) augmented matrix `[A P; P^T 0]` in the local frame.
    pub fn augmented_matrix(&self) -> Mat<f64> {
        augmented_matrix(&self.scaled, self.dim, self.phs_exponent, &self.basis)
    }

    fn to_local(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.shift)
            .map(|(v, s)| (v - s) * self.scale)
            .collect()
    }

    fn fill_rhs(&self, y_local: &[f64], op: &DiffSpec, col: &mut [f64]) -> Result<()> {
        let n = self.len();
        col.iter_mut().for_each(|v| *v = 0.0);
        let mut diff = vec![0.0; self.dim];
        for (coeff_alpha, coeff) in op.terms(self.dim)? {
            for (j, xj) in self.local_points().enumerate() {
                for a in 0..self.dim {
                    diff[a] = y_local[a] - xj[a];
                }
                col[j] += coeff * phs_derivative(&diff, coeff_alpha, self.phs_exponent)?;
            }
            self.basis
                .accumulate_derivative(y_local, coeff_alpha, coeff, &mut col[n..]);
        }
        Ok(())
    }

    /// Weights of `op` at `y` (original coordinates), one per stencil node.
    pub fn local_weights(&self, y: &[f64], op: DiffSpec) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.weights_into(&[y], &[op], &mut out)?;
        Ok(out)
    }

    /// Weights for every (point, operator) pair, written point-major into
    /// `out` (`points.len() * ops.len() * n` values). One batched solve.
    pub fn weights_into(&self, points: &[&[f64]], ops: &[DiffSpec], out: &mut [f64]) -> Result<()> {
        let n = self.len();
        let size = n + self.basis.len();
        let ncols = points.len() * ops.len();
        debug_assert_eq!(out.len(), ncols * n);
        let mut rhs = Mat::<f64>::zeros(size, ncols);
        let mut col = vec![0.0; size];
        for (p, y) in points.iter().enumerate() {
            let y_local = self.to_local(y);
            for (o, op) in ops.iter().enumerate() {
                self.fill_rhs(&y_local, op, &mut col)?;
                let c = p * ops.len() + o;
                for (i, v) in col.iter().enumerate() {
                    rhs[(i, c)] = *v;
                }
            }
        }
        let mut sol = rhs.clone();
        self.lu.solve_in_place(sol.as_mut());
        // high-order derivative weights cancel heavily; refinement pulls the
        // polynomial constraints back to roundoff
        let a = self.augmented_matrix();
        for _ in 0..2 {
            let mut r = &rhs - &a * &sol;
            self.lu.solve_in_place(r.as_mut());
            sol += &r;
        }
        let rhs = sol;
        for p in 0..points.len() {
            for (o, op) in ops.iter().enumerate() {
                let c = p * ops.len() + o;
                let factor = self.scale.powi(op.order() as i32);
                let dst = &mut out[c * n..(c + 1) * n];
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = rhs[(i, c)] * factor;
                }
            }
        }
        Ok(())
    }
}

fn augmented_matrix(scaled: &[f64], dim: usize, phs: u32, basis: &MonomialBasis) -> Mat<f64> {
    let n = scaled.len() / dim;
    let m = basis.len();
    let mut a = Mat::<f64>::zeros(n + m, n + m);
    let mut row = vec![0.0; m];
    for i in 0..n {
        let xi = &scaled[i * dim..(i + 1) * dim];
        for j in 0..i {
            let xj = &scaled[j * dim..(j + 1) * dim];
            let r = xi
                .iter()
                .zip(xj)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            let v = r.powi(phs as i32);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        basis.eval(xi, &mut row);
        for (l, v) in row.iter().enumerate() {
            a[(i, n + l)] = *v;
            a[(n + l, i)] = *v;
        }
    }
    a
}

/// Hager's 1-norm condition estimate for a symmetric matrix given its LU.
fn condition_estimate(a: &Mat<f64>, lu: &PartialPivLu<f64>) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut x = Mat::<f64>::from_fn(n, 1, |_, _| 1.0 / n as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve_in_place(y.as_mut());
        let y_norm: f64 = (0..n).map(|i| y[(i, 0)].abs()).sum();
        if !y_norm.is_finite() {
            return f64::INFINITY;
        }
        estimate = y_norm;
        let mut z = Mat::<f64>::from_fn(n, 1, |i, _| if y[(i, 0)] >= 0.0 { 1.0 } else { -1.0 });
        lu.solve_in_place(z.as_mut());
        let (jmax, zmax) = (0..n)
            .map(|i| (i, z[(i, 0)].abs()))
            .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        let ztx: f64 = (0..n).map(|i| z[(i, 0)] * x[(i, 0)]).sum();
        if zmax <= ztx {
            break;
        }
        x = Mat::<f64>::zeros(n, 1);
        x[(jmax, 0)] = 1.0;
    }
    norm_a * estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_sizes() {
        assert_eq!(stencil_size(2, 2), 12);
        assert_eq!(stencil_size(0, 1), 2);
        assert_eq!(stencil_size(5, 2), 42);
        assert_eq!(stencil_size(6, 1), 14);
        let cfg = StencilConfig::quintic_1d(6);
        assert_eq!(cfg.monomial_count(1) * 2, cfg.stencil_size);
        assert!(cfg.with_stencil_size(28, 1).is_ok());
        assert!(cfg.with_stencil_size(10, 1).is_err());
        assert!(StencilConfig::new(2, 2, 4).is_err());
    }

    #[test]
    fn one_dimensional_scaling() {
        let coords = [0.0, 1.0, 2.0, 3.0];
        let cfg = StencilConfig::new(1, 1, 3).unwrap();
        assert_eq!(cfg.stencil_size, 4);
        let st = Stencil::new(&coords, 1, 1, vec![1, 0, 2, 3], &cfg).unwrap();
        let local: Vec<f64> = st.local_points().map(|p| p[0]).collect();
        let lo = local.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        let a = st.augmented_matrix();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                assert_eq!(a[(i, j)], a[(j, i)]);
            }
        }
        // d/dx of f(x) = x is 1 anywhere.
        for y in [0.3, 1.5, 2.9] {
            let w = st.local_weights(&[y], DiffSpec::Partial(0)).unwrap();
            let d: f64 = w.iter().zip([1.0, 0.0, 2.0, 3.0]).map(|(w, f)| w * f).sum();
            assert!((d - 1.0).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn cardinal_weights_at_nodes() {
        let coords = [0.0, 0.0, 1.0, 0.1, 0.2, 1.0, 1.1, 1.2, 0.5, 0.45, -0.3, 0.6];
        let cfg = StencilConfig::new(1, 2, 3).unwrap();
        let st = Stencil::new(&coords, 2, 0, (0..6).collect(), &cfg).unwrap();
        for k in 0..6 {
            let w = st
                .local_weights(&coords[2 * k..2 * k + 2], DiffSpec::Identity)
                .unwrap();
            for (j, wj) in w.iter().enumerate() {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((wj - expected).abs() < 1e-12);
            }
        }
        let w = st.local_weights(&[0.3, 0.7], DiffSpec::Identity).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_are_singular() {
        // Degree-1 polynomials are not unisolvent on a line in 2D.
        let coords: Vec<f64> = (0..6).flat_map(|i| [i as f64, 2.0 * i as f64]).collect();
        let cfg = StencilConfig::new(1, 2, 3).unwrap();
        let err = Stencil::new(&coords, 2, 0, (0..6).collect(), &cfg).unwrap_err();
        assert!(matches!(err, Error::StencilSingular { center: 0, .. }));
    }
}
