//! Sparse linear least squares: corrected semi-normal equations on a sparse
//! Cholesky factor, or a sparse QR factorization for small systems.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltRegularization;
use faer::prelude::*;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, LltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::perm::PermRef;
use faer::{Conj, Par, Side};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Required bound on `|A^T r| / |A^T b|` at the returned solution.
pub const NORMAL_RESIDUAL_TOL: f64 = 1e-9;

/// Systems with fewer stored entries use sparse QR under [`SolveMethod::Auto`].
const QR_NNZ_LIMIT: usize = 200_000;

const MAX_REFINEMENTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    #[default]
    Auto,
    /// Cholesky factor of the column-scaled normal matrix, with iterative
    /// refinement against the original rectangular system.
    SemiNormal,
    Qr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub refinements: usize,
    /// `|A x - b|`.
    pub residual_norm: f64,
    /// `|A^T (A x - b)| / |A^T b|`.
    pub normal_residual: f64,
    /// Stored entries of the triangular factor.
    pub factor_entries: usize,
}

/// Minimizes `|A x - b|` for a matrix with at least as many rows as columns
/// and full column rank.
pub fn lstsq(a: &CsrMatrix, b: &[f64], method: SolveMethod) -> Result<(Vec<f64>, SolveReport)> {
    lstsq_owned(a.clone(), b, method, None)
}

/// As [`lstsq`], consuming the matrix to avoid a scaled copy. When every
/// column is attached to a point in the plane, `column_points` enables a
/// nested-dissection fill-reducing ordering for the Cholesky factor.
pub fn lstsq_owned(
    mut a: CsrMatrix,
    b: &[f64],
    method: SolveMethod,
    column_points: Option<&[[f64; 2]]>,
) -> Result<(Vec<f64>, SolveReport)> {
    if let Some(pts) = column_points {
        if pts.len() != a.ncols() {
            return Err(Error::Size(format!("{} column points for {} columns", pts.len(), a.ncols())));
        }
    }
    if b.len() != a.nrows() {
        return Err(Error::Size(format!("rhs length {} for {} rows", b.len(), a.nrows())));
    }
    if a.nrows() < a.ncols() {
        return Err(solver_error("fewer rows than columns", f64::INFINITY, f64::NAN));
    }
    let norms = a.column_norms();
    if let Some(j) = norms.iter().position(|&c| c == 0.0) {
        return Err(solver_error(&format!("column {j} is empty"), f64::INFINITY, f64::NAN));
    }
    if norms.iter().any(|c| !c.is_finite()) || b.iter().any(|v| !v.is_finite()) {
        return Err(solver_error("non-finite input", f64::NAN, f64::NAN));
    }
    let inv_norms: Vec<f64> = norms.iter().map(|c| 1.0 / c).collect();
    a.scale_columns(&inv_norms);

    let method = match method {
        SolveMethod::Auto if a.nnz() <= QR_NNZ_LIMIT => SolveMethod::Qr,
        SolveMethod::Auto => SolveMethod::SemiNormal,
        m => m,
    };
    let (mut y, refinements, factor_entries) = match method {
        SolveMethod::Qr => qr_solve(&a, b)?,
        _ => semi_normal_solve(&a, b, column_points)?,
    };
    // (A D)^T r = D A^T r, so the unscaled normal residual divides by D.
    let (residual_norm, normal_residual) = residuals(&a, &y, b, &norms);
    for (v, s) in y.iter_mut().zip(&inv_norms) {
        *v *= s;
    }
    let report = SolveReport {
        method,
        refinements,
        residual_norm,
        normal_residual,
        factor_entries,
    };
    if !(normal_residual <= NORMAL_RESIDUAL_TOL) {
        return Err(solver_error(
            &format!("normal-equation residual {normal_residual:.3e} after {refinements} refinements"),
            f64::NAN,
            residual_norm,
        ));
    }
    Ok((y, report))
}

fn solver_error(reason: &str, condition: f64, residual: f64) -> Error {
    Error::Solver {
        reason: reason.to_string(),
        condition,
        residual,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Residual norms of the column-scaled system `a = A D` at `y = D^-1 x`,
/// with the normal residual measured for `A`; `norms` holds `1 / D`.
fn residuals(a: &CsrMatrix, y: &[f64], b: &[f64], norms: &[f64]) -> (f64, f64) {
    let r: Vec<f64> = a.mul_vec(y).iter().zip(b).map(|(ax, b)| ax - b).collect();
    let unscale = |mut v: Vec<f64>| {
        v.iter_mut().zip(norms).for_each(|(x, n)| *x *= n);
        v
    };
    let atr = unscale(a.mul_transpose_vec(&r));
    let atb = unscale(a.mul_transpose_vec(b));
    let denom = norm(&atb);
    let ratio = if denom > 0.0 { norm(&atr) / denom } else { norm(&atr) };
    (norm(&r), ratio)
}

fn qr_solve(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, usize, usize)> {
    let m = a.to_faer()?;
    let qr = m
        .sp_qr()
        .map_err(|e| solver_error(&format!("sparse QR failed: {e:?}"), f64::NAN, f64::NAN))?;
    let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
    qr.solve_lstsq_in_place(rhs.as_mut());
    let x: Vec<f64> = (0..a.ncols()).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(solver_error("rank-deficient system", f64::INFINITY, f64::NAN));
    }
    Ok((x, 0, 0))
}

/// Lower triangle of `A^T A` in column-compressed form.
pub(crate) fn normal_matrix_lower(a: &CsrMatrix) -> SparseColMat<u32, f64> {
    let n = a.ncols();
    // Column-wise view of A as positions into its value array.
    let counts = a.column_counts();
    let mut col_ptr = vec![0usize; n + 1];
    for j in 0..n {
        col_ptr[j + 1] = col_ptr[j] + counts[j];
    }
    let mut fill = col_ptr.clone();
    let mut t_pos = vec![0u32; a.nnz()];
    for (pos, &c) in a.col_idx().iter().enumerate() {
        let p = &mut fill[c as usize];
        t_pos[*p] = pos as u32;
        *p += 1;
    }
    drop(fill);
    let row_ptr = a.row_ptr();
    let values = a.values();

    let mut g_ptr = Vec::with_capacity(n + 1);
    let mut g_rows: Vec<u32> = Vec::new();
    let mut g_vals: Vec<f64> = Vec::new();
    g_ptr.push(0u32);
    let mut acc = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<u32> = Vec::new();
    for j in 0..n {
        for p in col_ptr[j]..col_ptr[j + 1] {
            let pos = t_pos[p] as usize;
            let v = values[pos];
            let r = row_ptr.partition_point(|&s| s <= pos) - 1;
            let (cols, vals) = a.row(r);
            for (&k, &w) in cols.iter().zip(vals) {
                if (k as usize) < j {
                    continue;
                }
                if !seen[k as usize] {
                    seen[k as usize] = true;
                    touched.push(k);
                }
                acc[k as usize] += v * w;
            }
        }
        touched.sort_unstable();
        for &k in &touched {
            g_rows.push(k);
            g_vals.push(acc[k as usize]);
            acc[k as usize] = 0.0;
            seen[k as usize] = false;
        }
        touched.clear();
        g_ptr.push(g_rows.len() as u32);
    }
    let symbolic = SymbolicSparseColMat::new_checked(n, n, g_ptr, None, g_rows);
    SparseColMat::new(symbolic, g_vals)
}

/// Subproblems at most this large are not split further.
const DISSECTION_LEAF: usize = 96;

/// Elimination order from recursive coordinate bisection of the graph of the
/// symmetric matrix whose lower triangle is `g`: each half is ordered
/// before the vertices of the left half that touch the right half.
fn nested_dissection(g: &SparseColMat<u32, f64>, points: &[[f64; 2]]) -> Vec<u32> {
    let n = points.len();
    let sym = g.symbolic();
    let mut deg = vec![0usize; n + 1];
    for j in 0..n {
        for &i in sym.row_idx_of_col_raw(j) {
            if i as usize != j {
                deg[i as usize + 1] += 1;
                deg[j + 1] += 1;
            }
        }
    }
    for j in 0..n {
        deg[j + 1] += deg[j];
    }
    let ptr = deg;
    let mut fill = ptr.clone();
    let mut adj = vec![0u32; ptr[n]];
    for j in 0..n {
        for &i in sym.row_idx_of_col_raw(j) {
            let i = i as usize;
            if i != j {
                adj[fill[i]] = j as u32;
                fill[i] += 1;
                adj[fill[j]] = i as u32;
                fill[j] += 1;
            }
        }
    }
    drop(fill);

    let mut tag = vec![0u32; n];
    let mut next_tag = 0u32;
    let mut order = Vec::with_capacity(n);
    // Explicit stack: `Some(set)` dissects a set, `None` emits the next
    // pending separator.
    let mut separators: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<Option<Vec<u32>>> = vec![Some((0..n as u32).collect())];
    while let Some(item) = stack.pop() {
        let Some(mut verts) = item else {
            order.extend(separators.pop().expect("separator pushed with marker"));
            continue;
        };
        if verts.len() <= DISSECTION_LEAF {
            order.extend(verts);
            continue;
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for &v in &verts {
            for d in 0..2 {
                lo[d] = lo[d].min(points[v as usize][d]);
                hi[d] = hi[d].max(points[v as usize][d]);
            }
        }
        let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
        let mid = verts.len() / 2;
        verts.select_nth_unstable_by(mid, |&a, &b| {
            points[a as usize][axis]
                .total_cmp(&points[b as usize][axis])
                .then(a.cmp(&b))
        });
        let right = verts.split_off(mid);
        next_tag += 1;
        for &v in &right {
            tag[v as usize] = next_tag;
        }
        let (sep, left): (Vec<u32>, Vec<u32>) = verts.into_iter().partition(|&v| {
            adj[ptr[v as usize]..ptr[v as usize + 1]]
                .iter()
                .any(|&w| tag[w as usize] == next_tag)
        });
        separators.push(sep);
        stack.push(None);
        stack.push(Some(right));
        stack.push(Some(left));
    }
    order
}

struct CholeskyFactor {
    symbolic: SymbolicCholesky<u32>,
    values: Vec<f64>,
}

impl CholeskyFactor {
    fn new(g: &SparseColMat<u32, f64>, column_points: Option<&[[f64; 2]]>) -> Result<Self> {
        let perm = column_points.map(|pts| {
            let fwd = nested_dissection(g, pts);
            let mut inv = vec![0u32; fwd.len()];
            for (k, &v) in fwd.iter().enumerate() {
                inv[v as usize] = k as u32;
            }
            (fwd, inv)
        });
        let ordering = match &perm {
            Some((fwd, inv)) => SymmetricOrdering::Custom(PermRef::new_checked(fwd, inv, fwd.len())),
            None => SymmetricOrdering::Amd,
        };
        let symbolic = factorize_symbolic_cholesky(g.symbolic(), Side::Lower, ordering, Default::default())
        .map_err(|e| solver_error(&format!("symbolic factorization failed: {e:?}"), f64::NAN, f64::NAN))?;
        let mut values = Vec::new();
        values
            .try_reserve_exact(symbolic.len_val())
            .map_err(|_| solver_error("out of memory for the Cholesky factor", f64::NAN, f64::NAN))?;
        values.resize(symbolic.len_val(), 0.0);
        let par = Par::Seq;
        let mut mem = MemBuffer::try_new(symbolic.factorize_numeric_llt_scratch::<f64>(par, Default::default()))
            .map_err(|_| solver_error("out of memory for factorization workspace", f64::NAN, f64::NAN))?;
        symbolic
            .factorize_numeric_llt(
                &mut values,
                g.as_ref(),
                Side::Lower,
                LltRegularization::default(),
                par,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|_| solver_error("normal matrix is not positive definite (rank deficient)", f64::INFINITY, f64::NAN))?;
        Ok(Self { symbolic, values })
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let par = Par::Seq;
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, par));
        let view = MatMut::from_column_major_slice_mut(rhs, n, 1);
        LltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(
            Conj::No,
            view,
            par,
            MemStack::new(&mut mem),
        );
    }
}

fn semi_normal_solve(a: &CsrMatrix, b: &[f64], column_points: Option<&[[f64; 2]]>) -> Result<(Vec<f64>, usize, usize)> {
    let g = normal_matrix_lower(a);
    let factor = CholeskyFactor::new(&g, column_points)?;
    drop(g);
    let mut x = a.mul_transpose_vec(b);
    factor.solve(&mut x);
    let atb_norm = norm(&a.mul_transpose_vec(b));
    let mut refinements = 0;
    for _ in 0..MAX_REFINEMENTS {
        let r: Vec<f64> = b.iter().zip(a.mul_vec(&x)).map(|(b, ax)| b - ax).collect();
        let mut dx = a.mul_transpose_vec(&r);
        let ratio = norm(&dx) / atb_norm.max(f64::MIN_POSITIVE);
        if refinements >= 1 && ratio <= 1e-3 * NORMAL_RESIDUAL_TOL {
            break;
        }
        factor.solve(&mut dx);
        let step = norm(&dx);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        refinements += 1;
        if step <= 1e-15 * norm(&x) {
            break;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(solver_error("non-finite solution", f64::INFINITY, f64::NAN));
    }
    Ok((x, refinements, factor.values.len()))
}
