//! Compressed sparse row matrices, Jacobi-preconditioned conjugate gradients
//! and a sparse Cholesky direct path.
//!
//! Assembly is deterministic: contributions are added element by element in
//! a fixed order into a preallocated pattern, so repeated runs give
//! bit-identical matrices.

use std::sync::Arc;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltRegularization;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, LltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given pattern. Column indices must be strictly
    /// increasing within each row.
    pub fn from_pattern(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 || row_ptr[nrows] != col_idx.len() {
            return Err(Error::DimensionMismatch {
                expected: nrows + 1,
                found: row_ptr.len(),
            });
        }
        for r in 0..nrows {
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if let Some(&c) = cols.iter().find(|&&c| c >= ncols) {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMesh(format!(
                    "row {r} of the sparsity pattern is not sorted"
                )));
            }
        }
        let values = vec![0.0; col_idx.len()];
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates
    /// in input order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); nrows];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            rows[r].push(c);
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut cols in rows {
            cols.sort_unstable();
            cols.dedup();
            col_idx.extend(cols);
            row_ptr.push(col_idx.len());
        }
        let mut m = Self::from_pattern(nrows, ncols, row_ptr, col_idx)?;
        for &(r, c, v) in triplets {
            m.add(r, c, v)?;
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Storage position of entry `(r, c)` if it is in the pattern.
    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        if r >= self.nrows {
            return None;
        }
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[lo..hi].binary_search(&c).ok().map(|k| lo + k)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.position(r, c).map_or(0.0, |k| self.values[k])
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) -> Result<()> {
        match self.position(r, c) {
            Some(k) => {
                self.values[k] += v;
                Ok(())
            }
            None => Err(Error::IndexOutOfRange {
                row: r,
                col: c,
                nrows: self.nrows,
                ncols: self.ncols,
            }),
        }
    }

    /// Adds a dense row-major element block `local` at `dofs x dofs`.
    pub fn add_block(&mut self, dofs: &[usize], local: &[f64]) -> Result<()> {
        let n = dofs.len();
        if local.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: local.len(),
            });
        }
        for (i, &r) in dofs.iter().enumerate() {
            if r >= self.nrows {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: 0,
                    nrows: self.nrows,
                    ncols: self.ncols,
                });
            }
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let cols = &self.col_idx[lo..hi];
            for (j, &c) in dofs.iter().enumerate() {
                let v = local[i * n + j];
                if v == 0.0 {
                    continue;
                }
                let k = cols.binary_search(&c).map_err(|_| Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows: self.nrows,
                    ncols: self.ncols,
                })?;
                self.values[lo + k] += v;
            }
        }
        Ok(())
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *yr = self.col_idx[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|r| self.get(r, r))
            .collect()
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// `sum_i c_i A_i` over matrices sharing one pattern.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let mut out = (*first).clone();
        out.values.iter_mut().for_each(|v| *v = 0.0);
        for (c, m) in terms {
            if !m.same_pattern(&out) {
                return Err(Error::DimensionMismatch {
                    expected: out.nnz(),
                    found: m.nnz(),
                });
            }
            for (o, v) in out.values.iter_mut().zip(&m.values) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    /// `max |a_ij - a_ji| / max |a_ij|`.
    pub fn symmetry_error(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut err: f64 = 0.0;
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                err = err.max((self.values[k] - self.get(self.col_idx[k], r)).abs());
            }
        }
        err / scale
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                d[(r, self.col_idx[k])] += self.values[k];
            }
        }
        d
    }
}

/// Zero matrix whose pattern couples every pair of nodes sharing an element,
/// expanded to `block x block` dense blocks (dof = node * block + component).
pub fn block_pattern<'a>(
    num_nodes: usize,
    elements: impl Iterator<Item = &'a [usize]>,
    block: usize,
) -> Result<CsrMatrix> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for el in elements {
        for &a in el {
            if a >= num_nodes {
                return Err(Error::IndexOutOfRange {
                    row: a,
                    col: a,
                    nrows: num_nodes,
                    ncols: num_nodes,
                });
            }
            adj[a].extend_from_slice(el);
        }
    }
    for (a, list) in adj.iter_mut().enumerate() {
        list.push(a);
        list.sort_unstable();
        list.dedup();
    }
    let n = num_nodes * block;
    let nnz: usize = adj.iter().map(|l| l.len() * block * block).sum();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for list in &adj {
        for _ in 0..block {
            for &b in list {
                col_idx.extend((0..block).map(|j| b * block + j));
            }
            row_ptr.push(col_idx.len());
        }
    }
    CsrMatrix::from_pattern(n, n, row_ptr, col_idx)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// Final relative residual `|b - Ax| / |b|`.
    pub residual: f64,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradients. `x` holds the initial guess
/// on entry and the iterate on exit.
pub fn cg_solve(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, maxit: usize) -> SolverReport {
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    pcg(a, &inv_diag, b, x, tol, maxit)
}

fn pcg(
    a: &CsrMatrix,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    maxit: usize,
) -> SolverReport {
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return SolverReport {
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut r = a.mul_vec(x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut res = norm(&r) / bnorm;
    if res <= tol {
        return SolverReport {
            iterations: 0,
            residual: res,
            converged: true,
        };
    }
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, d)| ri * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; b.len()];
    for it in 1..=maxit {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return SolverReport {
                iterations: it,
                residual: res,
                converged: false,
            };
        }
        let step = rz / pap;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += step * pi);
        r.iter_mut()
            .zip(&ap)
            .for_each(|(ri, api)| *ri -= step * api);
        res = norm(&r) / bnorm;
        if res <= tol {
            return SolverReport {
                iterations: it,
                residual: res,
                converged: true,
            };
        }
        z.iter_mut()
            .zip(r.iter().zip(inv_diag))
            .for_each(|(zi, (ri, d))| *zi = ri * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut()
            .zip(&z)
            .for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    SolverReport {
        iterations: maxit,
        residual: res,
        converged: false,
    }
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct Cholesky {
    symbolic: Arc<SymbolicCholesky<usize>>,
    pattern_nnz: usize,
    values: Vec<f64>,
}

impl Cholesky {
    /// Factorizes with the approximate minimum degree ordering.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows;
        if n != a.ncols {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols,
            });
        }
        // A symmetric CSR matrix is its own CSC transpose.
        let pattern = SymbolicSparseColMatRef::new_checked(n, n, &a.row_ptr, None, &a.col_idx);
        let symbolic = factorize_symbolic_cholesky(
            pattern,
            Side::Lower,
            SymmetricOrdering::Amd,
            Default::default(),
        )
        .map_err(|_| Error::NotPositiveDefinite)?;
        Self::numeric(Arc::new(symbolic), a)
    }

    /// Factorizes a matrix with the same sparsity pattern as `self`, reusing
    /// the ordering and elimination structure.
    pub fn refactor(&self, a: &CsrMatrix) -> Result<Self> {
        if a.nrows != self.symbolic.nrows() || a.ncols != a.nrows || a.nnz() != self.pattern_nnz {
            return Err(Error::DimensionMismatch {
                expected: self.pattern_nnz,
                found: a.nnz(),
            });
        }
        Self::numeric(Arc::clone(&self.symbolic), a)
    }

    fn numeric(symbolic: Arc<SymbolicCholesky<usize>>, a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows;
        let pattern = SymbolicSparseColMatRef::new_checked(n, n, &a.row_ptr, None, &a.col_idx);
        let mut values = vec![0.0; symbolic.len_val()];
        let mut buf = MemBuffer::new(
            symbolic.factorize_numeric_llt_scratch::<f64>(Par::Seq, Default::default()),
        );
        symbolic
            .factorize_numeric_llt(
                &mut values,
                SparseColMatRef::new(pattern, &a.values),
                Side::Lower,
                LltRegularization::default(),
                Par::Seq,
                MemStack::new(&mut buf),
                Default::default(),
            )
            .map_err(|_| Error::NotPositiveDefinite)?;
        Ok(Self {
            symbolic,
            pattern_nnz: a.nnz(),
            values,
        })
    }

    /// Stored entries of the factor.
    pub fn factor_nnz(&self) -> usize {
        self.values.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.symbolic.nrows();
        assert_eq!(b.len(), n);
        let mut buf = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        LltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(b, n, 1),
            Par::Seq,
            MemStack::new(&mut buf),
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SolverKind {
    #[default]
    Direct,
    Cg {
        tol: f64,
        maxit: usize,
    },
}

/// A matrix prepared once for repeated solves.
pub enum LinearSolver {
    Direct(Cholesky),
    Cg {
        matrix: CsrMatrix,
        inv_diag: Vec<f64>,
        tol: f64,
        maxit: usize,
    },
}

impl LinearSolver {
    pub fn new(a: CsrMatrix, kind: SolverKind) -> Result<Self> {
        match kind {
            SolverKind::Direct => Ok(Self::Direct(Cholesky::factor(&a)?)),
            SolverKind::Cg { tol, maxit } => {
                let inv_diag = a
                    .diagonal()
                    .iter()
                    .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
                    .collect();
                Ok(Self::Cg {
                    matrix: a,
                    inv_diag,
                    tol,
                    maxit,
                })
            }
        }
    }

    /// Like `new`, but a direct solver reuses the symbolic factorization of
    /// `like`, which must belong to a matrix with the same pattern.
    pub fn new_like(a: CsrMatrix, kind: SolverKind, like: &LinearSolver) -> Result<Self> {
        match (kind, like) {
            (SolverKind::Direct, Self::Direct(chol)) => Ok(Self::Direct(chol.refactor(&a)?)),
            _ => Self::new(a, kind),
        }
    }

    /// Solves `A x = b`; `x` is the initial guess for the iterative path.
    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<SolverReport> {
        match self {
            Self::Direct(chol) => {
                x.copy_from_slice(b);
                chol.solve_in_place(x);
                Ok(SolverReport {
                    iterations: 1,
                    residual: 0.0,
                    converged: true,
                })
            }
            Self::Cg {
                matrix,
                inv_diag,
                tol,
                maxit,
            } => {
                let rep = pcg(matrix, inv_diag, b, x, *tol, *maxit);
                if rep.converged {
                    Ok(rep)
                } else {
                    Err(Error::NotConverged {
                        iterations: rep.iterations,
                        residual: rep.residual,
                    })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.5), (0, 0, 1.5)]).unwrap();
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn identity_from_unit_contributions() {
        let t: Vec<_> = (0..5).map(|i| (i, i, 1.0)).collect();
        let m = CsrMatrix::from_triplets(5, 5, &t).unwrap();
        assert_eq!(m, CsrMatrix::identity(5));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        let mut m = CsrMatrix::identity(3);
        assert!(m.add(0, 2, 1.0).is_err());
        assert!(m.add_block(&[0, 7], &[1.0; 4]).is_err());
    }

    #[test]
    fn block_pattern_couples_element_nodes() {
        let els = [[0usize, 1, 2], [1, 3, 2]];
        let m = block_pattern(4, els.iter().map(|e| &e[..]), 2).unwrap();
        assert_eq!(m.nrows(), 8);
        assert!(m.position(0, 5).is_some());
        assert!(m.position(1, 6).is_none());
        assert!(m.position(7, 0).is_none());
        assert!(m.position(7, 2).is_some());
    }

    #[test]
    fn three_triangle_mass_row_sums() {
        // Fan of three right triangles around node 0.
        let p: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
        let tris = [[0usize, 1, 2], [0, 2, 3], [0, 3, 1]];
        let area = |t: &[usize; 3]| {
            let (a, b, c) = (p[t[0]], p[t[1]], p[t[2]]);
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
        };
        let mut m = block_pattern(4, tris.iter().map(|t| &t[..]), 1).unwrap();
        for t in &tris {
            let a = area(t);
            let mut local = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    local[i * 3 + j] = a / 12.0 * if i == j { 2.0 } else { 1.0 };
                }
            }
            m.add_block(t, &local).unwrap();
        }
        let ones = vec![1.0; 4];
        let rows = m.mul_vec(&ones);
        for (v, row) in rows.iter().enumerate() {
            let expected: f64 = tris
                .iter()
                .filter(|t| t.contains(&v))
                .map(|t| area(t) / 3.0)
                .sum();
            assert!((row - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn cg_identity_single_iteration() {
        let a = CsrMatrix::identity(7);
        let b: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        let mut x = vec![0.0; 7];
        let rep = cg_solve(&a, &b, &mut x, 1e-12, 10);
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(x, b);
    }

    #[test]
    fn cg_diagonal() {
        let t: Vec<_> = (0..10).map(|i| (i, i, (i + 1) as f64)).collect();
        let a = CsrMatrix::from_triplets(10, 10, &t).unwrap();
        let mut x = vec![0.0; 10];
        let rep = cg_solve(&a, &[1.0; 10], &mut x, 1e-12, 100);
        assert!(rep.converged);
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - 1.0 / (i + 1) as f64).abs() < 1e-12);
        }
    }

    fn random_spd(n: usize, seed: u64) -> (CsrMatrix, nalgebra::DMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let dense = b.transpose() * &b + nalgebra::DMatrix::identity(n, n);
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                t.push((i, j, dense[(i, j)]));
            }
        }
        (CsrMatrix::from_triplets(n, n, &t).unwrap(), dense)
    }

    #[test]
    fn cg_random_spd_matches_dense_cholesky() {
        let (a, dense) = random_spd(50, 7);
        let rhs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let oracle = dense
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_column_slice(&rhs));
        let mut x = vec![0.0; 50];
        let rep = cg_solve(&a, &rhs, &mut x, 1e-13, 1000);
        assert!(rep.converged);
        for i in 0..50 {
            assert!((x[i] - oracle[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn direct_solver_matches_dense_cholesky() {
        let (a, dense) = random_spd(40, 11);
        let rhs: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
        let oracle = dense
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_column_slice(&rhs));
        let solver = LinearSolver::new(a, SolverKind::Direct).unwrap();
        let mut x = vec![0.0; 40];
        solver.solve(&rhs, &mut x).unwrap();
        for i in 0..40 {
            assert!((x[i] - oracle[i]).abs() < 1e-10 * oracle[i].abs().max(1.0));
        }
    }

    #[test]
    fn refactor_reuses_structure() {
        let (a, dense) = random_spd(30, 5);
        let first = LinearSolver::new(a.clone(), SolverKind::Direct).unwrap();
        let shifted = CsrMatrix::linear_combination(&[(1.0, &a), (3.0, &a)]).unwrap();
        let second = LinearSolver::new_like(shifted, SolverKind::Direct, &first).unwrap();
        let rhs = vec![1.0; 30];
        let oracle = (dense * 4.0)
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_column_slice(&rhs));
        let mut x = vec![0.0; 30];
        second.solve(&rhs, &mut x).unwrap();
        for i in 0..30 {
            assert!((x[i] - oracle[i]).abs() < 1e-10 * oracle[i].abs().max(1.0));
        }
        let LinearSolver::Direct(chol) = &first else {
            unreachable!()
        };
        assert!(chol.refactor(&CsrMatrix::identity(30)).is_err());
    }

    #[test]
    fn indefinite_matrix_fails_to_factor() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        assert!(matches!(
            Cholesky::factor(&a),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn cg_reports_non_convergence() {
        let (a, _) = random_spd(30, 3);
        let solver = LinearSolver::new(
            a,
            SolverKind::Cg {
                tol: 1e-14,
                maxit: 2,
            },
        )
        .unwrap();
        let mut x = vec![0.0; 30];
        assert!(matches!(
            solver.solve(&[1.0; 30], &mut x),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn linear_combination_requires_common_pattern() {
        let a = CsrMatrix::identity(3);
        let c = CsrMatrix::linear_combination(&[(2.0, &a), (0.5, &a)]).unwrap();
        assert_eq!(c.get(1, 1), 2.5);
        let b = CsrMatrix::from_triplets(3, 3, &[(0, 1, 1.0)]).unwrap();
        assert!(CsrMatrix::linear_combination(&[(1.0, &a), (1.0, &b)]).is_err());
    }
}
