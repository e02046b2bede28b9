//! Self-contained dense linear algebra for small symmetric matrices:
//! cyclic Jacobi eigendecomposition, Cholesky factorization, and operator
//! two-norms by power iteration. Everything is plain row-major `f64`.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Hard cap on dense matrix dimension; exceeding it is a config error
/// rather than silent slowness. Product-grid operators stay matrix-free.
pub const MAX_DIM: usize = 2048;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Usage("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * other`, cache-friendly i-k-j loop order.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Usage(format!(
                "matmul shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for j in 0..other.cols {
                    out_row[j] += a * orow[j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += row[j] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// `self^T * x` without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for j in 0..self.cols {
                y[j] += row[j] * xi;
            }
        }
        y
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &Matrix, s: f64) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// LU factorization with partial pivoting, reusable across solves.
    pub fn lu(&self) -> Result<LuFactor> {
        if self.rows != self.cols {
            return Err(Error::Usage("lu needs a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[perm[k] * n + k].abs();
            for r in (k + 1)..n {
                let v = a[perm[r] * n + k].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Numerical("singular matrix in solve".into()));
            }
            perm.swap(k, piv);
            let pk = perm[k];
            let pivot = a[pk * n + k];
            for r in (k + 1)..n {
                let pr = perm[r];
                let factor = a[pr * n + k] / pivot;
                a[pr * n + k] = factor;
                for c in (k + 1)..n {
                    a[pr * n + c] -= factor * a[pk * n + c];
                }
            }
        }
        Ok(LuFactor { n, a, perm })
    }

    /// Solves `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.lu()?.solve(b)
    }
}

/// Packed LU factorization with row permutation.
#[derive(Clone, Debug)]
pub struct LuFactor {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Usage("solve rhs length mismatch".into()));
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.a[self.perm[i] * n + j] * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.a[self.perm[i] * n + j] * x[j];
            }
            x[i] = acc / self.a[self.perm[i] * n + i];
        }
        Ok(x)
    }
}

/// Symmetric matrix, validated at construction: finite entries and
/// `|A[i][j] - A[j][i]| <= 1e-12 * max(1, |A[i][j]|)`. Stored dense and
/// symmetrized exactly so downstream code can rely on `a_ij == a_ji`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    m: Matrix,
}

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Usage("symmetric matrix must be square".into()));
        }
        let n = m.rows();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Config(format!(
                "matrix dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        if !m.all_finite() {
            return Err(Error::Config("matrix has non-finite entries".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = m.get(i, j);
                let b = m.get(j, i);
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "asymmetric entry ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        let mut sym = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (sym.get(i, j) + sym.get(j, i));
                sym.set(i, j, avg);
                sym.set(j, i, avg);
            }
        }
        Ok(SymMatrix { n, m: sym })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        SymMatrix::new(Matrix::from_fn(n, n, |i, j| f(i, j)))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            n,
            m: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// tr(A^2) = sum of squared entries for symmetric A.
    pub fn trace_of_square(&self) -> f64 {
        self.m.data().iter().map(|v| v * v).sum()
    }
}

/// Eigendecomposition of a symmetric matrix: values sorted descending,
/// eigenvectors as the corresponding orthonormal columns.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenResult {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

fn off_diagonal_frobenius(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j) * a.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius mass falls below
/// `1e-14 * ||A||_F`; errors out after 100 sweeps.
pub fn eigen_sym(a: &SymMatrix) -> Result<EigenResult> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let norm = m.frobenius_norm();
    let target = 1e-14 * norm;

    if n == 1 {
        return Ok(EigenResult {
            values: vec![m.get(0, 0)],
            vectors: v,
        });
    }

    let mut converged = false;
    for _sweep in 0..100 {
        if off_diagonal_frobenius(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/cols p and q of m
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off_diagonal_frobenius(&m) > target {
        return Err(Error::Numerical(
            "Jacobi eigensolver did not converge in 100 sweeps".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).partial_cmp(&m.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, v.get(r, src));
        }
    }
    Ok(EigenResult { values, vectors })
}

/// Lower-triangular Cholesky factor with solve/inverse helpers.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    l: Matrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..i {
                acc -= self.l.get(i, j) * y[j];
            }
            y[i] = acc / self.l.get(i, i);
        }
        y
    }

    /// Solves `L^T x = b`.
    pub fn solve_lower_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= self.l.get(j, i) * x[j];
            }
            x[i] = acc / self.l.get(i, i);
        }
        x
    }

    /// Solves `A x = b` where `A = L L^T`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_lower_transpose(&self.solve_lower(b))
    }

    /// Dense inverse of `A` via column solves.
    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e[c] = 1.0;
            let col = self.solve(&e);
            e[c] = 0.0;
            for r in 0..n {
                inv.set(r, c, col[r]);
            }
        }
        inv
    }

    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.l.get(i, i).ln()).sum::<f64>() * 2.0
    }
}

/// Cholesky factorization; a non-positive pivot is the crate's SPD test.
pub fn cholesky_spd(a: &SymMatrix) -> Result<CholeskyFactor> {
    let n = a.dim();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = a.get(i, j);
            for k in 0..j {
                acc -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if acc <= 0.0 || !acc.is_finite() {
                    return Err(Error::NotSpd(format!("pivot {acc} at index {i}")));
                }
                l.set(i, j, acc.sqrt());
            } else {
                l.set(i, j, acc / l.get(j, j));
            }
        }
    }
    Ok(CholeskyFactor { l })
}

/// Abstraction over anything that can act as a dense linear map; lets the
/// power-iteration core run on explicit matrices and on matrix-free
/// product-grid operators alike.
pub trait LinearOp {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOp for Matrix {
    fn dim_in(&self) -> usize {
        self.cols
    }

    fn dim_out(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.matvec(x));
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.matvec_transpose(x));
    }
}

pub const TWO_NORM_DEFAULT_ITERS: usize = 100_000;
pub const TWO_NORM_DEFAULT_TOL: f64 = 1e-12;

/// Largest singular value of `op` by power iteration on `op^T op`.
/// Converges in value when the relative change stays below `tol` on two
/// consecutive iterations.
pub fn two_norm_op(op: &dyn LinearOp, max_iters: usize, tol: f64) -> Result<f64> {
    let n = op.dim_in();
    let m = op.dim_out();
    if n == 0 {
        return Err(Error::Usage("two_norm on empty operator".into()));
    }
    let mut rng = RngStream::derive(0xC0FF_EE00, n as u64);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_uniform() - 0.5).collect();
    let nrm = norm2(&v);
    for x in &mut v {
        *x /= nrm;
    }
    let mut av = vec![0.0; m];
    let mut atav = vec![0.0; n];
    let mut sigma_prev = f64::NAN;
    let mut calm = 0usize;
    for _ in 0..max_iters {
        op.apply(&v, &mut av);
        let sigma = norm2(&av);
        if !sigma.is_finite() {
            return Err(Error::Numerical("two_norm overflowed".into()));
        }
        if sigma == 0.0 {
            return Ok(0.0);
        }
        op.apply_transpose(&av, &mut atav);
        let nrm = norm2(&atav);
        if nrm == 0.0 {
            return Ok(sigma);
        }
        for (x, y) in v.iter_mut().zip(atav.iter()) {
            *x = *y / nrm;
        }
        if (sigma - sigma_prev).abs() <= tol * sigma.max(1.0) {
            calm += 1;
            if calm >= 2 {
                return Ok(sigma);
            }
        } else {
            calm = 0;
        }
        sigma_prev = sigma;
    }
    Err(Error::Numerical(format!(
        "two_norm power iteration did not converge within {max_iters} iterations"
    )))
}

/// Largest singular value of a dense matrix with default settings.
pub fn two_norm(m: &Matrix, max_iters: usize, tol: f64) -> Result<f64> {
    if !m.all_finite() {
        return Err(Error::Usage("two_norm needs finite entries".into()));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    two_norm_op(m, max_iters, tol)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Spectral radius of a square matrix by repeated squaring with Frobenius
/// normalization: `rho = lim ||B^(2^k)||_F^(1/2^k)`. Handles complex
/// dominant pairs and nilpotent matrices, unlike vector power iteration.
pub fn spectral_radius(b: &Matrix, tol: f64) -> Result<f64> {
    if b.rows() != b.cols() {
        return Err(Error::Usage("spectral_radius needs a square matrix".into()));
    }
    if !b.all_finite() {
        return Err(Error::Usage("spectral_radius needs finite entries".into()));
    }
    let mut c = b.clone();
    let mut log_rho = 0.0;
    let mut weight = 1.0f64;
    let mut prev = f64::NAN;
    for _ in 0..64 {
        let s = c.frobenius_norm();
        if s == 0.0 {
            return Ok(0.0);
        }
        if !s.is_finite() {
            return Err(Error::Numerical("spectral_radius overflowed".into()));
        }
        log_rho += weight * s.ln();
        weight *= 0.5;
        let est = log_rho.exp();
        if (est - prev).abs() <= tol * est.max(1e-300) {
            return Ok(est);
        }
        prev = est;
        c.scale(1.0 / s);
        c = c.matmul(&c)?;
    }
    // The estimate contracts by sqrt each squaring; 64 rounds is plenty.
    Ok(log_rho.exp())
}
