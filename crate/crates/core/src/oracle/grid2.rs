//! Two-dimensional product grids. Block kernels act slice-wise (one 1-D
//! kernel per frozen complementary coordinate), so compositions and
//! mixtures stay matrix-free: a 101x101 product grid has 10201 states and
//! its dense transition matrix would not fit the dense-matrix cap, but
//! its action on a function costs only one small matvec per slice.
//!
//! Matrix convention: kernels act on functions, chains compose so that
//! `compose(&[a, b])` runs `a` as the first Markov step (matrix a * b).

use crate::error::{Error, Result};
use crate::kernels::{density_view_1d, KernelSpec};
use crate::linalg::{two_norm_op, LinearOp, Matrix, TWO_NORM_DEFAULT_ITERS, TWO_NORM_DEFAULT_TOL};
use crate::oracle::{DiscreteKernel, Grid1};
use crate::target::GaussianTarget;

/// Product of two 1-D grids; states are indexed row-major as
/// `i0 * n1 + i1`.
#[derive(Clone, Copy, Debug)]
pub struct Grid2 {
    pub axes: [Grid1; 2],
}

impl Grid2 {
    pub fn new(axis0: Grid1, axis1: Grid1) -> Self {
        Grid2 {
            axes: [axis0, axis1],
        }
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let g = Grid1::new(half_width, n)?;
        Ok(Grid2 { axes: [g, g] })
    }

    pub fn n_states(&self) -> usize {
        self.axes[0].len() * self.axes[1].len()
    }

    pub fn index(&self, i0: usize, i1: usize) -> usize {
        i0 * self.axes[1].len() + i1
    }

    pub fn point(&self, state: usize) -> [f64; 2] {
        let n1 = self.axes[1].len();
        [self.axes[0].point(state / n1), self.axes[1].point(state % n1)]
    }
}

/// A 2-D Gaussian target restricted to a product grid: the joint weights
/// plus per-axis conditional weights derived from them.
#[derive(Clone, Debug)]
pub struct ProductGrid {
    grid: Grid2,
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
}

impl ProductGrid {
    /// Tabulates the joint density of a 2-D, two-block Gaussian target.
    pub fn gaussian(target: &GaussianTarget, grid: Grid2) -> Result<Self> {
        if target.dim() != 2 || target.num_blocks() != 2 {
            return Err(Error::Usage(
                "product grid oracle needs a 2-D target with two 1-D blocks".into(),
            ));
        }
        let n = grid.n_states();
        let mut pi = Vec::with_capacity(n);
        for s in 0..n {
            let p = grid.point(s);
            pi.push(target.log_density_unnormalized(&p).exp());
        }
        let total: f64 = pi.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numerical("grid weights degenerate".into()));
        }
        for w in &mut pi {
            *w /= total;
        }
        let sqrt_pi = pi.iter().map(|w| w.sqrt()).collect();
        Ok(ProductGrid { grid, pi, sqrt_pi })
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn n_states(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Conditional weights of the `axis` coordinate given complement
    /// slice `k`, renormalized from the joint weights.
    pub fn conditional_weights(&self, axis: usize, k: usize) -> Vec<f64> {
        let n_axis = self.grid.axes[axis].len();
        let mut w = Vec::with_capacity(n_axis);
        for u in 0..n_axis {
            let s = if axis == 0 {
                self.grid.index(u, k)
            } else {
                self.grid.index(k, u)
            };
            w.push(self.pi[s]);
        }
        let total: f64 = w.iter().sum();
        for v in &mut w {
            *v /= total;
        }
        w
    }

    /// Block kernel for `axis` built by discretizing the 1-D view of the
    /// given kernel spec at every complementary slice.
    pub fn block_kernel(
        &self,
        target: &GaussianTarget,
        spec: &KernelSpec,
        axis: usize,
    ) -> Result<BlockKernel2> {
        if axis > 1 {
            return Err(Error::Usage("axis must be 0 or 1".into()));
        }
        let axis_grid = self.grid.axes[axis];
        let other_grid = self.grid.axes[1 - axis];
        let mut slices = Vec::with_capacity(other_grid.len());
        for k in 0..other_grid.len() {
            let mut x = [0.0f64; 2];
            x[1 - axis] = other_grid.point(k);
            let view = density_view_1d(target, spec, axis, &x)?;
            let kernel = DiscreteKernel::discretize_mh_1d(&view, &axis_grid)?;
            slices.push(kernel.matrix().clone());
        }
        Ok(BlockKernel2 { axis, slices })
    }

    /// Exact Gibbs projection for `axis`: every slice row equals the
    /// conditional weights, so the kernel is the grid's conditional
    /// expectation operator.
    pub fn gibbs_projection(&self, axis: usize) -> Result<BlockKernel2> {
        if axis > 1 {
            return Err(Error::Usage("axis must be 0 or 1".into()));
        }
        let n_axis = self.grid.axes[axis].len();
        let n_other = self.grid.axes[1 - axis].len();
        let mut slices = Vec::with_capacity(n_other);
        for k in 0..n_other {
            let w = self.conditional_weights(axis, k);
            slices.push(Matrix::from_fn(n_axis, n_axis, |_, j| w[j]));
        }
        Ok(BlockKernel2 { axis, slices })
    }

    /// Worst detailed-balance residual of a block kernel against the
    /// joint weights, taken over all slices.
    pub fn detailed_balance_residual(&self, k: &BlockKernel2) -> f64 {
        let mut worst = 0.0f64;
        let n_other = k.slices.len();
        let n_axis = self.grid.axes[k.axis].len();
        for s in 0..n_other {
            let m = &k.slices[s];
            for i in 0..n_axis {
                let pi_i = self.joint_weight(k.axis, i, s);
                for j in (i + 1)..n_axis {
                    let pi_j = self.joint_weight(k.axis, j, s);
                    worst = worst.max((pi_i * m.get(i, j) - pi_j * m.get(j, i)).abs());
                }
            }
        }
        worst
    }

    fn joint_weight(&self, axis: usize, on_axis: usize, slice: usize) -> f64 {
        let s = if axis == 0 {
            self.grid.index(on_axis, slice)
        } else {
            self.grid.index(slice, on_axis)
        };
        self.pi[s]
    }

    /// L^2(pi) norm of `op - Pi` (with the stationary projection removed).
    pub fn gap_norm(&self, op: &dyn Operator2) -> Result<f64> {
        self.weighted_norm(op, true)
    }

    /// L^2(pi) norm of `op` itself (deviation operators arrive with their
    /// projection already subtracted).
    pub fn plain_norm(&self, op: &dyn Operator2) -> Result<f64> {
        self.weighted_norm(op, false)
    }

    fn weighted_norm(&self, op: &dyn Operator2, subtract_stationary: bool) -> Result<f64> {
        if op.n_states() != self.n_states() {
            return Err(Error::Usage("operator size mismatch".into()));
        }
        let adapter = PiWeighted {
            op,
            pi: &self.pi,
            sqrt_pi: &self.sqrt_pi,
            subtract_stationary,
        };
        two_norm_op(&adapter, TWO_NORM_DEFAULT_ITERS, TWO_NORM_DEFAULT_TOL)
    }

    /// Materializes an operator into a dense `DiscreteKernel`; only legal
    /// for Markov operators (row-stochastic action) small enough for the
    /// dense cap.
    pub fn dense_kernel(&self, op: &dyn Operator2) -> Result<DiscreteKernel> {
        let n = self.n_states();
        if n > crate::linalg::MAX_DIM {
            return Err(Error::Config(format!(
                "dense materialization of {n} states exceeds the cap"
            )));
        }
        // column j of the matrix is op applied to the j-th basis function
        let mut dense = Matrix::zeros(n, n);
        let mut basis = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            basis[j] = 1.0;
            op.apply(&basis, &mut col);
            basis[j] = 0.0;
            for i in 0..n {
                dense.set(i, j, col[i]);
            }
        }
        DiscreteKernel::new(dense, self.pi.clone())
    }

    /// pi-weighted inner product on the product grid.
    pub fn pi_dot(&self, f: &[f64], g: &[f64]) -> f64 {
        self.pi
            .iter()
            .zip(f.iter().zip(g.iter()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn center(&self, f: &[f64]) -> Vec<f64> {
        let mean: f64 = self.pi.iter().zip(f.iter()).map(|(w, v)| w * v).sum();
        f.iter().map(|v| v - mean).collect()
    }
}

/// Markov operator on the product grid updating one coordinate: one 1-D
/// transition matrix per frozen complementary point.
#[derive(Clone, Debug)]
pub struct BlockKernel2 {
    axis: usize,
    slices: Vec<Matrix>,
}

impl BlockKernel2 {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn slices(&self) -> &[Matrix] {
        &self.slices
    }
}

/// Linear operators on product-grid functions.
pub trait Operator2 {
    fn n_states(&self) -> usize;
    /// out = M f (matrix acting on a function / column vector).
    fn apply(&self, f: &[f64], out: &mut [f64]);
    /// out = M^T f.
    fn apply_transpose(&self, f: &[f64], out: &mut [f64]);
}

impl Operator2 for BlockKernel2 {
    fn n_states(&self) -> usize {
        let n_axis = self.slices[0].rows();
        n_axis * self.slices.len()
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n_other = self.slices.len();
        let n_axis = self.slices[0].rows();
        if self.axis == 0 {
            // state (i, k) with k the frozen coordinate: i*n_other + k
            for k in 0..n_other {
                let m = &self.slices[k];
                for i in 0..n_axis {
                    let row = m.row(i);
                    let mut acc = 0.0;
                    for (u, w) in row.iter().enumerate() {
                        acc += w * f[u * n_other + k];
                    }
                    out[i * n_other + k] = acc;
                }
            }
        } else {
            // state (k, i): k*n_axis + i, contiguous along the axis
            for k in 0..n_other {
                let base = k * n_axis;
                let m = &self.slices[k];
                for i in 0..n_axis {
                    let row = m.row(i);
                    let mut acc = 0.0;
                    for (u, w) in row.iter().enumerate() {
                        acc += w * f[base + u];
                    }
                    out[base + i] = acc;
                }
            }
        }
    }

    fn apply_transpose(&self, f: &[f64], out: &mut [f64]) {
        let n_other = self.slices.len();
        let n_axis = self.slices[0].rows();
        out.iter_mut().for_each(|v| *v = 0.0);
        if self.axis == 0 {
            for k in 0..n_other {
                let m = &self.slices[k];
                for i in 0..n_axis {
                    let row = m.row(i);
                    let fi = f[i * n_other + k];
                    for (u, w) in row.iter().enumerate() {
                        out[u * n_other + k] += w * fi;
                    }
                }
            }
        } else {
            for k in 0..n_other {
                let base = k * n_axis;
                let m = &self.slices[k];
                for i in 0..n_axis {
                    let row = m.row(i);
                    let fi = f[base + i];
                    for (u, w) in row.iter().enumerate() {
                        out[base + u] += w * fi;
                    }
                }
            }
        }
    }
}

/// Composition of block kernels; `parts[0]` is the first Markov step, so
/// the matrix is `parts[0] * parts[1] * ...` and the function action
/// applies the last part first.
pub struct Chain2<'a> {
    parts: Vec<&'a dyn Operator2>,
    n: usize,
}

impl<'a> Chain2<'a> {
    pub fn new(parts: Vec<&'a dyn Operator2>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Usage("chain needs at least one operator".into()));
        }
        let n = parts[0].n_states();
        if parts.iter().any(|p| p.n_states() != n) {
            return Err(Error::Usage("chain operators live on different grids".into()));
        }
        Ok(Chain2 { parts, n })
    }
}

impl Operator2 for Chain2<'_> {
    fn n_states(&self) -> usize {
        self.n
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let mut cur = f.to_vec();
        let mut buf = vec![0.0; self.n];
        for p in self.parts.iter().rev() {
            p.apply(&cur, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
        }
        out.copy_from_slice(&cur);
    }

    fn apply_transpose(&self, f: &[f64], out: &mut [f64]) {
        let mut cur = f.to_vec();
        let mut buf = vec![0.0; self.n];
        for p in &self.parts {
            p.apply_transpose(&cur, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
        }
        out.copy_from_slice(&cur);
    }
}

/// Convex combination of operators with a shared state space.
pub struct Mix2<'a> {
    parts: Vec<(f64, &'a dyn Operator2)>,
    n: usize,
}

impl<'a> Mix2<'a> {
    pub fn new(parts: Vec<(f64, &'a dyn Operator2)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Usage("mixture needs at least one operator".into()));
        }
        let n = parts[0].1.n_states();
        if parts.iter().any(|(_, p)| p.n_states() != n) {
            return Err(Error::Usage("mixture operators live on different grids".into()));
        }
        Ok(Mix2 { parts, n })
    }

    pub fn uniform(ops: Vec<&'a dyn Operator2>) -> Result<Self> {
        let w = 1.0 / ops.len() as f64;
        Mix2::new(ops.into_iter().map(|o| (w, o)).collect())
    }
}

impl Operator2 for Mix2<'_> {
    fn n_states(&self) -> usize {
        self.n
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut buf = vec![0.0; self.n];
        for (w, p) in &self.parts {
            p.apply(f, &mut buf);
            for (o, b) in out.iter_mut().zip(buf.iter()) {
                *o += w * b;
            }
        }
    }

    fn apply_transpose(&self, f: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut buf = vec![0.0; self.n];
        for (w, p) in &self.parts {
            p.apply_transpose(f, &mut buf);
            for (o, b) in out.iter_mut().zip(buf.iter()) {
                *o += w * b;
            }
        }
    }
}

/// Difference of two operators (typically a kernel minus its Gibbs
/// projection); its plain pi-weighted norm is the block deviation norm.
pub struct Diff2<'a> {
    pub left: &'a dyn Operator2,
    pub right: &'a dyn Operator2,
}

impl Operator2 for Diff2<'_> {
    fn n_states(&self) -> usize {
        self.left.n_states()
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let mut buf = vec![0.0; self.n_states()];
        self.left.apply(f, out);
        self.right.apply(f, &mut buf);
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o -= b;
        }
    }

    fn apply_transpose(&self, f: &[f64], out: &mut [f64]) {
        let mut buf = vec![0.0; self.n_states()];
        self.left.apply_transpose(f, out);
        self.right.apply_transpose(f, &mut buf);
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o -= b;
        }
    }
}

/// Adapter exposing D^{1/2} (Op - [1 pi^T]) D^{-1/2} to the power
/// iteration core.
struct PiWeighted<'a> {
    op: &'a dyn Operator2,
    pi: &'a [f64],
    sqrt_pi: &'a [f64],
    subtract_stationary: bool,
}

impl LinearOp for PiWeighted<'_> {
    fn dim_in(&self) -> usize {
        self.pi.len()
    }

    fn dim_out(&self) -> usize {
        self.pi.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.pi.len();
        let g: Vec<f64> = (0..n).map(|i| x[i] / self.sqrt_pi[i]).collect();
        self.op.apply(&g, y);
        if self.subtract_stationary {
            let mean: f64 = self.pi.iter().zip(g.iter()).map(|(w, v)| w * v).sum();
            for v in y.iter_mut() {
                *v -= mean;
            }
        }
        for (i, v) in y.iter_mut().enumerate() {
            *v *= self.sqrt_pi[i];
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let n = self.pi.len();
        let u: Vec<f64> = (0..n).map(|i| x[i] * self.sqrt_pi[i]).collect();
        self.op.apply_transpose(&u, y);
        if self.subtract_stationary {
            let total: f64 = u.iter().sum();
            for (i, v) in y.iter_mut().enumerate() {
                *v -= self.pi[i] * total;
            }
        }
        for (i, v) in y.iter_mut().enumerate() {
            *v /= self.sqrt_pi[i];
        }
    }
}
