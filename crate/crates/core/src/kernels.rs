//! One-block Markov transition updates: exact Gibbs, block MALA, the
//! standardized MALA kernel M_Delta, and the hybrid random-walk Metropolis
//! counterexample. All Metropolis ratios are computed in log space, and
//! every kernel consumes randomness in a fixed documented order (proposal
//! noise first, acceptance uniform second) so trajectories replay exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, Matrix, SymMatrix};
use crate::normal::pdf;
use crate::rng::RngStream;
use crate::target::GaussianTarget;

/// Chain state: one point of the product space.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub x: Vec<f64>,
}

impl ChainState {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage("state has non-finite entries".into()));
        }
        Ok(ChainState { x })
    }
}

/// Per-block proposal/acceptance counters.
#[derive(Clone, Debug, Default)]
pub struct AcceptanceStats {
    pub proposed: Vec<u64>,
    pub accepted: Vec<u64>,
}

impl AcceptanceStats {
    pub fn new(d: usize) -> Self {
        AcceptanceStats {
            proposed: vec![0; d],
            accepted: vec![0; d],
        }
    }

    pub fn record(&mut self, j: usize, accepted: bool) {
        self.proposed[j] += 1;
        if accepted {
            self.accepted[j] += 1;
        }
    }

    pub fn rate(&self, j: usize) -> f64 {
        if self.proposed[j] == 0 {
            f64::NAN
        } else {
            self.accepted[j] as f64 / self.proposed[j] as f64
        }
    }

    pub fn merge(&mut self, other: &AcceptanceStats) {
        for j in 0..self.proposed.len() {
            self.proposed[j] += other.proposed[j];
            self.accepted[j] += other.accepted[j];
        }
    }
}

/// Block MALA configuration: step sizes plus the derived matrices
/// Delta_j = h_j Q_jj and their symmetric square roots (cached for the
/// standardized kernel).
#[derive(Clone, Debug)]
pub struct MalaConfig {
    step_sizes: Vec<f64>,
    deltas: Vec<SymMatrix>,
    delta_sqrts: Vec<Matrix>,
}

impl MalaConfig {
    pub fn new(target: &GaussianTarget, step_sizes: Vec<f64>) -> Result<Self> {
        let d = target.num_blocks();
        if step_sizes.len() != d {
            return Err(Error::Config(format!(
                "got {} step sizes for {d} blocks",
                step_sizes.len()
            )));
        }
        if step_sizes.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::Config("step sizes must be positive".into()));
        }
        let mut deltas = Vec::with_capacity(d);
        let mut delta_sqrts = Vec::with_capacity(d);
        for (j, &h) in step_sizes.iter().enumerate() {
            let q_jj = &target.block(j).q_jj;
            let k = q_jj.dim();
            let delta = SymMatrix::from_fn(k, |a, b| h * q_jj.get(a, b))?;
            delta_sqrts.push(sym_sqrt(&delta)?);
            deltas.push(delta);
        }
        Ok(MalaConfig {
            step_sizes,
            deltas,
            delta_sqrts,
        })
    }

    pub fn step_size(&self, j: usize) -> f64 {
        self.step_sizes[j]
    }

    pub fn step_sizes(&self) -> &[f64] {
        &self.step_sizes
    }

    pub fn delta(&self, j: usize) -> &SymMatrix {
        &self.deltas[j]
    }

    pub fn delta_sqrt(&self, j: usize) -> &Matrix {
        &self.delta_sqrts[j]
    }
}

/// Symmetric square root via eigendecomposition; requires SPD input.
pub fn sym_sqrt(a: &SymMatrix) -> Result<Matrix> {
    let eig = eigen_sym(a)?;
    if eig.min() <= 0.0 {
        return Err(Error::Usage(format!(
            "matrix square root needs SPD input (min eigenvalue {})",
            eig.min()
        )));
    }
    let n = a.dim();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for t in 0..n {
                acc += eig.vectors.get(i, t) * eig.values[t].sqrt() * eig.vectors.get(j, t);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Exact Gibbs update of block j: x_j <- m_j + L^{-T} z. Leaves x_{-j}
/// untouched.
pub fn gibbs_block_step(
    target: &GaussianTarget,
    j: usize,
    state: &mut ChainState,
    rng: &mut RngStream,
) -> Result<()> {
    let cond = target.conditional(j, &state.x)?;
    let draw = cond.sample(rng);
    let r = target.blocks().range(j);
    state.x[r].copy_from_slice(&draw);
    Ok(())
}

/// Log Metropolis-Hastings acceptance ratio of the block MALA proposal
/// `y_j` from state `x` (block j). Exposed so tests can cross-check it
/// against the standardized quadratic form.
pub fn mala_log_accept_ratio(
    target: &GaussianTarget,
    cfg: &MalaConfig,
    j: usize,
    x: &[f64],
    y_block: &[f64],
) -> f64 {
    let r = target.blocks().range(j);
    let h = cfg.step_size(j);
    let mut y = x.to_vec();
    y[r.clone()].copy_from_slice(y_block);

    let log_pi_x = target.log_density_unnormalized(x);
    let log_pi_y = target.log_density_unnormalized(&y);

    // forward proposal mean from x, reverse proposal mean from y
    let gx = target.grad_log_density(x);
    let gy = target.grad_log_density(&y);
    let mut fwd = 0.0; // ||y_j - x_j - h grad_j(x)||^2
    let mut rev = 0.0; // ||x_j - y_j - h grad_j(y)||^2
    for (off, i) in r.clone().enumerate() {
        let f = y[i] - x[i] - h * gx[i];
        let b = x[i] - y[i] - h * gy[i];
        fwd += f * f;
        rev += b * b;
        let _ = off;
    }
    (log_pi_y - log_pi_x) + (fwd - rev) / (4.0 * h)
}

/// One block MALA step: propose y_j ~ N(x_j + h grad_j log pi(x), 2h I),
/// accept by the exact MH ratio in log space. Returns the accept flag.
pub fn mala_block_step(
    target: &GaussianTarget,
    cfg: &MalaConfig,
    j: usize,
    state: &mut ChainState,
    rng: &mut RngStream,
) -> Result<bool> {
    let r = target.blocks().range(j);
    let h = cfg.step_size(j);
    let grad = target.grad_log_density(&state.x);
    let scale = (2.0 * h).sqrt();
    // proposal noise first, acceptance uniform second
    let mut y_block = Vec::with_capacity(r.len());
    for i in r.clone() {
        y_block.push(state.x[i] + h * grad[i] + scale * rng.next_std_normal());
    }
    let log_ratio = mala_log_accept_ratio(target, cfg, j, &state.x, &y_block);
    let u = rng.next_uniform();
    let accept = u.ln() < log_ratio;
    if accept {
        state.x[r].copy_from_slice(&y_block);
    }
    Ok(accept)
}

/// Standardized MALA kernel M_Delta targeting the standard Gaussian:
/// proposes Y = (I - Delta) X + sqrt(2) Delta^{1/2} z and accepts with
/// min{1, exp((X' Delta X - Y' Delta Y)/4)}.
#[derive(Clone, Debug)]
pub struct StdMala {
    delta: SymMatrix,
    delta_sqrt: Matrix,
}

impl StdMala {
    pub fn new(delta: SymMatrix) -> Result<Self> {
        let delta_sqrt = sym_sqrt(&delta).map_err(|_| {
            Error::Usage("standardized MALA needs an SPD step matrix".into())
        })?;
        Ok(StdMala { delta, delta_sqrt })
    }

    pub fn scalar(delta: f64) -> Result<Self> {
        StdMala::new(SymMatrix::from_fn(1, |_, _| delta)?)
    }

    pub fn delta(&self) -> &SymMatrix {
        &self.delta
    }

    pub fn log_accept_ratio(&self, x: &[f64], y: &[f64]) -> f64 {
        0.25 * (quad_form(&self.delta, x) - quad_form(&self.delta, y))
    }

    pub fn step(&self, x: &mut [f64], rng: &mut RngStream) -> bool {
        let n = self.delta.dim();
        let mut z = vec![0.0; n];
        rng.fill_std_normal(&mut z);
        let dz = self.delta_sqrt.matvec(&z);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut drift = 0.0;
            for j in 0..n {
                drift += self.delta.get(i, j) * x[j];
            }
            y[i] = x[i] - drift + std::f64::consts::SQRT_2 * dz[i];
        }
        let log_ratio = self.log_accept_ratio(x, &y);
        let u = rng.next_uniform();
        let accept = u.ln() < log_ratio;
        if accept {
            x.copy_from_slice(&y);
        }
        accept
    }
}

fn quad_form(a: &SymMatrix, x: &[f64]) -> f64 {
    let ax = a.as_matrix().matvec(x);
    x.iter().zip(ax.iter()).map(|(u, v)| u * v).sum()
}

/// Hybrid random-walk Metropolis update of one coordinate of a 2-D state,
/// targeting independent standard normals with proposal variance
/// 1 + (other coordinate)^2. The proposal is symmetric, so the acceptance
/// probability is min{1, exp((x^2 - z^2)/2)}.
pub fn hybrid_rwm_step(coord: usize, state: &mut [f64; 2], rng: &mut RngStream) -> bool {
    assert!(coord < 2, "hybrid RWM is a 2-block kernel");
    let other = state[1 - coord];
    let sd = (1.0 + other * other).sqrt();
    let x = state[coord];
    let z = x + sd * rng.next_std_normal();
    let log_ratio = 0.5 * (x * x - z * z);
    let u = rng.next_uniform();
    let accept = u.ln() < log_ratio;
    if accept {
        state[coord] = z;
    }
    accept
}

/// Pure density view of a one-dimensional block kernel: proposal density
/// q(x, y), acceptance alpha(x, y), and the (normalized) target density.
/// This is what the grid oracle discretizes.
#[derive(Clone, Debug)]
pub enum View1d {
    /// Exact conditional Gibbs draw: q is the conditional density, alpha = 1.
    Gibbs { mean: f64, prec: f64 },
    /// Conditional block MALA with target N(mean, 1/prec) and step h.
    CondMala { mean: f64, prec: f64, h: f64 },
    /// Standardized MALA M_delta targeting N(0, 1).
    StdMala { delta: f64 },
    /// Hybrid RWM targeting N(0, 1) at conditioning value `cond`.
    HybridRwm { cond: f64 },
}

impl View1d {
    pub fn proposal_density(&self, x: f64, y: f64) -> f64 {
        match *self {
            View1d::Gibbs { mean, prec } => gauss_pdf(y, mean, 1.0 / prec),
            View1d::CondMala { mean, prec, h } => {
                gauss_pdf(y, x - h * prec * (x - mean), 2.0 * h)
            }
            View1d::StdMala { delta } => gauss_pdf(y, (1.0 - delta) * x, 2.0 * delta),
            View1d::HybridRwm { cond } => gauss_pdf(y, x, 1.0 + cond * cond),
        }
    }

    pub fn acceptance(&self, x: f64, y: f64) -> f64 {
        match *self {
            View1d::Gibbs { .. } => 1.0,
            View1d::CondMala { mean, prec, h } => {
                let lp = -0.5 * prec * ((y - mean).powi(2) - (x - mean).powi(2));
                let fwd = (y - (x - h * prec * (x - mean))).powi(2);
                let rev = (x - (y - h * prec * (y - mean))).powi(2);
                (lp + (fwd - rev) / (4.0 * h)).exp().min(1.0)
            }
            View1d::StdMala { delta } => {
                (0.25 * delta * (x * x - y * y)).exp().min(1.0)
            }
            View1d::HybridRwm { .. } => (0.5 * (x * x - y * y)).exp().min(1.0),
        }
    }

    pub fn target_density(&self, y: f64) -> f64 {
        match *self {
            View1d::Gibbs { mean, prec } | View1d::CondMala { mean, prec, .. } => {
                gauss_pdf(y, mean, 1.0 / prec)
            }
            View1d::StdMala { .. } | View1d::HybridRwm { .. } => pdf(y),
        }
    }

    /// Draws one transition from `x`; mirrors the sampling kernels so the
    /// Monte Carlo acceptance frequency matches the integral of q * alpha.
    pub fn sample(&self, x: f64, rng: &mut RngStream) -> (f64, bool) {
        match *self {
            View1d::Gibbs { mean, prec } => {
                (mean + rng.next_std_normal() / prec.sqrt(), true)
            }
            View1d::CondMala { mean, prec, h } => {
                let y = x - h * prec * (x - mean) + (2.0 * h).sqrt() * rng.next_std_normal();
                let a = self.acceptance(x, y);
                let u = rng.next_uniform();
                if u < a {
                    (y, true)
                } else {
                    (x, false)
                }
            }
            View1d::StdMala { delta } => {
                let y = (1.0 - delta) * x + (2.0 * delta).sqrt() * rng.next_std_normal();
                let a = self.acceptance(x, y);
                let u = rng.next_uniform();
                if u < a {
                    (y, true)
                } else {
                    (x, false)
                }
            }
            View1d::HybridRwm { cond } => {
                let z = x + (1.0 + cond * cond).sqrt() * rng.next_std_normal();
                let a = self.acceptance(x, z);
                let u = rng.next_uniform();
                if u < a {
                    (z, true)
                } else {
                    (x, false)
                }
            }
        }
    }
}

/// Builds the 1-D density view of block `j` of a target/kernel pair at the
/// conditioning state `x`. Only 1-D blocks have a scalar view.
pub fn density_view_1d(
    target: &GaussianTarget,
    kernel: &KernelSpec,
    j: usize,
    x: &[f64],
) -> Result<View1d> {
    let r = target.blocks().range(j);
    if r.len() != 1 {
        return Err(Error::Usage(format!(
            "density view supports 1-D blocks, block {j} has dimension {}",
            r.len()
        )));
    }
    let cond = target.conditional(j, x)?;
    let mean = cond.mean[0];
    let prec = cond.precision.get(0, 0);
    match kernel {
        KernelSpec::Gibbs => Ok(View1d::Gibbs { mean, prec }),
        KernelSpec::Mala { step_sizes } => Ok(View1d::CondMala {
            mean,
            prec,
            h: step_sizes[j],
        }),
        KernelSpec::StdMala { step_sizes } => Ok(View1d::StdMala {
            delta: step_sizes[j],
        }),
        KernelSpec::HybridRwm => Ok(View1d::HybridRwm {
            cond: x[if j == 0 { 1 } else { 0 }],
        }),
    }
}

fn gauss_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let z = (y - mean) / var.sqrt();
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Kernel specification, the external JSON interface.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Gibbs,
    Mala { step_sizes: Vec<f64> },
    StdMala { step_sizes: Vec<f64> },
    HybridRwm,
}

/// A kernel spec prepared against a target, ready to update blocks.
#[derive(Clone, Debug)]
pub enum KernelSet {
    Gibbs,
    Mala(MalaConfig),
    StdMala(Vec<StdMala>),
    HybridRwm,
}

impl KernelSet {
    pub fn prepare(spec: &KernelSpec, target: &GaussianTarget) -> Result<Self> {
        match spec {
            KernelSpec::Gibbs => Ok(KernelSet::Gibbs),
            KernelSpec::Mala { step_sizes } => {
                Ok(KernelSet::Mala(MalaConfig::new(target, step_sizes.clone())?))
            }
            KernelSpec::StdMala { step_sizes } => {
                // the standardized kernel targets the standard Gaussian, so
                // the chain form only makes sense for that target
                let n = target.dim();
                let ident = target.mean().iter().all(|v| *v == 0.0)
                    && (0..n).all(|i| {
                        (0..n).all(|j| {
                            let want = if i == j { 1.0 } else { 0.0 };
                            (target.precision().get(i, j) - want).abs() < 1e-12
                        })
                    });
                if !ident {
                    return Err(Error::Config(
                        "std_mala chains require the standard Gaussian target".into(),
                    ));
                }
                let cfg = MalaConfig::new(target, step_sizes.clone())?;
                let kernels = (0..target.num_blocks())
                    .map(|j| StdMala::new(cfg.delta(j).clone()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(KernelSet::StdMala(kernels))
            }
            KernelSpec::HybridRwm => {
                if target.dim() != 2 || target.num_blocks() != 2 {
                    return Err(Error::Config(
                        "hybrid_rwm requires a 2-D target with two 1-D blocks".into(),
                    ));
                }
                Ok(KernelSet::HybridRwm)
            }
        }
    }

    /// Updates block `j` in place. Returns the accept flag for
    /// Metropolis-style kernels, `None` for rejection-free Gibbs.
    pub fn step(
        &self,
        target: &GaussianTarget,
        j: usize,
        state: &mut ChainState,
        rng: &mut RngStream,
    ) -> Result<Option<bool>> {
        match self {
            KernelSet::Gibbs => {
                gibbs_block_step(target, j, state, rng)?;
                Ok(None)
            }
            KernelSet::Mala(cfg) => Ok(Some(mala_block_step(target, cfg, j, state, rng)?)),
            KernelSet::StdMala(kernels) => {
                let r = target.blocks().range(j);
                let mut block = state.x[r.clone()].to_vec();
                let accepted = kernels[j].step(&mut block, rng);
                state.x[r].copy_from_slice(&block);
                Ok(Some(accepted))
            }
            KernelSet::HybridRwm => {
                let mut pair = [state.x[0], state.x[1]];
                let accepted = hybrid_rwm_step(j, &mut pair, rng);
                state.x[0] = pair[0];
                state.x[1] = pair[1];
                Ok(Some(accepted))
            }
        }
    }
}
