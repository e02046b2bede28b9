//! Scan schedules: composition of block kernels into deterministic-scan
//! sweeps and random-scan single-block chains, plus the chain driver that
//! records functional values.
//!
//! Step accounting follows the paper's comparison convention: one step of
//! a deterministic run is a full sweep (d block updates), one step of a
//! random run is a single block update.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{AcceptanceStats, ChainState, KernelSet};
use crate::rng::RngStream;
use crate::target::GaussianTarget;

/// Scan rule over block indices.
#[derive(Clone, Debug, PartialEq)]
pub enum ScanSchedule {
    /// Applies blocks in the order sigma(1), ..., sigma(d); one step of the
    /// chain is one full sweep.
    Deterministic(Vec<usize>),
    /// Picks block j with probability w_j each step.
    Random(Vec<f64>),
}

impl ScanSchedule {
    pub fn deterministic(sigma: Vec<usize>) -> Result<Self> {
        let d = sigma.len();
        if d == 0 {
            return Err(Error::Config("permutation must be nonempty".into()));
        }
        let mut seen = vec![false; d];
        for &j in &sigma {
            if j >= d || seen[j] {
                return Err(Error::Config(format!(
                    "sigma must be a bijection on 0..{d}, got {sigma:?}"
                )));
            }
            seen[j] = true;
        }
        Ok(ScanSchedule::Deterministic(sigma))
    }

    pub fn identity(d: usize) -> Self {
        ScanSchedule::Deterministic((0..d).collect())
    }

    pub fn random(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("weights must be nonempty".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config("weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(ScanSchedule::Random(weights))
    }

    pub fn uniform_random(d: usize) -> Self {
        ScanSchedule::Random(vec![1.0 / d as f64; d])
    }

    pub fn num_blocks(&self) -> usize {
        match self {
            ScanSchedule::Deterministic(s) => s.len(),
            ScanSchedule::Random(w) => w.len(),
        }
    }

    /// Block updates performed per recorded chain step.
    pub fn updates_per_step(&self) -> usize {
        match self {
            ScanSchedule::Deterministic(s) => s.len(),
            ScanSchedule::Random(_) => 1,
        }
    }
}

/// JSON scan specification.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanSpec {
    Deterministic { sigma: Vec<usize> },
    Random { weights: Vec<f64> },
}

impl ScanSpec {
    pub fn build(&self) -> Result<ScanSchedule> {
        match self {
            ScanSpec::Deterministic { sigma } => ScanSchedule::deterministic(sigma.clone()),
            ScanSpec::Random { weights } => ScanSchedule::random(weights.clone()),
        }
    }
}

/// Functional of the state recorded along the chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Functional {
    Coord { index: usize },
    Linear { coefficients: Vec<f64> },
    Constant { value: f64 },
}

impl Functional {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Functional::Coord { index } => x[*index],
            Functional::Linear { coefficients } => coefficients
                .iter()
                .zip(x.iter())
                .map(|(c, v)| c * v)
                .sum(),
            Functional::Constant { value } => *value,
        }
    }

    pub fn id(&self) -> String {
        match self {
            Functional::Coord { index } => format!("coord{index}"),
            Functional::Linear { .. } => "linear".to_string(),
            Functional::Constant { .. } => "constant".to_string(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Functional::Coord { index } if *index >= dim => Err(Error::Config(format!(
                "functional coordinate {index} out of range for dimension {dim}"
            ))),
            Functional::Linear { coefficients } if coefficients.len() != dim => {
                Err(Error::Config(format!(
                    "linear functional has {} coefficients for dimension {dim}",
                    coefficients.len()
                )))
            }
            _ => Ok(()),
        }
    }
}

/// One full deterministic sweep: blocks sigma(1), sigma(2), ... in order.
pub fn dcw_sweep(
    target: &GaussianTarget,
    kernels: &KernelSet,
    sigma: &[usize],
    state: &mut ChainState,
    rng: &mut RngStream,
    stats: &mut AcceptanceStats,
) -> Result<()> {
    for &j in sigma {
        if let Some(accepted) = kernels.step(target, j, state, rng)? {
            stats.record(j, accepted);
        }
    }
    Ok(())
}

/// One random-scan step: draw j ~ weights, apply K_j. The selection
/// uniform is consumed before any kernel randomness.
pub fn rcw_step(
    target: &GaussianTarget,
    kernels: &KernelSet,
    weights: &[f64],
    state: &mut ChainState,
    rng: &mut RngStream,
    stats: &mut AcceptanceStats,
) -> Result<usize> {
    let j = rng.next_index(weights);
    if let Some(accepted) = kernels.step(target, j, state, rng)? {
        stats.record(j, accepted);
    }
    Ok(j)
}

/// How the chain is initialized.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChainInit {
    /// Exact draw from the target; the default for variance experiments
    /// because the CLT comparisons are stated under the stationary law.
    Stationary,
    Point { x: Vec<f64> },
}

/// Seeded trajectory summary.
#[derive(Clone, Debug)]
pub struct ChainRun {
    /// samples[k][f] = value of functional f at post-burn-in step k.
    pub samples: Vec<Vec<f64>>,
    pub acceptance: AcceptanceStats,
    pub root_seed: u64,
    pub stream_id: u64,
    pub wall_secs: f64,
}

impl ChainRun {
    /// Column f as a flat series.
    pub fn functional_series(&self, f: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[f]).collect()
    }
}

/// Runs a chain for `n_steps` recorded steps, discarding `burn_in` of
/// them. A step is one sweep for deterministic schedules and one block
/// update for random schedules.
#[allow(clippy::too_many_arguments)]
pub fn run_chain(
    target: &GaussianTarget,
    kernels: &KernelSet,
    schedule: &ScanSchedule,
    n_steps: usize,
    burn_in: usize,
    functionals: &[Functional],
    rng: &mut RngStream,
    init: &ChainInit,
) -> Result<ChainRun> {
    if n_steps <= burn_in {
        return Err(Error::Config(format!(
            "need n_steps > burn_in, got {n_steps} <= {burn_in}"
        )));
    }
    if schedule.num_blocks() != target.num_blocks() {
        return Err(Error::Config(format!(
            "schedule covers {} blocks, target has {}",
            schedule.num_blocks(),
            target.num_blocks()
        )));
    }
    for f in functionals {
        f.validate(target.dim())?;
    }
    let start = Instant::now();
    let mut state = match init {
        ChainInit::Stationary => ChainState::new(target.sample_exact(rng))?,
        ChainInit::Point { x } => {
            if x.len() != target.dim() {
                return Err(Error::Config("init point has wrong dimension".into()));
            }
            ChainState::new(x.clone())?
        }
    };
    let mut stats = AcceptanceStats::new(target.num_blocks());
    let mut samples = Vec::with_capacity(n_steps - burn_in);
    for step in 0..n_steps {
        match schedule {
            ScanSchedule::Deterministic(sigma) => {
                dcw_sweep(target, kernels, sigma, &mut state, rng, &mut stats)?
            }
            ScanSchedule::Random(weights) => {
                rcw_step(target, kernels, weights, &mut state, rng, &mut stats)?;
            }
        }
        if step >= burn_in {
            samples.push(functionals.iter().map(|f| f.eval(&state.x)).collect());
        }
    }
    Ok(ChainRun {
        samples,
        acceptance: stats,
        root_seed: rng.root_seed(),
        stream_id: rng.stream_id(),
        wall_secs: start.elapsed().as_secs_f64(),
    })
}
