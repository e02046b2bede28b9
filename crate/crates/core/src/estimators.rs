//! Monte Carlo output analysis: autocovariances, batch-means asymptotic
//! variance, effective sample size, and a heuristic geometric-decay gap
//! fit. The gap fit is a diagnostic only and is flagged as such wherever
//! it is reported.

use crate::error::{Error, Result};

/// Biased-normalization autocovariances (divide by n) at lags 0..=max_lag.
pub fn autocovariance(samples: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = samples.len();
    if n <= max_lag {
        return Err(Error::Usage(format!(
            "need more than {max_lag} samples, got {n}"
        )));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = samples.iter().map(|v| v - mean).collect();
    let mut out = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let mut acc = 0.0;
        for i in 0..n - lag {
            acc += centered[i] * centered[i + lag];
        }
        out.push(acc / n as f64);
    }
    Ok(out)
}

/// Batch-means estimate of the asymptotic variance.
#[derive(Clone, Debug)]
pub struct VarianceEstimate {
    pub sigma2_hat: f64,
    pub batch_count: usize,
    pub batch_length: usize,
    /// Standard error of sigma2_hat itself.
    pub se: f64,
}

/// Nonoverlapping batch means with floor(sqrt(n)) batches; the remainder
/// tail is discarded so fixtures stay stable.
pub fn batch_means_variance(samples: &[f64]) -> Result<VarianceEstimate> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::Usage(format!(
            "batch means needs at least 100 samples, got {n}"
        )));
    }
    let batch_count = (n as f64).sqrt().floor() as usize;
    let batch_length = n / batch_count;
    let used = batch_count * batch_length;
    let mut means = Vec::with_capacity(batch_count);
    for b in 0..batch_count {
        let chunk = &samples[b * batch_length..(b + 1) * batch_length];
        means.push(chunk.iter().sum::<f64>() / batch_length as f64);
    }
    let grand = samples[..used].iter().sum::<f64>() / used as f64;
    let var_of_means = means
        .iter()
        .map(|m| (m - grand).powi(2))
        .sum::<f64>()
        / (batch_count - 1) as f64;
    let sigma2_hat = batch_length as f64 * var_of_means;
    let se = sigma2_hat * (2.0 / (batch_count as f64 - 1.0)).sqrt();
    Ok(VarianceEstimate {
        sigma2_hat,
        batch_count,
        batch_length,
        se,
    })
}

/// Effective sample size n * gamma_0 / sigma2_hat.
pub fn ess(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    let gamma0 = autocovariance(samples, 0)?[0];
    if gamma0 <= 0.0 {
        return Err(Error::Numerical(
            "effective sample size needs positive sample variance".into(),
        ));
    }
    let bm = batch_means_variance(samples)?;
    Ok(n as f64 * gamma0 / bm.sigma2_hat)
}

/// Heuristic spectral-gap proxy: 1 - exp(slope) from a least-squares fit
/// of log |autocorrelation| against lag, using lags with autocorrelation
/// above 0.05. This identifies one functional's decay rate, not the
/// operator gap.
pub fn gap_fit(autocovs: &[f64]) -> Result<f64> {
    if autocovs.is_empty() || autocovs[0] <= 0.0 {
        return Err(Error::Numerical(
            "degenerate autocorrelation fit: zero sample variance".into(),
        ));
    }
    let gamma0 = autocovs[0];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lag, g) in autocovs.iter().enumerate().skip(1) {
        let rho = g / gamma0;
        if rho.abs() > 0.05 {
            xs.push(lag as f64);
            ys.push(rho.abs().ln());
        } else {
            break;
        }
    }
    if xs.len() < 2 {
        return Err(Error::Numerical(
            "degenerate autocorrelation fit: too few usable lags".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::Numerical("degenerate autocorrelation fit".into()));
    }
    let slope = num / den;
    Ok(1.0 - slope.exp())
}
