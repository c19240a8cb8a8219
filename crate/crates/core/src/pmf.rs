//! Exact finite distributions on `{0, …, n}` and their size-biased versions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Moments;
use crate::numeric::{log_sum_exp, CompensatedSum};

/// Probability mass function of an integer variable on `{0, …, n}`. Index
/// `k` holds `P(Y = k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactPmf {
    probs: Vec<f64>,
}

impl ExactPmf {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn point_mass(k: usize, support_max: usize) -> Self {
        let mut probs = vec![0.0; support_max.max(k) + 1];
        probs[k] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn expect<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(k, p)| p * f(k))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|k| k as f64)
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.expect(|k| (k as f64 - mean).powi(2))
    }

    /// `P(W ≥ t)` with `W = (Y-μ)/σ`.
    pub fn right_tail(&self, moments: &Moments, t: f64) -> f64 {
        self.expect(|k| f64::from(u8::from(standardize(k, moments) >= t)))
    }

    /// `P(W ≤ -t)`.
    pub fn left_tail(&self, moments: &Moments, t: f64) -> f64 {
        self.expect(|k| f64::from(u8::from(standardize(k, moments) <= -t)))
    }

    /// `ln E[e^{θY}]`.
    pub fn log_mgf_raw(&self, theta: f64) -> f64 {
        log_sum_exp(
            self.iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(k, p)| p.ln() + theta * k as f64),
        )
    }

    /// `ln M(θ)` for the standardized variable, `M(θ) = E[e^{θ(Y-μ)/σ}]`.
    pub fn log_mgf_standardized(&self, moments: &Moments, theta: f64) -> f64 {
        log_sum_exp(
            self.iter()
                .filter(|&(_, p)| p > 0.0)
                .map(|(k, p)| p.ln() + theta * standardize(k, moments)),
        )
    }
}

pub fn standardize(k: usize, moments: &Moments) -> f64 {
    (k as f64 - moments.mu) / moments.sigma
}

/// `q_k = k p_k / μ`, the size-biased distribution.
pub fn size_bias_transform(pmf: &ExactPmf) -> Result<ExactPmf> {
    let mean = pmf.mean();
    if mean.is_nan() || mean <= 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok(ExactPmf::from_probs(
        pmf.iter().map(|(k, p)| k as f64 * p / mean).collect(),
    ))
}

/// MGF quantities of an exact distribution at one `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfValues {
    /// `M(θ) = E[e^{θ(Y-μ)/σ}]`.
    pub standardized: f64,
    pub log_standardized: f64,
    /// `m(θ) = E[e^{θY}]`.
    pub raw: f64,
    /// `E[Y e^{θY}]`.
    pub tilted_mean: f64,
}

pub fn pmf_mgf(pmf: &ExactPmf, moments: &Moments, theta: f64) -> MgfValues {
    let log_standardized = pmf.log_mgf_standardized(moments, theta);
    let log_raw = pmf.log_mgf_raw(theta);
    let log_tilted = log_sum_exp(
        pmf.iter()
            .filter(|&(k, p)| p > 0.0 && k > 0)
            .map(|(k, p)| p.ln() + (k as f64).ln() + theta * k as f64),
    );
    MgfValues {
        standardized: log_standardized.exp(),
        log_standardized,
        raw: log_raw.exp(),
        tilted_mean: log_tilted.exp(),
    }
}
