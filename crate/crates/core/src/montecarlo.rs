//! Monte Carlo estimates of the tails of `W = (Y-μ)/σ` and their comparison
//! with the analytic bounds.

use serde::Serialize;

use crate::bounds::{BoundPoint, Method, Side};
use crate::error::{Error, Result};
use crate::graph::GraphSampler;
use crate::model::{Moments, Params};
use crate::pmf::ExactPmf;
use crate::rng::{par_blocks, stream};

/// Two-sided 99% normal quantile, `Φ⁻¹(0.995)`.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: f64,
    /// Zero marks an exact tail (from enumeration) rather than an estimate.
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub side: Side,
}

impl TailEstimate {
    pub fn from_counts(t: f64, successes: u64, trials: u64, side: Side) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_99);
        let p_hat = successes as f64 / trials as f64;
        Self {
            t,
            trials,
            successes,
            p_hat,
            ci_low: ci_low.min(p_hat),
            ci_high: ci_high.max(p_hat),
            side,
        }
    }

    pub fn exact(t: f64, prob: f64, side: Side) -> Self {
        Self {
            t,
            trials: 0,
            successes: 0,
            p_hat: prob,
            ci_low: prob,
            ci_high: prob,
            side,
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub t_grid: Vec<f64>,
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be ≥ 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be ≥ 1".into()));
        }
        validate_grid(&self.t_grid)
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("t-grid must not be empty".into()));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Config("t-grid values must be finite and ≥ 0".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("t-grid must be nondecreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub params: Params,
    pub moments: Moments,
    pub samples: u64,
    pub seed: u64,
    pub right: Vec<TailEstimate>,
    pub left: Vec<TailEstimate>,
    pub y_mean: f64,
    /// Standard error of `y_mean` from the sample variance.
    pub y_se: f64,
}

impl TailReport {
    /// Whether the sample mean of `Y` lies within `k` standard errors of `μ`.
    pub fn mean_within(&self, k: f64) -> bool {
        (self.y_mean - self.moments.mu).abs() <= k * self.y_se
    }
}

struct Partial {
    right_hist: Vec<u64>,
    left_hist: Vec<u64>,
    sum: f64,
    sum_sq: f64,
}

/// One pass of `config.samples` draws of `Y` feeding every `t` of the grid
/// on both sides. Each draw is binned by how many grid points it clears, so
/// the per-draw work is one binary search per side.
pub fn estimate_tails(params: &Params, moments: &Moments, config: &MCConfig) -> Result<TailReport> {
    config.validate()?;
    let grid = &config.t_grid;
    let bins = grid.len() + 1;
    let partials = par_blocks(config.samples, config.workers, |index, draws| {
        let mut rng = stream(config.seed, index);
        let mut sampler = GraphSampler::new(*params);
        let mut part = Partial {
            right_hist: vec![0; bins],
            left_hist: vec![0; bins],
            sum: 0.0,
            sum_sq: 0.0,
        };
        for _ in 0..draws {
            let y = sampler.sample_y(&mut rng);
            let w = (y as f64 - moments.mu) / moments.sigma;
            part.right_hist[grid.partition_point(|&t| t <= w)] += 1;
            part.left_hist[grid.partition_point(|&t| t <= -w)] += 1;
            let yf = y as f64;
            part.sum += yf;
            part.sum_sq += yf * yf;
        }
        part
    });

    let mut right_hist = vec![0u64; bins];
    let mut left_hist = vec![0u64; bins];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for part in &partials {
        for i in 0..bins {
            right_hist[i] += part.right_hist[i];
            left_hist[i] += part.left_hist[i];
        }
        sum += part.sum;
        sum_sq += part.sum_sq;
    }

    // A draw in bin b clears grid points 0..b.
    let cumulate = |hist: &[u64], side: Side| -> Vec<TailEstimate> {
        let mut above: u64 = hist.iter().sum();
        grid.iter()
            .enumerate()
            .map(|(j, &t)| {
                above -= hist[j];
                TailEstimate::from_counts(t, above, config.samples, side)
            })
            .collect()
    };

    let n = config.samples as f64;
    let y_mean = sum / n;
    let var = if config.samples > 1 {
        ((sum_sq - n * y_mean * y_mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(TailReport {
        params: *params,
        moments: *moments,
        samples: config.samples,
        seed: config.seed,
        right: cumulate(&right_hist, Side::Right),
        left: cumulate(&left_hist, Side::Left),
        y_mean,
        y_se: (var / n).sqrt(),
    })
}

/// Exact tails from an enumerated distribution, as zero-width estimates.
pub fn exact_tails(pmf: &ExactPmf, moments: &Moments, grid: &[f64], side: Side) -> Vec<TailEstimate> {
    grid.iter()
        .map(|&t| {
            let prob = match side {
                Side::Right => pmf.right_tail(moments, t),
                Side::Left => pmf.left_tail(moments, t),
            };
            TailEstimate::exact(t, prob, side)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationRow {
    pub t: f64,
    pub method: Method,
    pub side: Side,
    pub log_bound: f64,
    pub bound: f64,
    pub clipped: bool,
    pub p_hat: f64,
    pub ci_low: f64,
    /// `bound ≥ ci_low`
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub rows: Vec<DominationRow>,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DominationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn row(&self, t: f64, method: Method) -> Option<&DominationRow> {
        self.rows.iter().find(|r| r.t == t && r.method == method)
    }
}

/// Checks each bound against the lower confidence limit of the tail it
/// bounds. Bounds of a method must sit on exactly the `t`-grid of the
/// estimates for that method's side.
pub fn domination_report(estimates: &[TailEstimate], bounds: &[BoundPoint]) -> Result<DominationReport> {
    let mut methods: Vec<Method> = bounds.iter().map(|b| b.method).collect();
    methods.sort();
    methods.dedup();

    let mut rows = Vec::with_capacity(bounds.len());
    for method in methods {
        let side = method.side();
        let est: Vec<&TailEstimate> = estimates.iter().filter(|e| e.side == side).collect();
        let pts: Vec<&BoundPoint> = bounds.iter().filter(|b| b.method == method).collect();
        if est.len() != pts.len() || est.iter().zip(&pts).any(|(e, b)| e.t != b.t) {
            return Err(Error::GridMismatch(format!(
                "{method} bounds at {:?} vs {side:?} estimates at {:?}",
                pts.iter().map(|b| b.t).collect::<Vec<_>>(),
                est.iter().map(|e| e.t).collect::<Vec<_>>()
            )));
        }
        for (e, b) in est.iter().zip(&pts) {
            let bound = b.bound();
            rows.push(DominationRow {
                t: b.t,
                method,
                side,
                log_bound: b.log_bound,
                bound,
                clipped: b.clipped(),
                p_hat: e.p_hat,
                ci_low: e.ci_low,
                pass: bound >= e.ci_low,
            });
        }
    }
    Ok(DominationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{chernoff_right, left_tail_bound};

    fn config(samples: u64, seed: u64, workers: usize, t_grid: Vec<f64>) -> MCConfig {
        MCConfig {
            samples,
            seed,
            workers,
            t_grid,
        }
    }

    #[test]
    fn wilson_interval_behaves_at_the_boundary() {
        let (lo, hi) = wilson_interval(0, 1000, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(1000, 1000, Z_99);
        assert!(lo > 0.99 && hi == 1.0);
        let (lo, hi) = wilson_interval(500, 1000, Z_99);
        assert!(lo < 0.5 && hi > 0.5);
        // symmetric around 1/2
        assert!(((0.5 - lo) - (hi - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn wilson_matches_closed_form() {
        // p̂ = 0.2, n = 100, z = 1.96
        let (lo, hi) = wilson_interval(20, 100, 1.96);
        let z2 = 1.96f64 * 1.96;
        let c = (0.2 + z2 / 200.0) / (1.0 + z2 / 100.0);
        let h = 1.96 / (1.0 + z2 / 100.0) * (0.2 * 0.8 / 100.0 + z2 / 40_000.0f64).sqrt();
        assert!((lo - (c - h)).abs() < 1e-15 && (hi - (c + h)).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(config(0, 1, 1, vec![1.0]).validate().is_err());
        assert!(config(10, 1, 0, vec![1.0]).validate().is_err());
        assert!(config(10, 1, 1, vec![]).validate().is_err());
        assert!(config(10, 1, 1, vec![2.0, 1.0]).validate().is_err());
        assert!(config(10, 1, 1, vec![-1.0]).validate().is_err());
        assert!(config(10, 1, 1, vec![0.0, 0.0, 1.0]).validate().is_ok());
    }

    #[test]
    fn two_point_right_tail() {
        let pr = Params::new(2, 0.5).unwrap();
        let m = pr.moments();
        let r = estimate_tails(&pr, &m, &config(100_000, 5, 2, vec![1.0])).unwrap();
        assert!((r.right[0].p_hat - 0.5).abs() < 0.01);
        assert!((r.left[0].p_hat - 0.5).abs() < 0.01);
        assert_eq!(r.right[0].successes + r.left[0].successes, 100_000);
    }

    #[test]
    fn deterministic_and_worker_invariant() {
        let pr = Params::new(200, 0.01).unwrap();
        let m = pr.moments();
        let grid = vec![0.0, 0.5, 1.0, 2.0, 3.0];
        let a = estimate_tails(&pr, &m, &config(60_000, 17, 1, grid.clone())).unwrap();
        let b = estimate_tails(&pr, &m, &config(60_000, 17, 1, grid.clone())).unwrap();
        let c = estimate_tails(&pr, &m, &config(60_000, 17, 4, grid)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn counts_are_monotone_and_vanish_past_n_over_sigma() {
        let pr = Params::new(50, 0.05).unwrap();
        let m = pr.moments();
        let beyond = 50.0 / m.sigma + 0.1;
        let r = estimate_tails(&pr, &m, &config(20_000, 3, 2, vec![0.0, 0.5, 1.0, 2.0, beyond])).unwrap();
        for side in [&r.right, &r.left] {
            for w in side.windows(2) {
                assert!(w[1].successes <= w[0].successes);
            }
            for e in side.iter() {
                assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
                assert!(e.successes <= e.trials);
            }
        }
        assert_eq!(r.right.last().unwrap().successes, 0);
    }

    #[test]
    fn domination_on_degenerate_grid() {
        let pr = Params::new(30, 0.05).unwrap();
        let m = pr.moments();
        let r = estimate_tails(&pr, &m, &config(1000, 1, 1, vec![0.0])).unwrap();
        let bounds = vec![chernoff_right(&pr, &m, 0.0), left_tail_bound(&m, 0.0)];
        let estimates: Vec<_> = r.right.iter().chain(&r.left).copied().collect();
        let report = domination_report(&estimates, &bounds).unwrap();
        assert!(report.passed());
        assert_eq!(report.rows.len(), 2);
    }

    #[test]
    fn mismatched_grid_is_an_error() {
        let pr = Params::new(30, 0.05).unwrap();
        let m = pr.moments();
        let est = vec![TailEstimate::exact(1.0, 0.1, Side::Right)];
        let bounds = vec![chernoff_right(&pr, &m, 2.0)];
        assert!(matches!(domination_report(&est, &bounds), Err(Error::GridMismatch(_))));
        let bounds = vec![chernoff_right(&pr, &m, 1.0), chernoff_right(&pr, &m, 2.0)];
        assert!(domination_report(&est, &bounds).is_err());
    }

    #[test]
    fn failing_bound_is_reported() {
        let est = vec![TailEstimate::exact(1.0, 0.5, Side::Right)];
        let pt = BoundPoint::new(1.0, (0.1f64).ln(), None, Method::Chernoff);
        let report = domination_report(&est, &[pt]).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
    }
}
