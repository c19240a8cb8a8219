//! The vertex-deletion size-bias coupling.
//!
//! A vertex `V` is chosen uniformly and independently of the graph. If `V`
//! is isolated the graph is left alone; otherwise every edge at `V` is
//! deleted. Counting isolated vertices before and after gives `(Y, Y^s)`,
//! with `Y^s` distributed as the size-biased `Y`. The modified graph is
//! never built: the increment is `d₁(V) + 1(d(V) ≠ 0)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::enumerate::enumerate_coupling_pmf;
use crate::error::{Error, Result};
use crate::graph::{GraphSampler, FULL_ADJACENCY_MAX_N};
use crate::model::{Moments, Params};
use crate::rng::{par_blocks, stream};

/// Standard-error multiplier for the stochastic identity checks.
pub const SE_BAND: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CouplingSample {
    pub y: usize,
    pub ys: usize,
    pub dv: usize,
    pub d1v: usize,
    pub v_isolated: bool,
}

/// Which of the coupling invariants a sample breaks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ViolationCounts {
    /// `ys ≥ y`
    pub monotone: u64,
    /// `ys - y ≤ dv + 1`
    pub increment_bound: u64,
    /// `v_isolated ⇒ ys = y`
    pub isolated_branch: u64,
    /// `¬v_isolated ⇒ ys = y + d1v + 1`
    pub deletion_branch: u64,
}

impl ViolationCounts {
    pub fn total(&self) -> u64 {
        self.monotone + self.increment_bound + self.isolated_branch + self.deletion_branch
    }

    fn merge(&mut self, other: &Self) {
        self.monotone += other.monotone;
        self.increment_bound += other.increment_bound;
        self.isolated_branch += other.isolated_branch;
        self.deletion_branch += other.deletion_branch;
    }
}

impl CouplingSample {
    pub fn increment(&self) -> i64 {
        self.ys as i64 - self.y as i64
    }

    pub fn violations(&self) -> ViolationCounts {
        let inc = self.increment();
        ViolationCounts {
            monotone: u64::from(inc < 0),
            increment_bound: u64::from(inc > self.dv as i64 + 1),
            isolated_branch: u64::from(self.v_isolated && inc != 0),
            deletion_branch: u64::from(!self.v_isolated && inc != self.d1v as i64 + 1),
        }
    }
}

/// Draws coupled pairs at fixed parameters, reusing sampler buffers.
#[derive(Debug, Clone)]
pub struct Coupler {
    sampler: GraphSampler,
}

impl Coupler {
    pub fn new(params: Params) -> Self {
        Self {
            sampler: GraphSampler::new(params),
        }
    }

    pub fn from_sampler(sampler: GraphSampler) -> Self {
        Self { sampler }
    }

    pub fn couple(&mut self, rng: &mut (impl Rng + ?Sized)) -> CouplingSample {
        // V first, independent of the graph, so only its adjacency is kept.
        let v = rng.random_range(0..self.sampler.params().n());
        let stats = self.sampler.sample_stats(rng, v);
        from_stats(
            stats.isolated_count,
            stats.tracked_degree,
            stats.tracked_deg1_neighbors,
        )
    }

    /// A coupled draw plus the per-graph check `Σ_v d₁(v) = #{degree one}`.
    pub fn couple_full(&mut self, rng: &mut (impl Rng + ?Sized)) -> (CouplingSample, bool) {
        let v = rng.random_range(0..self.sampler.params().n());
        let full = self.sampler.sample_full(rng, v);
        let s = full.stats;
        (
            from_stats(s.isolated_count, s.tracked_degree, s.tracked_deg1_neighbors),
            full.sum_d1 == s.degree_one_count,
        )
    }
}

fn from_stats(y: usize, dv: usize, d1v: usize) -> CouplingSample {
    let v_isolated = dv == 0;
    let ys = if v_isolated { y } else { y + d1v + 1 };
    CouplingSample {
        y,
        ys,
        dv,
        d1v,
        v_isolated,
    }
}

pub fn couple(params: &Params, rng: &mut (impl Rng + ?Sized)) -> CouplingSample {
    Coupler::new(*params).couple(rng)
}

/// Test functions for the identity `E[Y f(Y)] = μ E[f(Y^s)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    One,
    Identity,
    Square,
    /// `e^{(y-μ)/σ}`; the shift by `μ/σ` rescales both sides equally.
    ExpStandardized,
    /// `1(y ≥ μ)`
    UpperIndicator,
}

impl TestFunction {
    pub const ALL: [TestFunction; 5] = [
        TestFunction::One,
        TestFunction::Identity,
        TestFunction::Square,
        TestFunction::ExpStandardized,
        TestFunction::UpperIndicator,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::One => "1",
            TestFunction::Identity => "y",
            TestFunction::Square => "y^2",
            TestFunction::ExpStandardized => "exp((y-mu)/sigma)",
            TestFunction::UpperIndicator => "1(y>=mu)",
        }
    }

    pub fn eval(&self, y: usize, moments: &Moments) -> f64 {
        let y = y as f64;
        match self {
            TestFunction::One => 1.0,
            TestFunction::Identity => y,
            TestFunction::Square => y * y,
            TestFunction::ExpStandardized => ((y - moments.mu) / moments.sigma).exp(),
            TestFunction::UpperIndicator => f64::from(u8::from(y >= moments.mu)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moment2 {
    sum: f64,
    sum_sq: f64,
}

impl Moment2 {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Self) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    /// Mean and standard error of the mean over `n` draws.
    fn mean_se(&self, n: u64) -> (f64, f64) {
        let nf = n as f64;
        let mean = self.sum / nf;
        if n < 2 {
            return (mean, f64::INFINITY);
        }
        let var = ((self.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (mean, (var / nf).sqrt())
    }
}

#[derive(Debug, Clone, Default)]
struct Partial {
    draws: u64,
    violations: ViolationCounts,
    lhs: [Moment2; 5],
    rhs: [Moment2; 5],
    diff: [Moment2; 5],
    increment: Moment2,
    identity_checked: u64,
    identity_mismatches: u64,
}

impl Partial {
    fn merge(&mut self, o: &Self) {
        self.draws += o.draws;
        self.violations.merge(&o.violations);
        for i in 0..5 {
            self.lhs[i].merge(&o.lhs[i]);
            self.rhs[i].merge(&o.rhs[i]);
            self.diff[i].merge(&o.diff[i]);
        }
        self.increment.merge(&o.increment);
        self.identity_checked += o.identity_checked;
        self.identity_mismatches += o.identity_mismatches;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub function: TestFunction,
    /// `E[Y f(Y)] / μ`
    pub lhs: f64,
    pub lhs_se: f64,
    /// `E[f(Y^s)]`
    pub rhs: f64,
    pub rhs_se: f64,
    /// Standard error of the paired difference, which sets the band.
    pub diff_se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementCheck {
    pub mean: f64,
    pub se: f64,
    /// `mean ≤ 2 + 4·se`
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeOneCheck {
    pub draws: u64,
    pub mismatches: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagnosticsOptions {
    pub workers: usize,
    /// Keep full adjacency and check `Σ_v d₁(v) = #{degree-one vertices}`.
    pub full_adjacency: bool,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            full_adjacency: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub params: Params,
    pub moments: Moments,
    pub samples: u64,
    pub seed: u64,
    pub violations: ViolationCounts,
    pub identities: Vec<IdentityCheck>,
    pub increment: IncrementCheck,
    pub degree_one: Option<DegreeOneCheck>,
}

impl CouplingReport {
    pub fn passed(&self) -> bool {
        self.violations.total() == 0
            && self.identities.iter().all(|c| c.pass)
            && self.increment.pass
            && self.degree_one.is_none_or(|d| d.mismatches == 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "coupling diagnostics n={} p={} samples={} seed={}\n",
            self.params.n(),
            self.params.p(),
            self.samples,
            self.seed
        ));
        let v = &self.violations;
        out.push_str(&format!(
            "violations monotone={} increment_bound={} isolated_branch={} deletion_branch={} {}\n",
            v.monotone,
            v.increment_bound,
            v.isolated_branch,
            v.deletion_branch,
            verdict(v.total() == 0)
        ));
        for c in &self.identities {
            out.push_str(&format!(
                "identity f={} E[Yf(Y)]/mu={} (se {}) E[f(Ys)]={} (se {}) diff_se={} {}\n",
                c.function.name(),
                c.lhs,
                c.lhs_se,
                c.rhs,
                c.rhs_se,
                c.diff_se,
                verdict(c.pass)
            ));
        }
        out.push_str(&format!(
            "increment mean={} se={} bound=2 {}\n",
            self.increment.mean,
            self.increment.se,
            verdict(self.increment.pass)
        ));
        if let Some(d) = self.degree_one {
            out.push_str(&format!(
                "degree_one_identity draws={} mismatches={} {}\n",
                d.draws,
                d.mismatches,
                verdict(d.mismatches == 0)
            ));
        }
        out.push_str(&format!("overall {}\n", verdict(self.passed())));
        out
    }
}

/// Batch validation of the coupling over `samples` draws.
pub fn coupling_diagnostics(
    params: &Params,
    samples: u64,
    seed: u64,
    options: DiagnosticsOptions,
) -> Result<CouplingReport> {
    if samples == 0 {
        return Err(Error::Config("samples must be ≥ 1".into()));
    }
    if options.full_adjacency && params.n() > FULL_ADJACENCY_MAX_N {
        return Err(Error::Config(format!(
            "full-adjacency diagnostics are limited to n ≤ {FULL_ADJACENCY_MAX_N}"
        )));
    }
    let moments = params.moments();
    let mu = moments.mu;

    let partials = par_blocks(samples, options.workers, |index, draws| {
        let mut rng = stream(seed, index);
        let mut coupler = Coupler::new(*params);
        let mut part = Partial::default();
        for _ in 0..draws {
            let sample = if options.full_adjacency {
                let (s, identity_holds) = coupler.couple_full(&mut rng);
                part.identity_checked += 1;
                part.identity_mismatches += u64::from(!identity_holds);
                s
            } else {
                coupler.couple(&mut rng)
            };
            part.draws += 1;
            part.violations.merge(&sample.violations());
            for (i, f) in TestFunction::ALL.iter().enumerate() {
                let lhs = sample.y as f64 * f.eval(sample.y, &moments) / mu;
                let rhs = f.eval(sample.ys, &moments);
                part.lhs[i].push(lhs);
                part.rhs[i].push(rhs);
                part.diff[i].push(lhs - rhs);
            }
            part.increment.push(sample.increment() as f64);
        }
        part
    });
    let mut total = Partial::default();
    for p in &partials {
        total.merge(p);
    }

    let n = total.draws;
    let identities = TestFunction::ALL
        .iter()
        .enumerate()
        .map(|(i, &function)| {
            let (lhs, lhs_se) = total.lhs[i].mean_se(n);
            let (rhs, rhs_se) = total.rhs[i].mean_se(n);
            let (diff, diff_se) = total.diff[i].mean_se(n);
            IdentityCheck {
                function,
                lhs,
                lhs_se,
                rhs,
                rhs_se,
                diff_se,
                pass: diff.abs() <= SE_BAND * diff_se,
            }
        })
        .collect();
    let (mean, se) = total.increment.mean_se(n);
    Ok(CouplingReport {
        params: *params,
        moments,
        samples,
        seed,
        violations: total.violations,
        identities,
        increment: IncrementCheck {
            mean,
            se,
            pass: mean <= 2.0 + SE_BAND * se,
        },
        degree_one: options.full_adjacency.then_some(DegreeOneCheck {
            draws: total.identity_checked,
            mismatches: total.identity_mismatches,
        }),
    })
}

/// Pearson goodness-of-fit of the sampled `(Y, Y^s)` against the
/// enumerated joint law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub df: usize,
    /// 0.999 quantile of χ²(df).
    pub critical: f64,
    pub bins: usize,
    /// Samples that landed on a pair the enumeration gives probability 0.
    pub off_support: u64,
    pub pass: bool,
}

/// Bins whose expected count falls below this are pooled.
const MIN_EXPECTED: f64 = 5.0;

pub fn coupling_chi_square(
    params: &Params,
    samples: u64,
    seed: u64,
    workers: usize,
    cap: usize,
) -> Result<ChiSquareReport> {
    if samples == 0 {
        return Err(Error::Config("samples must be ≥ 1".into()));
    }
    let exact = enumerate_coupling_pmf(params, cap)?.joint_y_ys();
    let partials = par_blocks(samples, workers, |index, draws| {
        let mut rng = stream(seed, index);
        let mut coupler = Coupler::new(*params);
        let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for _ in 0..draws {
            let s = coupler.couple(&mut rng);
            *counts.entry((s.y, s.ys)).or_default() += 1;
        }
        counts
    });
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for part in partials {
        for (k, c) in part {
            *counts.entry(k).or_default() += c;
        }
    }
    let off_support: u64 = counts
        .iter()
        .filter(|(k, _)| !exact.contains_key(k))
        .map(|(_, &c)| c)
        .sum();

    let total = samples as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (k, &prob) in &exact {
        let expected = prob * total;
        let observed = counts.get(k).copied().unwrap_or(0) as f64;
        if expected < MIN_EXPECTED {
            pooled_obs += observed;
            pooled_exp += expected;
        } else {
            cells.push((observed, expected));
        }
    }
    if pooled_exp > 0.0 {
        cells.push((pooled_obs, pooled_exp));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = cells.len().saturating_sub(1).max(1);
    let critical = ChiSquared::new(df as f64)
        .map_err(|e| Error::Config(e.to_string()))?
        .inverse_cdf(0.999);
    Ok(ChiSquareReport {
        statistic,
        df,
        critical,
        bins: cells.len(),
        off_support,
        pass: off_support == 0 && statistic <= critical,
    })
}
