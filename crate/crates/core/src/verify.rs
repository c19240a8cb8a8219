//! Self-check suite behind `isovert verify`.
//!
//! Each check recomputes a property from independent routes (enumeration,
//! quadrature, grid search, simulation) and reports PASS/FAIL. The quick
//! level trims grids and sample counts so the suite runs in seconds.

use crate::bounds::{
    chernoff_right, corollary_k, gamma_log, gamma_log_via_degree_mgf, h_closed, h_quadrature,
    left_tail_bound, log_negative_theta_mgf_bound, normal_sf, piecewise_right, raic_bound,
    BoundPoint, Side,
};
use crate::coupling::{coupling_diagnostics, DiagnosticsOptions};
use crate::enumerate::{enumerate_coupling_pmf, enumerate_pmf, for_each_graph};
use crate::error::Result;
use crate::model::Params;
use crate::montecarlo::{domination_report, estimate_tails, exact_tails, MCConfig};
use crate::pmf::size_bias_transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Self { name, pass, detail }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} ({})", self.name, self.detail)
    }
}

const P_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn small_grid(max_n: usize) -> impl Iterator<Item = Params> {
    (2..=max_n).flat_map(|n| P_GRID.iter().map(move |&p| Params::new(n, p).expect("grid is valid")))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn run(level: Level, seed: u64, workers: usize) -> Result<Vec<Check>> {
    let max_n = if level == Level::Quick { 5 } else { 6 };
    let samples = if level == Level::Quick { 100_000 } else { 1_000_000 };
    Ok(vec![
        moments_match_enumeration(max_n)?,
        coupling_marginal_is_size_biased(max_n.min(5))?,
        per_graph_coupling_identities(max_n)?,
        mgf_domination(max_n)?,
        exact_tail_domination(max_n)?,
        statistical_tail_domination(samples, seed, workers)?,
        gamma_and_h_cross_checks()?,
        chernoff_matches_grid_search(level),
        coupling_identities(samples, seed, workers)?,
        corollary_constant(samples, seed, workers)?,
        comparator_exceeds_one(),
    ])
}

fn moments_match_enumeration(max_n: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for pr in small_grid(max_n) {
        let pmf = enumerate_pmf(&pr, max_n)?;
        let m = pr.moments();
        worst = worst.max(rel_err(pmf.mean(), m.mu)).max(rel_err(pmf.variance(), m.sigma2));
    }
    Ok(Check::new(
        "moments vs enumeration",
        worst <= 1e-10,
        format!("max relative error {worst:.2e}"),
    ))
}

fn coupling_marginal_is_size_biased(max_n: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for pr in small_grid(max_n) {
        let q = size_bias_transform(&enumerate_pmf(&pr, max_n)?)?;
        let ys = enumerate_coupling_pmf(&pr, max_n)?.ys_marginal();
        for k in 0..=pr.n() {
            worst = worst.max((q.prob(k) - ys.prob(k)).abs());
        }
    }
    Ok(Check::new(
        "coupling marginal equals size-biased law",
        worst <= 1e-10,
        format!("max atom difference {worst:.2e}"),
    ))
}

fn per_graph_coupling_identities(max_n: usize) -> Result<Check> {
    let mut failures = 0u64;
    for pr in small_grid(max_n) {
        for_each_graph(&pr, max_n, |g, _| {
            let n = g.n();
            let sum_d1: u32 = (0..n).map(|v| g.d1(v)).sum();
            let total_inc: u32 = (0..n).map(|v| g.coupling_increment(v)).sum();
            let bounded = (0..n).all(|v| g.coupling_increment(v) <= g.degree(v) + 1);
            if sum_d1 as usize != g.degree_one_count() || total_inc as usize > 2 * n || !bounded {
                failures += 1;
            }
        })?;
    }
    Ok(Check::new(
        "per-graph coupling identities",
        failures == 0,
        format!("{failures} graphs fail"),
    ))
}

fn mgf_domination(max_n: usize) -> Result<Check> {
    let mut violations = 0;
    for pr in small_grid(max_n) {
        let m = pr.moments();
        let pmf = enumerate_pmf(&pr, max_n)?;
        for i in 1..=50 {
            let theta = 5.0 * m.sigma * i as f64 / 50.0;
            if pmf.log_mgf_standardized(&m, theta) > h_closed(&pr, &m, theta) {
                violations += 1;
            }
            let neg = -5.0 * i as f64 / 50.0;
            if pmf.log_mgf_standardized(&m, neg) > log_negative_theta_mgf_bound(&m, neg)? {
                violations += 1;
            }
        }
    }
    Ok(Check::new(
        "exact MGF below both majorants",
        violations == 0,
        format!("{violations} violations"),
    ))
}

fn exact_tail_domination(max_n: usize) -> Result<Check> {
    let grid: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();
    let mut violations = 0;
    for pr in small_grid(max_n) {
        let m = pr.moments();
        let pmf = enumerate_pmf(&pr, max_n)?;
        let mut estimates = exact_tails(&pmf, &m, &grid, Side::Right);
        estimates.extend(exact_tails(&pmf, &m, &grid, Side::Left));
        let mut bounds: Vec<BoundPoint> = grid.iter().map(|&t| chernoff_right(&pr, &m, t)).collect();
        bounds.extend(grid.iter().map(|&t| left_tail_bound(&m, t)));
        let mut report = domination_report(&estimates, &bounds)?;
        for theta0 in [0.5 * m.sigma, m.sigma, 2.0 * m.sigma] {
            let pw = grid
                .iter()
                .map(|&t| piecewise_right(&pr, &m, t, theta0))
                .collect::<Result<Vec<_>>>()?;
            report.rows.extend(domination_report(&estimates, &pw)?.rows);
        }
        violations += report.failures().count();
    }
    Ok(Check::new(
        "analytic bounds dominate exact tails",
        violations == 0,
        format!("{violations} violations"),
    ))
}

fn statistical_tail_domination(samples: u64, seed: u64, workers: usize) -> Result<Check> {
    let grid = vec![0.5, 1.0, 1.5, 2.0, 3.0];
    let mut failures = 0;
    let mut mean_ok = true;
    for (n, p) in [(1000, 0.001), (300, 0.01)] {
        let pr = Params::new(n, p)?;
        let m = pr.moments();
        let config = MCConfig {
            samples,
            seed,
            workers,
            t_grid: grid.clone(),
        };
        let tails = estimate_tails(&pr, &m, &config)?;
        mean_ok &= tails.mean_within(4.0);
        let estimates: Vec<_> = tails.right.iter().chain(&tails.left).copied().collect();
        let mut bounds = Vec::new();
        for &t in &grid {
            bounds.push(chernoff_right(&pr, &m, t));
            bounds.push(piecewise_right(&pr, &m, t, m.sigma)?);
            bounds.push(left_tail_bound(&m, t));
            bounds.push(raic_bound(&pr, &m, t).0);
        }
        failures += domination_report(&estimates, &bounds)?.failures().count();
    }
    Ok(Check::new(
        "analytic bounds dominate simulated tails",
        failures == 0 && mean_ok,
        format!("{failures} failures, mean within 4 SE: {mean_ok}"),
    ))
}

fn gamma_and_h_cross_checks() -> Result<Check> {
    let mut gamma_worst: f64 = 0.0;
    let mut h_worst: f64 = 0.0;
    for &(n, p) in &[(2, 0.5), (5, 0.25), (30, 0.1), (300, 0.01), (1000, 0.001)] {
        let pr = Params::new(n, p)?;
        let m = pr.moments();
        for i in 0..=20 {
            let s = 0.25 * i as f64;
            gamma_worst = gamma_worst.max((gamma_log(&pr, s) - gamma_log_via_degree_mgf(&pr, s)).exp_m1().abs());
        }
        for i in 1..=10 {
            let theta = 0.5 * i as f64 * m.sigma;
            h_worst = h_worst.max(rel_err(h_closed(&pr, &m, theta), h_quadrature(&pr, &m, theta)?));
        }
    }
    let sf_err = (normal_sf(1.0) - 0.158_655_25).abs();
    Ok(Check::new(
        "gamma forms, H closed form vs quadrature, normal tail",
        gamma_worst <= 1e-12 && h_worst <= 1e-8 && sf_err <= 1e-8,
        format!("gamma {gamma_worst:.1e}, H {h_worst:.1e}, sf(1) {sf_err:.1e}"),
    ))
}

fn chernoff_matches_grid_search(level: Level) -> Check {
    let cases: &[(usize, f64, f64)] = match level {
        Level::Quick => &[(3, 0.5, 1.0), (50, 0.04, 1.5)],
        Level::Full => &[(3, 0.5, 1.0), (50, 0.04, 1.5), (1000, 0.001, 2.0), (10, 0.3, 0.5)],
    };
    let mut worst: f64 = 0.0;
    for &(n, p, t) in cases {
        let pr = Params::new(n, p).expect("valid case");
        let m = pr.moments();
        let got = chernoff_right(&pr, &m, t).log_bound.exp();
        let steps = (50.0 * m.sigma / 1e-4) as usize;
        let best = (0..=steps)
            .map(|i| -(i as f64 * 1e-4) * t + h_closed(&pr, &m, i as f64 * 1e-4))
            .fold(f64::INFINITY, f64::min)
            .exp();
        worst = worst.max(rel_err(got, best));
    }
    Check::new(
        "Chernoff minimizer vs grid search",
        worst <= 1e-6,
        format!("max relative error {worst:.2e}"),
    )
}

fn coupling_identities(samples: u64, seed: u64, workers: usize) -> Result<Check> {
    let pr = Params::new(1000, 0.001)?;
    let report = coupling_diagnostics(
        &pr,
        samples,
        seed,
        DiagnosticsOptions {
            workers,
            full_adjacency: false,
        },
    )?;
    let diag = coupling_diagnostics(
        &Params::new(100, 0.01)?,
        (samples / 10).max(1),
        seed,
        DiagnosticsOptions {
            workers,
            full_adjacency: true,
        },
    )?;
    Ok(Check::new(
        "coupling invariants and size-bias identities",
        report.passed() && diag.passed(),
        format!(
            "violations {}, mean increment {:.4} (se {:.1e}), degree-one mismatches {}",
            report.violations.total(),
            report.increment.mean,
            report.increment.se,
            diag.degree_one.map_or(0, |d| d.mismatches)
        ),
    ))
}

fn corollary_constant(samples: u64, seed: u64, workers: usize) -> Result<Check> {
    let r = corollary_k(1.0, &[10, 100, 1000, 10_000])?;
    let pr = Params::new(1000, 0.001)?;
    let config = MCConfig {
        samples,
        seed,
        workers,
        t_grid: vec![0.5, 1.0, 2.0],
    };
    let tails = estimate_tails(&pr, &pr.moments(), &config)?;
    let dominated = tails.right.iter().all(|e| r.log_bound(e.t).exp() >= e.ci_low);
    Ok(Check::new(
        "corollary constant",
        r.k > 0.0 && dominated,
        format!("k = {:.6e}, a0 = {:.4}", r.k, r.a0),
    ))
}

fn comparator_exceeds_one() -> Check {
    let pr = Params::new(1000, 0.001).expect("valid");
    let m = pr.moments();
    let mut witness = None;
    let mut below_normal = false;
    for i in 1..=10 {
        let t = 0.5 * i as f64;
        let (r, _) = raic_bound(&pr, &m, t);
        below_normal |= r.log_bound < normal_sf(t).ln();
        if witness.is_none() && r.clipped() && !chernoff_right(&pr, &m, t).clipped() {
            witness = Some(t);
        }
    }
    Check::new(
        "comparator exceeds one where Chernoff does not",
        witness.is_some() && !below_normal,
        format!("first witness t = {witness:?}"),
    )
}
