//! Brute-force references shared by the integration tests. Nothing here
//! calls into the library's enumeration or moment code.

#![allow(dead_code)]

/// `P(Y = k)` for `k = 0..=n`, summing over every labelled graph.
pub fn brute_force_pmf(n: usize, p: f64) -> Vec<f64> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut probs = vec![0.0; n + 1];
    let mut degree = vec![0u32; n];
    for mask in 0u64..1 << pairs.len() {
        degree.iter_mut().for_each(|d| *d = 0);
        let mut weight = 1.0;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                degree[u] += 1;
                degree[v] += 1;
                weight *= p;
            } else {
                weight *= 1.0 - p;
            }
        }
        probs[degree.iter().filter(|&&d| d == 0).count()] += weight;
    }
    probs
}

pub fn mean_var(probs: &[f64]) -> (f64, f64) {
    let mean: f64 = probs.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
    let var = probs.iter().enumerate().map(|(k, q)| (k as f64 - mean).powi(2) * q).sum();
    (mean, var)
}

pub const P_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

pub fn grid(max_n: usize) -> impl Iterator<Item = (usize, f64)> {
    (2..=max_n).flat_map(|n| P_GRID.iter().map(move |&p| (n, p)))
}

/// `1 - Φ(x)` by composite Simpson on the normal density over `[x, x + 40]`.
pub fn normal_sf_by_quadrature(x: f64) -> f64 {
    let panels = 2_000_000;
    let h = 40.0 / panels as f64;
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(x) + phi(x + 40.0);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * phi(x + i as f64 * h);
    }
    s * h / 3.0
}
