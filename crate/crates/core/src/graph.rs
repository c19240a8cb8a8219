//! Sampling sufficient statistics of one G(n,p) draw.
//!
//! Only vertex degrees are kept for the whole graph. The adjacency of a
//! single tracked vertex is retained so that `d₁(V)`, the number of its
//! neighbours of degree one, can be read off once all degrees are known.

use rand::Rng;
use serde::Serialize;

use crate::model::Params;

/// Largest `n` for which [`GraphSampler::sample_full`] keeps adjacency lists.
pub const FULL_ADJACENCY_MAX_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    /// `Y`, the number of isolated vertices.
    pub isolated_count: usize,
    pub degree_one_count: usize,
    /// `d(V)` of the tracked vertex.
    pub tracked_degree: usize,
    /// `d₁(V)`: neighbours of the tracked vertex with degree one.
    pub tracked_deg1_neighbors: usize,
    pub tracked_vertex: usize,
}

/// Statistics plus the full-graph sum `Σ_v d₁(v)`, from the diagnostics path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FullGraphStats {
    pub stats: DegreeStats,
    pub sum_d1: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingPath {
    /// One Bernoulli trial per vertex pair.
    Dense,
    /// Geometric skips between present edges.
    Sparse,
}

impl SamplingPath {
    pub fn for_params(params: &Params) -> Self {
        if params.p() >= 0.25 || params.n() <= 64 {
            SamplingPath::Dense
        } else {
            SamplingPath::Sparse
        }
    }
}

/// Reusable buffers for repeated draws at fixed parameters.
#[derive(Debug, Clone)]
pub struct GraphSampler {
    params: Params,
    path: SamplingPath,
    ln_q: f64,
    degrees: Vec<u32>,
    touched: Vec<u32>,
    tracked_neighbors: Vec<u32>,
}

impl GraphSampler {
    pub fn new(params: Params) -> Self {
        Self::with_path(params, SamplingPath::for_params(&params))
    }

    pub fn with_path(params: Params, path: SamplingPath) -> Self {
        Self {
            params,
            path,
            ln_q: (-params.p()).ln_1p(),
            degrees: vec![0; params.n()],
            touched: Vec::new(),
            tracked_neighbors: Vec::new(),
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn path(&self) -> SamplingPath {
        self.path
    }

    /// Calls `edge(u, v)` for every present edge of one draw.
    fn for_each_edge<R: Rng + ?Sized, F: FnMut(usize, usize)>(&self, rng: &mut R, mut edge: F) {
        let n = self.params.n();
        let p = self.params.p();
        match self.path {
            SamplingPath::Dense => {
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.random::<f64>() < p {
                            edge(u, v);
                        }
                    }
                }
            }
            SamplingPath::Sparse => {
                // Walk the pairs (v, w), w < v, in row order, skipping a
                // Geometric(p) number of absent pairs between present ones.
                let max_skip = self.params.pairs() as f64;
                let mut v: usize = 1;
                let mut w: i64 = -1;
                while v < n {
                    let r: f64 = rng.random();
                    let skip = ((-r).ln_1p() / self.ln_q).floor().min(max_skip);
                    w += 1 + skip as i64;
                    while w >= v as i64 && v < n {
                        w -= v as i64;
                        v += 1;
                    }
                    if v < n {
                        edge(w as usize, v);
                    }
                }
            }
        }
    }

    fn reset(&mut self) {
        for &u in &self.touched {
            self.degrees[u as usize] = 0;
        }
        self.touched.clear();
        self.tracked_neighbors.clear();
    }

    fn fill(&mut self, rng: &mut (impl Rng + ?Sized), tracked: Option<usize>) {
        self.reset();
        let mut degrees = std::mem::take(&mut self.degrees);
        let mut touched = std::mem::take(&mut self.touched);
        let mut neighbors = std::mem::take(&mut self.tracked_neighbors);
        self.for_each_edge(rng, |u, v| {
            for x in [u, v] {
                if degrees[x] == 0 {
                    touched.push(x as u32);
                }
                degrees[x] += 1;
            }
            if let Some(t) = tracked {
                if u == t {
                    neighbors.push(v as u32);
                } else if v == t {
                    neighbors.push(u as u32);
                }
            }
        });
        self.degrees = degrees;
        self.touched = touched;
        self.tracked_neighbors = neighbors;
    }

    fn isolated_count(&self) -> usize {
        self.params.n() - self.touched.len()
    }

    /// Isolated-vertex count of one draw.
    pub fn sample_y(&mut self, rng: &mut (impl Rng + ?Sized)) -> usize {
        self.fill(rng, None);
        self.isolated_count()
    }

    /// Degree statistics of one draw with `tracked_vertex` as `V`.
    pub fn sample_stats(&mut self, rng: &mut (impl Rng + ?Sized), tracked_vertex: usize) -> DegreeStats {
        assert!(
            tracked_vertex < self.params.n(),
            "tracked vertex {tracked_vertex} out of range for n = {}",
            self.params.n()
        );
        self.fill(rng, Some(tracked_vertex));
        let degree_one_count = self
            .touched
            .iter()
            .filter(|&&u| self.degrees[u as usize] == 1)
            .count();
        let tracked_deg1_neighbors = self
            .tracked_neighbors
            .iter()
            .filter(|&&w| self.degrees[w as usize] == 1)
            .count();
        DegreeStats {
            isolated_count: self.isolated_count(),
            degree_one_count,
            tracked_degree: self.degrees[tracked_vertex] as usize,
            tracked_deg1_neighbors,
            tracked_vertex,
        }
    }

    /// Like [`sample_stats`](Self::sample_stats), but keeps the whole
    /// adjacency so that `Σ_v d₁(v)` can be compared with the degree-one
    /// count. Limited to `n ≤ FULL_ADJACENCY_MAX_N`.
    pub fn sample_full(&mut self, rng: &mut (impl Rng + ?Sized), tracked_vertex: usize) -> FullGraphStats {
        let n = self.params.n();
        assert!(
            n <= FULL_ADJACENCY_MAX_N,
            "full adjacency is limited to n ≤ {FULL_ADJACENCY_MAX_N}"
        );
        assert!(tracked_vertex < n);
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        self.for_each_edge(rng, |u, v| {
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        });
        let degree = |u: usize| adjacency[u].len();
        let d1 = |u: usize| adjacency[u].iter().filter(|&&w| degree(w as usize) == 1).count();
        let stats = DegreeStats {
            isolated_count: (0..n).filter(|&u| degree(u) == 0).count(),
            degree_one_count: (0..n).filter(|&u| degree(u) == 1).count(),
            tracked_degree: degree(tracked_vertex),
            tracked_deg1_neighbors: d1(tracked_vertex),
            tracked_vertex,
        };
        FullGraphStats {
            stats,
            sum_d1: (0..n).map(d1).sum(),
        }
    }
}

pub fn sample_graph_stats(params: &Params, rng: &mut (impl Rng + ?Sized), tracked_vertex: usize) -> DegreeStats {
    GraphSampler::new(*params).sample_stats(rng, tracked_vertex)
}

pub fn sample_y(params: &Params, rng: &mut (impl Rng + ?Sized)) -> usize {
    GraphSampler::new(*params).sample_y(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn params(n: usize, p: f64) -> Params {
        Params::new(n, p).unwrap()
    }

    #[test]
    fn path_selection() {
        assert_eq!(SamplingPath::for_params(&params(64, 0.01)), SamplingPath::Dense);
        assert_eq!(SamplingPath::for_params(&params(1000, 0.3)), SamplingPath::Dense);
        assert_eq!(SamplingPath::for_params(&params(1000, 0.001)), SamplingPath::Sparse);
    }

    #[test]
    fn same_seed_same_stats() {
        for &(n, p) in &[(10, 0.3), (500, 0.004)] {
            let a = sample_graph_stats(&params(n, p), &mut stream(42, 3), 1);
            let b = sample_graph_stats(&params(n, p), &mut stream(42, 3), 1);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn near_one_edge_probability_leaves_nothing_isolated() {
        let mut rng = stream(1, 0);
        let mut sampler = GraphSampler::new(params(2, 1.0 - 1e-12));
        for _ in 0..1000 {
            assert_eq!(sampler.sample_y(&mut rng), 0);
        }
    }

    #[test]
    fn y_is_never_n_minus_one_and_stats_are_consistent() {
        let mut rng = stream(5, 0);
        for path in [SamplingPath::Dense, SamplingPath::Sparse] {
            for &(n, p) in &[(3, 0.5), (6, 0.2), (200, 0.01)] {
                let mut s = GraphSampler::with_path(params(n, p), path);
                for i in 0..2000 {
                    let st = s.sample_stats(&mut rng, i % n);
                    assert_ne!(st.isolated_count, n - 1);
                    assert!(st.isolated_count <= n);
                    assert!(st.tracked_deg1_neighbors <= st.tracked_degree);
                    assert!(st.tracked_degree < n);
                }
            }
        }
    }

    #[test]
    fn buffers_are_reset_between_draws() {
        let mut s = GraphSampler::with_path(params(300, 0.01), SamplingPath::Sparse);
        let mut rng = stream(9, 0);
        let reused: Vec<DegreeStats> = (0..50).map(|_| s.sample_stats(&mut rng, 0)).collect();
        let mut rng = stream(9, 0);
        let fresh: Vec<DegreeStats> = (0..50)
            .map(|_| GraphSampler::with_path(params(300, 0.01), SamplingPath::Sparse).sample_stats(&mut rng, 0))
            .collect();
        assert_eq!(reused, fresh);
    }

    #[test]
    fn full_adjacency_path_satisfies_degree_one_identity() {
        let mut rng = stream(11, 0);
        for path in [SamplingPath::Dense, SamplingPath::Sparse] {
            let mut s = GraphSampler::with_path(params(100, 0.02), path);
            for _ in 0..500 {
                let f = s.sample_full(&mut rng, 7);
                assert_eq!(f.sum_d1, f.stats.degree_one_count);
            }
        }
    }

    #[test]
    fn sparse_and_dense_paths_agree_in_mean() {
        // Both paths sample G(n,p): mean edge count is p·n(n-1)/2 for each.
        let pr = params(120, 0.02);
        let draws = 20_000;
        let mu = pr.moments().mu;
        let var = pr.moments().sigma2;
        for path in [SamplingPath::Dense, SamplingPath::Sparse] {
            let mut s = GraphSampler::with_path(pr, path);
            let mut rng = stream(13, 0);
            let mean = (0..draws).map(|_| s.sample_y(&mut rng) as f64).sum::<f64>() / draws as f64;
            let se = (var / draws as f64).sqrt();
            assert!((mean - mu).abs() < 4.0 * se, "{path:?}: {mean} vs {mu}");
        }
    }

    #[test]
    fn empirical_two_vertex_law() {
        let mut s = GraphSampler::new(params(2, 0.5));
        let mut rng = stream(17, 0);
        let draws = 100_000;
        let zeros = (0..draws).filter(|_| s.sample_y(&mut rng) == 0).count();
        let se = (0.25 / draws as f64).sqrt();
        assert!((zeros as f64 / draws as f64 - 0.5).abs() < 4.0 * se);
    }
}
