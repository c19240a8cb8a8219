//! Exhaustive enumeration of all graphs on a small vertex set.
//!
//! Every edge configuration of the `m = n(n-1)/2` vertex pairs is visited as
//! a bitmask and weighted by `p^e (1-p)^{m-e}`. This gives the exact law of
//! the isolated-vertex count and of the size-bias coupling, which the
//! analytic and Monte Carlo layers are checked against.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Params;
use crate::numeric::CompensatedSum;
use crate::pmf::ExactPmf;

/// Default cap for [`enumerate_pmf`]: `n = 7` is `2^21` graphs.
pub const DEFAULT_PMF_CAP: usize = 7;
/// Default cap for [`enumerate_coupling_pmf`], which also ranges over `V`.
pub const DEFAULT_COUPLING_CAP: usize = 6;
/// Hard ceiling on the cap: adjacency rows are `u64` bitmasks and the edge
/// mask must fit in a `u64` shift.
const MAX_ENUMERABLE_N: usize = 11;

/// One enumerated graph, handed to [`for_each_graph`] visitors.
pub struct GraphView<'a> {
    adjacency: &'a [u64],
    degrees: &'a [u32],
    edges: u32,
}

impl GraphView<'_> {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn edges(&self) -> u32 {
        self.edges
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u32] {
        self.degrees
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u] >> v & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.adjacency[v];
        (0..self.n()).filter(move |&w| row >> w & 1 == 1)
    }

    pub fn isolated_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 0).count()
    }

    pub fn degree_one_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 1).count()
    }

    /// Number of neighbours of `v` that have degree exactly one.
    pub fn d1(&self, v: usize) -> u32 {
        self.neighbors(v).filter(|&w| self.degrees[w] == 1).count() as u32
    }

    /// `Y^s - Y` when `v` is the chosen vertex: `d₁(v) + 1(d(v) ≠ 0)`.
    pub fn coupling_increment(&self, v: usize) -> u32 {
        self.d1(v) + u32::from(self.degrees[v] != 0)
    }
}

fn check_cap(params: &Params, cap: usize) -> Result<()> {
    let n = params.n();
    if n > cap || n > MAX_ENUMERABLE_N {
        return Err(Error::EnumerationCap {
            n,
            cap: cap.min(MAX_ENUMERABLE_N),
        });
    }
    Ok(())
}

/// Calls `visit` once for each of the `2^{n(n-1)/2}` graphs on `n` vertices
/// with that graph's probability under G(n,p).
pub fn for_each_graph<F>(params: &Params, cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&GraphView<'_>, f64),
{
    check_cap(params, cap)?;
    let n = params.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let m = pairs.len();

    // Weight depends on the mask only through its edge count.
    let ln_p = params.p().ln();
    let ln_q = (-params.p()).ln_1p();
    let weights: Vec<f64> = (0..=m)
        .map(|e| (e as f64 * ln_p + (m - e) as f64 * ln_q).exp())
        .collect();

    let mut adjacency = vec![0u64; n];
    let mut degrees = vec![0u32; n];
    for mask in 0u64..(1u64 << m) {
        adjacency.iter_mut().for_each(|r| *r = 0);
        degrees.iter_mut().for_each(|d| *d = 0);
        for (bit, &(u, v)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                adjacency[u] |= 1 << v;
                adjacency[v] |= 1 << u;
                degrees[u] += 1;
                degrees[v] += 1;
            }
        }
        let edges = mask.count_ones();
        let view = GraphView {
            adjacency: &adjacency,
            degrees: &degrees,
            edges,
        };
        visit(&view, weights[edges as usize]);
    }
    Ok(())
}

/// Exact distribution of the number of isolated vertices.
pub fn enumerate_pmf(params: &Params, cap: usize) -> Result<ExactPmf> {
    let n = params.n();
    let mut acc = vec![CompensatedSum::new(); n + 1];
    for_each_graph(params, cap, |g, w| acc[g.isolated_count()].add(w))?;
    Ok(ExactPmf::from_probs(acc.iter().map(|a| a.value()).collect()))
}

/// Atom of the enumerated coupling: the pair `(Y, Y^s)` together with the
/// degree of the chosen vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CouplingAtom {
    pub y: usize,
    pub ys: usize,
    pub dv: usize,
}

impl CouplingAtom {
    /// `d₁(V)`, recovered from `ys - y = d₁(V) + 1(d(V) ≠ 0)`.
    pub fn d1v(&self) -> usize {
        self.ys - self.y - usize::from(self.dv != 0)
    }
}

/// Exact joint law of `(Y, Y^s, d(V))` under the vertex-deletion coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPmf {
    n: usize,
    atoms: BTreeMap<CouplingAtom, f64>,
}

impl CouplingPmf {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> impl Iterator<Item = (CouplingAtom, f64)> + '_ {
        self.atoms.iter().map(|(a, &w)| (*a, w))
    }

    pub fn total(&self) -> f64 {
        self.atoms.values().copied().collect::<CompensatedSum>().value()
    }

    pub fn joint_y_ys(&self) -> BTreeMap<(usize, usize), f64> {
        let mut out: BTreeMap<(usize, usize), CompensatedSum> = BTreeMap::new();
        for (a, w) in self.atoms() {
            out.entry((a.y, a.ys)).or_default().add(w);
        }
        out.into_iter().map(|(k, s)| (k, s.value())).collect()
    }

    fn marginal(&self, key: impl Fn(&CouplingAtom) -> usize) -> ExactPmf {
        let mut acc = vec![CompensatedSum::new(); self.n + 1];
        for (a, w) in self.atoms() {
            acc[key(&a)].add(w);
        }
        ExactPmf::from_probs(acc.iter().map(|s| s.value()).collect())
    }

    pub fn y_marginal(&self) -> ExactPmf {
        self.marginal(|a| a.y)
    }

    pub fn ys_marginal(&self) -> ExactPmf {
        self.marginal(|a| a.ys)
    }

    /// `E[f(Y, d(V))]` under the enumerated law.
    pub fn expect<F: Fn(usize, usize) -> f64>(&self, f: F) -> f64 {
        self.atoms()
            .map(|(a, w)| w * f(a.y, a.dv))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Enumerates every graph and every choice of the vertex `V` (weight
/// `1/n`), recording `Y`, `Y^s = Y + d₁(V) + 1(d(V) ≠ 0)` and `d(V)`.
pub fn enumerate_coupling_pmf(params: &Params, cap: usize) -> Result<CouplingPmf> {
    let n = params.n();
    let mut acc: BTreeMap<CouplingAtom, CompensatedSum> = BTreeMap::new();
    let inv_n = 1.0 / n as f64;
    for_each_graph(params, cap, |g, w| {
        let y = g.isolated_count();
        for v in 0..n {
            let atom = CouplingAtom {
                y,
                ys: y + g.coupling_increment(v) as usize,
                dv: g.degree(v) as usize,
            };
            acc.entry(atom).or_default().add(w * inv_n);
        }
    })?;
    Ok(CouplingPmf {
        n,
        atoms: acc.into_iter().map(|(k, s)| (k, s.value())).collect(),
    })
}
