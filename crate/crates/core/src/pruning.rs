//! Selection of mutually independent labeling functions.
//!
//! Labeling functions whose verdict columns are strongly correlated are joined
//! in a dependency graph; each maximal clique of that graph is a group of
//! redundant voters, and only the best-ranked member of each group survives.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::label_matrix::LabelMatrix;
use crate::scalar::Scalar;
use crate::stats::pearson;

pub const DEFAULT_DELTA: f64 = 0.5;

/// Symmetric matrix of pairwise Pearson correlations. `None` marks a pair
/// involving a constant column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix<T> {
    size: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    pub fn from_values(size: usize, values: Vec<Option<T>>) -> Result<Self> {
        if values.len() != size * size {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: size * size,
            });
        }
        for i in 0..size {
            for j in 0..i {
                if values[i * size + j] != values[j * size + i] {
                    return Err(Error::Domain(format!("correlation matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.values[i * self.size + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<T>]> {
        self.values.chunks_exact(self.size.max(1))
    }
}

/// Pearson correlation of every pair of verdict columns, abstains included as 0.
/// The diagonal is 1.
pub fn correlation_matrix<T: Scalar>(m: &LabelMatrix) -> Result<CorrelationMatrix<T>> {
    let k = m.num_lfs();
    let columns: Vec<Vec<T>> = (0..k)
        .map(|j| m.column(j).map(|v| T::from_u32(v).expect("verdict fits scalar")).collect())
        .collect();
    let mut values = vec![None; k * k];
    for i in 0..k {
        values[i * k + i] = Some(T::one());
        for j in (i + 1)..k {
            let c = if m.num_samples() < 2 {
                None
            } else {
                pearson(&columns[i], &columns[j])?
            };
            values[i * k + j] = c;
            values[j * k + i] = c;
        }
    }
    CorrelationMatrix::from_values(k, values)
}

/// Undirected graph over labeling functions; `(i, j)` is an edge iff `|c_ij| > delta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyGraph<T> {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    threshold: T,
    #[serde(skip)]
    adjacency: Vec<bool>,
}

impl<T: Scalar> DependencyGraph<T> {
    /// Builds a graph from an explicit edge list. `threshold` is recorded only.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>, threshold: T) -> Result<Self> {
        let mut adjacency = vec![false; node_count * node_count];
        for (a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    len: node_count,
                });
            }
            if a == b {
                return Err(Error::Domain(format!("self-loop on node {a}")));
            }
            adjacency[a * node_count + b] = true;
            adjacency[b * node_count + a] = true;
        }
        let mut edge_list = Vec::new();
        for i in 0..node_count {
            for j in (i + 1)..node_count {
                if adjacency[i * node_count + j] {
                    edge_list.push((i, j));
                }
            }
        }
        Ok(Self {
            node_count,
            edges: edge_list,
            threshold,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[i * self.node_count + j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count).filter(move |&j| self.has_edge(i, j))
    }
}

pub fn build_dependency_graph<T: Scalar>(c: &CorrelationMatrix<T>, delta: T) -> Result<DependencyGraph<T>> {
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(Error::Config(format!("delta must lie in [0,1], got {delta}")));
    }
    let n = c.size();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if c.get(i, j).is_some_and(|r| r.abs() > delta) {
                edges.push((i, j));
            }
        }
    }
    DependencyGraph::from_edges(n, edges, delta)
}

/// All maximal cliques (Bron–Kerbosch with Tomita pivoting). Each clique is
/// sorted ascending and the list is sorted lexicographically. Isolated nodes
/// appear as singletons.
pub fn maximal_cliques<T: Scalar>(g: &DependencyGraph<T>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..g.node_count()).collect();
    bron_kerbosch(g, &mut r, p, Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch<T: Scalar>(
    g: &DependencyGraph<T>,
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| (p.iter().filter(|&&v| g.has_edge(u, v)).count(), std::cmp::Reverse(u)))
        .expect("p is non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
    for v in candidates {
        let np = p.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        r.push(v);
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Labeling functions ordered by clique membership count (desc), then
/// coverage (desc), then original index (asc).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfRanking<T> {
    pub order: Vec<usize>,
    pub clique_membership_counts: Vec<usize>,
    pub coverages: Vec<T>,
}

pub fn rank_lfs<T: Scalar>(g: &DependencyGraph<T>, cliques: &[Vec<usize>], coverages: &[T]) -> Result<LfRanking<T>> {
    if coverages.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: coverages.len(),
            right: g.node_count(),
        });
    }
    let mut counts = vec![0usize; g.node_count()];
    for clique in cliques {
        for &v in clique {
            counts[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then_with(|| coverages[b].partial_cmp(&coverages[a]).unwrap_or(Ordering::Equal))
            .then_with(|| a.cmp(&b))
    });
    Ok(LfRanking {
        order,
        clique_membership_counts: counts,
        coverages: coverages.to_vec(),
    })
}

/// Walks the ranking; each still-selected labeling function evicts every other
/// member of the maximal cliques it belongs to. Returns survivors ascending.
pub fn select_independent<T: Scalar>(ranking: &LfRanking<T>, cliques: &[Vec<usize>]) -> Vec<usize> {
    let n = ranking.order.len();
    let mut alive = vec![true; n];
    for &lf in &ranking.order {
        if !alive[lf] {
            continue;
        }
        for clique in cliques.iter().filter(|c| c.contains(&lf)) {
            for &other in clique {
                if other != lf {
                    alive[other] = false;
                }
            }
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

/// Everything computed while pruning, for diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Pruning<T> {
    pub kept: Vec<usize>,
    pub correlations: CorrelationMatrix<T>,
    pub graph: DependencyGraph<T>,
    pub cliques: Vec<Vec<usize>>,
    pub ranking: LfRanking<T>,
}

impl<T> Pruning<T> {
    pub fn removed(&self) -> Vec<usize> {
        let n = self.ranking.order.len();
        (0..n).filter(|i| !self.kept.contains(i)).collect()
    }
}

/// Selects the independent subset of labeling functions at threshold `delta`.
pub fn prune<T: Scalar>(m: &LabelMatrix, delta: T) -> Result<Pruning<T>> {
    let correlations = correlation_matrix(m)?;
    let graph = build_dependency_graph(&correlations, delta)?;
    let cliques = maximal_cliques(&graph);
    let ranking = rank_lfs(&graph, &cliques, &m.coverages())?;
    let kept = select_independent(&ranking, &cliques);
    Ok(Pruning {
        kept,
        correlations,
        graph,
        cliques,
        ranking,
    })
}
