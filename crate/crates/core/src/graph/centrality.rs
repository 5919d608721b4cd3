//! Node centrality measures on the directed graph.
//!
//! All seven measures return one score per node, indexed like the graph.
//! Parallel sections reduce per-source partials in a fixed chunk order, so
//! results are byte-identical no matter how many threads run.

use super::{bfs_distances, SocialGraph};
use crate::error::{Error, Result};
use crate::labeling::Status;
use crate::scalar::Scalar;
use crate::stats::pearson;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::VecDeque;

/// Which degree a degree-centrality run counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    All,
    In,
    Out,
}

/// Whether closeness aggregates distances toward a node or away from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosenessDirection {
    /// Distances from other nodes to the target (being reached by flows).
    Incoming,
    /// Distances from the target to other nodes.
    Outgoing,
}

/// The seven centrality measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    DegreeAll,
    DegreeIn,
    DegreeOut,
    Closeness,
    Betweenness,
    Pagerank,
    Eigenvector,
}

pub const ALL_MEASURES: [Measure; 7] = [
    Measure::DegreeAll,
    Measure::DegreeIn,
    Measure::DegreeOut,
    Measure::Closeness,
    Measure::Betweenness,
    Measure::Pagerank,
    Measure::Eigenvector,
];

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::DegreeAll => "degree_all",
            Measure::DegreeIn => "degree_in",
            Measure::DegreeOut => "degree_out",
            Measure::Closeness => "closeness",
            Measure::Betweenness => "betweenness",
            Measure::Pagerank => "pagerank",
            Measure::Eigenvector => "eigenvector",
        }
    }
}

/// Knobs for the iterative and sampled measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralityConfig {
    /// Run exact betweenness up to this many nodes, sample beyond it.
    pub betweenness_exact_threshold: usize,
    pub betweenness_sources: usize,
    pub seed: u64,
    pub pagerank_damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub eigenvector_tol: f64,
    pub eigenvector_max_iter: usize,
    pub closeness_outgoing: bool,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        CentralityConfig {
            betweenness_exact_threshold: 10_000,
            betweenness_sources: 2048,
            seed: 42,
            pagerank_damping: 0.85,
            pagerank_tol: 1e-10,
            pagerank_max_iter: 1_000,
            eigenvector_tol: 1e-10,
            eigenvector_max_iter: 1_000,
            closeness_outgoing: false,
        }
    }
}

/// Dispatch one measure with the configured parameters.
pub fn centrality<F: Scalar>(
    graph: &SocialGraph,
    measure: Measure,
    config: &CentralityConfig,
) -> Result<Vec<F>> {
    match measure {
        Measure::DegreeAll => Ok(degree_centrality(graph, DegreeKind::All)),
        Measure::DegreeIn => Ok(degree_centrality(graph, DegreeKind::In)),
        Measure::DegreeOut => Ok(degree_centrality(graph, DegreeKind::Out)),
        Measure::Closeness => Ok(closeness_centrality(
            graph,
            if config.closeness_outgoing {
                ClosenessDirection::Outgoing
            } else {
                ClosenessDirection::Incoming
            },
        )),
        Measure::Betweenness => {
            let sample = if graph.n() > config.betweenness_exact_threshold {
                Some((config.betweenness_sources, config.seed))
            } else {
                None
            };
            Ok(betweenness_centrality(graph, sample))
        }
        Measure::Pagerank => pagerank(
            graph,
            config.pagerank_damping,
            config.pagerank_tol,
            config.pagerank_max_iter,
        ),
        Measure::Eigenvector => eigenvector_centrality(
            graph,
            config.eigenvector_tol,
            config.eigenvector_max_iter,
        ),
    }
}

/// Raw degree counts.
pub fn degree_centrality<F: Scalar>(graph: &SocialGraph, kind: DegreeKind) -> Vec<F> {
    (0..graph.n() as u32)
        .map(|v| {
            let d = match kind {
                DegreeKind::All => graph.total_degree(v),
                DegreeKind::In => graph.in_degree(v),
                DegreeKind::Out => graph.out_degree(v),
            };
            F::from_count(d)
        })
        .collect()
}

/// Wasserman-Faust scaled closeness: `(r / (n-1)) * (r / sum_d)` where `r`
/// counts the nodes with a finite distance to (or from) the target and
/// `sum_d` is the sum of those distances. Unreachable nodes score 0.
pub fn closeness_centrality<F: Scalar>(
    graph: &SocialGraph,
    direction: ClosenessDirection,
) -> Vec<F> {
    let n = graph.n();
    if n <= 1 {
        return vec![F::zero(); n];
    }
    let n_minus_one = F::from_count(n - 1);
    // BFS over in-edges from the target walks incoming paths backwards.
    let forward = matches!(direction, ClosenessDirection::Outgoing);
    (0..n as u32)
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), v| {
                bfs_distances(graph, v, forward, dist, queue);
                let mut reached = 0u64;
                let mut sum = 0u64;
                for (w, &d) in dist.iter().enumerate() {
                    if d != u32::MAX && w as u32 != v {
                        reached += 1;
                        sum += u64::from(d);
                    }
                }
                if reached == 0 || sum == 0 {
                    F::zero()
                } else {
                    let r = F::from_u64(reached).expect("count fits scalar");
                    let s = F::from_u64(sum).expect("sum fits scalar");
                    (r / n_minus_one) * (r / s)
                }
            },
        )
        .collect()
}

/// Betweenness centrality over directed shortest paths.
///
/// Pair contributions are halved so a graph whose edges are all reciprocal
/// matches the classic undirected value. `sample` runs the accumulation
/// from `(sources, seed)` BFS roots instead of all nodes and rescales by
/// `n / sources`.
pub fn betweenness_centrality<F: Scalar>(
    graph: &SocialGraph,
    sample: Option<(usize, u64)>,
) -> Vec<F> {
    let n = graph.n();
    if n <= 2 {
        return vec![F::zero(); n];
    }
    let sources: Vec<u32> = match sample {
        Some((k, seed)) if k < n => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, n, k).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| i as u32).collect()
        }
        _ => (0..n as u32).collect(),
    };

    // Fixed chunk boundaries keep the floating-point reduction order
    // independent of the thread count.
    let chunk = sources.len().div_ceil(64).max(1);
    let partials: Vec<Vec<F>> = sources
        .par_chunks(chunk)
        .map(|chunk_sources| {
            let mut scores = vec![F::zero(); n];
            let mut state = BrandesState::new(n);
            for &s in chunk_sources {
                state.accumulate(graph, s, &mut scores);
            }
            scores
        })
        .collect();

    let mut scores = vec![F::zero(); n];
    for partial in partials {
        for (acc, p) in scores.iter_mut().zip(partial) {
            *acc += p;
        }
    }

    let half = F::from_f64(0.5).unwrap();
    let rescale = F::from_count(n) / F::from_count(sources.len());
    for score in &mut scores {
        *score = *score * half * rescale;
    }
    scores
}

/// Reusable per-thread buffers for Brandes' algorithm.
struct BrandesState {
    stack: Vec<u32>,
    preds: Vec<Vec<u32>>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    queue: VecDeque<u32>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        BrandesState {
            stack: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            queue: VecDeque::new(),
        }
    }

    fn accumulate<F: Scalar>(&mut self, graph: &SocialGraph, s: u32, scores: &mut [F]) {
        let n = graph.n();
        self.stack.clear();
        self.queue.clear();
        for v in 0..n {
            self.preds[v].clear();
            self.sigma[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
        }
        self.sigma[s as usize] = 1.0;
        self.dist[s as usize] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            let next = self.dist[v as usize] + 1;
            for &w in graph.out(v) {
                if self.dist[w as usize] < 0 {
                    self.dist[w as usize] = next;
                    self.queue.push_back(w);
                }
                if self.dist[w as usize] == next {
                    self.sigma[w as usize] += self.sigma[v as usize];
                    self.preds[w as usize].push(v);
                }
            }
        }
        while let Some(w) = self.stack.pop() {
            let coeff = (1.0 + self.delta[w as usize]) / self.sigma[w as usize];
            for &v in &self.preds[w as usize] {
                self.delta[v as usize] += self.sigma[v as usize] * coeff;
            }
            if w != s {
                scores[w as usize] += F::from_f64(self.delta[w as usize]).unwrap();
            }
        }
    }
}

/// PageRank with uniform teleport and uniform redistribution of dangling
/// mass, iterated to an L1 tolerance.
pub fn pagerank<F: Scalar>(
    graph: &SocialGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<F>> {
    if !(0.0..1.0).contains(&damping) {
        return Err(Error::validation("pagerank damping must lie in [0, 1)"));
    }
    let n = graph.n();
    let nf = F::from_count(n);
    let d = F::from_f64(damping).unwrap();
    let tol = F::from_f64(tol).unwrap();
    let uniform = F::one() / nf;

    let inv_out: Vec<F> = (0..n as u32)
        .map(|v| {
            let deg = graph.out_degree(v);
            if deg == 0 {
                F::zero()
            } else {
                F::one() / F::from_count(deg)
            }
        })
        .collect();
    let dangling: Vec<u32> = (0..n as u32).filter(|&v| graph.out_degree(v) == 0).collect();

    let mut x = vec![uniform; n];
    let mut contrib = vec![F::zero(); n];
    for _ in 0..max_iter {
        for v in 0..n {
            contrib[v] = x[v] * inv_out[v];
        }
        let dangling_mass: F = dangling.iter().map(|&v| x[v as usize]).sum();
        let base = (F::one() - d) * uniform + d * dangling_mass * uniform;
        let x_new: Vec<F> = (0..n as u32)
            .into_par_iter()
            .map(|v| {
                let mut acc = F::zero();
                for &u in graph.incoming(v) {
                    acc += contrib[u as usize];
                }
                base + d * acc
            })
            .collect();
        let l1: F = x
            .iter()
            .zip(&x_new)
            .map(|(old, new)| (*old - *new).abs())
            .sum();
        x = x_new;
        if l1 < tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        what: "pagerank",
        iterations: max_iter,
    })
}

/// Eigenvector centrality by power iteration on the symmetrized adjacency.
///
/// The iteration matrix carries an identity shift, which pins convergence
/// on bipartite-like graphs without changing the principal eigenvector.
/// The result is L2-normalized and non-negative.
pub fn eigenvector_centrality<F: Scalar>(
    graph: &SocialGraph,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<F>> {
    let n = graph.n();
    let sym = graph.symmetric_neighbors();
    let tol = F::from_f64(tol).unwrap();
    let mut x = vec![F::one() / F::from_count(n).sqrt(); n];
    for _ in 0..max_iter {
        let mut y: Vec<F> = (0..n as u32)
            .into_par_iter()
            .map(|v| {
                let mut acc = x[v as usize];
                for &w in sym.neighbors(v) {
                    acc += x[w as usize];
                }
                acc
            })
            .collect();
        let norm = y.iter().map(|v| *v * *v).sum::<F>().sqrt();
        if norm == F::zero() {
            return Err(Error::degenerate("eigenvector centrality on empty adjacency"));
        }
        for v in y.iter_mut() {
            *v /= norm;
        }
        let diff = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum::<F>()
            .sqrt();
        x = y;
        if diff <= tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        what: "eigenvector centrality",
        iterations: max_iter,
    })
}

/// Pairwise Pearson correlations between centrality vectors. The diagonal
/// is 1; a pair with a constant vector is undefined (`None`).
pub fn centrality_correlations<F: Scalar>(vectors: &[Vec<F>]) -> Vec<Vec<Option<F>>> {
    let k = vectors.len();
    let mut matrix = vec![vec![None; k]; k];
    for i in 0..k {
        matrix[i][i] = Some(F::one());
        for j in (i + 1)..k {
            let r = pearson(&vectors[i], &vectors[j]);
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }
    matrix
}

/// Node indices of the top-k scores, descending, ties to the smaller node.
pub fn top_k<F: Scalar>(scores: &[F], k: usize) -> Vec<(u32, F)> {
    let mut ranked: Vec<(u32, F)> = scores
        .iter()
        .enumerate()
        .map(|(v, &s)| (v as u32, s))
        .collect();
    ranked.sort_by(|(va, sa), (vb, sb)| {
        sb.partial_cmp(sa)
            .expect("scores are finite")
            .then(va.cmp(vb))
    });
    ranked.truncate(k);
    ranked
}

/// Migrant/native/unknown counts over a node set.
pub fn status_tally(graph: &SocialGraph, nodes: &[u32]) -> (usize, usize, usize) {
    let mut migrants = 0;
    let mut natives = 0;
    let mut unknown = 0;
    for &v in nodes {
        match graph.status(v) {
            Status::Migrant => migrants += 1,
            Status::Native => natives += 1,
            Status::Unknown => unknown += 1,
        }
    }
    (migrants, natives, unknown)
}
