//! Shared fixtures and brute-force reference implementations.
//!
//! Every reference here computes its quantity by a different route than
//! the library (explicit path enumeration, Floyd-Warshall, dense linear
//! algebra), so agreement is meaningful.

#![allow(dead_code)]

use migranet::country::CountryCode;
use migranet::graph::SocialGraph;
use migranet::labeling::Status;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

pub const CODES: [&str; 8] = ["IT", "DE", "FR", "GB", "ES", "US", "JP", "BR"];

/// Mixed absolute/relative closeness check.
pub fn assert_close(got: f64, want: f64, tol: f64, context: &str) {
    let scale = 1.0f64.max(got.abs()).max(want.abs());
    assert!(
        (got - want).abs() <= tol * scale,
        "{context}: got {got}, want {want} (tol {tol})"
    );
}

/// Random digraph on a directed Hamiltonian cycle (strongly connected)
/// plus `extra` random edges.
pub fn random_digraph(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> SocialGraph {
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(u32, u32)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
    let mut added = 0;
    while added < extra {
        let u = rng.random_range(0..n) as u32;
        let v = rng.random_range(0..n) as u32;
        if u != v {
            edges.push((u, v));
            added += 1;
        }
    }
    SocialGraph::from_numeric_edges(n, &edges).unwrap()
}

/// Random digraph without a connectivity spine; may be disconnected and
/// may contain dangling nodes.
pub fn random_digraph_loose(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SocialGraph {
    let mut edges = Vec::new();
    while edges.len() < m {
        let u = rng.random_range(0..n) as u32;
        let v = rng.random_range(0..n) as u32;
        if u != v {
            edges.push((u, v));
        }
    }
    SocialGraph::from_numeric_edges(n, &edges).unwrap()
}

/// Strongly connected digraph with random residence labels from `k`
/// countries (nationality equal, all users native).
pub fn random_labeled_graph(
    n: usize,
    extra: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> SocialGraph {
    let base = random_digraph(n, extra, rng);
    let edges: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|v| base.out(v).iter().map(move |&w| (v, w)).collect::<Vec<_>>())
        .collect();
    let width = n.to_string().len();
    let user_ids = (0..n).map(|i| format!("n{i:0width$}")).collect();
    let residence: Vec<Option<CountryCode>> = (0..n)
        .map(|_| Some(CountryCode::new(CODES[rng.random_range(0..k)]).unwrap()))
        .collect();
    SocialGraph::from_parts(
        user_ids,
        &edges,
        vec![Status::Native; n],
        residence.clone(),
        residence,
    )
    .unwrap()
}

fn bfs(graph: &SocialGraph, src: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.n()];
    let mut queue = VecDeque::new();
    dist[src as usize] = 0;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        for &w in graph.out(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Betweenness by explicit enumeration of every shortest path, halved to
/// match the library convention.
pub fn betweenness_by_path_enumeration(graph: &SocialGraph) -> Vec<f64> {
    let n = graph.n();
    let mut scores = vec![0.0f64; n];
    for s in 0..n as u32 {
        let dist = bfs(graph, s);
        for t in 0..n as u32 {
            if t == s || dist[t as usize] == u32::MAX {
                continue;
            }
            let mut paths: Vec<Vec<u32>> = Vec::new();
            let mut suffix = vec![t];
            enumerate_paths(graph, &dist, s, t, &mut suffix, &mut paths);
            let total = paths.len() as f64;
            let mut through = vec![0u64; n];
            for path in &paths {
                for &v in path {
                    if v != s && v != t {
                        through[v as usize] += 1;
                    }
                }
            }
            for (v, &count) in through.iter().enumerate() {
                if count > 0 {
                    scores[v] += count as f64 / total;
                }
            }
        }
    }
    for score in scores.iter_mut() {
        *score *= 0.5;
    }
    scores
}

fn enumerate_paths(
    graph: &SocialGraph,
    dist: &[u32],
    s: u32,
    current: u32,
    suffix: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if current == s {
        out.push(suffix.iter().rev().copied().collect());
        return;
    }
    let d = dist[current as usize];
    for &u in graph.incoming(current) {
        if dist[u as usize] != u32::MAX && dist[u as usize] + 1 == d {
            suffix.push(u);
            enumerate_paths(graph, dist, s, u, suffix, out);
            suffix.pop();
        }
    }
}

/// All-pairs distances by Floyd-Warshall.
pub fn floyd_warshall(graph: &SocialGraph) -> Vec<Vec<u64>> {
    let n = graph.n();
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = 0;
        for &w in graph.out(v as u32) {
            row[w as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// Incoming Wasserman-Faust closeness from Floyd-Warshall distances.
pub fn closeness_by_floyd_warshall(graph: &SocialGraph) -> Vec<f64> {
    let n = graph.n();
    const INF: u64 = u64::MAX / 4;
    let dist = floyd_warshall(graph);
    (0..n)
        .map(|v| {
            let mut reached = 0u64;
            let mut sum = 0u64;
            for (u, row) in dist.iter().enumerate() {
                if u != v && row[v] < INF {
                    reached += 1;
                    sum += row[v];
                }
            }
            if reached == 0 || sum == 0 {
                0.0
            } else {
                (reached as f64 / (n as f64 - 1.0)) * (reached as f64 / sum as f64)
            }
        })
        .collect()
}

/// PageRank by a dense linear solve of `(I - d M) x = (1 - d)/n * 1`,
/// where `M` is column-stochastic with dangling columns spread uniformly.
pub fn pagerank_by_dense_solve(graph: &SocialGraph, damping: f64) -> Vec<f64> {
    let n = graph.n();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n as u32 {
        let out = graph.out(j);
        if out.is_empty() {
            for i in 0..n {
                m[(i, j as usize)] = 1.0 / n as f64;
            }
        } else {
            let share = 1.0 / out.len() as f64;
            for &i in out {
                m[(i as usize, j as usize)] = share;
            }
        }
    }
    let system = DMatrix::<f64>::identity(n, n) - m * damping;
    let b = DVector::from_element(n, (1.0 - damping) / n as f64);
    let x = system.lu().solve(&b).expect("pagerank system is non-singular");
    x.iter().copied().collect()
}

/// Eigenvector centrality from a dense symmetric eigendecomposition of the
/// shifted symmetrized adjacency.
pub fn eigenvector_by_dense_eigen(graph: &SocialGraph) -> Vec<f64> {
    let n = graph.n();
    let mut a = DMatrix::<f64>::identity(n, n);
    for v in 0..n as u32 {
        for &w in graph.out(v) {
            a[(v as usize, w as usize)] = 1.0;
            a[(w as usize, v as usize)] = 1.0;
        }
    }
    for v in 0..n {
        a[(v, v)] = 1.0;
    }
    let eigen = nalgebra::linalg::SymmetricEigen::new(a);
    let mut best = 0;
    for i in 1..n {
        if eigen.eigenvalues[i] > eigen.eigenvalues[best] {
            best = i;
        }
    }
    let column = eigen.eigenvectors.column(best);
    let orientation = if column.sum() < 0.0 { -1.0 } else { 1.0 };
    column.iter().map(|&x| x * orientation).collect()
}

/// Dense folded adjacency (directed counts in both orientations).
fn folded_dense(graph: &SocialGraph) -> DMatrix<f64> {
    let n = graph.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for v in 0..n as u32 {
        for &w in graph.out(v) {
            a[(v as usize, w as usize)] += 1.0;
            a[(w as usize, v as usize)] += 1.0;
        }
    }
    a
}

fn residence_key(graph: &SocialGraph, v: u32) -> String {
    graph.residence(v).expect("labeled").to_string()
}

/// Local assortativity by dense linear algebra: solve each node's walk
/// weights from `(I - alpha P)^T w = (1 - alpha) e`, form the full local
/// mixing matrix, and score it against the folded global null.
pub fn local_assortativity_by_dense_solve(graph: &SocialGraph, alpha: f64) -> Vec<f64> {
    let n = graph.n();
    let a = folded_dense(graph);
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let two_m: f64 = deg.iter().sum();
    let p = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / deg[i]);

    let cats: Vec<String> = (0..n as u32).map(|v| residence_key(graph, v)).collect();
    let mut names: Vec<String> = cats.clone();
    names.sort();
    names.dedup();
    let cat_idx: Vec<usize> = cats
        .iter()
        .map(|c| names.iter().position(|x| x == c).unwrap())
        .collect();
    let k = names.len();

    // Global null from the folded matrix (symmetric, so a == b).
    let mut marginal = vec![0.0f64; k];
    for i in 0..n {
        marginal[cat_idx[i]] += deg[i] / two_m;
    }
    let chance: f64 = marginal.iter().map(|x| x * x).sum();
    let denom = 1.0 - chance;

    let system = (DMatrix::<f64>::identity(n, n) - p * alpha).transpose();
    let lu = system.lu();
    (0..n)
        .map(|l| {
            let mut e = DVector::zeros(n);
            e[l] = 1.0 - alpha;
            let w = lu.solve(&e).expect("walk system is non-singular");
            // Full local mixing matrix, then its trace.
            let mut local = vec![0.0f64; k * k];
            for i in 0..n {
                let share = w[i] / deg[i];
                for j in 0..n {
                    if a[(i, j)] > 0.0 {
                        local[cat_idx[i] * k + cat_idx[j]] += share * a[(i, j)];
                    }
                }
            }
            let trace: f64 = (0..k).map(|g| local[g * k + g]).sum();
            (trace - chance) / denom
        })
        .collect()
}

/// Pearson by the raw-moment formula, as an independent algebraic route.
pub fn pearson_by_raw_moments(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let cov = sxy / n - (sx / n) * (sy / n);
    let vx = sxx / n - (sx / n) * (sx / n);
    let vy = syy / n - (sy / n) * (sy / n);
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

/// Deterministic RNG for a named test.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
