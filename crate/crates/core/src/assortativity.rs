//! Global and multiscale local assortativity.
//!
//! Global categorical assortativity follows the mixing-matrix form:
//! `r = (sum_g e_gg - sum_g a_g b_g) / (1 - sum_g a_g b_g)`. The local
//! variant re-weights each node's edge contributions by a personalized
//! random walk with restart at that node and keeps the global null
//! marginals, so plugging in the walk's stationary distribution recovers
//! the global coefficient exactly.
//!
//! Local scores run on the symmetrized graph with directed edge counts
//! folded in: each directed edge contributes one half-edge in both
//! directions, so reciprocal ties weigh double.

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::labeling::Status;
use crate::scalar::Scalar;
use crate::stats::pearson;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Node attribute driving a categorical assortativity run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeAttribute {
    Status,
    Residence,
    Nationality,
}

impl NodeAttribute {
    pub fn name(&self) -> &'static str {
        match self {
            NodeAttribute::Status => "status",
            NodeAttribute::Residence => "residence",
            NodeAttribute::Nationality => "nationality",
        }
    }
}

/// Category index per node for one attribute, with category names.
fn categorize(graph: &SocialGraph, attribute: NodeAttribute) -> Result<(Vec<u32>, Vec<String>)> {
    let mut names: BTreeMap<String, u32> = BTreeMap::new();
    let mut keys = Vec::with_capacity(graph.n());
    for v in 0..graph.n() as u32 {
        let key = match attribute {
            NodeAttribute::Status => graph.status(v).to_string(),
            NodeAttribute::Residence => graph
                .residence(v)
                .ok_or_else(|| missing_attribute(graph, v, attribute))?
                .to_string(),
            NodeAttribute::Nationality => graph
                .nationality(v)
                .ok_or_else(|| missing_attribute(graph, v, attribute))?
                .to_string(),
        };
        keys.push(key);
    }
    for key in &keys {
        let next = names.len() as u32;
        names.entry(key.clone()).or_insert(next);
    }
    // Re-index in sorted category order for stable output.
    let sorted: Vec<String> = names.keys().cloned().collect();
    let index: BTreeMap<&str, u32> = sorted
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i as u32))
        .collect();
    let cats = keys.iter().map(|k| index[k.as_str()]).collect();
    Ok((cats, sorted))
}

fn missing_attribute(graph: &SocialGraph, v: u32, attribute: NodeAttribute) -> Error {
    Error::validation(format!(
        "node {} has no {} attribute",
        graph.user_id(v),
        attribute.name()
    ))
}

/// Edge-fraction mixing matrix between categories.
///
/// Integer edge counts back the fractional fields so the trace and chance
/// agreement stay exact where the arithmetic allows it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingMatrix<F> {
    pub categories: Vec<String>,
    /// Row-major `e[g * k + h]`: fraction of edges from category g to h.
    pub e: Vec<F>,
    /// Row (source) marginals.
    pub a: Vec<F>,
    /// Column (target) marginals.
    pub b: Vec<F>,
    #[serde(skip)]
    counts: Vec<u64>,
    #[serde(skip)]
    total: u64,
}

impl<F: Scalar> MixingMatrix<F> {
    fn from_counts(categories: Vec<String>, counts: Vec<u64>, total: u64) -> Self {
        let k = categories.len();
        let t = F::from_u64(total).expect("edge count fits scalar");
        let e = counts
            .iter()
            .map(|&c| F::from_u64(c).expect("count") / t)
            .collect();
        let mut row = vec![0u64; k];
        let mut col = vec![0u64; k];
        for g in 0..k {
            for h in 0..k {
                row[g] += counts[g * k + h];
                col[h] += counts[g * k + h];
            }
        }
        let a = row
            .iter()
            .map(|&c| F::from_u64(c).expect("count") / t)
            .collect();
        let b = col
            .iter()
            .map(|&c| F::from_u64(c).expect("count") / t)
            .collect();
        MixingMatrix {
            categories,
            e,
            a,
            b,
            counts,
            total,
        }
    }

    /// Mixing matrix over directed edges.
    pub fn from_directed(graph: &SocialGraph, attribute: NodeAttribute) -> Result<Self> {
        Self::build(graph, attribute, false)
    }

    /// Mixing matrix over the folded symmetrized graph: every directed edge
    /// contributes in both orientations.
    pub fn from_folded(graph: &SocialGraph, attribute: NodeAttribute) -> Result<Self> {
        Self::build(graph, attribute, true)
    }

    fn build(graph: &SocialGraph, attribute: NodeAttribute, folded: bool) -> Result<Self> {
        if graph.m() == 0 {
            return Err(Error::validation("mixing matrix needs at least one edge"));
        }
        let (cats, names) = categorize(graph, attribute)?;
        let k = names.len();
        let mut counts = vec![0u64; k * k];
        for v in 0..graph.n() as u32 {
            let g = cats[v as usize] as usize;
            for &w in graph.out(v) {
                let h = cats[w as usize] as usize;
                counts[g * k + h] += 1;
                if folded {
                    counts[h * k + g] += 1;
                }
            }
        }
        let total = if folded { 2 * graph.m() } else { graph.m() } as u64;
        Ok(Self::from_counts(names, counts, total))
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }

    /// `sum_g e_gg`, computed from integer counts.
    pub fn trace(&self) -> F {
        let k = self.k();
        let diag: u64 = (0..k).map(|g| self.counts[g * k + g]).sum();
        F::from_u64(diag).expect("count") / F::from_u64(self.total).expect("total")
    }

    /// `sum_g a_g b_g`, the chance agreement of the null model.
    pub fn chance_agreement(&self) -> F {
        let k = self.k();
        let mut acc: u128 = 0;
        for g in 0..k {
            let row: u64 = (0..k).map(|h| self.counts[g * k + h]).sum();
            let col: u64 = (0..k).map(|h| self.counts[h * k + g]).sum();
            acc += u128::from(row) * u128::from(col);
        }
        let t2 = u128::from(self.total) * u128::from(self.total);
        F::from_u128(acc).expect("fits scalar") / F::from_u128(t2).expect("fits scalar")
    }

    /// Newman's categorical coefficient; `None` when a single category
    /// owns every edge endpoint.
    pub fn assortativity(&self) -> Option<F> {
        let chance = self.chance_agreement();
        let denom = F::one() - chance;
        if denom == F::zero() {
            return None;
        }
        Some((self.trace() - chance) / denom)
    }
}

/// Categorical assortativity over directed edges.
pub fn categorical_assortativity<F: Scalar>(
    graph: &SocialGraph,
    attribute: NodeAttribute,
) -> Result<Option<F>> {
    Ok(MixingMatrix::from_directed(graph, attribute)?.assortativity())
}

/// Degree pairing for degree assortativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Source out-degree against target in-degree over directed edges.
    OutIn,
    /// Total degrees over the symmetrized graph.
    Total,
}

/// Pearson correlation of endpoint degrees across edges.
pub fn degree_assortativity<F: Scalar>(graph: &SocialGraph, mode: DegreeMode) -> Option<F> {
    match mode {
        DegreeMode::OutIn => {
            let mut x: Vec<F> = Vec::with_capacity(graph.m());
            let mut y: Vec<F> = Vec::with_capacity(graph.m());
            for v in 0..graph.n() as u32 {
                let out_deg = F::from_count(graph.out_degree(v));
                for &w in graph.out(v) {
                    x.push(out_deg);
                    y.push(F::from_count(graph.in_degree(w)));
                }
            }
            pearson(&x, &y)
        }
        DegreeMode::Total => {
            let sym = graph.symmetric_neighbors();
            let mut x: Vec<F> = Vec::new();
            let mut y: Vec<F> = Vec::new();
            for v in 0..graph.n() as u32 {
                let dv = F::from_count(sym.degree(v));
                for &w in sym.neighbors(v) {
                    // Both orientations appear because every undirected
                    // edge is stored twice in the symmetric adjacency.
                    x.push(dv);
                    y.push(F::from_count(sym.degree(w)));
                }
            }
            pearson(&x, &y)
        }
    }
}

/// Symmetrized multigraph: out- and in-neighbors of every node
/// concatenated, so reciprocal directed pairs appear with multiplicity 2.
#[derive(Debug, Clone)]
pub struct FoldedAdjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl FoldedAdjacency {
    pub fn from_graph(graph: &SocialGraph) -> Self {
        let n = graph.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * graph.m());
        offsets.push(0);
        for v in 0..n as u32 {
            targets.extend_from_slice(graph.out(v));
            targets.extend_from_slice(graph.incoming(v));
            offsets.push(targets.len());
        }
        FoldedAdjacency { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    /// Total half-edges (`2m` of the directed graph).
    pub fn half_edges(&self) -> usize {
        self.targets.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }
}

/// Tolerance for walk-weight fixed points.
pub const WALK_TOLERANCE: f64 = 1e-12;
const WALK_MAX_ITER: usize = 500_000;

/// Personalized random walk with restart at `node` on the folded
/// symmetrized graph: the unique solution of
/// `w = alpha * w * P + (1 - alpha) * e_node`, summing to 1.
pub fn personalized_walk_weights<F: Scalar>(
    graph: &SocialGraph,
    node: u32,
    alpha: F,
) -> Result<Vec<F>> {
    let folded = FoldedAdjacency::from_graph(graph);
    walk_weights_on(&folded, node, alpha)
}

/// Walk weights against a prebuilt folded adjacency.
pub fn walk_weights_on<F: Scalar>(
    folded: &FoldedAdjacency,
    node: u32,
    alpha: F,
) -> Result<Vec<F>> {
    if alpha < F::zero() || alpha >= F::one() {
        return Err(Error::validation("restart parameter must lie in [0, 1)"));
    }
    let n = folded.n();
    if node as usize >= n {
        return Err(Error::validation("walk restart node out of range"));
    }
    let tol = F::from_f64(WALK_TOLERANCE).unwrap();
    let restart = F::one() - alpha;

    let mut w = vec![F::zero(); n];
    w[node as usize] = F::one();
    if alpha == F::zero() {
        return Ok(w);
    }
    let mut next = vec![F::zero(); n];
    for _ in 0..WALK_MAX_ITER {
        for value in next.iter_mut() {
            *value = F::zero();
        }
        next[node as usize] = restart;
        for v in 0..n as u32 {
            let mass = w[v as usize];
            if mass == F::zero() {
                continue;
            }
            let deg = folded.degree(v);
            if deg == 0 {
                // Isolated node: the walk stays put.
                next[v as usize] += alpha * mass;
                continue;
            }
            let share = alpha * mass / F::from_count(deg);
            for &u in folded.neighbors(v) {
                next[u as usize] += share;
            }
        }
        let l1: F = w
            .iter()
            .zip(&next)
            .map(|(a, b)| (*a - *b).abs())
            .sum();
        std::mem::swap(&mut w, &mut next);
        if l1 <= tol {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        what: "personalized walk weights",
        iterations: WALK_MAX_ITER,
    })
}

/// Fraction of each node's folded neighbors sharing its category.
///
/// This is the per-node ingredient of the local trace:
/// `sum_g e_gg(l) = sum_i w_l(i) * fraction(i)`.
pub fn same_category_fractions<F: Scalar>(
    graph: &SocialGraph,
    folded: &FoldedAdjacency,
    attribute: NodeAttribute,
) -> Result<Vec<F>> {
    let (cats, _) = categorize(graph, attribute)?;
    Ok((0..graph.n() as u32)
        .map(|v| {
            let deg = folded.degree(v);
            if deg == 0 {
                return F::zero();
            }
            let own = cats[v as usize];
            let same = folded
                .neighbors(v)
                .iter()
                .filter(|&&w| cats[w as usize] == own)
                .count();
            F::from_count(same) / F::from_count(deg)
        })
        .collect())
}

/// Local score from a local trace and the global null.
pub fn score_from_trace<F: Scalar>(local_trace: F, mixing: &MixingMatrix<F>) -> Option<F> {
    let chance = mixing.chance_agreement();
    let denom = F::one() - chance;
    if denom == F::zero() {
        return None;
    }
    Some((local_trace - chance) / denom)
}

/// Evenly spaced restart parameters over `[0, 0.9]`.
pub fn default_alpha_grid<F: Scalar>() -> Vec<F> {
    (0..10).map(|i| F::from_count(i) / F::from_count(10)).collect()
}

/// Per-node multiscale local assortativity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalAssortativity<F> {
    /// Mean local score per node over the restart grid.
    pub scores: Vec<F>,
    pub alpha_grid: Vec<F>,
    pub attribute: NodeAttribute,
}

/// Local assortativity at one restart parameter for every node.
///
/// For each node the walk weights satisfy
/// `w_l = (1 - alpha) * e_l * (I - alpha P)^(-1)`, so the traces for all
/// restarts come from one adjoint solve `y = (I - alpha P)^(-1) s` with
/// `s` the same-category fractions: `trace(l) = (1 - alpha) * y_l`.
pub fn local_assortativity_at<F: Scalar>(
    graph: &SocialGraph,
    attribute: NodeAttribute,
    alpha: F,
) -> Result<Vec<F>> {
    let folded = FoldedAdjacency::from_graph(graph);
    let mixing = MixingMatrix::from_folded(graph, attribute)?;
    let fractions = same_category_fractions(graph, &folded, attribute)?;
    local_scores_at(&folded, &mixing, &fractions, alpha)
}

fn local_scores_at<F: Scalar>(
    folded: &FoldedAdjacency,
    mixing: &MixingMatrix<F>,
    fractions: &[F],
    alpha: F,
) -> Result<Vec<F>> {
    if alpha < F::zero() || alpha >= F::one() {
        return Err(Error::validation("restart parameter must lie in [0, 1)"));
    }
    let chance = mixing.chance_agreement();
    let denom = F::one() - chance;
    if denom == F::zero() {
        return Err(Error::degenerate(
            "single-category graph has undefined assortativity",
        ));
    }
    let n = folded.n();
    let tol = F::from_f64(WALK_TOLERANCE).unwrap();
    let mut y = fractions.to_vec();
    if alpha > F::zero() {
        let mut converged = false;
        for _ in 0..WALK_MAX_ITER {
            let y_next: Vec<F> = (0..n as u32)
                .into_par_iter()
                .map(|v| {
                    let deg = folded.degree(v);
                    if deg == 0 {
                        return fractions[v as usize];
                    }
                    let mut acc = F::zero();
                    for &w in folded.neighbors(v) {
                        acc += y[w as usize];
                    }
                    fractions[v as usize] + alpha * acc / F::from_count(deg)
                })
                .collect();
            let linf = y
                .iter()
                .zip(&y_next)
                .map(|(a, b)| (*a - *b).abs())
                .fold(F::zero(), F::max);
            y = y_next;
            if linf <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                what: "local assortativity solve",
                iterations: WALK_MAX_ITER,
            });
        }
    }
    let restart = F::one() - alpha;
    Ok(y
        .into_iter()
        .map(|y_l| (restart * y_l - chance) / denom)
        .collect())
}

/// Multiscale local assortativity: the unweighted mean over `alpha_grid`
/// of the per-node scores.
pub fn local_assortativity<F: Scalar>(
    graph: &SocialGraph,
    attribute: NodeAttribute,
    alpha_grid: &[F],
) -> Result<LocalAssortativity<F>> {
    if alpha_grid.is_empty() {
        return Err(Error::validation("alpha grid must not be empty"));
    }
    let folded = FoldedAdjacency::from_graph(graph);
    if !folded.is_connected() {
        return Err(Error::validation(
            "local assortativity requires a connected symmetrized graph",
        ));
    }
    let mixing = MixingMatrix::from_folded(graph, attribute)?;
    let fractions = same_category_fractions(graph, &folded, attribute)?;

    let n = graph.n();
    let mut sums = vec![F::zero(); n];
    for &alpha in alpha_grid {
        let scores = local_scores_at(&folded, &mixing, &fractions, alpha)?;
        for (acc, s) in sums.iter_mut().zip(scores) {
            *acc += s;
        }
    }
    let count = F::from_count(alpha_grid.len());
    for acc in sums.iter_mut() {
        *acc /= count;
    }
    Ok(LocalAssortativity {
        scores: sums,
        alpha_grid: alpha_grid.to_vec(),
        attribute,
    })
}

/// Stacked per-status histograms over a shared bin grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackedHistograms<F> {
    pub edges: Vec<F>,
    pub per_status: Vec<(Status, Vec<u64>)>,
}

/// Bin local scores separately per status over one shared grid.
pub fn assortativity_histograms<F: Scalar>(
    scores: &[F],
    statuses: &[Status],
    bins: usize,
) -> Result<StackedHistograms<F>> {
    if scores.len() != statuses.len() {
        return Err(Error::validation("scores and statuses must align"));
    }
    if scores.is_empty() {
        return Ok(StackedHistograms {
            edges: Vec::new(),
            per_status: Vec::new(),
        });
    }
    let mut lo = scores[0];
    let mut hi = scores[0];
    for &s in scores {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo == hi {
        let half = F::from_f64(0.5).unwrap();
        lo -= half;
        hi += half;
    }
    let mut edges = Vec::new();
    let mut per_status = Vec::new();
    for status in [Status::Migrant, Status::Native, Status::Unknown] {
        let group: Vec<F> = scores
            .iter()
            .zip(statuses)
            .filter(|(_, s)| **s == status)
            .map(|(v, _)| *v)
            .collect();
        if group.is_empty() && status == Status::Unknown {
            continue;
        }
        let hist = crate::stats::histogram_in_range(&group, bins, lo, hi, false)?;
        edges = hist.edges;
        per_status.push((status, hist.counts));
    }
    Ok(StackedHistograms { edges, per_status })
}
