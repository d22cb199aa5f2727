//! Weighted directed/undirected graphs, random generators and the exact
//! Laplacian spectral oracle used to validate every estimate downstream.
//!
//! Convention: `weights[(i, j)]` is the weight of the edge `j → i`, so the
//! weighted in-degree of node `i` is the `i`-th row sum and the Laplacian is
//! `L[i][i] = d_i`, `L[i][j] = -W[i][j]`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Node count cap for edge-list files; guards allocation on corrupt input.
const MAX_NODE_ID: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    weights: Array2<f64>,
    undirected: bool,
    labels: Option<Vec<usize>>,
}

impl WeightedDigraph {
    /// Build a graph from an explicit weight matrix, validating the type
    /// invariants (zero diagonal, finite non-negative weights, symmetry when
    /// claimed undirected).
    pub fn from_weights(weights: Array2<f64>, undirected: bool) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n || n == 0 {
            return Err(Error::Parameter(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::Parameter(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Parameter(format!(
                        "weight[{i}][{j}] = {w} must be finite and >= 0"
                    )));
                }
                if undirected && weights[(i, j)] != weights[(j, i)] {
                    return Err(Error::Parameter(format!(
                        "claimed undirected but W[{i}][{j}] != W[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            weights,
            undirected,
            labels: None,
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize, undirected: bool) -> Result<Self> {
        Self::from_weights(Array2::zeros((n, n)), undirected)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// Ground-truth cluster labels, present for planted-partition graphs.
    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of edges: ordered pairs for directed graphs, unordered pairs
    /// for undirected ones.
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            let j_end = if self.undirected { i } else { self.n };
            for j in 0..j_end {
                if self.weights[(i, j)] != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Mean weight over present edges; zero for an empty graph.
    pub fn mean_edge_weight(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.weights[(i, j)] != 0.0 {
                    total += self.weights[(i, j)];
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }
}

/// The graph Laplacian `L = diag(d) - W` together with the flag needed to
/// pick the right eigensolver.
#[derive(Debug, Clone)]
pub struct Laplacian {
    matrix: Array2<f64>,
    undirected: bool,
}

impl Laplacian {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }
}

/// Eigenpairs of a Laplacian, sorted by ascending real part.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Array2<Complex64>,
}

/// Degree summary of a graph (weighted in-degrees).
#[derive(Debug, Clone, Serialize)]
pub struct DegreeStats {
    pub degrees: Vec<f64>,
    pub d_min: f64,
    pub d_max: f64,
    pub mean_degree: f64,
    pub mean_sq_degree: f64,
}

fn validate_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::Parameter(format!("{name} = {p} not in [0, 1]")));
    }
    Ok(())
}

fn validate_weight_range(range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < 0.0 {
        return Err(Error::Parameter(format!(
            "weight range [{lo}, {hi}] must satisfy 0 <= lo <= hi"
        )));
    }
    Ok(())
}

fn draw_weight(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.random_range(range.0..range.1)
    }
}

/// Erdős–Rényi graph: every (ordered, or unordered when undirected) pair
/// carries an edge independently with probability `p`, weights uniform in
/// `weight_range`. Reproducible per seed.
pub fn generate_erdos_renyi(
    n: usize,
    p: f64,
    weight_range: (f64, f64),
    directed: bool,
    seed: u64,
) -> Result<WeightedDigraph> {
    validate_probability(p, "p")?;
    validate_weight_range(weight_range)?;
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Array2::zeros((n, n));
    if directed {
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random::<f64>() < p {
                    weights[(i, j)] = draw_weight(&mut rng, weight_range);
                }
            }
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    let w = draw_weight(&mut rng, weight_range);
                    weights[(i, j)] = w;
                    weights[(j, i)] = w;
                }
            }
        }
    }
    WeightedDigraph::from_weights(weights, !directed)
}

/// Planted-partition graph: `clusters` groups of `cluster_size` nodes,
/// intra-cluster edges with probability `p_in`, inter-cluster with `p_out`.
/// Undirected; ground-truth labels are attached to the result.
pub fn generate_planted_partition(
    clusters: usize,
    cluster_size: usize,
    p_in: f64,
    p_out: f64,
    weight_range: (f64, f64),
    seed: u64,
) -> Result<WeightedDigraph> {
    validate_probability(p_in, "p_in")?;
    validate_probability(p_out, "p_out")?;
    validate_weight_range(weight_range)?;
    if clusters == 0 || cluster_size == 0 {
        return Err(Error::Parameter("clusters and cluster_size must be positive".into()));
    }
    let n = clusters * cluster_size;
    let labels: Vec<usize> = (0..n).map(|v| v / cluster_size).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                let w = draw_weight(&mut rng, weight_range);
                weights[(i, j)] = w;
                weights[(j, i)] = w;
            }
        }
    }
    let mut g = WeightedDigraph::from_weights(weights, true)?;
    g.labels = Some(labels);
    Ok(g)
}

/// Directed graph where each node's in-edge count is drawn from a normal
/// distribution (rounded, clipped to `[0, n-1]`) and its in-neighbors are
/// chosen uniformly without replacement.
pub fn generate_degree_targeted(
    n: usize,
    mean_edges: f64,
    sd_edges: f64,
    weight_range: (f64, f64),
    seed: u64,
) -> Result<WeightedDigraph> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if !(mean_edges > 0.0) {
        return Err(Error::Parameter(format!("mean_edges = {mean_edges} must be > 0")));
    }
    if mean_edges >= n as f64 {
        return Err(Error::Parameter(format!(
            "mean_edges = {mean_edges} must be below the node count {n}"
        )));
    }
    if !(sd_edges >= 0.0) {
        return Err(Error::Parameter(format!("sd_edges = {sd_edges} must be >= 0")));
    }
    validate_weight_range(weight_range)?;
    let normal = Normal::new(mean_edges, sd_edges)
        .map_err(|e| Error::Parameter(format!("bad degree distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Array2::zeros((n, n));
    for i in 0..n {
        let draw: f64 = normal.sample(&mut rng);
        let k = draw.round().clamp(0.0, (n - 1) as f64) as usize;
        if k == 0 {
            continue;
        }
        // Sample k in-neighbors from {0..n} \ {i}.
        for idx in sample(&mut rng, n - 1, k) {
            let j = if idx >= i { idx + 1 } else { idx };
            weights[(i, j)] = draw_weight(&mut rng, weight_range);
        }
    }
    WeightedDigraph::from_weights(weights, false)
}

/// Undirected, unweighted hub graph: node 0 is connected to `hub_degree`
/// uniformly chosen nodes; all other pairs carry an edge with probability
/// `p_background`. A compact stand-in for real hub-dominated networks.
pub fn generate_hub(
    n: usize,
    hub_degree: usize,
    p_background: f64,
    seed: u64,
) -> Result<WeightedDigraph> {
    if n < 2 {
        return Err(Error::Parameter("hub graph needs at least 2 nodes".into()));
    }
    if hub_degree > n - 1 {
        return Err(Error::Parameter(format!(
            "hub_degree = {hub_degree} exceeds n-1 = {}",
            n - 1
        )));
    }
    validate_probability(p_background, "p_background")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Array2::zeros((n, n));
    for idx in sample(&mut rng, n - 1, hub_degree) {
        let j = idx + 1; // skip the hub itself
        weights[(0, j)] = 1.0;
        weights[(j, 0)] = 1.0;
    }
    for i in 1..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p_background {
                weights[(i, j)] = 1.0;
                weights[(j, i)] = 1.0;
            }
        }
    }
    WeightedDigraph::from_weights(weights, true)
}

/// Laplacian of a graph: `L[i][i] = d_i`, `L[i][j] = -W[i][j]`.
pub fn laplacian(g: &WeightedDigraph) -> Laplacian {
    let n = g.n;
    let mut matrix = Array2::zeros((n, n));
    for i in 0..n {
        let mut degree = 0.0;
        for j in 0..n {
            if i != j {
                let w = g.weights[(i, j)];
                matrix[(i, j)] = -w;
                degree += w;
            }
        }
        matrix[(i, i)] = degree;
    }
    Laplacian {
        matrix,
        undirected: g.undirected,
    }
}

/// Dense eigendecomposition of a Laplacian, sorted by ascending real part
/// (ties by imaginary part). Uses the symmetric solver for undirected
/// graphs and the general solver otherwise.
pub fn exact_spectrum(l: &Laplacian) -> Result<SpectralDecomposition> {
    let n = l.n();
    let (mut values, mut vectors): (Vec<Complex64>, Array2<Complex64>) = if l.undirected {
        let (vals, vecs) = l.matrix.eigh(UPLO::Lower)?;
        (
            vals.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            vecs.mapv(|v| Complex64::new(v, 0.0)),
        )
    } else {
        let (vals, vecs) = l.matrix.eig()?;
        (vals.to_vec(), vecs)
    };
    // Stable sort by (re, im), permuting eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let sorted_values: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.column_mut(dst).assign(&vectors.column(src));
    }
    values = sorted_values;
    vectors = sorted_vectors;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numerical("eigensolver returned non-finite values".into()));
    }
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Weighted in-degree statistics.
pub fn degree_stats(g: &WeightedDigraph) -> DegreeStats {
    let degrees: Vec<f64> = (0..g.n)
        .map(|i| g.weights.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, w)| w).sum())
        .collect();
    let n = degrees.len() as f64;
    DegreeStats {
        d_min: degrees.iter().cloned().fold(f64::INFINITY, f64::min),
        d_max: degrees.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean_degree: degrees.iter().sum::<f64>() / n,
        mean_sq_degree: degrees.iter().map(|d| d * d).sum::<f64>() / n,
        degrees,
    }
}

/// Parse a whitespace-separated `src dst [weight]` edge list with 0-based
/// ids. Missing weights default to 1, duplicate edges sum, and self-loops
/// are skipped (they do not contribute to the Laplacian). When `undirected`
/// is set, every edge is applied in both directions.
pub fn load_edge_list<P: AsRef<Path>>(path: P, undirected: bool) -> Result<WeightedDigraph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, undirected)
}

pub fn parse_edge_list(text: &str, undirected: bool) -> Result<WeightedDigraph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_id = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `src dst [weight]`, got {} fields", tokens.len()),
            });
        }
        let src: usize = tokens[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad node id `{}`", tokens[0]),
        })?;
        let dst: usize = tokens[1].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad node id `{}`", tokens[1]),
        })?;
        if src > MAX_NODE_ID || dst > MAX_NODE_ID {
            return Err(Error::Parse {
                line,
                msg: format!("node id out of range (max {MAX_NODE_ID})"),
            });
        }
        let weight: f64 = match tokens.get(2) {
            Some(tok) => tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad weight `{tok}`"),
            })?,
            None => 1.0,
        };
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Parse {
                line,
                msg: format!("weight {weight} must be finite and >= 0"),
            });
        }
        if src == dst {
            continue; // self-loops do not enter the Laplacian
        }
        max_id = max_id.max(src).max(dst);
        edges.push((src, dst, weight));
    }
    if edges.is_empty() {
        return Err(Error::Parameter("edge list contains no edges".into()));
    }
    let n = max_id + 1;
    let mut weights = Array2::zeros((n, n));
    for (src, dst, w) in edges {
        weights[(dst, src)] += w;
        if undirected {
            weights[(src, dst)] += w;
        }
    }
    WeightedDigraph::from_weights(weights, undirected)
}

/// JSON-serializable graph document: `{n, directed, edges: [[from, to, w]], labels?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
}

impl WeightedDigraph {
    pub fn to_document(&self) -> GraphDocument {
        let mut edges = Vec::new();
        if self.undirected {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    if self.weights[(i, j)] != 0.0 {
                        edges.push((i, j, self.weights[(i, j)]));
                    }
                }
            }
        } else {
            for i in 0..self.n {
                for j in 0..self.n {
                    if i != j && self.weights[(i, j)] != 0.0 {
                        edges.push((j, i, self.weights[(i, j)]));
                    }
                }
            }
        }
        GraphDocument {
            n: self.n,
            directed: !self.undirected,
            edges,
            labels: self.labels.clone(),
        }
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        if doc.n == 0 {
            return Err(Error::Parameter("graph document has n = 0".into()));
        }
        let mut weights = Array2::zeros((doc.n, doc.n));
        for &(from, to, w) in &doc.edges {
            if from >= doc.n || to >= doc.n {
                return Err(Error::Parameter(format!(
                    "edge ({from}, {to}) out of range for n = {}",
                    doc.n
                )));
            }
            if from == to {
                return Err(Error::Parameter(format!("self-loop at node {from}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Parameter(format!(
                    "edge ({from}, {to}) weight {w} must be finite and >= 0"
                )));
            }
            weights[(to, from)] += w;
            if !doc.directed {
                weights[(from, to)] += w;
            }
        }
        let mut g = Self::from_weights(weights, !doc.directed)?;
        if let Some(labels) = &doc.labels {
            if labels.len() != doc.n {
                return Err(Error::Parameter(format!(
                    "labels length {} does not match n = {}",
                    labels.len(),
                    doc.n
                )));
            }
            g.labels = Some(labels.clone());
        }
        Ok(g)
    }

    pub fn save_json<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_document())?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load_json<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let doc: GraphDocument = serde_json::from_str(&text)?;
        Self::from_document(&doc)
    }
}

/// Exact spectral moments (1/n)·tr(L), (1/n)·tr(L²) straight from the
/// Laplacian matrix; the reference for every estimated moment.
pub fn exact_moments(l: &Laplacian) -> (f64, f64) {
    let n = l.n() as f64;
    let m1 = l.matrix.diag().sum() / n;
    let l2 = l.matrix.dot(&l.matrix);
    let m2 = l2.diag().sum() / n;
    (m1, m2)
}

/// Degree vector as an ndarray view helper for dynamics assembly.
pub fn degree_vector(g: &WeightedDigraph) -> Array1<f64> {
    Array1::from(degree_stats(g).degrees)
}
