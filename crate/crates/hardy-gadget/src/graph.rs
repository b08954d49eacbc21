//! Orthogonality graphs carried by exact vector representations, the
//! 15-vertex gadget and its exhaustive {0,1}-coloring check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::{dot, is_zero_vec, norm2, parallel, vec4, QSqrt3, Vec4};
use crate::{GadgetError, Result};

/// Largest vertex count the exhaustive coloring search accepts.
pub const MAX_COLORING_VERTICES: usize = 25;

/// Where a vertex comes from: vector `index` (1-based) of gadget copy
/// `copy` (1-based, 0 for the unrotated gadget), or a completion vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VertexLabel {
    Gadget { copy: usize, index: usize },
    Completion { basis: usize },
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::Gadget { copy: 0, index } => write!(f, "v{index}"),
            VertexLabel::Gadget { copy, index } => write!(f, "v{index}^({copy})"),
            VertexLabel::Completion { basis } => write!(f, "c{basis}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    /// Every label whose vector lies on this ray.
    pub labels: Vec<VertexLabel>,
    /// Unnormalized representative.
    pub vector: Vec4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetGraph {
    pub vertices: Vec<Vertex>,
    /// Pairs `(i, j)`, `i < j`, with exactly zero inner product.
    pub edges: Vec<(usize, usize)>,
    /// Non-adjacent pairs that no coloring may set to 1 together.
    pub distinguished: Vec<(usize, usize)>,
    /// Maximal cliques, each sorted, in lexicographic order.
    pub cliques: Vec<Vec<usize>>,
}

impl GadgetGraph {
    /// Builds the graph of a faithful representation: edges are read off
    /// the exact inner products.
    pub fn from_vertices(vertices: Vec<Vertex>, distinguished: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if is_zero_vec(&v.vector) {
                return Err(GadgetError::ZeroVector(i));
            }
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if parallel(&vertices[i].vector, &vertices[j].vector) {
                    return Err(GadgetError::NotFaithful(i, j));
                }
                if dot(&vertices[i].vector, &vertices[j].vector).is_zero() {
                    edges.push((i, j));
                }
            }
        }
        let adj = adjacency(n, &edges);
        for &(u, v) in &distinguished {
            if u >= n || v >= n || u == v {
                return Err(GadgetError::DimensionMismatch(format!("distinguished pair ({u}, {v})")));
            }
            if adj[u][v] {
                return Err(GadgetError::DistinguishedAdjacent(u, v));
            }
        }
        let cliques = maximal_cliques(&adj);
        Ok(GadgetGraph { vertices, edges, distinguished, cliques })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        adjacency(self.len(), &self.edges)
    }

    /// Index of the vertex carrying `label`.
    pub fn find(&self, label: VertexLabel) -> Option<usize> {
        self.vertices.iter().position(|v| v.labels.contains(&label))
    }

    /// Exact Gram matrix of the unnormalized representatives.
    pub fn gram(&self) -> Vec<Vec<QSqrt3>> {
        let vs = &self.vertices;
        vs.iter().map(|u| vs.iter().map(|v| dot(&u.vector, &v.vector)).collect()).collect()
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    adj
}

/// Bron–Kerbosch with pivoting.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p is nonempty");
        let mut p = p;
        for v in p.clone().into_iter().filter(|&v| !adj[pivot][v]) {
            r.push(v);
            let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            go(adj, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    go(adj, &mut Vec::new(), (0..adj.len()).collect(), Vec::new(), &mut out);
    out.sort();
    out
}

/// The 15 vectors of the four-dimensional gadget, unnormalized.
pub fn gadget15_vectors() -> Vec<Vec4> {
    vec![
        vec4([(1, 0), (0, 0), (0, 0), (0, 0)]),
        vec4([(0, 0), (4, 0), (1, 0), (1, 0)]),
        vec4([(0, 0), (0, 0), (1, 0), (1, 0)]),
        vec4([(-3, -1), (-5, 1), (1, 1), (1, 1)]),
        vec4([(3, 1), (-3, -1), (3, -1), (3, -1)]),
        vec4([(3, -1), (1, 1), (1, 1), (1, 1)]),
        vec4([(-3, 0), (1, 0), (-2, 0), (-2, 0)]),
        vec4([(1, 0), (1, 0), (0, 0), (0, 0)]),
        vec4([(3, 1), (1, -1), (1, -1), (1, -1)]),
        vec4([(-3, 1), (-5, -1), (1, -1), (1, -1)]),
        vec4([(-3, 1), (3, -1), (-3, -1), (-3, -1)]),
        vec4([(3, 0), (1, 0), (-2, 0), (-2, 0)]),
        vec4([(-1, 0), (1, 0), (0, 0), (0, 0)]),
        vec4([(1, 0), (1, 0), (1, 0), (1, 0)]),
        vec4([(0, 0), (0, 0), (1, 0), (-1, 0)]),
    ]
}

/// The 15-vertex gadget with distinguished pair `(v1, v14)`.
pub fn build_gadget15() -> Result<GadgetGraph> {
    let vertices = gadget15_vectors()
        .into_iter()
        .enumerate()
        .map(|(i, vector)| Vertex { labels: vec![VertexLabel::Gadget { copy: 0, index: i + 1 }], vector })
        .collect();
    let g = GadgetGraph::from_vertices(vertices, vec![(0, 13)])?;
    // |<v1|v14>| / (|v1| |v14|) = 1/2, checked as <v1|v14>² = |v1|²|v14|²/4.
    let (v1, v14) = (&g.vertices[0].vector, &g.vertices[13].vector);
    let ip = dot(v1, v14);
    let lhs = &ip * &ip;
    let rhs = &(&norm2(v1) * &norm2(v14)) / &QSqrt3::int(4, 0);
    if lhs != rhs {
        return Err(GadgetError::OrthogonalityFailure(format!("overlap of v1 and v14 is {} not 1/2", lhs.to_f64().sqrt())));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub vertices: usize,
    pub assignments: u64,
    /// Assignments with no edge carrying two 1s and exactly one 1 in every
    /// maximal clique of size at least two.
    pub valid_colorings: u64,
    /// Per distinguished pair, valid colorings giving both endpoints 1.
    pub distinguished_both_one: Vec<u64>,
    /// No maximal clique has two or more vertices, so the clique rule is vacuous.
    pub degenerate_cliques: bool,
    /// Every distinguished pair is excluded by every valid coloring.
    pub certified: bool,
}

/// Exhaustive search over all `2^|V|` assignments.
pub fn verify_gadget_coloring(g: &GadgetGraph) -> Result<ColoringReport> {
    let n = g.len();
    if n > MAX_COLORING_VERTICES {
        return Err(GadgetError::SearchBoundExceeded { vertices: n, max: MAX_COLORING_VERTICES });
    }
    let edges: Vec<u64> = g.edges.iter().map(|&(i, j)| (1u64 << i) | (1u64 << j)).collect();
    let cliques: Vec<u64> =
        g.cliques.iter().filter(|c| c.len() >= 2).map(|c| c.iter().fold(0u64, |m, &v| m | (1 << v))).collect();
    let pairs: Vec<u64> = g.distinguished.iter().map(|&(u, v)| (1u64 << u) | (1u64 << v)).collect();
    let valid = |m: u64| {
        edges.iter().all(|&e| m & e != e) && cliques.iter().all(|&c| (m & c).count_ones() == 1)
    };
    // Partition by the top bits of the assignment.
    let split = n.min(8);
    let chunk_bits = n - split;
    let counts = (0u64..1 << split)
        .into_par_iter()
        .map(|hi| {
            let mut valid_count = 0u64;
            let mut both = vec![0u64; pairs.len()];
            for lo in 0u64..1 << chunk_bits {
                let m = (hi << chunk_bits) | lo;
                if valid(m) {
                    valid_count += 1;
                    for (k, &p) in pairs.iter().enumerate() {
                        if m & p == p {
                            both[k] += 1;
                        }
                    }
                }
            }
            (valid_count, both)
        })
        .reduce(
            || (0, vec![0; pairs.len()]),
            |(a, mut x), (b, y)| {
                x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                (a + b, x)
            },
        );
    let (valid_colorings, distinguished_both_one) = counts;
    Ok(ColoringReport {
        vertices: n,
        assignments: 1u64 << n,
        valid_colorings,
        certified: distinguished_both_one.iter().all(|&c| c == 0),
        distinguished_both_one,
        degenerate_cliques: cliques.is_empty(),
    })
}
