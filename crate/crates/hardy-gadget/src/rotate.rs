//! Four mutually orthogonal copies of a four-dimensional gadget.

use serde::{Deserialize, Serialize};

use crate::graph::{GadgetGraph, Vertex, VertexLabel};
use crate::scalar::{dot, parallel, Vec4};
use crate::{GadgetError, Result};

/// `(a,b,c,d)` into copy 1..4: identity, then the three maps by the
/// imaginary unit quaternions.
pub fn rotate(v: &Vec4, copy: usize) -> Vec4 {
    let [a, b, c, d] = v.clone();
    match copy {
        1 => [a, b, c, d],
        2 => [b, -a, -d, c],
        3 => [c, d, -a, -b],
        4 => [d, -c, b, -a],
        _ => panic!("copy index {copy} is not in 1..=4"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatedGadget {
    /// `copies[k][i]` is vector `i + 1` of copy `k + 1`.
    pub copies: Vec<Vec<Vec4>>,
    /// Orthogonality graph on the distinct rays; vectors of different
    /// copies that coincide up to scale share one vertex.
    pub graph: GadgetGraph,
}

impl RotatedGadget {
    pub fn labelled_vertices(&self) -> usize {
        self.copies.iter().map(Vec::len).sum()
    }

    /// Vertex holding vector `index` of copy `copy`.
    pub fn vertex(&self, copy: usize, index: usize) -> usize {
        self.graph.find(VertexLabel::Gadget { copy, index }).expect("every labelled vector has a ray")
    }
}

/// Builds the copies and checks exactly that (i) the four images of each
/// vector are pairwise orthogonal and (ii) every copy has the original
/// Gram matrix, so its orthogonality graph is the original one.
pub fn rotate_copies(g: &GadgetGraph) -> Result<RotatedGadget> {
    let base: Vec<Vec4> = g.vertices.iter().map(|v| v.vector.clone()).collect();
    let copies: Vec<Vec<Vec4>> = (1..=4).map(|k| base.iter().map(|v| rotate(v, k)).collect()).collect();
    for (i, _) in base.iter().enumerate() {
        for k in 0..4 {
            for l in k + 1..4 {
                if !dot(&copies[k][i], &copies[l][i]).is_zero() {
                    return Err(GadgetError::OrthogonalityFailure(format!(
                        "copies {} and {} of vertex {} are not orthogonal",
                        k + 1,
                        l + 1,
                        i + 1
                    )));
                }
            }
        }
    }
    let gram = g.gram();
    for (k, copy) in copies.iter().enumerate() {
        for (i, u) in copy.iter().enumerate() {
            for (j, v) in copy.iter().enumerate() {
                if dot(u, v) != gram[i][j] {
                    return Err(GadgetError::OrthogonalityFailure(format!(
                        "copy {} changes the inner product of vertices {} and {}",
                        k + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let mut rays: Vec<Vertex> = Vec::new();
    for (k, copy) in copies.iter().enumerate() {
        for (i, v) in copy.iter().enumerate() {
            let label = VertexLabel::Gadget { copy: k + 1, index: i + 1 };
            match rays.iter_mut().find(|r| parallel(&r.vector, v)) {
                Some(r) => r.labels.push(label),
                None => rays.push(Vertex { labels: vec![label], vector: v.clone() }),
            }
        }
    }
    let mut distinguished = Vec::new();
    for &(u, v) in &g.distinguished {
        for k in 1..=4 {
            let find = |i: usize| {
                rays.iter()
                    .position(|r| r.labels.contains(&VertexLabel::Gadget { copy: k, index: i + 1 }))
                    .expect("labelled")
            };
            distinguished.push((find(u), find(v)));
        }
    }
    let graph = GadgetGraph::from_vertices(rays, distinguished)?;
    Ok(RotatedGadget { copies, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_gadget15;
    use crate::scalar::{vec4, QSqrt3};

    #[test]
    fn first_vector_goes_to_the_standard_basis() {
        let v1 = vec4([(1, 0), (0, 0), (0, 0), (0, 0)]);
        assert_eq!(rotate(&v1, 2), vec4([(0, 0), (-1, 0), (0, 0), (0, 0)]));
        assert_eq!(rotate(&v1, 3), vec4([(0, 0), (0, 0), (-1, 0), (0, 0)]));
        assert_eq!(rotate(&v1, 4), vec4([(0, 0), (0, 0), (0, 0), (-1, 0)]));
    }

    #[test]
    fn all_ones_copies_have_diagonal_gram() {
        let v = vec4([(1, 0); 4]);
        for k in 1..=4 {
            for l in 1..=4 {
                let ip = dot(&rotate(&v, k), &rotate(&v, l));
                assert_eq!(ip, if k == l { QSqrt3::int(4, 0) } else { QSqrt3::zero() });
            }
        }
    }

    #[test]
    fn sixty_vectors_merge_into_rays() {
        let r = rotate_copies(&build_gadget15().unwrap()).unwrap();
        assert_eq!(r.labelled_vertices(), 60);
        assert_eq!(r.graph.len(), 48);
        // v15 of copy 2 is v3 of copy 1.
        assert_eq!(r.vertex(2, 15), r.vertex(1, 3));
        assert_eq!(r.graph.distinguished.len(), 4);
    }
}
