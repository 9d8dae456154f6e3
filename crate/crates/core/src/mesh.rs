//! Mesh storage, node/element adjacency and orientation checks.
//!
//! Coordinates are kept in one flat vector with stride `dim`, which is the
//! same layout the assembled iteration operator acts on.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Tri,
    Quad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Tri([usize; 3]),
    Quad([usize; 4]),
}

impl Element {
    pub fn nodes(&self) -> &[usize] {
        match self {
            Element::Tri(n) => n,
            Element::Quad(n) => n,
        }
    }

    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Tri(_) => ElementKind::Tri,
            Element::Quad(_) => ElementKind::Quad,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.nodes().len()
    }

    pub fn reversed(&self) -> Element {
        match *self {
            Element::Tri([a, b, c]) => Element::Tri([a, c, b]),
            Element::Quad([a, b, c, d]) => Element::Quad([a, d, c, b]),
        }
    }

    /// Directed edges in winding order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nodes();
        (0..n.len()).map(move |i| (n[i], n[(i + 1) % n.len()]))
    }

    pub fn from_nodes(nodes: &[usize]) -> Option<Element> {
        match *nodes {
            [a, b, c] => Some(Element::Tri([a, b, c])),
            [a, b, c, d] => Some(Element::Quad([a, b, c, d])),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    elements: Vec<Element>,
}

impl Mesh {
    /// Builds a mesh after checking the structural invariants: known
    /// dimension, finite coordinates, element ids in range and no element
    /// repeating a node. Orientation is checked separately by
    /// [`validate_orientation`].
    pub fn new(dim: usize, coords: Vec<f64>, elements: Vec<Element>) -> Result<Mesh> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidMesh(format!(
                "coordinate count {} is not a multiple of {dim}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidMesh(format!("node {} has a non-finite coordinate", i / dim)));
        }
        let n = coords.len() / dim;
        for (e, el) in elements.iter().enumerate() {
            let nodes = el.nodes();
            for (k, &v) in nodes.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidMesh(format!(
                        "element {e} references node {v}, mesh has {n} nodes"
                    )));
                }
                if nodes[..k].contains(&v) {
                    return Err(Error::InvalidMesh(format!("element {e} repeats node {v}")));
                }
            }
        }
        Ok(Mesh { dim, coords, elements })
    }

    pub fn from_points(dim: usize, points: &[Vec3], elements: Vec<Element>) -> Result<Mesh> {
        let coords = points.iter().flat_map(|p| p[..dim].iter().copied()).collect();
        Mesh::new(dim, coords, elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Node position, padded with `z = 0` for planar meshes.
    #[inline]
    pub fn point(&self, i: usize) -> Vec3 {
        point_in(&self.coords, self.dim, i)
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.node_count()).map(|i| self.point(i)).collect()
    }

    pub fn element_points(&self, e: usize) -> Vec<Vec3> {
        self.elements[e].nodes().iter().map(|&v| self.point(v)).collect()
    }

    /// Same connectivity, new coordinates.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Mesh> {
        if coords.len() != self.coords.len() {
            return Err(Error::LengthMismatch {
                expected: self.coords.len(),
                found: coords.len(),
            });
        }
        Ok(Mesh {
            dim: self.dim,
            coords,
            elements: self.elements.clone(),
        })
    }

    /// Embeds a planar mesh in 3D at `z = 0`; 3D meshes are returned as is.
    pub fn to_3d(&self) -> Mesh {
        if self.dim == 3 {
            return self.clone();
        }
        let coords = (0..self.node_count()).flat_map(|i| self.point(i)).collect();
        Mesh {
            dim: 3,
            coords,
            elements: self.elements.clone(),
        }
    }

    /// Drops the z coordinate.
    pub fn to_2d(&self) -> Mesh {
        if self.dim == 2 {
            return self.clone();
        }
        let coords = (0..self.node_count())
            .flat_map(|i| {
                let p = self.point(i);
                [p[0], p[1]]
            })
            .collect();
        Mesh {
            dim: 2,
            coords,
            elements: self.elements.clone(),
        }
    }

    pub fn reverse_element(&mut self, e: usize) {
        self.elements[e] = self.elements[e].reversed();
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for i in 0..n {
            let p = self.point(i);
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        geom::norm(geom::sub(hi, lo))
    }

    pub fn count_kind(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind() == kind).count()
    }
}

#[inline]
pub(crate) fn point_in(coords: &[f64], dim: usize, i: usize) -> Vec3 {
    let o = i * dim;
    if dim == 2 {
        [coords[o], coords[o + 1], 0.0]
    } else {
        [coords[o], coords[o + 1], coords[o + 2]]
    }
}

/// Per-node incident elements, ordered by element id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    /// `(element id, local slot of the node in that element)`.
    pub incident: Vec<Vec<(usize, usize)>>,
    pub counts: Vec<usize>,
}

impl Adjacency {
    pub fn build(mesh: &Mesh) -> Adjacency {
        let mut incident = vec![Vec::new(); mesh.node_count()];
        for (e, el) in mesh.elements().iter().enumerate() {
            for (slot, &v) in el.nodes().iter().enumerate() {
                incident[v].push((e, slot));
            }
        }
        let counts = incident.iter().map(Vec::len).collect();
        Adjacency { incident, counts }
    }

    pub fn count(&self, node: usize) -> usize {
        self.counts[node]
    }

    pub fn elements_of(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[node].iter().map(|&(e, _)| e)
    }
}

pub fn build_adjacency(mesh: &Mesh) -> Adjacency {
    Adjacency::build(mesh)
}

/// Signed area of a planar polygon (shoelace), positive for CCW winding.
pub fn signed_area_2d(pts: &[Vec3]) -> f64 {
    let mut a = 0.0;
    for i in 0..pts.len() {
        let p = pts[i];
        let q = pts[(i + 1) % pts.len()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Elements whose orientation is wrong.
///
/// Planar meshes: every element with negative signed area (zero-area
/// elements are accepted). Surface meshes: every element that traverses an
/// edge in the same direction as another element sharing that edge.
pub fn validate_orientation(mesh: &Mesh) -> Vec<usize> {
    if mesh.dim() == 2 {
        return (0..mesh.elements().len())
            .filter(|&e| signed_area_2d(&mesh.element_points(e)) < 0.0)
            .collect();
    }
    let mut directed: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (e, el) in mesh.elements().iter().enumerate() {
        for edge in el.edges() {
            directed.entry(edge).or_default().push(e);
        }
    }
    let mut bad = BTreeSet::new();
    for owners in directed.values() {
        if owners.len() > 1 {
            bad.extend(owners.iter().copied());
        }
    }
    bad.into_iter().collect()
}

/// Nodes lying on an edge used by exactly one element.
pub fn boundary_nodes(mesh: &Mesh, adj: &Adjacency) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for v in 0..mesh.node_count() {
        // Multiplicity of each edge (v, w) among the elements around v.
        let mut edge_count: HashMap<usize, usize> = HashMap::new();
        for &(e, slot) in &adj.incident[v] {
            let nodes = mesh.elements()[e].nodes();
            let k = nodes.len();
            *edge_count.entry(nodes[(slot + 1) % k]).or_default() += 1;
            *edge_count.entry(nodes[(slot + k - 1) % k]).or_default() += 1;
        }
        if edge_count.values().any(|&c| c == 1) {
            out.insert(v);
        }
    }
    out
}

/// Distinct edge-connected neighbours of every node, sorted ascending.
/// Quad diagonals are not edges.
pub fn edge_neighbors(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mesh.node_count()];
    for el in mesh.elements() {
        for (a, b) in el.edges() {
            nbrs[a].insert(b);
            nbrs[b].insert(a);
        }
    }
    nbrs.into_iter().map(|s| s.into_iter().collect()).collect()
}
