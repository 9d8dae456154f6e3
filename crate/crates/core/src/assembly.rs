//! Element iteration matrices and the assembled Jacobi operator.
//!
//! Each element matrix maps the element's current node coordinates to the
//! positions every node would need, all others held fixed, to make the
//! element ideal (equilateral triangle, square quad). Assembling those rows
//! per node and dividing by the node's element count gives the operator
//! whose single application is one smoothing sweep.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{add, scale, sub, Vec3};
use crate::mesh::{point_in, Adjacency, Element, Mesh};

/// sqrt(3) / 2
const S: f64 = 0.866_025_403_784_438_6;
const H: f64 = 0.5;

#[rustfmt::skip]
const TRI_2D: [[f64; 6]; 6] = [
    [0.0, 0.0,  H,  S,  H, -S],
    [0.0, 0.0, -S,  H,  S,  H],
    [ H, -S, 0.0, 0.0,  H,  S],
    [ S,  H, 0.0, 0.0, -S,  H],
    [ H,  S,  H, -S, 0.0, 0.0],
    [-S,  H,  S,  H, 0.0, 0.0],
];

#[rustfmt::skip]
const TRI_3D: [[f64; 9]; 9] = [
    [0.0, 0.0, 0.0,  H,  S, -S,  H, -S,  S],
    [0.0, 0.0, 0.0, -S,  H,  S,  S,  H, -S],
    [0.0, 0.0, 0.0,  S, -S,  H, -S,  S,  H],
    [ H, -S,  S, 0.0, 0.0, 0.0,  H,  S, -S],
    [ S,  H, -S, 0.0, 0.0, 0.0, -S,  H,  S],
    [-S,  S,  H, 0.0, 0.0, 0.0,  S, -S,  H],
    [ H,  S, -S,  H, -S,  S, 0.0, 0.0, 0.0],
    [-S,  H,  S,  S,  H, -S, 0.0, 0.0, 0.0],
    [ S, -S,  H, -S,  S,  H, 0.0, 0.0, 0.0],
];

#[rustfmt::skip]
const QUAD_2D: [[f64; 8]; 8] = [
    [0.0, 0.0,  H,  H, 0.0, 0.0,  H, -H],
    [0.0, 0.0, -H,  H, 0.0, 0.0,  H,  H],
    [ H, -H, 0.0, 0.0,  H,  H, 0.0, 0.0],
    [ H,  H, 0.0, 0.0, -H,  H, 0.0, 0.0],
    [0.0, 0.0,  H, -H, 0.0, 0.0,  H,  H],
    [0.0, 0.0,  H,  H, 0.0, 0.0, -H,  H],
    [ H,  H, 0.0, 0.0,  H, -H, 0.0, 0.0],
    [-H,  H, 0.0, 0.0,  H,  H, 0.0, 0.0],
];

#[rustfmt::skip]
const QUAD_3D: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0,  H,  H, -H, 0.0, 0.0, 0.0,  H, -H,  H],
    [0.0, 0.0, 0.0, -H,  H,  H, 0.0, 0.0, 0.0,  H,  H, -H],
    [0.0, 0.0, 0.0,  H, -H,  H, 0.0, 0.0, 0.0, -H,  H,  H],
    [ H, -H,  H, 0.0, 0.0, 0.0,  H,  H, -H, 0.0, 0.0, 0.0],
    [ H,  H, -H, 0.0, 0.0, 0.0, -H,  H,  H, 0.0, 0.0, 0.0],
    [-H,  H,  H, 0.0, 0.0, 0.0,  H, -H,  H, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0,  H, -H,  H, 0.0, 0.0, 0.0,  H,  H, -H],
    [0.0, 0.0, 0.0,  H,  H, -H, 0.0, 0.0, 0.0, -H,  H,  H],
    [0.0, 0.0, 0.0, -H,  H,  H, 0.0, 0.0, 0.0,  H, -H,  H],
    [ H,  H, -H, 0.0, 0.0, 0.0,  H, -H,  H, 0.0, 0.0, 0.0],
    [-H,  H,  H, 0.0, 0.0, 0.0,  H,  H, -H, 0.0, 0.0, 0.0],
    [ H, -H,  H, 0.0, 0.0, 0.0, -H,  H,  H, 0.0, 0.0, 0.0],
];

/// Dense square element iteration matrix, row-major, `size = nodes * dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMatrix {
    size: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl ElementMatrix {
    fn from_rows<const N: usize>(dim: usize, rows: &[[f64; N]; N]) -> ElementMatrix {
        ElementMatrix {
            size: N,
            dim,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.size / self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    /// Multiplies the matrix by an element coordinate vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }
}

/// Builds the 3D matrix of a 2D one by cycling coordinates X -> Y -> Z -> X
/// inside every node-to-node block. Panics if the 2D blocks are not
/// compatible with the cycle (unequal diagonals).
pub fn cyclic_extension(m2: &ElementMatrix) -> ElementMatrix {
    assert_eq!(m2.dim, 2, "cyclic extension starts from a 2D matrix");
    let nodes = m2.nodes();
    let size = nodes * 3;
    let mut entries = vec![f64::NAN; size * size];
    for p in 0..nodes {
        for q in 0..nodes {
            for shift in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = m2.get(p * 2 + a, q * 2 + b);
                        let r = p * 3 + (a + shift) % 3;
                        let c = q * 3 + (b + shift) % 3;
                        let slot = &mut entries[r * size + c];
                        assert!(slot.is_nan() || *slot == v, "2D block ({p},{q}) is not cyclic-consistent");
                        *slot = v;
                    }
                }
            }
        }
    }
    ElementMatrix { size, dim: 3, entries }
}

struct Tables {
    tri2: ElementMatrix,
    tri3: ElementMatrix,
    quad2: ElementMatrix,
    quad3: ElementMatrix,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let t = Tables {
            tri2: ElementMatrix::from_rows(2, &TRI_2D),
            tri3: ElementMatrix::from_rows(3, &TRI_3D),
            quad2: ElementMatrix::from_rows(2, &QUAD_2D),
            quad3: ElementMatrix::from_rows(3, &QUAD_3D),
        };
        assert_eq!(cyclic_extension(&t.tri2), t.tri3, "3D triangle matrix disagrees with its cyclic extension");
        assert_eq!(cyclic_extension(&t.quad2), t.quad3, "3D quad matrix disagrees with its cyclic extension");
        t
    })
}

pub fn tri_element_matrix(dim: usize) -> &'static ElementMatrix {
    match dim {
        2 => &tables().tri2,
        3 => &tables().tri3,
        _ => panic!("element matrices exist for dim 2 and 3, got {dim}"),
    }
}

pub fn quad_element_matrix(dim: usize) -> &'static ElementMatrix {
    match dim {
        2 => &tables().quad2,
        3 => &tables().quad3,
        _ => panic!("element matrices exist for dim 2 and 3, got {dim}"),
    }
}

pub fn element_matrix(el: &Element, dim: usize) -> &'static ElementMatrix {
    match el {
        Element::Tri(_) => tri_element_matrix(dim),
        Element::Quad(_) => quad_element_matrix(dim),
    }
}

/// Quarter-turn used by the single-element target rule. In 3D it is the
/// cyclic extension of the planar map `(x, y) -> (y, -x)`.
fn turn(v: Vec3, dim: usize) -> Vec3 {
    if dim == 2 {
        [v[1], -v[0], 0.0]
    } else {
        [v[1] - v[2], v[2] - v[0], v[0] - v[1]]
    }
}

fn target_from_neighbors(next: Vec3, prev: Vec3, weight: f64, dim: usize) -> Vec3 {
    add(scale(add(next, prev), 0.5), scale(turn(sub(next, prev), dim), weight))
}

fn element_target_in(coords: &[f64], dim: usize, el: &Element, local: usize) -> Vec3 {
    let nodes = el.nodes();
    let k = nodes.len();
    let next = point_in(coords, dim, nodes[(local + 1) % k]);
    let prev = point_in(coords, dim, nodes[(local + k - 1) % k]);
    let weight = match el {
        Element::Tri(_) => S,
        Element::Quad(_) => H,
    };
    target_from_neighbors(next, prev, weight, dim)
}

/// Position node `local` of element `e` would need, the other nodes held
/// fixed, to make the element ideal. Computed directly from the two
/// neighbouring nodes in the winding.
pub fn element_target(mesh: &Mesh, e: usize, local: usize) -> Vec3 {
    element_target_in(mesh.coords(), mesh.dim(), &mesh.elements()[e], local)
}

/// Reference implementation of one sweep: every node goes to the centroid
/// of its per-element targets. Nodes without elements stay put.
pub fn target_oracle(mesh: &Mesh, adj: &Adjacency, coords: &[f64]) -> Vec<f64> {
    let dim = mesh.dim();
    let mut out = coords.to_vec();
    for (v, inc) in adj.incident.iter().enumerate() {
        if inc.is_empty() {
            continue;
        }
        let mut acc = [0.0; 3];
        for &(e, slot) in inc {
            acc = add(acc, element_target_in(coords, dim, &mesh.elements()[e], slot));
        }
        let c = scale(acc, 1.0 / inc.len() as f64);
        out[v * dim..v * dim + dim].copy_from_slice(&c[..dim]);
    }
    out
}

/// Assembled operator with the `1 / e_i` scaling already folded into the
/// rows. Row `node * dim + axis` holds `(column, coefficient)` pairs sorted
/// by column.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix {
    n: usize,
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
    scale: Vec<f64>,
}

impl JacobiMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, node: usize, axis: usize) -> &[(usize, f64)] {
        &self.rows[node * self.dim + axis]
    }

    /// `1 / e_i` per node; 1 for isolated nodes.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// One Jacobi sweep `x_{k+1} = D K x_k`. Rows are evaluated
    /// independently, so the result never depends on evaluation order.
    pub fn apply(&self, coords: &[f64]) -> Result<Vec<f64>> {
        let expected = self.n * self.dim;
        if coords.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: coords.len(),
            });
        }
        Ok(self
            .rows
            .par_iter()
            .map(|row| row.iter().map(|&(c, w)| w * coords[c]).sum())
            .collect())
    }
}

pub fn assemble(mesh: &Mesh, adj: &Adjacency) -> JacobiMatrix {
    let dim = mesh.dim();
    let n = mesh.node_count();
    let mut rows = Vec::with_capacity(n * dim);
    let mut scales = Vec::with_capacity(n);
    for (v, inc) in adj.incident.iter().enumerate() {
        if inc.is_empty() {
            scales.push(1.0);
            for axis in 0..dim {
                rows.push(vec![(v * dim + axis, 1.0)]);
            }
            continue;
        }
        let s = 1.0 / inc.len() as f64;
        scales.push(s);
        for axis in 0..dim {
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for &(e, slot) in inc {
                let el = &mesh.elements()[e];
                let m = element_matrix(el, dim);
                let r = slot * dim + axis;
                for (t, &w) in el.nodes().iter().enumerate() {
                    for c in 0..dim {
                        let coef = m.get(r, t * dim + c);
                        if coef != 0.0 {
                            *acc.entry(w * dim + c).or_insert(0.0) += coef;
                        }
                    }
                }
            }
            rows.push(acc.into_iter().filter(|&(_, w)| w != 0.0).map(|(c, w)| (c, w * s)).collect());
        }
    }
    JacobiMatrix {
        n,
        dim,
        rows,
        scale: scales,
    }
}

pub fn apply(jm: &JacobiMatrix, coords: &[f64]) -> Result<Vec<f64>> {
    jm.apply(coords)
}
