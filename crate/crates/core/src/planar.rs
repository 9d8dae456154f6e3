//! Planar smoothing: repeated Jacobi sweeps of the assembled operator, or
//! plain Laplacian sweeps as the baseline, with fixed boundary nodes.

use std::collections::BTreeSet;

use crate::assembly::assemble;
use crate::error::{Error, Result};
use crate::history::{IterationRecord, SmoothResult};
use crate::mesh::{boundary_nodes, build_adjacency, edge_neighbors, validate_orientation, Adjacency, Mesh};
use crate::quality::summarize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mdm,
    Laplacian,
}

/// Stop threshold on the largest node displacement of an iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Fraction of the input mesh's bounding-box diagonal.
    BboxFraction(f64),
}

impl Tolerance {
    pub fn resolve(&self, mesh: &Mesh) -> f64 {
        match *self {
            Tolerance::Absolute(t) => t,
            Tolerance::BboxFraction(f) => f * mesh.bbox_diagonal(),
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Tolerance::Absolute(t) | Tolerance::BboxFraction(t) => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarConfig {
    pub tol: Tolerance,
    pub max_iter: usize,
    pub method: Method,
    pub fix_boundary: bool,
}

impl Default for PlanarConfig {
    fn default() -> Self {
        PlanarConfig {
            tol: Tolerance::BboxFraction(1e-6),
            max_iter: 1000,
            method: Method::Mdm,
            fix_boundary: true,
        }
    }
}

impl PlanarConfig {
    pub fn validate(&self) -> Result<()> {
        let t = self.tol.value();
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn laplacian_sweep(coords: &[f64], dim: usize, nbrs: &[Vec<usize>], fixed: &[bool]) -> Vec<f64> {
    let mut out = coords.to_vec();
    for (v, ns) in nbrs.iter().enumerate() {
        if fixed[v] || ns.is_empty() {
            continue;
        }
        let inv = 1.0 / ns.len() as f64;
        for axis in 0..dim {
            let s: f64 = ns.iter().map(|&w| coords[w * dim + axis]).sum();
            out[v * dim + axis] = s * inv;
        }
    }
    out
}

/// One Laplacian sweep: every free node moves to the centroid of its
/// distinct edge neighbours, reading only the current coordinates.
pub fn laplacian_step(mesh: &Mesh, _adj: &Adjacency, fixed: &BTreeSet<usize>) -> Vec<f64> {
    let mask: Vec<bool> = (0..mesh.node_count()).map(|v| fixed.contains(&v)).collect();
    laplacian_sweep(mesh.coords(), mesh.dim(), &edge_neighbors(mesh), &mask)
}

pub(crate) fn max_displacement(a: &[f64], b: &[f64], dim: usize) -> f64 {
    a.chunks(dim)
        .zip(b.chunks(dim))
        .map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn smooth_planar(mesh: &Mesh, cfg: &PlanarConfig) -> Result<SmoothResult> {
    cfg.validate()?;
    if mesh.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: mesh.dim(),
        });
    }
    let bad = validate_orientation(mesh);
    if !bad.is_empty() {
        return Err(Error::BadOrientation(bad));
    }

    let dim = 2;
    let adj = build_adjacency(mesh);
    let mut fixed = vec![false; mesh.node_count()];
    if cfg.fix_boundary {
        for v in boundary_nodes(mesh, &adj) {
            fixed[v] = true;
        }
    }
    let tol = cfg.tol.resolve(mesh);
    let jm = match cfg.method {
        Method::Mdm => Some(assemble(mesh, &adj)),
        Method::Laplacian => None,
    };
    let nbrs = match cfg.method {
        Method::Laplacian => edge_neighbors(mesh),
        Method::Mdm => Vec::new(),
    };

    let initial = summarize(mesh);
    let mut x = mesh.coords().to_vec();
    let mut history = Vec::new();
    let mut converged = false;
    let mut current = mesh.clone();

    for iter in 1..=cfg.max_iter {
        let mut next = match &jm {
            Some(jm) => jm.apply(&x)?,
            None => laplacian_sweep(&x, dim, &nbrs, &fixed),
        };
        for (v, &f) in fixed.iter().enumerate() {
            if f {
                next[v * dim..v * dim + dim].copy_from_slice(&x[v * dim..v * dim + dim]);
            }
        }
        let max_disp = max_displacement(&x, &next, dim);
        x = next;
        current = mesh.with_coords(x.clone())?;
        history.push(IterationRecord {
            iter,
            max_disp,
            ..IterationRecord::baseline(summarize(&current))
        });
        if max_disp <= tol {
            converged = true;
            break;
        }
    }

    let inverted_elements = validate_orientation(&current);
    if !inverted_elements.is_empty() {
        log::warn!("planar smoothing left {} inverted element(s): {:?}", inverted_elements.len(), inverted_elements);
    }
    Ok(SmoothResult {
        mesh: current,
        iterations: history.len(),
        converged,
        initial,
        history,
        inverted_elements,
    })
}
