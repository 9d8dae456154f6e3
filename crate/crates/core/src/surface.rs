//! Surface smoothing with feature preservation.
//!
//! Per iteration: re-estimate vertex normals on the current surface, move
//! every free node with the assembled operator, map the move back onto the
//! node's incident faces of the *original* surface along its normal, and
//! reject moves that flip an incident face. Corner, ridge and boundary
//! nodes never move. Iteration stops once both quality indicators stop
//! changing.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use rayon::prelude::*;

use crate::assembly::assemble;
use crate::error::{Error, Result};
use crate::geom::{self, add, cross, dot, newell_normal, norm, normalize, scale, sub, Vec3};
use crate::history::{IterationRecord, SmoothResult};
use crate::mesh::{boundary_nodes, build_adjacency, validate_orientation, Adjacency, Element, Mesh};
use crate::planar::max_displacement;
use crate::quality::{summarize, QualitySummary};

/// Barycentric slack for line/face hits on shared edges.
const HIT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    Identity,
    FaceArea,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceConfig {
    pub eps_mq: f64,
    pub eps_mse: f64,
    /// Corner threshold on `lambda3 / lambda1`.
    pub chi_c: f64,
    /// Ridge threshold on `lambda2 / lambda1`.
    pub chi_r: f64,
    pub max_iter: usize,
    pub weight_mode: WeightMode,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            eps_mq: 1e-6,
            eps_mse: 1e-4,
            chi_c: 0.7,
            chi_r: 0.1,
            max_iter: 200,
            weight_mode: WeightMode::Identity,
        }
    }
}

impl SurfaceConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !unit(self.chi_c) || !unit(self.chi_r) {
            return Err(Error::Config(format!(
                "chi_c and chi_r must lie in (0, 1], got {} and {}",
                self.chi_c, self.chi_r
            )));
        }
        if self.chi_c < self.chi_r {
            return Err(Error::Config(format!(
                "chi_c ({}) must be at least chi_r ({})",
                self.chi_c, self.chi_r
            )));
        }
        if !(self.eps_mq > 0.0 && self.eps_mse > 0.0) {
            return Err(Error::Config("eps_mq and eps_mse must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeLabel {
    Smooth,
    Ridge,
    Corner,
    Boundary,
}

impl NodeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeLabel::Smooth => "smooth",
            NodeLabel::Ridge => "ridge",
            NodeLabel::Corner => "corner",
            NodeLabel::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeClassification {
    pub labels: Vec<NodeLabel>,
}

impl NodeClassification {
    pub fn is_constrained(&self, node: usize) -> bool {
        self.labels[node] != NodeLabel::Smooth
    }

    pub fn count(&self, label: NodeLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Unit normal of a face from its Newell vector, `None` when degenerate.
pub fn face_normal(pts: &[Vec3]) -> Option<Vec3> {
    normalize(newell_normal(pts))
}

pub fn face_area(pts: &[Vec3]) -> f64 {
    0.5 * norm(newell_normal(pts))
}

/// Unit vertex normals. `None` marks nodes without a usable incident face;
/// such nodes are held fixed by the smoother.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexNormals {
    pub normals: Vec<Option<Vec3>>,
}

fn least_squares_normal(rows: &[Vec3]) -> Option<Vec3> {
    let m = rows.len();
    let n = DMatrix::from_fn(m, 3, |r, c| rows[r][c]);
    let ones = DVector::from_element(m, 1.0);
    let svd = n.svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd.solve(&ones, smax * 1e-12).ok()?;
    // a consistent system has |x| >= 1; a vanishing x is rounding noise
    let x = [x[0], x[1], x[2]];
    if norm(x) < 1e-6 {
        return None;
    }
    normalize(x)
}

fn node_normal(mesh: &Mesh, adj: &Adjacency, v: usize) -> Option<Vec3> {
    let mut rows = Vec::new();
    let mut weighted = [0.0; 3];
    for e in adj.elements_of(v) {
        let pts = mesh.element_points(e);
        let nw = newell_normal(&pts);
        if let Some(u) = normalize(nw) {
            rows.push(u);
            weighted = add(weighted, nw);
        }
    }
    if rows.is_empty() {
        return None;
    }
    // N x = 1 in the least-squares sense; opposite normals can make the
    // solution vanish, then fall back to the area-weighted face normal
    least_squares_normal(&rows).or_else(|| normalize(weighted))
}

fn normals_with(mesh: &Mesh, adj: &Adjacency) -> VertexNormals {
    let normals = (0..mesh.node_count())
        .into_par_iter()
        .map(|v| node_normal(mesh, adj, v))
        .collect();
    VertexNormals { normals }
}

pub fn estimate_normals(mesh: &Mesh) -> Result<VertexNormals> {
    require_3d(mesh)?;
    Ok(normals_with(mesh, &build_adjacency(mesh)))
}

/// Eigenvalues (descending, clamped at 0) of `A = N^T W N` over the node's
/// non-degenerate incident faces. `None` when there are none.
pub fn feature_eigenvalues(mesh: &Mesh, adj: &Adjacency, v: usize, weight: WeightMode) -> Option<[f64; 3]> {
    let mut a = Matrix3::<f64>::zeros();
    let mut any = false;
    for e in adj.elements_of(v) {
        let pts = mesh.element_points(e);
        let nw = newell_normal(&pts);
        let Some(u) = normalize(nw) else { continue };
        let w = match weight {
            WeightMode::Identity => 1.0,
            WeightMode::FaceArea => 0.5 * norm(nw),
        };
        let u = nalgebra::Vector3::new(u[0], u[1], u[2]);
        a += u * u.transpose() * w;
        any = true;
    }
    if !any {
        return None;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    if ev[0] <= 0.0 {
        return None;
    }
    Some([ev[0], ev[1], ev[2]])
}

/// `(lambda2 / lambda1, lambda3 / lambda1)`.
pub fn feature_ratios(eig: [f64; 3]) -> (f64, f64) {
    (eig[1] / eig[0], eig[2] / eig[0])
}

fn classify_with(mesh: &Mesh, adj: &Adjacency, cfg: &SurfaceConfig) -> NodeClassification {
    let boundary = boundary_nodes(mesh, adj);
    let labels = (0..mesh.node_count())
        .map(|v| {
            if boundary.contains(&v) {
                return NodeLabel::Boundary;
            }
            match feature_eigenvalues(mesh, adj, v, cfg.weight_mode) {
                // no usable face: hold the node like a corner
                None => NodeLabel::Corner,
                Some(eig) => {
                    let (r2, r3) = feature_ratios(eig);
                    if r3 >= cfg.chi_c {
                        NodeLabel::Corner
                    } else if r2 >= cfg.chi_r {
                        NodeLabel::Ridge
                    } else {
                        NodeLabel::Smooth
                    }
                }
            }
        })
        .collect();
    NodeClassification { labels }
}

pub fn classify(mesh: &Mesh, cfg: &SurfaceConfig) -> Result<NodeClassification> {
    require_3d(mesh)?;
    Ok(classify_with(mesh, &build_adjacency(mesh), cfg))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub point: Option<Vec3>,
    /// Number of faces hit by the line.
    pub hits: usize,
}

/// Intersection of the line `origin + t * dir` (any sign of `t`) with a
/// triangle, clamped onto the triangle.
fn line_triangle(origin: Vec3, dir: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<Vec3> {
    let e1 = sub(b, a);
    let e2 = sub(c, a);
    let p = cross(dir, e2);
    let det = dot(e1, p);
    if det.abs() <= 1e-14 * norm(e1) * norm(e2) * norm(dir) {
        return None;
    }
    let inv = 1.0 / det;
    let t = sub(origin, a);
    let mut u = dot(t, p) * inv;
    let q = cross(t, e1);
    let mut w = dot(dir, q) * inv;
    if u < -HIT_SLACK || w < -HIT_SLACK || u + w > 1.0 + HIT_SLACK {
        return None;
    }
    u = u.max(0.0);
    w = w.max(0.0);
    let s = u + w;
    if s > 1.0 {
        u /= s;
        w /= s;
    }
    Some(add(a, add(scale(e1, u), scale(e2, w))))
}

fn split_face(el: &Element) -> Vec<[usize; 3]> {
    match *el {
        Element::Tri(t) => vec![t],
        Element::Quad([a, b, c, d]) => vec![[a, b, c], [a, c, d]],
    }
}

/// Hit of the line through `node` along `normal` with one face of
/// `original`, nearest to `node` if both quad halves are hit.
pub fn project_on_face(original: &Mesh, e: usize, node: Vec3, normal: Vec3) -> Option<Vec3> {
    split_face(&original.elements()[e])
        .into_iter()
        .filter_map(|[a, b, c]| line_triangle(node, normal, original.point(a), original.point(b), original.point(c)))
        .min_by(|p, q| geom::norm_sq(sub(*p, node)).total_cmp(&geom::norm_sq(sub(*q, node))))
}

/// Maps a relocated node onto `faces` of the original mesh along its
/// normal. No hit leaves `point` empty; several hits pick the one nearest
/// to the relocated node (first face wins ties).
pub fn project(original: &Mesh, node: Vec3, normal: Vec3, faces: &[usize]) -> Projection {
    let mut best: Option<(f64, Vec3)> = None;
    let mut hits = 0;
    for &e in faces {
        if let Some(p) = project_on_face(original, e, node, normal) {
            hits += 1;
            let d = geom::norm_sq(sub(p, node));
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
    }
    Projection {
        point: best.map(|(_, p)| p),
        hits,
    }
}

/// A face is inverted by a move when its normal turns by 90 degrees or
/// more, or it collapses to zero area.
pub fn is_inverted(before: &[Vec3], after: &[Vec3]) -> bool {
    let nb = newell_normal(before);
    let na = newell_normal(after);
    if norm(na) == 0.0 {
        return true;
    }
    dot(nb, na) <= 0.0
}

fn improvement_small(prev: &QualitySummary, last: &QualitySummary, cfg: &SurfaceConfig) -> bool {
    let pairs = [
        (prev.mq_tri.zip(prev.mse_tri), last.mq_tri.zip(last.mse_tri)),
        (prev.mq_quad.zip(prev.mse_quad), last.mq_quad.zip(last.mse_quad)),
    ];
    pairs.iter().all(|pair| match pair {
        (Some((mq0, mse0)), Some((mq1, mse1))) => (mq1 - mq0).abs() < cfg.eps_mq && (mse1 - mse0).abs() < cfg.eps_mse,
        (None, None) => true,
        _ => false,
    })
}

/// Stop once MQ and MSE of every element type present changed by less
/// than `eps_mq` / `eps_mse` between the last two records, and the last
/// iteration had no inversion recovery.
pub fn should_stop(history: &[IterationRecord], cfg: &SurfaceConfig) -> bool {
    let [.., prev, last] = history else {
        return false;
    };
    if last.inversions_recovered > 0 {
        return false;
    }
    improvement_small(&prev.quality, &last.quality, cfg)
}

fn require_3d(mesh: &Mesh) -> Result<()> {
    if mesh.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            found: mesh.dim(),
        });
    }
    Ok(())
}

fn face_points_with(mesh_coords: &[f64], el: &Element, moved: usize, pos: Vec3) -> Vec<Vec3> {
    el.nodes()
        .iter()
        .map(|&w| if w == moved { pos } else { crate::mesh::point_in(mesh_coords, 3, w) })
        .collect()
}

enum Outcome {
    Stay,
    Miss,
    Inverted,
    Move(Vec3),
}

pub fn smooth_surface(mesh: &Mesh, cfg: &SurfaceConfig) -> Result<SmoothResult> {
    cfg.validate()?;
    require_3d(mesh)?;
    let bad = validate_orientation(mesh);
    if !bad.is_empty() {
        return Err(Error::BadOrientation(bad));
    }

    let adj = build_adjacency(mesh);
    let jm = assemble(mesh, &adj);
    let labels = classify_with(mesh, &adj, cfg);
    let faces: Vec<Vec<usize>> = (0..mesh.node_count()).map(|v| adj.elements_of(v).collect()).collect();

    let initial = summarize(mesh);
    let mut records = vec![IterationRecord::baseline(initial)];
    let mut current = mesh.clone();
    let mut converged = false;

    for iter in 1..=cfg.max_iter {
        let x = current.coords().to_vec();
        let normals = normals_with(&current, &adj);
        let relocated = jm.apply(&x)?;

        let outcomes: Vec<Outcome> = (0..mesh.node_count())
            .into_par_iter()
            .map(|v| {
                if labels.is_constrained(v) {
                    return Outcome::Stay;
                }
                let Some(n) = normals.normals[v] else {
                    return Outcome::Stay;
                };
                let target = [relocated[3 * v], relocated[3 * v + 1], relocated[3 * v + 2]];
                let Some(mapped) = project(mesh, target, n, &faces[v]).point else {
                    return Outcome::Miss;
                };
                let flips = faces[v].iter().any(|&e| {
                    let el = &mesh.elements()[e];
                    let before = face_points_with(&x, el, usize::MAX, [0.0; 3]);
                    let after = face_points_with(&x, el, v, mapped);
                    is_inverted(&before, &after)
                });
                if flips {
                    Outcome::Inverted
                } else {
                    Outcome::Move(mapped)
                }
            })
            .collect();

        let mut next = x.clone();
        let mut moved = vec![false; mesh.node_count()];
        let mut inversions = 0;
        let mut misses = 0;
        for (v, o) in outcomes.iter().enumerate() {
            match o {
                Outcome::Stay => {}
                Outcome::Miss => misses += 1,
                Outcome::Inverted => inversions += 1,
                Outcome::Move(p) => {
                    next[3 * v..3 * v + 3].copy_from_slice(p);
                    moved[v] = true;
                }
            }
        }
        inversions += revert_joint_inversions(mesh, &x, &mut next, &mut moved);

        let max_disp = max_displacement(&x, &next, 3);
        current = mesh.with_coords(next)?;
        records.push(IterationRecord {
            iter,
            quality: summarize(&current),
            max_disp,
            inversions_recovered: inversions,
            projection_misses: misses,
        });
        if should_stop(&records, cfg) {
            converged = true;
            break;
        }
    }

    records.remove(0);
    Ok(SmoothResult {
        mesh: current,
        iterations: records.len(),
        converged,
        initial,
        history: records,
        inverted_elements: Vec::new(),
    })
}

/// Individually accepted moves of two nodes of the same face can still flip
/// it together. Put every moved node of such a face back, in element
/// order, until no face flips. Returns the number of nodes put back.
fn revert_joint_inversions(mesh: &Mesh, before: &[f64], after: &mut [f64], moved: &mut [bool]) -> usize {
    let mut reverted = 0;
    loop {
        let mut changed = false;
        for el in mesh.elements() {
            if !el.nodes().iter().any(|&w| moved[w]) {
                continue;
            }
            let b: Vec<Vec3> = el.nodes().iter().map(|&w| crate::mesh::point_in(before, 3, w)).collect();
            let a: Vec<Vec3> = el.nodes().iter().map(|&w| crate::mesh::point_in(after, 3, w)).collect();
            if is_inverted(&b, &a) {
                for &w in el.nodes() {
                    if moved[w] {
                        after[3 * w..3 * w + 3].copy_from_slice(&before[3 * w..3 * w + 3]);
                        moved[w] = false;
                        reverted += 1;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            return reverted;
        }
    }
}
