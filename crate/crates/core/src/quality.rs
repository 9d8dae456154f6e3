//! Element distortion metrics and per-type mesh aggregates.
//!
//! Triangles are scored with the Lee-Lo `alpha` measure, convex quads with
//! Hua's `lambda`. Both lie in `[0, 1]`, reach 1 for the ideal shape and 0
//! for degenerate elements. Surface elements are scored with 3D cross
//! products directly.

use serde::{Deserialize, Serialize};

use crate::geom::{cross, dot, norm_sq, sub, Vec3};
use crate::mesh::{Element, Mesh};

/// Lee-Lo triangle quality `2*sqrt(3)*|CA x CB| / (|CA|^2 + |AB|^2 + |BC|^2)`.
pub fn tri_alpha(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ca = sub(a, c);
    let cb = sub(b, c);
    let ab = sub(b, a);
    let bc = sub(c, b);
    let denom = norm_sq(ca) + norm_sq(ab) + norm_sq(bc);
    if denom <= 0.0 {
        return 0.0;
    }
    // sqrt(3 |x|^2) instead of sqrt(3) * |x| keeps the equilateral case exact
    let q = 2.0 * (3.0 * norm_sq(cross(ca, cb))).sqrt() / denom;
    q.clamp(0.0, 1.0)
}

/// Hua's quadrilateral quality; 0 for non-convex quads.
pub fn quad_lambda(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    // corner cross products AB x AD, BC x BA, CD x CB, DA x DC
    let corners = [
        (sub(b, a), sub(d, a)),
        (sub(c, b), sub(a, b)),
        (sub(d, c), sub(b, c)),
        (sub(a, d), sub(c, d)),
    ];
    let crosses = corners.map(|(u, v)| cross(u, v));
    let reference = crosses.iter().fold([0.0; 3], |acc, c| [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]);
    if crosses.iter().any(|c| dot(*c, reference) <= 0.0) {
        return 0.0;
    }
    let mut num = 1.0;
    let mut den = 1.0;
    for ((u, v), c) in corners.iter().zip(&crosses) {
        num *= norm_sq(*c);
        den *= norm_sq(*u) + norm_sq(*v);
    }
    if den <= 0.0 {
        return 0.0;
    }
    let q = 2.0 * (num.sqrt() / den).sqrt().sqrt();
    q.clamp(0.0, 1.0)
}

pub fn element_quality(mesh: &Mesh, e: usize) -> f64 {
    let p = |v: usize| mesh.point(v);
    match mesh.elements()[e] {
        Element::Tri([a, b, c]) => tri_alpha(p(a), p(b), p(c)),
        Element::Quad([a, b, c, d]) => quad_lambda(p(a), p(b), p(c), p(d)),
    }
}

/// Mean quality (MQ) and RMS deviation from ideal quality (MSE) per
/// element type. Fields of a type absent from the mesh are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub mq_tri: Option<f64>,
    pub mse_tri: Option<f64>,
    pub mq_quad: Option<f64>,
    pub mse_quad: Option<f64>,
    pub n_tri: usize,
    pub n_quad: usize,
}

#[derive(Default)]
struct Acc {
    n: usize,
    sum: f64,
    sum_sq_dev: f64,
}

impl Acc {
    fn push(&mut self, q: f64) {
        self.n += 1;
        self.sum += q;
        self.sum_sq_dev += (1.0 - q) * (1.0 - q);
    }

    fn finish(&self) -> (Option<f64>, Option<f64>) {
        if self.n == 0 {
            return (None, None);
        }
        let m = self.n as f64;
        (Some(self.sum / m), Some((self.sum_sq_dev / m).sqrt()))
    }
}

pub fn summarize_qualities(qualities: impl IntoIterator<Item = (bool, f64)>) -> QualitySummary {
    let mut tri = Acc::default();
    let mut quad = Acc::default();
    for (is_tri, q) in qualities {
        if is_tri {
            tri.push(q)
        } else {
            quad.push(q)
        }
    }
    let (mq_tri, mse_tri) = tri.finish();
    let (mq_quad, mse_quad) = quad.finish();
    QualitySummary {
        mq_tri,
        mse_tri,
        mq_quad,
        mse_quad,
        n_tri: tri.n,
        n_quad: quad.n,
    }
}

pub fn summarize(mesh: &Mesh) -> QualitySummary {
    summarize_qualities(
        (0..mesh.elements().len()).map(|e| (matches!(mesh.elements()[e], Element::Tri(_)), element_quality(mesh, e))),
    )
}

impl QualitySummary {
    /// `(mq, mse)` pairs for the element types present, tri first.
    pub fn present(&self) -> impl Iterator<Item = (f64, f64)> {
        let tri = self.mq_tri.zip(self.mse_tri);
        let quad = self.mq_quad.zip(self.mse_quad);
        tri.into_iter().chain(quad)
    }

    /// Element-count-weighted MQ over all types.
    pub fn overall_mq(&self) -> Option<f64> {
        let n = self.n_tri + self.n_quad;
        if n == 0 {
            return None;
        }
        let s = self.mq_tri.unwrap_or(0.0) * self.n_tri as f64 + self.mq_quad.unwrap_or(0.0) * self.n_quad as f64;
        Some(s / n as f64)
    }
}
