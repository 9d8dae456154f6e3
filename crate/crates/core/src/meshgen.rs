//! Deterministic synthetic meshes.
//!
//! Every random draw comes from [`SplitMix64`] seeded with `GenSpec::seed`,
//! consumed in this order:
//!
//! 1. mixed kinds only: one draw per grid cell (row-major); the cell becomes
//!    a quad when the draw is below the kind's quad fraction, otherwise it
//!    is split into two triangles along its (0,0)-(1,1) diagonal;
//! 2. `perturb > 0` only: two draws `(u1, u2)` per interior node (row-major),
//!    offset radius `perturb * h * sqrt(u1)`, angle `2 * pi * u2`. An offset
//!    that would invert or (for quads) un-convex an incident element is
//!    halved until it does not.
//!
//! Nodes sit on a square lattice of spacing `h = 1 / (max(nx, ny) - 1)`.
//! A lift maps the planar result to the surface `z = f(x, y)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{signed_area_2d, Element, Mesh};

/// splitmix64 (Steele, Lea, Flood), bit-exact.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    TriGrid,
    QuadGrid,
    TriDominant,
    QuadDominant,
}

impl GenKind {
    fn quad_fraction(&self) -> f64 {
        match self {
            GenKind::TriGrid => 0.0,
            GenKind::QuadGrid => 1.0,
            GenKind::TriDominant => 0.2,
            GenKind::QuadDominant => 0.8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lift {
    None,
    /// `z = sin(x) * cos(y)`
    SinxCosy,
    /// `z = (x - 1/2)^2 + (y - 1/2)^2`
    Paraboloid,
}

impl Lift {
    fn eval(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Lift::None => None,
            Lift::SinxCosy => Some(x.sin() * y.cos()),
            Lift::Paraboloid => Some((x - 0.5).powi(2) + (y - 0.5).powi(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub nx: usize,
    pub ny: usize,
    /// Maximum node offset as a fraction of the cell size, in `[0, 0.5)`.
    pub perturb: f64,
    pub seed: u64,
    pub lift: Lift,
}

impl GenSpec {
    pub fn new(kind: GenKind, nx: usize, ny: usize) -> GenSpec {
        GenSpec {
            kind,
            nx,
            ny,
            perturb: 0.0,
            seed: 0,
            lift: Lift::None,
        }
    }

    pub fn perturb(mut self, perturb: f64) -> Self {
        self.perturb = perturb;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn lift(mut self, lift: Lift) -> Self {
        self.lift = lift;
        self
    }
}

fn element_ok(pts: &[Vec3]) -> bool {
    if pts.len() == 3 {
        return signed_area_2d(pts) > 0.0;
    }
    (0..4).all(|i| signed_area_2d(&[pts[(i + 3) % 4], pts[i], pts[(i + 1) % 4]]) > 0.0)
}

pub fn generate(spec: &GenSpec) -> Result<Mesh> {
    let GenSpec { kind, nx, ny, perturb, seed, lift } = *spec;
    if nx < 2 || ny < 2 {
        return Err(Error::Config(format!("grid needs at least 2x2 nodes, got {nx}x{ny}")));
    }
    if !(0.0..0.5).contains(&perturb) {
        return Err(Error::Config(format!("perturb must lie in [0, 0.5), got {perturb}")));
    }
    let h = 1.0 / (nx.max(ny) - 1) as f64;
    let id = |i: usize, j: usize| j * nx + i;
    let mut pts: Vec<Vec3> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| [i as f64 * h, j as f64 * h, 0.0]))
        .collect();

    let mut rng = SplitMix64::new(seed);
    let frac = kind.quad_fraction();
    let mut elements = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let quad = match kind {
                GenKind::TriGrid => false,
                GenKind::QuadGrid => true,
                _ => rng.next_f64() < frac,
            };
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if quad {
                elements.push(Element::Quad([a, b, c, d]));
            } else {
                elements.push(Element::Tri([a, b, c]));
                elements.push(Element::Tri([a, c, d]));
            }
        }
    }

    if perturb > 0.0 {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
        for (e, el) in elements.iter().enumerate() {
            for &v in el.nodes() {
                incident[v].push(e);
            }
        }
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let v = id(i, j);
                let r = perturb * h * rng.next_f64().sqrt();
                let t = 2.0 * PI * rng.next_f64();
                let home = pts[v];
                let mut off = [r * t.cos(), r * t.sin()];
                for _ in 0..64 {
                    pts[v] = [home[0] + off[0], home[1] + off[1], 0.0];
                    let ok = incident[v].iter().all(|&e| {
                        let p: Vec<Vec3> = elements[e].nodes().iter().map(|&w| pts[w]).collect();
                        element_ok(&p)
                    });
                    if ok {
                        break;
                    }
                    off = [off[0] * 0.5, off[1] * 0.5];
                    pts[v] = home;
                }
            }
        }
    }

    match lift {
        Lift::None => Mesh::from_points(2, &pts, elements),
        _ => {
            for p in &mut pts {
                p[2] = lift.eval(p[0], p[1]).unwrap();
            }
            Mesh::from_points(3, &pts, elements)
        }
    }
}

/// Planar tiling of unit equilateral triangles, `nx` nodes per row, every
/// other row shifted by half an edge.
pub fn equilateral_tiling(nx: usize, ny: usize) -> Result<Mesh> {
    if nx < 2 || ny < 2 {
        return Err(Error::Config(format!("tiling needs at least 2x2 nodes, got {nx}x{ny}")));
    }
    let row_h = 3f64.sqrt() / 2.0;
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
        for i in 0..nx {
            pts.push([i as f64 + shift, j as f64 * row_h, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut els = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if j % 2 == 0 {
                els.push(Element::Tri([id(i, j), id(i + 1, j), id(i, j + 1)]));
                els.push(Element::Tri([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]));
            } else {
                els.push(Element::Tri([id(i, j), id(i + 1, j), id(i + 1, j + 1)]));
                els.push(Element::Tri([id(i, j), id(i + 1, j + 1), id(i, j + 1)]));
            }
        }
    }
    Mesh::from_points(2, &pts, els)
}

/// Closed quad shell of the unit cube, `div x div` quads per side, wound
/// with outward normals.
pub fn cube_shell(div: usize) -> Result<Mesh> {
    if div == 0 {
        return Err(Error::Config("cube shell needs at least one division".into()));
    }
    let mut ids: HashMap<[usize; 3], usize> = HashMap::new();
    let mut pts: Vec<Vec3> = Vec::new();
    let mut node = |l: [usize; 3]| -> usize {
        *ids.entry(l).or_insert_with(|| {
            pts.push(l.map(|c| c as f64 / div as f64));
            pts.len() - 1
        })
    };
    let mut els = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [0, div] {
            for a in 0..div {
                for b in 0..div {
                    let lattice = |da: usize, db: usize| {
                        let mut l = [0; 3];
                        l[axis] = side;
                        l[u] = a + da;
                        l[v] = b + db;
                        l
                    };
                    let q = [
                        node(lattice(0, 0)),
                        node(lattice(1, 0)),
                        node(lattice(1, 1)),
                        node(lattice(0, 1)),
                    ];
                    let el = Element::Quad(q);
                    els.push(if side == 0 { el.reversed() } else { el });
                }
            }
        }
    }
    Mesh::from_points(3, &pts, els)
}
