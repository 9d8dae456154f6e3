//! OBJ / OFF mesh files and JSON / CSV iteration reports.
//!
//! Coordinates are written with 17 significant digits so every binary64
//! value survives a write/read cycle unchanged. Planar meshes are written
//! with `z = 0`; on read, a file whose z values are all equal (within
//! 1e-12) is treated as planar unless the caller forces a dimension.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::IterationRecord;
use crate::mesh::{Element, Mesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(MeshFormat::Obj),
            "off" => Some(MeshFormat::Off),
            _ => None,
        }
    }
}

/// How to pick the dimension of a mesh read from a file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DimMode {
    #[default]
    Auto,
    Planar,
    Surface,
}

const FLAT_Z_TOL: f64 = 1e-12;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_f64(tok: &str, path: &Path, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(path, line, format!("invalid number `{tok}`")))
}

fn finish(points: Vec<[f64; 3]>, faces: Vec<(usize, Vec<usize>)>, mode: DimMode, path: &Path) -> Result<Mesh> {
    let n = points.len();
    let mut elements = Vec::with_capacity(faces.len());
    for (line, f) in faces {
        if let Some(&bad) = f.iter().find(|&&v| v >= n) {
            return Err(parse_err(path, line, format!("vertex index {bad} out of range ({n} vertices)")));
        }
        elements.push(Element::from_nodes(&f).expect("arity checked while parsing"));
    }
    let dim = match mode {
        DimMode::Planar => 2,
        DimMode::Surface => 3,
        DimMode::Auto => {
            let flat = points.first().is_some_and(|p0| points.iter().all(|p| (p[2] - p0[2]).abs() <= FLAT_Z_TOL));
            if flat {
                2
            } else {
                3
            }
        }
    };
    Mesh::from_points(dim, &points, elements).map_err(|e| match e {
        Error::InvalidMesh(msg) => Error::InvalidMesh(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_obj(text: &str, path: &Path, mode: DimMode) -> Result<Mesh> {
    let mut points = Vec::new();
    let mut faces = Vec::new();
    let mut skipped = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut toks = body.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "v" => {
                let vals: Vec<&str> = toks.collect();
                if vals.len() < 3 {
                    return Err(parse_err(path, line, "vertex needs x y z"));
                }
                let mut p = [0.0; 3];
                for (slot, tok) in p.iter_mut().zip(&vals) {
                    *slot = parse_f64(tok, path, line)?;
                }
                points.push(p);
            }
            "f" => {
                let mut idx = Vec::new();
                for tok in toks {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|_| parse_err(path, line, format!("invalid face index `{tok}`")))?;
                    let resolved = match i {
                        0 => return Err(parse_err(path, line, "face index 0 (OBJ indices start at 1)")),
                        i if i > 0 => (i - 1) as usize,
                        i => {
                            let back = points.len() as i64 + i;
                            if back < 0 {
                                return Err(parse_err(path, line, format!("relative face index {i} out of range")));
                            }
                            back as usize
                        }
                    };
                    idx.push(resolved);
                }
                if idx.len() != 3 && idx.len() != 4 {
                    return Err(parse_err(
                        path,
                        line,
                        format!("face {}: unsupported face arity {}", faces.len(), idx.len()),
                    ));
                }
                faces.push((line, idx));
            }
            other => {
                if skipped.insert(other.to_string()) {
                    log::warn!("{}:{line}: skipping `{other}` records", path.display());
                }
            }
        }
    }
    finish(points, faces, mode, path)
}

pub fn parse_off(text: &str, path: &Path, mode: DimMode) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let mut htoks = header.split_whitespace();
    if htoks.next() != Some("OFF") {
        return Err(parse_err(path, hline, "missing OFF header"));
    }
    let mut counts: Vec<&str> = htoks.collect();
    let mut cline = hline;
    if counts.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| parse_err(path, hline, "missing counts line"))?;
        counts = c.split_whitespace().collect();
        cline = l;
    }
    if counts.len() < 2 {
        return Err(parse_err(path, cline, "counts line needs vertex and face counts"));
    }
    let count = |t: &str| t.parse::<usize>().map_err(|_| parse_err(path, cline, format!("invalid count `{t}`")));
    let nv = count(counts[0])?;
    let nf = count(counts[1])?;

    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, body) = lines.next().ok_or_else(|| parse_err(path, cline, format!("expected {nv} vertices")))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(parse_err(path, l, "vertex needs x y z"));
        }
        points.push([parse_f64(toks[0], path, l)?, parse_f64(toks[1], path, l)?, parse_f64(toks[2], path, l)?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let (l, body) = lines.next().ok_or_else(|| parse_err(path, cline, format!("expected {nf} faces")))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let arity: usize = toks[0].parse().map_err(|_| parse_err(path, l, format!("invalid face size `{}`", toks[0])))?;
        if arity != 3 && arity != 4 {
            return Err(parse_err(path, l, format!("face {f}: unsupported face arity {arity}")));
        }
        if toks.len() < arity + 1 {
            return Err(parse_err(path, l, format!("face {f} lists fewer than {arity} indices")));
        }
        let idx = toks[1..=arity]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(path, l, format!("invalid face index `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        faces.push((l, idx));
    }
    finish(points, faces, mode, path)
}

pub fn read_mesh_with(path: &Path, format: MeshFormat, mode: DimMode) -> Result<Mesh> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    match format {
        MeshFormat::Obj => parse_obj(&text, path, mode),
        MeshFormat::Off => parse_off(&text, path, mode),
    }
}

pub fn read_mesh(path: &Path, format: MeshFormat) -> Result<Mesh> {
    read_mesh_with(path, format, DimMode::Auto)
}

fn coord_line(out: &mut String, prefix: &str, p: [f64; 3]) {
    let _ = writeln!(out, "{prefix}{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
}

pub fn obj_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    for i in 0..mesh.node_count() {
        coord_line(&mut out, "v ", mesh.point(i));
    }
    for el in mesh.elements() {
        out.push('f');
        for &v in el.nodes() {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

pub fn off_string(mesh: &Mesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.node_count(), mesh.elements().len());
    for i in 0..mesh.node_count() {
        coord_line(&mut out, "", mesh.point(i));
    }
    for el in mesh.elements() {
        let _ = write!(out, "{}", el.len());
        for &v in el.nodes() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path, format: MeshFormat) -> Result<()> {
    let text = match format {
        MeshFormat::Obj => obj_string(mesh),
        MeshFormat::Off => off_string(mesh),
    };
    fs::write(path, text).map_err(io_err(path))
}

/// One row of a machine-readable smoothing report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub iter: usize,
    pub mq_tri: Option<f64>,
    pub mse_tri: Option<f64>,
    pub mq_quad: Option<f64>,
    pub mse_quad: Option<f64>,
    pub max_disp: f64,
    pub inversions_recovered: usize,
}

impl From<&IterationRecord> for ReportRecord {
    fn from(r: &IterationRecord) -> Self {
        ReportRecord {
            iter: r.iter,
            mq_tri: r.quality.mq_tri,
            mse_tri: r.quality.mse_tri,
            mq_quad: r.quality.mq_quad,
            mse_quad: r.quality.mse_quad,
            max_disp: r.max_disp,
            inversions_recovered: r.inversions_recovered,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

fn report_err(path: &Path, msg: impl ToString) -> Error {
    Error::Report {
        path: PathBuf::from(path),
        msg: msg.to_string(),
    }
}

pub fn report_string(history: &[ReportRecord], format: ReportFormat) -> std::result::Result<String, String> {
    if history.is_empty() {
        return Err("report history is empty".into());
    }
    if history.windows(2).any(|w| w[1].iter <= w[0].iter) {
        return Err("report iterations must be strictly increasing".into());
    }
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(history)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| e.to_string()),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in history {
                w.serialize(r).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

pub fn write_report(history: &[ReportRecord], path: &Path, format: ReportFormat) -> Result<()> {
    let text = report_string(history, format).map_err(|m| report_err(path, m))?;
    fs::write(path, text).map_err(io_err(path))
}

pub fn parse_report(text: &str, format: ReportFormat) -> std::result::Result<Vec<ReportRecord>, String> {
    match format {
        ReportFormat::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
        ReportFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<ReportRecord>, _>>()
            .map_err(|e| e.to_string()),
    }
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<Vec<ReportRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_report(&text, format).map_err(|m| report_err(path, m))
}
