//! Python bindings for the `mdm` smoothing library.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mdm::io::{self, DimMode, MeshFormat};
use mdm::meshgen::{self, GenKind, GenSpec, Lift};
use mdm::{Element, Method, PlanarConfig, QualitySummary, SurfaceConfig, Tolerance, WeightMode};

fn to_py(e: mdm::Error) -> PyErr {
    match e {
        mdm::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn bad(msg: String) -> PyErr {
    PyValueError::new_err(msg)
}

/// A planar (dim 2) or surface (dim 3) tri/quad mesh.
#[pyclass(name = "Mesh", module = "pymdm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMesh {
    inner: mdm::Mesh,
}

#[pymethods]
impl PyMesh {
    /// `points` is a list of 2- or 3-tuples; `elements` a list of 3- or
    /// 4-node index lists, counter-clockwise.
    #[new]
    fn new(points: Vec<Vec<f64>>, elements: Vec<Vec<usize>>) -> PyResult<Self> {
        let dim = points.first().map_or(2, Vec::len);
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(bad(format!("all points must have {dim} coordinates, found {}", p.len())));
        }
        let els = elements
            .iter()
            .enumerate()
            .map(|(i, e)| Element::from_nodes(e).ok_or_else(|| bad(format!("element {i}: {} nodes", e.len()))))
            .collect::<PyResult<Vec<_>>>()?;
        let coords = points.into_iter().flatten().collect();
        Ok(PyMesh { inner: mdm::Mesh::new(dim, coords, els).map_err(to_py)? })
    }

    /// Read an `.obj` or `.off` file. `mode` is "auto", "planar" or "surface".
    #[staticmethod]
    #[pyo3(signature = (path, mode = "auto"))]
    fn read(path: PathBuf, mode: &str) -> PyResult<Self> {
        let mode = match mode {
            "auto" => DimMode::Auto,
            "planar" => DimMode::Planar,
            "surface" => DimMode::Surface,
            other => return Err(bad(format!("unknown mode {other:?}"))),
        };
        let fmt = format_of(&path)?;
        Ok(PyMesh { inner: io::read_mesh_with(&path, fmt, mode).map_err(to_py)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        let fmt = format_of(&path)?;
        io::write_mesh(&self.inner, &path, fmt).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn coords(&self) -> Vec<Vec<f64>> {
        self.inner.coords().chunks(self.inner.dim()).map(<[f64]>::to_vec).collect()
    }

    fn elements(&self) -> Vec<Vec<usize>> {
        self.inner.elements().iter().map(|e| e.nodes().to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(dim={}, nodes={}, elements={})",
            self.inner.dim(),
            self.inner.node_count(),
            self.inner.elements().len()
        )
    }
}

fn format_of(path: &std::path::Path) -> PyResult<MeshFormat> {
    MeshFormat::from_path(path).ok_or_else(|| bad(format!("{}: expected .obj or .off", path.display())))
}

fn quality_dict<'py>(py: Python<'py>, q: &QualitySummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mq_tri", q.mq_tri)?;
    d.set_item("mse_tri", q.mse_tri)?;
    d.set_item("mq_quad", q.mq_quad)?;
    d.set_item("mse_quad", q.mse_quad)?;
    d.set_item("n_tri", q.n_tri)?;
    d.set_item("n_quad", q.n_quad)?;
    Ok(d)
}

/// Outcome of a smoothing run.
#[pyclass(name = "SmoothResult", module = "pymdm", frozen)]
struct PySmoothResult {
    inner: mdm::SmoothResult,
}

#[pymethods]
impl PySmoothResult {
    #[getter]
    fn mesh(&self) -> PyMesh {
        PyMesh { inner: self.inner.mesh.clone() }
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn inverted_elements(&self) -> Vec<usize> {
        self.inner.inverted_elements.clone()
    }

    fn initial_quality<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        quality_dict(py, &self.inner.initial)
    }

    fn final_quality<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        quality_dict(py, &self.inner.final_quality())
    }

    /// One dict per iteration.
    fn history<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .history
            .iter()
            .map(|r| {
                let d = quality_dict(py, &r.quality)?;
                d.set_item("iter", r.iter)?;
                d.set_item("max_disp", r.max_disp)?;
                d.set_item("inversions_recovered", r.inversions_recovered)?;
                d.set_item("projection_misses", r.projection_misses)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("SmoothResult(iterations={}, converged={})", self.inner.iterations, self.inner.converged)
    }
}

#[pyfunction]
fn summarize<'py>(py: Python<'py>, mesh: &PyMesh) -> PyResult<Bound<'py, PyDict>> {
    quality_dict(py, &mdm::summarize(&mesh.inner))
}

/// Planar smoothing. `tol` is absolute unless `tol_relative` is set, in which
/// case it is a fraction of the bounding-box diagonal.
#[pyfunction]
#[pyo3(signature = (mesh, tol = 1e-6, tol_relative = true, max_iter = 1000, method = "mdm", fix_boundary = true))]
fn smooth_planar(
    py: Python<'_>,
    mesh: &PyMesh,
    tol: f64,
    tol_relative: bool,
    max_iter: usize,
    method: &str,
    fix_boundary: bool,
) -> PyResult<PySmoothResult> {
    let method = match method {
        "mdm" => Method::Mdm,
        "laplacian" => Method::Laplacian,
        other => return Err(bad(format!("unknown method {other:?}"))),
    };
    let cfg = PlanarConfig {
        tol: if tol_relative { Tolerance::BboxFraction(tol) } else { Tolerance::Absolute(tol) },
        max_iter,
        method,
        fix_boundary,
    };
    let inner = py.detach(|| mdm::smooth_planar(&mesh.inner, &cfg)).map_err(to_py)?;
    Ok(PySmoothResult { inner })
}

fn weight_mode(w: &str) -> PyResult<WeightMode> {
    match w {
        "identity" => Ok(WeightMode::Identity),
        "area" => Ok(WeightMode::FaceArea),
        other => Err(bad(format!("unknown weight mode {other:?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (mesh, eps_mq = 1e-6, eps_mse = 1e-4, chi_c = 0.7, chi_r = 0.1, max_iter = 200, weight = "identity"))]
fn smooth_surface(
    py: Python<'_>,
    mesh: &PyMesh,
    eps_mq: f64,
    eps_mse: f64,
    chi_c: f64,
    chi_r: f64,
    max_iter: usize,
    weight: &str,
) -> PyResult<PySmoothResult> {
    let cfg = SurfaceConfig { eps_mq, eps_mse, chi_c, chi_r, max_iter, weight_mode: weight_mode(weight)? };
    let inner = py.detach(|| mdm::smooth_surface(&mesh.inner, &cfg)).map_err(to_py)?;
    Ok(PySmoothResult { inner })
}

/// Node labels ("smooth", "ridge", "corner", "boundary") of a surface mesh.
#[pyfunction]
#[pyo3(signature = (mesh, chi_c = 0.7, chi_r = 0.1, weight = "identity"))]
fn classify(mesh: &PyMesh, chi_c: f64, chi_r: f64, weight: &str) -> PyResult<Vec<&'static str>> {
    let cfg = SurfaceConfig { chi_c, chi_r, weight_mode: weight_mode(weight)?, ..SurfaceConfig::default() };
    let labels = mdm::classify(&mesh.inner, &cfg).map_err(to_py)?;
    Ok(labels.labels.iter().map(|l| l.as_str()).collect())
}

/// Synthetic grid. `kind`: tri-grid, quad-grid, tri-dominant, quad-dominant;
/// `lift`: none, sinx-cosy, paraboloid.
#[pyfunction]
#[pyo3(signature = (kind, nx, ny, perturb = 0.0, seed = 0, lift = "none"))]
fn generate(kind: &str, nx: usize, ny: usize, perturb: f64, seed: u64, lift: &str) -> PyResult<PyMesh> {
    let kind = match kind {
        "tri-grid" => GenKind::TriGrid,
        "quad-grid" => GenKind::QuadGrid,
        "tri-dominant" => GenKind::TriDominant,
        "quad-dominant" => GenKind::QuadDominant,
        other => return Err(bad(format!("unknown kind {other:?}"))),
    };
    let lift = match lift {
        "none" => Lift::None,
        "sinx-cosy" => Lift::SinxCosy,
        "paraboloid" => Lift::Paraboloid,
        other => return Err(bad(format!("unknown lift {other:?}"))),
    };
    let spec = GenSpec::new(kind, nx, ny).perturb(perturb).seed(seed).lift(lift);
    Ok(PyMesh { inner: meshgen::generate(&spec).map_err(to_py)? })
}

/// Closed quad shell of the unit cube with `div` x `div` quads per side.
#[pyfunction]
fn cube_shell(div: usize) -> PyResult<PyMesh> {
    Ok(PyMesh { inner: meshgen::cube_shell(div).map_err(to_py)? })
}

#[pymodule]
fn pymdm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PySmoothResult>()?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_planar, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_surface, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(cube_shell, m)?)?;
    Ok(())
}
