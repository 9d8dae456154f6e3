//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mdm::geom::{self, Vec3};
use mdm::io::{self, DimMode, MeshFormat, ReportFormat, ReportRecord};
use mdm::meshgen::{self, GenKind, GenSpec, Lift, SplitMix64};
use mdm::quality::{quad_lambda, tri_alpha};
use mdm::surface::feature_eigenvalues;
use mdm::surface::feature_ratios;
use mdm::{
    assemble, build_adjacency, classify, smooth_planar, smooth_surface, target_oracle, Mesh, Method,
    NodeLabel, PlanarConfig, SurfaceConfig, Tolerance, WeightMode,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const KINDS: [GenKind; 4] = [GenKind::TriGrid, GenKind::QuadGrid, GenKind::TriDominant, GenKind::QuadDominant];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rigid_2d(coords: &[f64], angle: f64, t: [f64; 2]) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    coords
        .chunks(2)
        .flat_map(|p| [c * p[0] - s * p[1] + t[0], s * p[0] + c * p[1] + t[1]])
        .collect()
}

/// Rotation about a random unit axis (Rodrigues) followed by a translation.
fn rigid_3d(mesh: &Mesh, rng: &mut SplitMix64) -> Mesh {
    let axis = loop {
        let v = [rng.next_f64() - 0.5, rng.next_f64() - 0.5, rng.next_f64() - 0.5];
        if let Some(n) = geom::normalize(v) {
            break n;
        }
    };
    let angle = rng.next_f64() * std::f64::consts::TAU;
    let t = [rng.next_f64() * 10.0 - 5.0, rng.next_f64() * 10.0 - 5.0, rng.next_f64() * 10.0 - 5.0];
    let (s, c) = angle.sin_cos();
    let pts: Vec<Vec3> = mesh
        .points()
        .into_iter()
        .map(|p| {
            let r = geom::add(
                geom::add(geom::scale(p, c), geom::scale(geom::cross(axis, p), s)),
                geom::scale(axis, geom::dot(axis, p) * (1.0 - c)),
            );
            geom::add(r, t)
        })
        .collect();
    Mesh::from_points(3, &pts, mesh.elements().to_vec()).unwrap()
}

fn random_small_mesh(rng: &mut SplitMix64) -> Mesh {
    let kind = KINDS[(rng.next_u64() % 4) as usize];
    let nx = 2 + (rng.next_u64() % 6) as usize;
    let ny = 2 + (rng.next_u64() % 6) as usize;
    let perturb = rng.next_f64() * 0.4;
    let spec = GenSpec::new(kind, nx, ny).perturb(perturb).seed(rng.next_u64());
    let mesh = meshgen::generate(&spec).unwrap();
    if rng.next_u64().is_multiple_of(2) {
        mesh
    } else {
        let pts: Vec<Vec3> = mesh
            .points()
            .into_iter()
            .map(|p| [p[0], p[1], rng.next_f64() - 0.5])
            .collect();
        Mesh::from_points(3, &pts, mesh.elements().to_vec()).unwrap()
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC0FFEE);
    let mut worst = 0.0f64;
    let (mut n2, mut n3) = (0, 0);
    for _ in 0..100 {
        let mesh = random_small_mesh(&mut rng);
        check(mesh.node_count() <= 50, || format!("fixture has {} nodes", mesh.node_count()))?;
        if mesh.dim() == 2 {
            n2 += 1;
        } else {
            n3 += 1;
        }
        let adj = build_adjacency(&mesh);
        let jm = assemble(&mesh, &adj);
        let noise: Vec<f64> = (0..mesh.coords().len()).map(|_| rng.next_f64() * 4.0 - 2.0).collect();
        for coords in [mesh.coords().to_vec(), noise] {
            let got = jm.apply(&coords).map_err(|e| e.to_string())?;
            let want = target_oracle(&mesh, &adj, &coords);
            worst = worst.max(max_abs_diff(&got, &want));
        }
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-12, || format!("max abs error {worst:e} > 1e-12"))?;
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("100 meshes ({n2} planar, {n3} surface), max abs error {worst:.2e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let tiling = meshgen::equilateral_tiling(9, 8).unwrap();
    let grid = meshgen::generate(&GenSpec::new(GenKind::QuadGrid, 9, 9)).unwrap();
    let unit = grid.with_coords(grid.coords().iter().map(|c| c * 8.0).collect()).unwrap();
    let mut detail = Vec::new();
    for (name, mesh) in [("equilateral tiling", tiling), ("unit-square grid", unit)] {
        let r = smooth_planar(&mesh, &PlanarConfig::default()).map_err(|e| e.to_string())?;
        let disp = r.history[0].max_disp;
        check(disp <= 1e-12, || format!("{name}: displacement {disp:e} at iteration 1"))?;
        check(r.converged && r.iterations == 1, || {
            format!("{name}: converged={} after {} iterations", r.converged, r.iterations)
        })?;
        detail.push(format!("{name} max disp {disp:.1e}"));
    }
    Ok(detail.join(", "))
}

fn perturbed_tiling(seed: u64) -> Mesh {
    let base = meshgen::equilateral_tiling(8, 8).unwrap();
    let adj = build_adjacency(&base);
    let boundary = mdm::boundary_nodes(&base, &adj);
    let mut rng = SplitMix64::new(seed);
    let coords: Vec<f64> = base
        .coords()
        .chunks(2)
        .enumerate()
        .flat_map(|(i, p)| {
            if boundary.contains(&i) {
                [p[0], p[1]]
            } else {
                [p[0] + 0.3 * (rng.next_f64() - 0.5), p[1] + 0.3 * (rng.next_f64() - 0.5)]
            }
        })
        .collect();
    base.with_coords(coords).unwrap()
}

fn fixed_steps(method: Method, steps: usize) -> PlanarConfig {
    PlanarConfig {
        tol: Tolerance::Absolute(1e-300),
        max_iter: steps,
        method,
        fix_boundary: true,
    }
}

fn criterion_3() -> Outcome {
    let mut fixtures = Vec::new();
    for seed in 1..=3 {
        fixtures.push(meshgen::generate(&GenSpec::new(GenKind::TriGrid, 10, 10).perturb(0.3).seed(seed)).unwrap());
        fixtures.push(perturbed_tiling(seed));
    }
    let mut worst = 0.0f64;
    for mesh in &fixtures {
        for k in 1..=10 {
            let a = smooth_planar(mesh, &fixed_steps(Method::Mdm, k)).map_err(|e| e.to_string())?;
            let b = smooth_planar(mesh, &fixed_steps(Method::Laplacian, k)).map_err(|e| e.to_string())?;
            worst = worst.max(max_abs_diff(a.mesh.coords(), b.mesh.coords()));
        }
    }
    check(worst <= 1e-12, || format!("max divergence {worst:e}"))?;
    Ok(format!("{} triangular meshes x 10 iterations, max divergence {worst:.2e}", fixtures.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = SplitMix64::new(42);
    let cfg = fixed_steps(Method::Mdm, 20);
    let mut worst = 0.0f64;
    for m in 0..10 {
        let spec = GenSpec::new(KINDS[m % 4], 5 + m % 4, 6 + m % 3).perturb(0.3).seed(rng.next_u64());
        let mesh = meshgen::generate(&spec).unwrap();
        let base = smooth_planar(&mesh, &cfg).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let angle = rng.next_f64() * std::f64::consts::TAU;
            let t = [rng.next_f64() * 20.0 - 10.0, rng.next_f64() * 20.0 - 10.0];
            let moved = mesh.with_coords(rigid_2d(mesh.coords(), angle, t)).unwrap();
            let r = smooth_planar(&moved, &cfg).map_err(|e| e.to_string())?;
            let expect = rigid_2d(base.mesh.coords(), angle, t);
            worst = worst.max(max_abs_diff(r.mesh.coords(), &expect) / mesh.bbox_diagonal());
        }
    }
    check(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    Ok(format!("10 meshes x 10 rigid motions, max relative error {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let s3 = 3f64.sqrt();
    // exactly representable equilateral triangle
    let eq = tri_alpha([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
    check(eq == 1.0, || format!("alpha(equilateral) = {eq:e}"))?;
    let col = tri_alpha([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
    check(col == 0.0, || format!("alpha(collinear) = {col:e}"))?;
    let sq = quad_lambda([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]);
    check(sq == 1.0, || format!("lambda(square) = {sq:e}"))?;
    let three = quad_lambda([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
    check(three == 0.0, || format!("lambda(three collinear) = {three:e}"))?;
    let rect = quad_lambda([0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 1.0, 0.0], [0.0, 1.0, 0.0]);
    check((rect - 0.8).abs() <= 1e-12, || format!("lambda(2x1) = {rect}"))?;
    let ri = tri_alpha([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    check((ri - s3 / 2.0).abs() <= 1e-12, || format!("alpha(right isoceles) = {ri}"))?;
    let eq2 = tri_alpha([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, s3 / 2.0, 0.0]);
    Ok(format!("anchors exact; 2x1 rectangle {rect}, right isoceles {ri}, planar equilateral {eq2}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for kind in [GenKind::TriGrid, GenKind::QuadGrid] {
        for lift in [Lift::None, Lift::SinxCosy] {
            let mesh = meshgen::generate(&GenSpec::new(kind, 20, 20).perturb(0.3).seed(7).lift(lift)).unwrap();
            let r = if lift == Lift::None {
                let cfg = PlanarConfig { max_iter: 200, ..PlanarConfig::default() };
                smooth_planar(&mesh, &cfg)
            } else {
                smooth_surface(&mesh, &SurfaceConfig::default())
            }
            .map_err(|e| e.to_string())?;
            let name = format!("{kind:?}/{}", if lift == Lift::None { "planar" } else { "surface" });
            let series: Vec<_> = std::iter::once(r.initial)
                .chain(r.history.iter().take(5).map(|h| h.quality))
                .map(|q| q.present().next().unwrap())
                .collect();
            let monotone = series.len() == 6 && series.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1);
            if !monotone {
                failures.push(format!("{name}: MQ/MSE not strictly monotone over 5 iterations {series:?}"));
            }
            if !r.converged {
                failures.push(format!("{name}: not converged within {} iterations", r.iterations));
            }
            detail.push(format!("{name} {} it{}", r.iterations, if r.converged { "" } else { " (cap)" }));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}"));
    }
    if failures.is_empty() {
        Ok(format!("{}, {elapsed:.2?}", detail.join(", ")))
    } else {
        Err(format!("{} [runs: {}]", failures.join("; "), detail.join(", ")))
    }
}

fn cube_expectation(p: Vec3) -> NodeLabel {
    let on = p.iter().filter(|&&c| c == 0.0 || c == 1.0).count();
    match on {
        3 => NodeLabel::Corner,
        2 => NodeLabel::Ridge,
        _ => NodeLabel::Smooth,
    }
}

fn criterion_7() -> Outcome {
    let cube = meshgen::cube_shell(3).unwrap();
    let cfg = SurfaceConfig::default();
    let labels = classify(&cube, &cfg).map_err(|e| e.to_string())?;
    for (i, p) in cube.points().into_iter().enumerate() {
        let want = cube_expectation(p);
        check(labels.labels[i] == want, || {
            format!("node {i} at {p:?}: {:?}, expected {want:?}", labels.labels[i])
        })?;
    }
    let mut rng = SplitMix64::new(77);
    let moved = rigid_3d(&cube, &mut rng);
    let moved_labels = classify(&moved, &cfg).map_err(|e| e.to_string())?;
    check(moved_labels == labels, || "labels changed under rigid motion".into())?;
    let (a0, a1) = (build_adjacency(&cube), build_adjacency(&moved));
    let mut worst = 0.0f64;
    for v in 0..cube.node_count() {
        let r0 = feature_ratios(feature_eigenvalues(&cube, &a0, v, WeightMode::Identity).unwrap());
        let r1 = feature_ratios(feature_eigenvalues(&moved, &a1, v, WeightMode::Identity).unwrap());
        worst = worst.max((r0.0 - r1.0).abs()).max((r0.1 - r1.1).abs());
    }
    check(worst <= 1e-9, || format!("ratio drift {worst:e}"))?;
    Ok(format!(
        "{} corner, {} ridge, {} smooth; ratio drift under rigid motion {worst:.1e}",
        labels.count(NodeLabel::Corner),
        labels.count(NodeLabel::Ridge),
        labels.count(NodeLabel::Smooth)
    ))
}

fn closest_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    use geom::{add, dot, scale, sub};
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(ab, bp), dot(ac, bp));
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return add(a, scale(ab, d1 / (d1 - d3)));
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(ab, cp), dot(ac, cp));
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return add(a, scale(ac, d2 / (d2 - d6)));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return add(b, scale(sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6))));
    }
    let denom = 1.0 / (va + vb + vc);
    add(a, add(scale(ab, vb * denom), scale(ac, vc * denom)))
}

fn distance_to_surface(mesh: &Mesh, p: Vec3) -> f64 {
    let mut best = f64::INFINITY;
    for e in 0..mesh.elements().len() {
        let q = mesh.element_points(e);
        let tris: &[[usize; 3]] = if q.len() == 3 { &[[0, 1, 2]] } else { &[[0, 1, 2], [0, 2, 3]] };
        for t in tris {
            let c = closest_on_triangle(p, q[t[0]], q[t[1]], q[t[2]]);
            best = best.min(geom::norm(geom::sub(p, c)));
        }
    }
    best
}

fn perturbed_cube(div: usize, seed: u64) -> Mesh {
    let cube = meshgen::cube_shell(div).unwrap();
    let mut rng = SplitMix64::new(seed);
    let amp = 0.35 / div as f64;
    let pts: Vec<Vec3> = cube
        .points()
        .into_iter()
        .map(|mut p| {
            if cube_expectation(p) == NodeLabel::Smooth {
                for c in p.iter_mut() {
                    if *c != 0.0 && *c != 1.0 {
                        *c += amp * (rng.next_f64() - 0.5);
                    }
                }
            }
            p
        })
        .collect();
    Mesh::from_points(3, &pts, cube.elements().to_vec()).unwrap()
}

fn surface_fixtures() -> Vec<(String, Mesh)> {
    let mut out = Vec::new();
    for kind in KINDS {
        for lift in [Lift::SinxCosy, Lift::Paraboloid] {
            let spec = GenSpec::new(kind, 12, 12).perturb(0.3).seed(11).lift(lift);
            out.push((format!("{kind:?}/{lift:?}"), meshgen::generate(&spec).unwrap()));
        }
    }
    out.push(("cube 3x3".into(), meshgen::cube_shell(3).unwrap()));
    out.push(("perturbed cube 6x6".into(), perturbed_cube(6, 5)));
    out
}

fn criterion_8() -> Outcome {
    let cfg = SurfaceConfig::default();
    let mut moved_total = 0;
    let mut worst = 0.0f64;
    let fixtures = surface_fixtures();
    for (name, mesh) in &fixtures {
        let labels = classify(mesh, &cfg).map_err(|e| e.to_string())?;
        let r = smooth_surface(mesh, &cfg).map_err(|e| format!("{name}: {e}"))?;
        let diag = mesh.bbox_diagonal();
        for (i, (p0, p1)) in mesh.points().into_iter().zip(r.mesh.points()).enumerate() {
            if labels.is_constrained(i) {
                let same = p0.iter().zip(&p1).all(|(a, b)| a.to_bits() == b.to_bits());
                check(same, || format!("{name}: constrained node {i} moved {p0:?} -> {p1:?}"))?;
            } else if p0 != p1 {
                moved_total += 1;
                let d = distance_to_surface(mesh, p1) / diag;
                worst = worst.max(d);
                check(d <= 1e-9, || format!("{name}: node {i} is {d:e} x diagonal off the surface"))?;
            }
        }
        for e in 0..mesh.elements().len() {
            let n0 = geom::newell_normal(&mesh.element_points(e));
            let n1 = geom::newell_normal(&r.mesh.element_points(e));
            check(geom::dot(n0, n1) > 0.0, || format!("{name}: face {e} inverted"))?;
        }
    }
    check(moved_total > 0, || "no node moved in any fixture".into())?;
    Ok(format!(
        "{} fixtures, {moved_total} moved nodes, max surface distance {worst:.1e} x diagonal",
        fixtures.len()
    ))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for seed in [3, 4, 5] {
        let flat = meshgen::generate(&GenSpec::new(GenKind::TriGrid, 10, 10).perturb(0.3).seed(seed)).unwrap();
        let planar = smooth_planar(&flat, &fixed_steps(Method::Mdm, 10)).map_err(|e| e.to_string())?;
        let cfg = SurfaceConfig {
            eps_mq: 1e-300,
            eps_mse: 1e-300,
            max_iter: 10,
            ..SurfaceConfig::default()
        };
        let surf = smooth_surface(&flat.to_3d(), &cfg).map_err(|e| e.to_string())?;
        check(surf.iterations == 10 && planar.iterations == 10, || {
            format!("iteration counts {} / {}", surf.iterations, planar.iterations)
        })?;
        for (a, b) in surf.mesh.points().into_iter().zip(planar.mesh.points()) {
            worst = worst.max(geom::norm(geom::sub(a, b)));
        }
    }
    check(worst <= 1e-9, || format!("max per-node deviation {worst:e}"))?;
    Ok(format!("3 flat patches x 10 iterations, max per-node deviation {worst:.2e}"))
}

fn all_fixtures() -> Vec<(String, Mesh)> {
    let mut out = surface_fixtures();
    for kind in KINDS {
        let spec = GenSpec::new(kind, 9, 7).perturb(0.3).seed(2);
        out.push((format!("{kind:?}/planar"), meshgen::generate(&spec).unwrap()));
    }
    out.push(("equilateral tiling".into(), meshgen::equilateral_tiling(6, 5).unwrap()));
    out
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixtures = all_fixtures();
    for (i, (name, mesh)) in fixtures.iter().enumerate() {
        for (fmt, ext) in [(MeshFormat::Obj, "obj"), (MeshFormat::Off, "off")] {
            let path = dir.path().join(format!("m{i}.{ext}"));
            io::write_mesh(mesh, &path, fmt).map_err(|e| e.to_string())?;
            let mode = if mesh.dim() == 2 { DimMode::Planar } else { DimMode::Surface };
            let back = io::read_mesh_with(&path, fmt, mode).map_err(|e| e.to_string())?;
            check(back.dim() == mesh.dim() && back.elements() == mesh.elements(), || {
                format!("{name} ({ext}): structure changed")
            })?;
            let exact = back.coords().iter().zip(mesh.coords()).all(|(a, b)| a.to_bits() == b.to_bits());
            check(exact, || format!("{name} ({ext}): coordinates changed"))?;
        }
    }
    let mesh = meshgen::generate(&GenSpec::new(GenKind::QuadDominant, 8, 8).perturb(0.3).seed(9)).unwrap();
    let r = smooth_planar(&mesh, &PlanarConfig::default()).map_err(|e| e.to_string())?;
    let records: Vec<ReportRecord> = r.history.iter().map(ReportRecord::from).collect();
    for (fmt, ext) in [(ReportFormat::Json, "json"), (ReportFormat::Csv, "csv")] {
        let path = dir.path().join(format!("report.{ext}"));
        io::write_report(&records, &path, fmt).map_err(|e| e.to_string())?;
        let back = io::read_report(&path, fmt).map_err(|e| e.to_string())?;
        check(back == records, || format!("{ext} report changed on re-parse"))?;
    }
    Ok(format!("{} fixtures x OBJ/OFF exact; {}-row report JSON/CSV lossless", fixtures.len(), records.len()))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_mdm"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let cases = [
        ("quad-dominant", "none", "planar", "csv"),
        ("tri-grid", "sinx-cosy", "surface", "json"),
        ("quad-grid", "paraboloid", "surface", "csv"),
    ];
    for (k, (kind, lift, mode, rfmt)) in cases.iter().enumerate() {
        let input = p(&format!("in{k}.obj"));
        let gen = run_cli(&[
            "gen", "--kind", kind, "--nx", "14", "--ny", "14", "--perturb", "0.3", "--seed", "5", "--lift", lift,
            "--output", &input,
        ])?;
        check(gen.status.success(), || format!("gen failed: {}", String::from_utf8_lossy(&gen.stderr)))?;
        let mut outputs = Vec::new();
        for threads in ["1", "4", "4"] {
            let tag = format!("{k}_{threads}_{}", outputs.len());
            let (mesh_out, report_out) = (p(&format!("out{tag}.off")), p(&format!("rep{tag}.{rfmt}")));
            let o = run_cli(&[
                "smooth", "--input", &input, "--output", &mesh_out, "--mode", mode, "--report", &report_out,
                "--report-format", rfmt, "--threads", threads,
            ])?;
            check(o.status.code() == Some(0) || o.status.code() == Some(2), || {
                format!("smooth failed: {}", String::from_utf8_lossy(&o.stderr))
            })?;
            let read = |f: &str| std::fs::read(Path::new(f)).map_err(|e| e.to_string());
            outputs.push((read(&mesh_out)?, read(&report_out)?, o.stdout));
        }
        check(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{kind}/{mode}: outputs differ"))?;
    }
    Ok(format!("{} invocations byte-identical across 1 and 4 threads", cases.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", criterion_1),
        ("fixed points", criterion_2),
        ("laplacian coincidence", criterion_3),
        ("equivariance", criterion_4),
        ("quality anchors", criterion_5),
        ("quality improvement trend", criterion_6),
        ("feature detection", criterion_7),
        ("surface constraint preservation", criterion_8),
        ("planar/surface consistency", criterion_9),
        ("i/o round trips", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
