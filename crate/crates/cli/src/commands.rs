use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use tdem_core::engine::{initial_modified_density, normalized_variance, TdemReport};
use tdem_core::mesh::{
    compute_cut_graph, generate_torus_mesh, load_mesh, save_mesh, save_obj_with_seam_uv, CutGraph,
    MeshFormat, TriangleMesh,
};
use tdem_core::param::{
    area_distortion, area_preserving_population, run_parameterization, AreaDistortion,
    HarmonicWeights, Parameterization,
};
use tdem_core::torus::{flatten_torus_mesh, infer_torus_spec, PeriodicPlanarMesh, TorusSpec};
use tdem_core::{run_tdem, PopulationSpec, TdemConfig};

use crate::config::ConfigFile;
use crate::{Failure, IterationArgs, MakeTorusArgs, MetricsArgs, ParameterizeArgs, TdemArgs};

const ITERATION_KEYS: [&str; 6] = [
    "dt",
    "epsilon",
    "nmax",
    "no-overlap-correction",
    "strict",
    "cut-base",
];

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::invalid(format!("missing required --{flag}")))
}

fn mesh_format(path: &Path) -> Result<MeshFormat, Failure> {
    MeshFormat::from_path(path).ok_or_else(|| {
        Failure::invalid(format!("{}: expected a .obj or .ply file", path.display()))
    })
}

fn read_mesh(path: &Path) -> Result<TriangleMesh, Failure> {
    Ok(load_mesh(path, mesh_format(path)?)?)
}

fn mesh_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `<prefix><suffix>`, creating the parent directory.
fn output_path(prefix: &Path, suffix: &str) -> Result<PathBuf, Failure> {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    let path = PathBuf::from(s);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(path)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn sidecar_path(mesh: &Path) -> PathBuf {
    mesh.with_extension("uv.csv")
}

fn iteration_config(
    a: &IterationArgs,
    cfg: &ConfigFile,
) -> Result<(TdemConfig, bool, Option<usize>), Failure> {
    let defaults = TdemConfig::default();
    let config = TdemConfig {
        dt: cfg.pick(a.dt, "dt")?.unwrap_or(defaults.dt),
        epsilon: cfg.pick(a.epsilon, "epsilon")?.unwrap_or(defaults.epsilon),
        n_max: cfg.pick(a.nmax, "nmax")?.unwrap_or(defaults.n_max),
        overlap_correction: !cfg.switch(a.no_overlap_correction, "no-overlap-correction")?,
        ..defaults
    };
    config.validate()?;
    Ok((
        config,
        cfg.switch(a.strict, "strict")?,
        cfg.pick(a.cut_base, "cut-base")?,
    ))
}

fn cut_for(mesh: &TriangleMesh, base: Option<usize>) -> Result<Option<CutGraph>, Failure> {
    match base {
        None => Ok(None),
        Some(b) if b >= mesh.num_vertices() => Err(Failure::invalid(format!(
            "cut base {b} out of range for {} vertices",
            mesh.num_vertices()
        ))),
        Some(b) => Ok(Some(compute_cut_graph(mesh, Some(b))?)),
    }
}

/// Torus radii from both flags, else the mesh sidecar, else a fit to the vertices.
fn torus_spec(
    major: Option<f64>,
    minor: Option<f64>,
    mesh_path: &Path,
    mesh: &TriangleMesh,
) -> Result<TorusSpec, Failure> {
    match (major, minor) {
        (Some(r1), Some(r2)) => Ok(TorusSpec::new(r1, r2)?),
        (None, None) => match read_sidecar(&sidecar_path(mesh_path))? {
            Some(spec) => Ok(spec),
            None => Ok(infer_torus_spec(&mesh.vertices)?),
        },
        _ => Err(Failure::invalid("give both --major and --minor or neither")),
    }
}

fn read_sidecar(path: &Path) -> Result<Option<TorusSpec>, Failure> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(None);
    };
    let header = text.lines().next().unwrap_or("");
    let field = |name: &str| -> Option<f64> {
        header
            .trim_start_matches('#')
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix(name)?.strip_prefix('=')?.parse().ok())
    };
    match (field("major"), field("minor")) {
        (Some(r1), Some(r2)) => Ok(Some(TorusSpec::new(r1, r2)?)),
        _ => Err(Failure::invalid(format!(
            "{}: first line must be '# major=R minor=r ...'",
            path.display()
        ))),
    }
}

pub fn make_torus(a: MakeTorusArgs, cfg: &ConfigFile) -> Result<u8, Failure> {
    cfg.check_keys(&["major", "minor", "nu", "nv", "out"])?;
    let major = cfg.pick(a.major, "major")?.unwrap_or(3.0);
    let minor = cfg.pick(a.minor, "minor")?.unwrap_or(1.0);
    let nu = cfg.pick(a.nu, "nu")?.unwrap_or(102);
    let nv = cfg.pick(a.nv, "nv")?.unwrap_or(34);
    let out = required(cfg.pick(a.out, "out")?, "out")?;
    let format = mesh_format(&out)?;
    let (mesh, grid) = generate_torus_mesh(major, minor, nu, nv)?;

    let mut csv = format!("# major={major} minor={minor} nu={nu} nv={nv}\nvertex,u,v\n");
    for (i, p) in grid.uv.iter().enumerate() {
        let _ = writeln!(csv, "{i},{:.16e},{:.16e}", p[0], p[1]);
    }
    let out = output_path(&out, "")?;
    save_mesh(&mesh, &out, format, None)?;
    write_text(&sidecar_path(&out), &csv)?;
    println!(
        "{}",
        json!({
            "command": "make-torus",
            "mesh": out.display().to_string(),
            "major": major,
            "minor": minor,
            "vertices": mesh.num_vertices(),
            "faces": mesh.num_faces(),
        })
    );
    Ok(0)
}

fn planar_as_mesh(planar: &PeriodicPlanarMesh) -> TriangleMesh {
    TriangleMesh {
        vertices: planar.positions.iter().map(|p| [p[0], p[1], 0.0]).collect(),
        faces: planar.faces.clone(),
        population: None,
    }
}

fn warn_unconverged(report: &TdemReport, config: &TdemConfig, strict: bool) -> u8 {
    if report.converged {
        return 0;
    }
    eprintln!(
        "warning: density error {:.3e} did not reach {:e} within {} iterations; returning iteration {}",
        report.final_error, config.epsilon, config.n_max, report.best_iteration
    );
    if strict {
        3
    } else {
        0
    }
}

pub fn tdem(a: TdemArgs, cfg: &ConfigFile) -> Result<u8, Failure> {
    let mut keys = vec!["mesh", "major", "minor", "population", "out-prefix"];
    keys.extend(ITERATION_KEYS);
    cfg.check_keys(&keys)?;
    let mesh_path = required(cfg.pick(a.mesh, "mesh")?, "mesh")?;
    let population: PopulationSpec =
        required(cfg.pick(a.population, "population")?, "population")?.parse()?;
    let prefix = required(cfg.pick(a.out_prefix, "out-prefix")?, "out-prefix")?;
    let (config, strict, cut_base) = iteration_config(&a.iteration, cfg)?;
    let major = cfg.pick(a.major, "major")?;
    let minor = cfg.pick(a.minor, "minor")?;
    let mesh = read_mesh(&mesh_path)?;
    let spec = torus_spec(major, minor, &mesh_path, &mesh)?;
    let cut = cut_for(&mesh, cut_base)?;

    let run = run_tdem(&mesh, &spec, &population, cut.as_ref(), &config)?;
    let r = &run.report;

    save_mesh(
        &run.mapped,
        &output_path(&prefix, ".mapped.obj")?,
        MeshFormat::Obj,
        None,
    )?;
    save_mesh(
        &planar_as_mesh(&run.planar),
        &output_path(&prefix, ".planar.obj")?,
        MeshFormat::Obj,
        None,
    )?;
    write_text(&output_path(&prefix, ".report.csv")?, &r.to_csv())?;
    let mut density = String::from("face,population,reference_area,density\n");
    for (f, ((p, a), d)) in run
        .density
        .population
        .iter()
        .zip(&run.density.reference_areas)
        .zip(&run.density.face_density)
        .enumerate()
    {
        let _ = writeln!(density, "{f},{p:.16e},{a:.16e},{d:.16e}");
    }
    write_text(&output_path(&prefix, ".density.csv")?, &density)?;

    println!(
        "{}",
        json!({
            "command": "tdem",
            "mesh": mesh_name(&mesh_path),
            "population": population.to_string(),
            "major": spec.major,
            "minor": spec.minor,
            "faces": mesh.num_faces(),
            "var_initial": r.initial_vertex_variance,
            "var_final": r.final_vertex_variance,
            "face_var_initial": r.initial_variance,
            "face_var_final": r.final_variance,
            "error_initial": r.initial_error,
            "error_final": r.final_error,
            "iterations": r.iterations,
            "best_iteration": r.best_iteration,
            "converged": r.converged,
            "max_conservation_error": r.max_conservation_error(),
            "max_seam_residual": r.max_seam_residual(),
            "max_displacement": r.total_max_displacement,
            "unresolved_folds": r.unresolved_folds(),
            "time_s": r.wall_time_secs,
        })
    );
    Ok(warn_unconverged(r, &config, strict))
}

fn save_parameterization(p: &Parameterization, path: &Path) -> Result<(), Failure> {
    let uv = p.normalized_uv();
    Ok(save_obj_with_seam_uv(
        &p.mapped(),
        &uv,
        &p.planar.faces,
        path,
    )?)
}

fn histogram_csv(columns: &[(&str, &AreaDistortion)]) -> String {
    let edges = AreaDistortion::bin_edges();
    let width = edges[1] - edges[0];
    let mut s = String::from("bin_start,bin_end");
    for (name, _) in columns {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (b, lo) in edges.iter().enumerate() {
        let _ = write!(s, "{lo:.2},{:.2}", lo + width);
        for (_, d) in columns {
            let _ = write!(s, ",{}", d.histogram[b]);
        }
        s.push('\n');
    }
    s
}

pub fn parameterize(a: ParameterizeArgs, cfg: &ConfigFile) -> Result<u8, Failure> {
    let mut keys = vec![
        "mesh",
        "major",
        "minor",
        "population",
        "weights",
        "out-prefix",
    ];
    keys.extend(ITERATION_KEYS);
    cfg.check_keys(&keys)?;
    let mesh_path = required(cfg.pick(a.mesh, "mesh")?, "mesh")?;
    let prefix = required(cfg.pick(a.out_prefix, "out-prefix")?, "out-prefix")?;
    let spec = TorusSpec::new(
        cfg.pick(a.major, "major")?.unwrap_or(2.0),
        cfg.pick(a.minor, "minor")?.unwrap_or(1.0),
    )?;
    let weights: HarmonicWeights = cfg
        .pick(a.weights, "weights")?
        .unwrap_or_else(|| "uniform".into())
        .parse()?;
    let population = cfg
        .pick(a.population, "population")?
        .unwrap_or_else(|| "area".into());
    let (config, strict, cut_base) = iteration_config(&a.iteration, cfg)?;
    let mesh = read_mesh(&mesh_path)?;
    let values = match population.split_once(':') {
        None if population == "area" => area_preserving_population(&mesh),
        None if population == "uniform" => vec![1.0; mesh.num_faces()],
        Some(("csv", path)) => {
            tdem_core::engine::load_population_csv(Path::new(path), mesh.num_faces())?
        }
        _ => {
            return Err(Failure::invalid(format!(
                "unknown population '{population}', expected area, uniform or csv:PATH"
            )))
        }
    };
    let cut = cut_for(&mesh, cut_base)?;

    let started = Instant::now();
    let run = run_parameterization(&mesh, &spec, &values, cut.as_ref(), weights, &config)?;
    let elapsed = started.elapsed().as_secs_f64();
    let dh = area_distortion(&mesh, &run.initial.mapped())?;
    let df = area_distortion(&mesh, &run.result.mapped())?;

    save_parameterization(&run.result, &output_path(&prefix, ".obj")?)?;
    save_parameterization(&run.initial, &output_path(&prefix, ".initial.obj")?)?;
    let mut darea = String::from("face,initial,final\n");
    for (f, (h, g)) in dh.per_face.iter().zip(&df.per_face).enumerate() {
        let _ = writeln!(darea, "{f},{h:.16e},{g:.16e}");
    }
    write_text(&output_path(&prefix, ".darea.csv")?, &darea)?;
    write_text(
        &output_path(&prefix, ".histogram.csv")?,
        &histogram_csv(&[("initial", &dh), ("final", &df)]),
    )?;
    write_text(&output_path(&prefix, ".report.csv")?, &run.report.to_csv())?;

    let improvement = if dh.mean_abs > 0.0 {
        100.0 * (1.0 - df.mean_abs / dh.mean_abs)
    } else {
        0.0
    };
    println!(
        "{}",
        json!({
            "command": "parameterize",
            "mesh": mesh_name(&mesh_path),
            "population": population,
            "major": spec.major,
            "minor": spec.minor,
            "faces": mesh.num_faces(),
            "weights": run.initial.weights.to_string(),
            "mean_abs_darea_initial": dh.mean_abs,
            "mean_abs_darea_final": df.mean_abs,
            "improvement_pct": improvement,
            "iterations": run.report.iterations,
            "converged": run.report.converged,
            "folds": run.result.planar.count_folds(),
            "time_s": elapsed,
        })
    );
    Ok(warn_unconverged(&run.report, &config, strict))
}

pub fn metrics(a: MetricsArgs, cfg: &ConfigFile) -> Result<u8, Failure> {
    cfg.check_keys(&[
        "source",
        "mapped",
        "major",
        "minor",
        "population",
        "out-prefix",
    ])?;
    let source_path = required(cfg.pick(a.source, "source")?, "source")?;
    let mapped_path = required(cfg.pick(a.mapped, "mapped")?, "mapped")?;
    let population: Option<String> = cfg.pick(a.population, "population")?;
    let prefix: Option<PathBuf> = cfg.pick(a.out_prefix, "out-prefix")?;
    let major = cfg.pick(a.major, "major")?;
    let minor = cfg.pick(a.minor, "minor")?;
    let source = read_mesh(&source_path)?;
    let mapped = read_mesh(&mapped_path)?;
    if source.faces != mapped.faces || source.num_vertices() != mapped.num_vertices() {
        return Err(Failure::invalid(
            "source and mapped meshes have different connectivity",
        ));
    }
    let d = area_distortion(&source, &mapped)?;
    let mut summary = json!({
        "command": "metrics",
        "source": mesh_name(&source_path),
        "mapped": mesh_name(&mapped_path),
        "faces": source.num_faces(),
        "mean_abs_darea": d.mean_abs,
    });

    // Torus checks only apply when the mapped mesh lies on a torus.
    let spec = torus_spec(major, minor, &mapped_path, &mapped);
    match (&spec, &population) {
        (Err(e), Some(_)) => return Err(Failure::invalid(format!("mapped mesh: {}", e.message))),
        (Err(_), None) => {}
        (Ok(spec), _) => {
            let (planar, _) = flatten_torus_mesh(&mapped, spec, None)?;
            summary["major"] = json!(spec.major);
            summary["minor"] = json!(spec.minor);
            summary["max_seam_residual"] = json!(planar.max_seam_residual());
            summary["folds"] = json!(planar.count_folds());
            if let Some(p) = &population {
                let values = if p == "area" {
                    area_preserving_population(&source)
                } else {
                    let pop: PopulationSpec = p.parse()?;
                    let source_spec = infer_torus_spec(&source.vertices).map_err(|e| {
                        Failure::invalid(format!("population '{p}' needs a source on a torus: {e}"))
                    })?;
                    let (source_planar, _) = flatten_torus_mesh(&source, &source_spec, None)?;
                    pop.evaluate(&source_planar)?
                };
                let density = initial_modified_density(&planar, &values)?;
                summary["population"] = json!(p);
                summary["var"] = json!(normalized_variance(&density.vertex_density));
                summary["face_var"] = json!(normalized_variance(&density.face_density));
            }
        }
    }

    if let Some(prefix) = prefix {
        let mut darea = String::from("face,d_area\n");
        for (f, v) in d.per_face.iter().enumerate() {
            let _ = writeln!(darea, "{f},{v:.16e}");
        }
        write_text(&output_path(&prefix, ".darea.csv")?, &darea)?;
        write_text(
            &output_path(&prefix, ".histogram.csv")?,
            &histogram_csv(&[("count", &d)]),
        )?;
    }
    println!("{summary}");
    Ok(0)
}
