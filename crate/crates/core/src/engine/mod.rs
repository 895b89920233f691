//! The toroidal density-equalizing map.
//!
//! Each iteration diffuses the vertex density on the periodic planar mesh,
//! moves the vertices along `v = −∇ρ/ρ`, repairs folds, and recomputes the face
//! density from the prescribed population and the updated torus-image areas.
//! The loop stops once the density error `std/mean` of the face density falls
//! below the threshold.

mod overlap;
mod population;

pub use overlap::{correct_overlaps, OverlapOutcome};
pub use population::{load_population_csv, validate_population, PopulationSpec};

use std::time::Instant;

use crate::geom::Point2;
use crate::mesh::{CutGraph, TriangleMesh};
use crate::ops::{
    backward_euler_step, cotangent_laplacian, face_gradient, face_to_vertex, lumped_mass,
    DensityField, QuotientGeometry,
};
use crate::torus::{flatten_torus_mesh, PeriodicPlanarMesh, TorusSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TdemConfig {
    pub dt: f64,
    pub epsilon: f64,
    pub n_max: usize,
    pub overlap_correction: bool,
    pub seam_tolerance: f64,
    /// Largest number of rings grown around folded faces during correction.
    pub max_overlap_rings: usize,
    /// Halvings of the step tried when folds survive correction.
    pub max_backtracks: usize,
}

impl Default for TdemConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            epsilon: 1e-3,
            n_max: 1000,
            overlap_correction: true,
            seam_tolerance: 1e-9,
            max_overlap_rings: 10,
            max_backtracks: 30,
        }
    }
}

impl TdemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(self.seam_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "seam tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Diagnostics of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `std/mean` of the recoupled face density.
    pub density_error: f64,
    /// Variance of the face density normalized to mean 1.
    pub variance: f64,
    /// Density error with faces weighted by their torus-image area.
    pub weighted_error: f64,
    /// Normalized variance of the vertex density `M·ρ̃`.
    pub vertex_variance: f64,
    pub max_displacement: f64,
    pub folds_before: usize,
    pub folds_after: usize,
    /// Fraction of the full step taken after backtracking.
    pub step_scale: f64,
    pub seam_residual: f64,
    /// `1ᵀAρ` before and after the diffusion solve.
    pub mass_before: f64,
    pub mass_after: f64,
    pub solver_iterations: usize,
}

impl IterationRecord {
    pub fn conservation_error(&self) -> f64 {
        (self.mass_after - self.mass_before).abs() / self.mass_before.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TdemReport {
    pub records: Vec<IterationRecord>,
    pub initial_error: f64,
    pub initial_variance: f64,
    /// Error and variance of the returned iterate.
    pub final_error: f64,
    pub final_variance: f64,
    /// Normalized variances of the vertex density `M·ρ̃`.
    ///
    /// The face density keeps a small checkerboard component between the two
    /// triangles of a grid cell that vertex motion cannot remove; the vertex
    /// density does not see it.
    pub initial_vertex_variance: f64,
    pub final_vertex_variance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Iteration whose state is returned (0 for the input).
    pub best_iteration: usize,
    /// Largest displacement of any vertex from its input position.
    pub total_max_displacement: f64,
    pub wall_time_secs: f64,
}

impl TdemReport {
    pub fn max_conservation_error(&self) -> f64 {
        self.records
            .iter()
            .map(IterationRecord::conservation_error)
            .fold(0.0, f64::max)
    }

    pub fn max_seam_residual(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.seam_residual)
            .fold(0.0, f64::max)
    }

    pub fn unresolved_folds(&self) -> usize {
        self.records.iter().map(|r| r.folds_after).sum()
    }

    /// One CSV row per iteration, with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "iteration,density_error,variance,weighted_error,vertex_variance,max_displacement,folds_before,folds_after,step_scale,seam_residual,mass_before,mass_after,solver_iterations\n",
        );
        for r in &self.records {
            s.push_str(&format!(
                "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{},{},{},{:.3e},{:.15e},{:.15e},{}\n",
                r.iteration,
                r.density_error,
                r.variance,
                r.weighted_error,
                r.vertex_variance,
                r.max_displacement,
                r.folds_before,
                r.folds_after,
                r.step_scale,
                r.seam_residual,
                r.mass_before,
                r.mass_after,
                r.solver_iterations
            ));
        }
        s
    }
}

/// Result of a TDEM run.
#[derive(Debug, Clone)]
pub struct TdemRun {
    /// Final planar layout `g`.
    pub planar: PeriodicPlanarMesh,
    /// Final mesh on the torus, with the input connectivity.
    pub mapped: TriangleMesh,
    pub density: DensityField,
    pub report: TdemReport,
}

/// `std/mean` with the population standard deviation.
pub fn density_error(rho: &[f64]) -> f64 {
    let n = rho.len() as f64;
    let mean = rho.iter().sum::<f64>() / n;
    let var = rho.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Variance of `rho / mean(rho)`; equals `density_error(rho)²`.
pub fn normalized_variance(rho: &[f64]) -> f64 {
    let e = density_error(rho);
    e * e
}

fn weighted_error(rho: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let mean = rho.iter().zip(w).map(|(r, w)| r * w).sum::<f64>() / total;
    let var = rho
        .iter()
        .zip(w)
        .map(|(r, w)| w * (r - mean) * (r - mean))
        .sum::<f64>()
        / total;
    var.sqrt() / mean
}

/// Modified density `ρ̃(T) = P(T) / Area(φ(T))` of the current layout.
pub fn initial_modified_density(
    mesh: &PeriodicPlanarMesh,
    population: &[f64],
) -> Result<DensityField> {
    validate_population(population, mesh.num_faces())?;
    let geom = QuotientGeometry::from_periodic(mesh);
    let m = face_to_vertex(&geom)?;
    DensityField::new(population.to_vec(), mesh.image_areas(), &m)
}

/// One iteration: diffusion, advection, fold repair and recoupling.
///
/// `mesh` and `density` are updated in place.
pub fn tdem_iteration(
    mesh: &mut PeriodicPlanarMesh,
    density: &mut DensityField,
    config: &TdemConfig,
    iteration: usize,
) -> Result<IterationRecord> {
    let geom = QuotientGeometry::from_periodic(mesh);
    let a = lumped_mass(&geom)?;
    let l = cotangent_laplacian(&geom)?;
    let m = face_to_vertex(&geom)?;
    let rho = m.mul_vec(&density.face_density);

    let step = backward_euler_step(&a, &l, &rho, config.dt)?;
    let rho_new = &step.density;
    if let Some(i) = rho_new.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Solver(format!(
            "diffused density became nonpositive at vertex {i}"
        )));
    }
    let grad_faces = face_gradient(&geom, rho_new)?;
    let grad = m.mul_vec2(&grad_faces);
    let displacement: Vec<Point2> = grad
        .iter()
        .zip(rho_new)
        .map(|(g, &r)| [-g[0] / r * config.dt, -g[1] / r * config.dt])
        .collect();

    let start = mesh.quotient_positions();
    let mut scale = 1.0;
    let mut folds_before = None;
    let mut folds_after;
    let mut backtracks = 0;
    loop {
        let x: Vec<Point2> = start
            .iter()
            .zip(&displacement)
            .map(|(p, d)| [p[0] + scale * d[0], p[1] + scale * d[1]])
            .collect();
        mesh.set_quotient_positions(&x);
        let folds = mesh.count_folds();
        folds_before.get_or_insert(folds);
        folds_after = folds;
        if folds > 0 && config.overlap_correction {
            folds_after = correct_overlaps(mesh, config.max_overlap_rings)?.folds_after;
        }
        if folds_after == 0 || backtracks >= config.max_backtracks {
            break;
        }
        backtracks += 1;
        scale *= 0.5;
    }
    if folds_after > 0 {
        // every reduced step still folds: stay at the previous layout
        mesh.set_quotient_positions(&start);
        scale = 0.0;
        folds_after = mesh.count_folds();
    }

    let end = mesh.quotient_positions();
    let max_displacement = start
        .iter()
        .zip(&end)
        .map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1]))
        .fold(0.0, f64::max);
    let seam_residual = mesh.max_seam_residual();
    if seam_residual > config.seam_tolerance {
        return Err(Error::InvalidCut(format!(
            "seam residual {seam_residual:e} exceeds tolerance after iteration {iteration}"
        )));
    }

    let geom = QuotientGeometry::from_periodic(mesh);
    let m = face_to_vertex(&geom)?;
    *density = DensityField::new(
        std::mem::take(&mut density.population),
        mesh.image_areas(),
        &m,
    )?;
    let density_error = density_error(&density.face_density);
    Ok(IterationRecord {
        iteration,
        density_error,
        variance: density_error * density_error,
        weighted_error: weighted_error(&density.face_density, &density.reference_areas),
        vertex_variance: normalized_variance(&density.vertex_density),
        max_displacement,
        folds_before: folds_before.unwrap_or(0),
        folds_after,
        step_scale: scale,
        seam_residual,
        mass_before: step.mass_before,
        mass_after: step.mass_after,
        solver_iterations: step.solver.iterations,
    })
}

/// Runs the iteration on an already flattened torus mesh.
///
/// Iterates while the face-density error is at least `epsilon` and fewer than
/// `n_max` iterations have run. If the threshold is never reached, the
/// iterate with the lowest error is returned and `converged` is false.
pub fn run_tdem_planar(
    planar: PeriodicPlanarMesh,
    population: &[f64],
    config: &TdemConfig,
) -> Result<TdemRun> {
    config.validate()?;
    let started = Instant::now();
    let input = planar.quotient_positions();
    let mut mesh = planar;
    let mut density = initial_modified_density(&mesh, population)?;
    let initial_error = density_error(&density.face_density);

    let mut report = TdemReport {
        initial_error,
        initial_variance: initial_error * initial_error,
        initial_vertex_variance: normalized_variance(&density.vertex_density),
        ..Default::default()
    };
    let mut best = (
        initial_error,
        0usize,
        mesh.positions.clone(),
        density.clone(),
    );
    let mut error = initial_error;
    let mut n = 0;
    while error >= config.epsilon && n < config.n_max {
        n += 1;
        let rec = tdem_iteration(&mut mesh, &mut density, config, n)?;
        error = rec.density_error;
        report.records.push(rec);
        if error < best.0 {
            best = (error, n, mesh.positions.clone(), density.clone());
        }
    }
    report.iterations = n;
    report.converged = error < config.epsilon;
    if !report.converged && best.1 != n {
        mesh.positions = best.2;
        density = best.3;
    }
    report.best_iteration = if report.converged { n } else { best.1 };
    report.final_error = density_error(&density.face_density);
    report.final_variance = report.final_error * report.final_error;
    report.final_vertex_variance = normalized_variance(&density.vertex_density);
    report.total_max_displacement = input
        .iter()
        .zip(mesh.quotient_positions())
        .map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1]))
        .fold(0.0, f64::max);
    report.wall_time_secs = started.elapsed().as_secs_f64();

    let mapped = mapped_mesh(&mesh);
    Ok(TdemRun {
        planar: mesh,
        mapped,
        density,
        report,
    })
}

/// The torus image of a planar layout with the uncut connectivity.
pub fn mapped_mesh(planar: &PeriodicPlanarMesh) -> TriangleMesh {
    let origin = &planar.seams.origin;
    TriangleMesh {
        vertices: planar.torus_points(),
        faces: planar.faces.iter().map(|f| f.map(|v| origin[v])).collect(),
        population: None,
    }
}

/// Flattens a torus mesh with `φ⁻¹`, runs the iteration and maps the result back with `φ`.
///
/// The returned mesh keeps the vertex order and face winding of `mesh`.
pub fn run_tdem(
    mesh: &TriangleMesh,
    spec: &TorusSpec,
    population: &PopulationSpec,
    cut: Option<&CutGraph>,
    config: &TdemConfig,
) -> Result<TdemRun> {
    config.validate()?;
    let (planar, _flipped) = flatten_torus_mesh(mesh, spec, cut)?;
    let values = population.evaluate(&planar)?;
    let mut run = run_tdem_planar(planar, &values, config)?;
    run.mapped.faces = mesh.faces.clone();
    run.mapped.population = Some(values);
    Ok(run)
}
