use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::geom::Point2;
use crate::torus::PeriodicPlanarMesh;
use crate::{Error, Result};

/// A prescribed per-face population.
///
/// Analytic populations are evaluated at the face centroid of the initial
/// planar layout, wrapped into the fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PopulationSpec {
    /// Uniform density: the population of each face equals the area of its
    /// torus image, so the initial modified density is exactly 1.
    Uniform,
    /// The same population `c` on every face.
    Constant(f64),
    /// `2 − cos(u)`.
    CosU,
    /// `1.2 − sin(u)·sin(v)`.
    Sinusoid,
    /// `inside` within planar (periodically wrapped) distance `radius` of
    /// `(u0, v0)`, `outside` elsewhere.
    Ball {
        u0: f64,
        v0: f64,
        radius: f64,
        inside: f64,
        outside: f64,
    },
    /// Explicit values, one per face.
    PerFace(Vec<f64>),
    /// Values read from a `face_index,value` CSV file.
    Csv(PathBuf),
}

impl PopulationSpec {
    /// Per-face population of `mesh` in its current layout.
    pub fn evaluate(&self, mesh: &PeriodicPlanarMesh) -> Result<Vec<f64>> {
        let nf = mesh.num_faces();
        let spec = mesh.spec;
        let analytic = |f: &dyn Fn(Point2) -> f64| -> Vec<f64> {
            mesh.centroids().into_iter().map(f).collect()
        };
        let values = match self {
            PopulationSpec::Uniform => mesh.image_areas(),
            PopulationSpec::Constant(c) => vec![*c; nf],
            PopulationSpec::CosU => analytic(&|p| 2.0 - p[0].cos()),
            PopulationSpec::Sinusoid => analytic(&|p| 1.2 - p[0].sin() * p[1].sin()),
            PopulationSpec::Ball {
                u0,
                v0,
                radius,
                inside,
                outside,
            } => {
                let (w, h) = (spec.width(), spec.height());
                let wrap = |d: f64, period: f64| d - period * (d / period).round();
                analytic(&|p| {
                    let du = wrap(p[0] - u0, w);
                    let dv = wrap(p[1] - v0, h);
                    if du.hypot(dv) < *radius {
                        *inside
                    } else {
                        *outside
                    }
                })
            }
            PopulationSpec::PerFace(v) => v.clone(),
            PopulationSpec::Csv(path) => load_population_csv(path, nf)?,
        };
        validate_population(&values, nf)?;
        Ok(values)
    }
}

/// Checks length, finiteness and positivity.
pub fn validate_population(values: &[f64], num_faces: usize) -> Result<()> {
    if values.len() != num_faces {
        return Err(Error::InvalidParameter(format!(
            "population has {} entries, mesh has {num_faces} faces",
            values.len()
        )));
    }
    match values
        .iter()
        .enumerate()
        .find(|(_, &p)| !(p.is_finite() && p > 0.0))
    {
        Some((i, p)) => Err(Error::InvalidParameter(format!(
            "population must be positive, face {i} has {p}"
        ))),
        None => Ok(()),
    }
}

/// Reads `face_index,value` rows. A non-numeric first row is taken as a header;
/// every face must appear exactly once.
pub fn load_population_csv(path: &Path, num_faces: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = vec![f64::NAN; num_faces];
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (idx, val) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        let (Ok(i), Ok(v)) = (idx.parse::<usize>(), val.parse::<f64>()) else {
            if k == 0 {
                continue;
            }
            return Err(Error::Parse {
                line: k + 1,
                message: format!("expected face_index,value, got '{line}'"),
            });
        };
        if i >= num_faces {
            return Err(Error::Parse {
                line: k + 1,
                message: format!("face index {i} out of range"),
            });
        }
        if !values[i].is_nan() {
            return Err(Error::Parse {
                line: k + 1,
                message: format!("face {i} listed twice"),
            });
        }
        values[i] = v;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(format!(
            "population file has no value for face {i}"
        )));
    }
    Ok(values)
}

impl FromStr for PopulationSpec {
    type Err = Error;

    /// Parses `uniform`, `constant:C`, `cos_u`, `sinusoid`,
    /// `ball:u0,v0,radius,inside,outside` or `csv:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let bad = || Error::InvalidParameter(format!("unknown population '{s}'"));
        match name {
            "uniform" if args.is_empty() => Ok(PopulationSpec::Uniform),
            "cos_u" if args.is_empty() => Ok(PopulationSpec::CosU),
            "sinusoid" if args.is_empty() => Ok(PopulationSpec::Sinusoid),
            "constant" => {
                let c: f64 = args.parse().map_err(|_| bad())?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "population must be positive, got {c}"
                    )));
                }
                Ok(PopulationSpec::Constant(c))
            }
            "ball" => {
                let v: Vec<f64> = args
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                let [u0, v0, radius, inside, outside] = v[..] else {
                    return Err(Error::InvalidParameter(
                        "ball needs u0,v0,radius,inside,outside".into(),
                    ));
                };
                if !(radius > 0.0 && inside > 0.0 && outside > 0.0) {
                    return Err(Error::InvalidParameter(
                        "ball radius and populations must be positive".into(),
                    ));
                }
                Ok(PopulationSpec::Ball {
                    u0,
                    v0,
                    radius,
                    inside,
                    outside,
                })
            }
            "csv" if !args.is_empty() => Ok(PopulationSpec::Csv(PathBuf::from(args))),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PopulationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationSpec::Uniform => write!(f, "uniform"),
            PopulationSpec::Constant(c) => write!(f, "constant:{c}"),
            PopulationSpec::CosU => write!(f, "cos_u"),
            PopulationSpec::Sinusoid => write!(f, "sinusoid"),
            PopulationSpec::Ball {
                u0,
                v0,
                radius,
                inside,
                outside,
            } => write!(f, "ball:{u0},{v0},{radius},{inside},{outside}"),
            PopulationSpec::PerFace(v) => write!(f, "per-face[{}]", v.len()),
            PopulationSpec::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}
