use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-triangular face at line {line}")]
    NonTriangularFace { line: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("non-manifold edge {edge} ({a}, {b}) shared by {count} faces")]
    NonManifoldEdge {
        edge: usize,
        a: usize,
        b: usize,
        count: usize,
    },

    #[error("mesh is not closed: edge ({a}, {b}) has a single incident face")]
    OpenMesh { a: usize, b: usize },

    #[error("genus {found}, require genus 1")]
    Genus { found: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid cut graph: {0}")]
    InvalidCut(String),

    #[error("point ({x}, {y}, {z}) lies {distance:e} from the torus surface")]
    OffSurface {
        x: f64,
        y: f64,
        z: f64,
        distance: f64,
    },

    #[error("degenerate face {face} (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("face {face} has nonpositive area {area:e}")]
    NonPositiveArea { face: usize, area: f64 },

    #[error("linear solver did not converge: {0}")]
    Solver(String),

    #[error("{0}")]
    Folded(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
