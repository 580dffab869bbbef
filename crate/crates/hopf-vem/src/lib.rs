//! Arbitrary-order, C1-conforming virtual element solver for the fourth-order
//! scalar problem
//!
//! ```text
//!   a2 * lap^2 u - a1 * lap u + a0 * u = f   in the unit square,
//!   u = g0,  dn u = g1                       on the boundary,
//! ```
//!
//! discretized on polygonal meshes with vertex value/gradient, edge moment,
//! and cell moment degrees of freedom. The crate provides the mesh families
//! used by the convergence studies, per-cell operator construction (elliptic
//! and L2 projectors, stiffness, mass, load), global assembly with Dirichlet
//! elimination, sparse SPD solvers, and manufactured-solution error studies.

pub mod assembly;
pub mod element;
pub mod geom;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod study;
pub mod verify;

pub use element::ModelCoefficients;
pub use mesh::{MeshFamily, PolyMesh};

/// Errors produced by mesh construction, element building, and solves.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell {cell}: vertex index {index} out of range ({n_vertices} vertices)")]
    VertexIndexOutOfRange {
        cell: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("cell {cell}: polygon has {n} vertices, need at least 3")]
    TooFewVertices { cell: usize, n: usize },
    #[error("cell {cell}: non-simple (self-intersecting or repeated-vertex) polygon")]
    NonSimplePolygon { cell: usize },
    #[error("cell {cell}: clockwise or degenerate vertex loop (signed area {area:.3e})")]
    ClockwiseLoop { cell: usize, area: f64 },
    #[error("cells {first} and {second} are duplicates")]
    DuplicateCell { first: usize, second: usize },
    #[error("vertex {vertex} belongs to no cell")]
    DanglingVertex { vertex: usize },
    #[error("edge ({a}, {b}) is shared by more than two cells")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("mesh has no cells")]
    EmptyMesh,
    #[error("refinement level {level} unsupported (generators cover levels 0..=8)")]
    UnsupportedLevel { level: usize },
    #[error("cell {cell}: fan point violates star-shapedness (triangle {triangle} has area {area:.3e})")]
    NotStarShaped {
        cell: usize,
        triangle: usize,
        area: f64,
    },
    #[error("polynomial order k = {k} unsupported ({reason})")]
    UnsupportedOrder { k: usize, reason: &'static str },
    #[error("invalid model coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("cell {cell}: {matrix} is numerically singular (condition estimate {cond:.3e})")]
    IllConditionedCell {
        cell: usize,
        matrix: &'static str,
        cond: f64,
    },
    #[error("boundary vertex {vertex}: edge-wise gradient reconstruction inconsistent (gap {gap:.3e})")]
    CornerGradientInconsistent { vertex: usize, gap: f64 },
    #[error("solver failed: {0}")]
    SolverFailure(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("mesh file format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
