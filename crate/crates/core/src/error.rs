use crate::mesh::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure is prefixed with the module that raised it so command-line
/// users can tell which stage of the pipeline rejected their input.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mesh: parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("mesh: face {face} is not triangular ({count} vertices)")]
    NonTriangularFace { face: usize, count: usize },

    #[error("mesh: face {face} references vertex {index} but the mesh has {n} vertices")]
    VertexOutOfRange { face: usize, index: usize, n: usize },

    #[error("mesh: face {face} repeats vertex {index}")]
    RepeatedVertex { face: usize, index: usize },

    #[error("mesh: validation failed: {0}")]
    Validation(ValidationReport),

    #[error("mesh: total surface area is zero")]
    ZeroArea,

    #[error("mesh: face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("mesh: unsupported format '{0}' (expected .off or .obj)")]
    UnknownFormat(String),

    #[error("laplacian: face {face} has a degenerate corner {corner} (angle {angle:e} rad)")]
    DegenerateAngle { face: usize, corner: usize, angle: f64 },

    #[error("laplacian: dimension mismatch (expected {expected} rows, got {found})")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("laplacian: {0} index set is empty")]
    EmptyIndexSet(&'static str),

    #[error("laplacian: vertex {0} appears in both the interior and boundary sets")]
    OverlappingIndexSets(usize),

    #[error("laplacian: factorization failed: {0}")]
    Factorization(String),

    #[error("laplacian: linear solve produced a non-finite value at row {0}")]
    NonFiniteSolution(usize),

    #[error("plane: point {index} lies on the projection pole")]
    PolePoint { index: usize },

    #[error("plane: point {index} is not on the unit sphere (norm {norm})")]
    OffSphere { index: usize, norm: f64 },

    #[error("plane: entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("plane: entry {index} is zero and cannot be inverted")]
    ZeroEntry { index: usize },

    #[error("plane: median modulus is zero")]
    ZeroMedian,

    #[error("plane: empty vector")]
    EmptyVector,

    #[error("initial map: {0}")]
    InitialMap(String),

    #[error("dem: partition has an empty interior (rho = {rho} is too small)")]
    EmptyInterior { rho: f64 },

    #[error("dem: partition has an empty boundary (every |h| < rho = {rho})")]
    EmptyBoundary { rho: f64 },

    #[error("dem: invalid radius rho = {0} (must exceed 1)")]
    InvalidRadius(f64),

    #[error("mdem: zero magnitude at boundary index {index} during the {stage} half-step")]
    ZeroMagnitude { index: usize, stage: &'static str },

    #[error("mdem: the boundary-to-boundary operator A2*A1 is reducible")]
    Reducible,

    #[error("mdem: frozen partitions are inconsistent: {0}")]
    InconsistentPartitions(String),

    #[error("mdem: Perron vector entry {index} is not positive ({value:e})")]
    NonPositivePerron { index: usize, value: f64 },

    #[error("{what}: power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    PowerIteration { what: &'static str, iterations: usize, residual: f64 },

    #[error("diagnostics: empty history")]
    EmptyHistory,

    #[error("diagnostics: eta = {0} is outside [0, 1)")]
    InvalidEta(f64),

    #[error("diagnostics: reports come from different meshes ({0} vs {1} vertices)")]
    MismatchedMeshes(usize, usize),

    #[error("diagnostics: image triangle {face} is degenerate")]
    DegenerateImage { face: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
