use thiserror::Error;

/// Errors raised by the computational modules and the mesh loader.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),

    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),

    #[error("vertex {0} is not on the vertex boundary of the given set")]
    NotOnVertexBoundary(usize),

    #[error("edge ({a}, {b}) has non-positive conductance {value}")]
    NonPositiveConductance { a: usize, b: usize, value: f64 },

    #[error("edge ({0}, {1}) is listed twice or is a loop")]
    InvalidEdge(usize, usize),

    #[error("free vertices containing {0} are not connected to any prescribed vertex")]
    FloatingComponent(usize),

    #[error("boundary data: {0}")]
    BoundaryData(String),

    #[error("no Dirichlet data given")]
    NoDirichletData,

    #[error("linear solver: {0}")]
    Solver(String),

    #[error("consistency condition violated: total boundary flux {flux:e} exceeds {bound:e}")]
    Inconsistent { flux: f64, bound: f64 },

    #[error("point ({x}, {y}) lies outside the complex")]
    OutsideDomain { x: f64, y: f64 },

    #[error("level {value} outside the field range [{min}, {max}]")]
    LevelOutOfRange { value: f64, min: f64, max: f64 },

    #[error("adjacent vertices share a field value on edges {0:?}")]
    EqualAdjacentValues(Vec<(usize, usize)>),

    #[error("curve is not a level curve of the field: {0}")]
    NotALevelCurve(String),

    #[error("slit: {0}")]
    InvalidSlit(String),

    #[error("level curve through {0} could not be traced")]
    LevelTrace(String),

    #[error("values of {what} on the end arc spread by {spread:e}, above {bound:e}")]
    Spread {
        what: &'static str,
        spread: f64,
        bound: f64,
    },

    #[error("levels are not strictly increasing")]
    NonMonotoneLevels,

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("pair-flux length {computed} differs from closed form {expected}")]
    LengthMismatch { computed: f64, expected: f64 },

    #[error("cell ({0}, {1}) has top and base sides off consecutive g-levels")]
    CellNotOnLevels(usize, usize),

    #[error("topology: {0}")]
    Topology(String),

    #[error("the domain has {0} boundary components; a maximal singular curve needs at least three")]
    NotMultiplyConnected(usize),

    #[error("{0} singular level curves enclose every inner boundary component")]
    MaximalCurveCount(usize),

    #[error("vertex {vertex} has neighbor {neighbor} with the same value")]
    ZeroDifference { vertex: usize, neighbor: usize },

    #[error("gluing: {0}")]
    Gluing(String),

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
