use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NotSimple(usize, usize),
    #[error("degenerate polygon: {0}")]
    Degenerate(String),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("point ({0}, {1}) lies outside the domain")]
    PointOutside(f64, f64),
    #[error("grid would have {0} cells, exceeding the limit of {1}")]
    GridTooLarge(usize, usize),
    #[error("square boundary does not meet the domain boundary")]
    NoBoundaryContact,
    #[error("base point is not on the square boundary and the domain boundary")]
    BasePointInvalid,
    #[error("anchor point is not in the domain")]
    AnchorNotInOmega,
    #[error("anchor point is not on the boundary of the host square")]
    AnchorNotOnBoundaryOfS,
    #[error("grid resolution h={0} too coarse: {1}")]
    ResolutionInsufficient(f64, String),
    #[error("no separating square found; final parameter interval [{0}, {1}]")]
    NotSeparable(f64, f64),
    #[error("chain exceeded {0} squares or fell below the resolution floor")]
    ChainTooLong(usize),
    #[error("hat-square scale collapsed: delta-hat = {0}")]
    DegenerateDelta(f64),
    #[error("connector {0} is not contained in the domain")]
    ConnectorNotInOmega(usize),
    #[error("complement component touches squares {0:?} at h={1}")]
    ComponentTouchesTooMany(Vec<usize>, f64),
    #[error("shrink precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("hat square too large at index {0}")]
    HatTooLarge(usize),
    #[error("path leaves the domain near ({0}, {1})")]
    PathLeavesDomain(f64, f64),
    #[error("endpoints are not grid-connected")]
    Disconnected,
    #[error("source point is outside the narrow path grid")]
    SourceOutsideNarrowPath,
    #[error("no admissible axis-parallel grid path to the query point")]
    PathUnavailable,
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
