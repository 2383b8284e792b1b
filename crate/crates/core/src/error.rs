use thiserror::Error;

/// Failures of the hyperbolic-plane kernel.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({x}, {y}) is not in the upper half-plane")]
    InvalidPoint { x: f64, y: f64 },
    #[error("degenerate geodesic")]
    InvalidGeodesic,
    #[error("length {0} must be positive and finite")]
    InvalidLength(f64),
    #[error("geodesics intersect or share an endpoint at infinity")]
    IntersectingOrAsymptotic,
    #[error("no equidistant point in the bounded region")]
    NoSolution,
    #[error("perpendiculars leave the strip before reaching the second geodesic")]
    InvalidRegion,
}

/// Failures of surface construction and queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("invalid pants decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid Fenchel–Nielsen data: {0}")]
    InvalidCoordinates(String),
    #[error("invalid multicurve: {0}")]
    InvalidMulticurve(String),
    #[error("deflation needs every decomposition curve weighted")]
    PartialSupport,
    #[error("pants {pants} has a figure-eight spine")]
    DegenerateSpine { pants: usize },
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
    #[error("arc widths violate the pants relations: {0}")]
    InconsistentWidths(String),
    #[error("distance net needs {needed} nodes, cap is {cap}")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("point does not belong to this surface: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
