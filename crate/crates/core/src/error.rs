use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AngleError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("malformed angle literal {0}")]
    BadLiteral(String),
    #[error("atom `{0}` must have a finite positive value, got {1}")]
    BadAtomValue(String, f64),
    #[error("atom `{0}` declared twice")]
    DuplicateAtom(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("malformed complex document: {0}")]
    Format(String),
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown triangle `{0}`")]
    UnknownTriangle(String),
    #[error("triangle {triangle}: corner angles sum to {sum}, expected π")]
    AngleSumViolation { triangle: usize, sum: String },
    #[error("triangle {triangle}: side/sin(angle) ratios disagree ({ratios:?})")]
    LawOfSinesMismatch { triangle: usize, ratios: [f64; 3] },
    #[error("edge {edge}: lengths {first} and {second} disagree")]
    SharedEdgeLengthMismatch { edge: String, first: f64, second: f64 },
    #[error("not simplicial: {0}")]
    NonSimplicial(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("complex is disconnected; basepoint component misses vertex `{0}`")]
    Disconnected(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge path is not closed or not continuous")]
    BadPath,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoldError {
    #[error("link of vertex `{0}` is not unfoldable")]
    NotUnfoldable(String),
    #[error("folding property violated: {0}")]
    PropertyViolation(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("triangle {0} does not contain edge {1}")]
    TriangleNotIncident(usize, usize),
    #[error("point is not interior to its edge (offset {0})")]
    NotInterior(f64),
    #[error("no path found within budget {0}")]
    BudgetTooSmall(f64),
    #[error("geodesic search requires the complex to be asserted simply connected")]
    NotSimplyConnectedAsserted,
    #[error("pieces do not concatenate at breakpoint {0}")]
    DiscontinuousPath(usize),
    #[error("points coincide")]
    SamePoint,
    #[error("search exceeded {0} states")]
    SearchLimit(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalityError {
    #[error("patch {0} is not orientable")]
    NonOrientablePatch(usize),
    #[error("patch {0} is empty")]
    EmptyPatch(usize),
    #[error("complex is not rational: {0}")]
    NotRational(String),
    #[error("complex is not extrational: {0}")]
    NotExtrational(String),
    #[error("patch {0} has empty boundary")]
    NoBoundary(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("edge {0} has degree {1}; a thick edge needs degree at least 3")]
    NotThick(String, usize),
    #[error("no perpendicular connections within budget {0}")]
    NoConnectionsWithinBudget(f64),
    #[error("connections do not follow the required triangle pattern: {0}")]
    TrianglePatternMismatch(String),
    #[error("connection endpoints do not lie on the chosen edge: {0}")]
    OffsetsNotOnOneEdge(String),
    #[error("sheared check failed for word {0}: {1}")]
    ShearedCheckFailed(String, String),
    #[error("developed endpoints coincide for word {0}")]
    EndpointsCoincide(String),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Group(#[from] GroupError),
}
