use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NilError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no seed converged to the geodesic endpoint (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },

    #[error("required arc length {required} exceeds the model range 2π")]
    OutOfModelRange { required: f64 },

    #[error("sphere radius {radius} outside (0, 2π]; geodesic spheres exist only for R ≤ 2π")]
    RadiusOutOfRange { radius: f64 },

    #[error("geodesic triangle is not contained in a ball of radius π about A0 (max vertex distance {max_distance})")]
    TriangleTooLarge { max_distance: f64 },

    #[error("points are not pairwise distinct")]
    DuplicatePoints,

    #[error("target is {distance:e} away from the arc")]
    TargetNotOnArc { distance: f64 },

    #[error("arc winds a full turn or more; lift is ambiguous")]
    ArcAmbiguous,

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("no sign change of the field inside the sampling box")]
    EmptySurface,

    #[error("ratio constraints infeasible (residual {residual:e})")]
    EmptyIntersection { residual: f64 },

    #[error("point is not on the geodesic line (residual {residual:e})")]
    NotOnLine { residual: f64 },

    #[error("both points are midpoints; use the midpoint construction")]
    BothMidpoints,

    #[error("point is not on the triangle surface (deviation {deviation:e})")]
    NotOnSurface { deviation: f64 },

    #[error("no surface point over the arc between parameters {from} and {to}")]
    ArcSurfaceMiss { from: f64, to: f64 },

    #[error("projected cevian arcs do not meet inside the projected triangle")]
    NoArcIntersection,

    #[error("third cevian misses T* by {miss:e}")]
    ThirdCevianMiss { miss: f64 },

    #[error("fibre-type triangle: projected triangle is degenerate")]
    DegenerateProjection,
}

pub type Result<T> = std::result::Result<T, NilError>;
