use nil_geometry::NilError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Geometry(#[from] NilError),
    #[error("{0}")]
    Io(String),
    /// One or more verification checks failed.
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl CliError {
    /// 2 invalid input, 3 numerical failure, 4 bound violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Checks(_) => 3,
            CliError::Geometry(e) => match e {
                NilError::InvalidParameter(_)
                | NilError::DuplicatePoints
                | NilError::InvalidResolution(_)
                | NilError::NotOnLine { .. }
                | NilError::NotOnSurface { .. }
                | NilError::BothMidpoints
                | NilError::DegenerateProjection
                | NilError::TargetNotOnArc { .. } => 2,
                NilError::RadiusOutOfRange { .. } | NilError::TriangleTooLarge { .. } | NilError::OutOfModelRange { .. } => 4,
                NilError::NoConvergence { .. }
                | NilError::EmptySurface
                | NilError::EmptyIntersection { .. }
                | NilError::ArcSurfaceMiss { .. }
                | NilError::NoArcIntersection
                | NilError::ThirdCevianMiss { .. }
                | NilError::ArcAmbiguous => 3,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "InvalidInput",
            CliError::Io(_) => "Io",
            CliError::Checks(_) => "CheckFailed",
            CliError::Geometry(e) => match e {
                NilError::InvalidParameter(_) => "InvalidParameter",
                NilError::NoConvergence { .. } => "NoConvergence",
                NilError::OutOfModelRange { .. } => "OutOfModelRange",
                NilError::RadiusOutOfRange { .. } => "RadiusOutOfRange",
                NilError::TriangleTooLarge { .. } => "TriangleTooLarge",
                NilError::DuplicatePoints => "DuplicatePoints",
                NilError::TargetNotOnArc { .. } => "TargetNotOnArc",
                NilError::ArcAmbiguous => "ArcAmbiguous",
                NilError::InvalidResolution(_) => "InvalidResolution",
                NilError::EmptySurface => "EmptySurface",
                NilError::EmptyIntersection { .. } => "EmptyIntersection",
                NilError::NotOnLine { .. } => "NotOnLine",
                NilError::BothMidpoints => "BothMidpoints",
                NilError::NotOnSurface { .. } => "NotOnSurface",
                NilError::ArcSurfaceMiss { .. } => "ArcSurfaceMiss",
                NilError::NoArcIntersection => "NoArcIntersection",
                NilError::ThirdCevianMiss { .. } => "ThirdCevianMiss",
                NilError::DegenerateProjection => "DegenerateProjection",
            },
        }
    }
}
