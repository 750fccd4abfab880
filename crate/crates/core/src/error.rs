use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One of the three crisp layers of a fuzzy matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Lower,
    Middle,
    Upper,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Lower, Component::Middle, Component::Upper];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Lower => "l",
            Component::Middle => "m",
            Component::Upper => "u",
        })
    }
}

/// Pipeline stage, used to tag errors raised by [`crate::engine::run_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Aggregate,
    Normalize,
    TotalRelation,
    DispatchReceive,
    ProminenceRelation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Aggregate => "aggregate",
            Stage::Normalize => "normalize",
            Stage::TotalRelation => "total-relation",
            Stage::DispatchReceive => "dispatch/receive",
            Stage::ProminenceRelation => "prominence/relation",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid triangular fuzzy number ({l}, {m}, {u}): requires finite l <= m <= u")]
    InvalidFuzzyNumber { l: f64, m: f64, u: f64 },

    #[error("invalid scalar {0}: must be finite and positive")]
    InvalidScalar(f64),

    #[error("unknown linguistic term `{0}`")]
    UnknownTerm(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("singular matrix: pivot in column {column} below tolerance")]
    Singular { column: usize },

    #[error("series diverges: max absolute row sum {row_sum} is not below 1")]
    Divergent { row_sum: f64 },

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("no expert surveys supplied")]
    NoSurveys,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("expected a {expected} matrix, got a {found} matrix")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("component {component}: {source}")]
    Component {
        component: Component,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("expert `{expert}`: diagonal cell ({index}, {index}) must be NI/0, found `{term}`")]
    DiagonalViolation {
        expert: String,
        index: usize,
        term: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dimension(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::Dimension {
            context: context.into(),
            expected,
            found,
        }
    }

    pub(crate) fn at_stage(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_component(self, component: Component) -> Self {
        Error::Component {
            component,
            source: Box::new(self),
        }
    }

    /// Strips stage and component wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } | Error::Component { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the environment (files, permissions) rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self.root(), Error::Io { .. })
    }
}
