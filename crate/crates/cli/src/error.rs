use morse_core::geometry::GeometryError;
use morse_core::indexform::IndexFormError;
use morse_core::jacobi::JacobiError;
use morse_core::spectral::SpectralError;
use morse_core::suite::SuiteError;
use serde_json::json;
use thiserror::Error;

/// Exit codes: 0 success, 1 the theorem check disagrees, 2 degenerate
/// input, 3 numerical resolution failure, 4 configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Degenerate,
    Resolution,
    Config,
}

impl Category {
    pub fn exit_code(self) -> u8 {
        match self {
            Category::Degenerate => 2,
            Category::Resolution => 3,
            Category::Config => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Category::Degenerate => "degenerate",
            Category::Resolution => "resolution",
            Category::Config => "config",
        }
    }
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub category: Category,
    pub message: String,
    pub trial: Option<usize>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            category: Category::Config,
            message: message.into(),
            trial: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut error = json!({
            "kind": self.category.name(),
            "exit_code": self.category.exit_code(),
            "message": self.message,
        });
        if let Some(t) = self.trial {
            error["trial"] = json!(t);
        }
        serde_json::to_string(&json!({ "schema": 1, "error": error })).expect("error object serializes")
    }
}

fn categorized(category: Category, e: impl ToString) -> CliError {
    CliError {
        category,
        message: e.to_string(),
        trial: None,
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        let c = match e {
            SpectralError::Degenerate { .. } | SpectralError::EndpointDegenerate { .. } => Category::Degenerate,
            SpectralError::IrregularCrossing { .. } | SpectralError::UnresolvedCluster { .. } => Category::Resolution,
            SpectralError::InvalidParameter(_) => Category::Config,
        };
        categorized(c, e)
    }
}

impl From<JacobiError> for CliError {
    fn from(e: JacobiError) -> Self {
        let c = match e {
            JacobiError::InvalidParameter(_) => Category::Config,
            JacobiError::NotAConjugateInstant { .. } => Category::Degenerate,
            JacobiError::UnresolvedCluster { .. } | JacobiError::Resolution(_) => Category::Resolution,
        };
        categorized(c, e)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let c = match e {
            GeometryError::MetricDegenerate { .. } | GeometryError::FrameDegenerate { .. } => Category::Degenerate,
            GeometryError::MissingFrame => Category::Resolution,
            GeometryError::MissingPartials { .. }
            | GeometryError::InvalidParameter(_)
            | GeometryError::Expr(_)
            | GeometryError::SpecFile(_) => Category::Config,
        };
        categorized(c, e)
    }
}

impl From<IndexFormError> for CliError {
    fn from(e: IndexFormError) -> Self {
        match e {
            IndexFormError::Spectral(inner) => inner.into(),
            IndexFormError::Jacobi(inner) => inner.into(),
            IndexFormError::InvalidParameter(_) => categorized(Category::Config, e),
            IndexFormError::DegenerateGeodesic | IndexFormError::NotACrossing { .. } => {
                categorized(Category::Degenerate, e)
            }
            IndexFormError::NonNegativeCrossingForm { .. }
            | IndexFormError::OracleMismatch { .. }
            | IndexFormError::NonzeroReferenceIndex(_) => categorized(Category::Resolution, e),
        }
    }
}

impl From<SuiteError> for CliError {
    fn from(e: SuiteError) -> Self {
        let mut out: CliError = e.source.clone().into();
        out.message = e.to_string();
        out.trial = Some(e.trial);
        out
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e.to_string())
    }
}
