use thiserror::Error;
use zcycles::cycles::CyclesError;
use zcycles::gcoh::GcohError;
use zcycles::points::PointsError;
use zcycles::symbols::SymbolsError;
use zcycles::tower::TowerError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Config {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("internal invariant breach: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) | CliError::Io(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<PointsError> for CliError {
    fn from(e: PointsError) -> Self {
        match e {
            PointsError::CapExceeded { .. }
            | PointsError::Tower(TowerError::CapExceeded { .. }) => CliError::Cap(e.to_string()),
            PointsError::Group(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        PointsError::from(e).into()
    }
}

impl From<SymbolsError> for CliError {
    fn from(e: SymbolsError) -> Self {
        match e {
            SymbolsError::Points(p) => p.into(),
            SymbolsError::Parse { .. }
            | SymbolsError::Arity { .. }
            | SymbolsError::Base { .. }
            | SymbolsError::Index { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<CyclesError> for CliError {
    fn from(e: CyclesError) -> Self {
        match e {
            CyclesError::Points(p) => p.into(),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<GcohError> for CliError {
    fn from(e: GcohError) -> Self {
        match e {
            GcohError::Points(p) => p.into(),
            GcohError::Symbols(s) => s.into(),
            GcohError::Cap { .. } | GcohError::ModuleSize(_) => CliError::Cap(e.to_string()),
            GcohError::Degree(_)
            | GcohError::Order(_)
            | GcohError::Torsion { .. }
            | GcohError::Division { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}
