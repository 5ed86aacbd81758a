use std::fmt;

/// Crate-wide error type.
///
/// Variants map onto the failure classes surfaced by the CLI: `Data` and
/// `Io` are input problems, the rest are domain violations detected while
/// constructing or evaluating a model.
#[derive(Debug)]
pub enum Error {
    /// A profile or vector had the wrong length for the grid or fleet.
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A value or combination of values is out of range or infeasible.
    Invalid(String),
    /// The requested operation does not apply under the current configuration
    /// (e.g. a potential evaluated outside its validity scenario).
    Mode(String),
    /// A welfare value that must be strictly negative was not.
    SignConvention(String),
    /// Exhaustive search would exceed the configured budget.
    SearchRefused { size: u128, budget: u128 },
    /// Bisection for the exogenous-load scale could not bracket a root.
    Calibration(String),
    /// Malformed input file (CSV or key=value config).
    Data { line: Option<u64>, message: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected length {expected}, got {got}"),
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::Mode(msg) => write!(f, "not applicable: {msg}"),
            Error::SignConvention(msg) => write!(f, "sign convention violated: {msg}"),
            Error::SearchRefused { size, budget } => write!(
                f,
                "search space of {size} joint schedules exceeds budget {budget}"
            ),
            Error::Calibration(msg) => write!(f, "calibration failed: {msg}"),
            Error::Data { line, message } => match line {
                Some(n) => write!(f, "line {n}: {message}"),
                None => write!(f, "{message}"),
            },
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        Error::Data {
            line,
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
