use thiserror::Error;

/// Errors produced by the solvers, the measurement pipeline and the imaging
/// operators.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a domain precondition (non-positive parameter,
    /// point inside the scatterer, negative noise level, ...).
    #[error("domain error in `{field}`: {message}")]
    Domain {
        field: &'static str,
        message: String,
    },

    /// A geometric configuration is inconsistent (probe point above the
    /// measurement lines, irregular parametrization, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The per-mode 2x2 transmission system is numerically singular.
    #[error("resonance: singular transmission system at mode {mode}")]
    Resonance { mode: i32 },

    /// The boundary-integral system is too ill-conditioned to trust.
    #[error("ill-conditioned boundary system: condition estimate {estimate:.3e}")]
    IllConditioned { estimate: f64 },

    /// Not enough data to carry out an operation (missing line, too few
    /// samples, every receiver masked, ...).
    #[error("data error: {0}")]
    Data(String),

    /// No unmasked receiver contributes to a norm or inner product.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A characteristic ray stalled (vanishing phase gradient).
    #[error("stagnation: |grad phi| < 1e-12 at ({x1}, {x2})")]
    Stagnation { x1: f64, x2: f64 },

    /// A persisted file violates the expected row grammar.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A persisted file is structurally inconsistent (bad header, grid
    /// mismatch, wrong record counts, ...).
    #[error("format error: {0}")]
    Format(String),

    /// A forward solve failed for one receiver of a measurement sweep.
    #[error("solver failure at receiver {receiver} on line {line}: {source}")]
    Receiver {
        receiver: usize,
        line: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(field: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            field,
            message: message.into(),
        }
    }
}
