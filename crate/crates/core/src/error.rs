use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("invalid time: {0}")]
    InvalidTime(f64),

    #[error("no events")]
    NoEvents,

    #[error("interval out of range: [{start}, {end}] is not inside [0, {follow_up_end}]")]
    IntervalOutOfRange {
        start: f64,
        end: f64,
        follow_up_end: f64,
    },

    #[error("degenerate null variance")]
    DegenerateVariance,

    #[error("cannot permute: {0}")]
    CannotPermute(String),

    #[error("degenerate log-rank variance")]
    DegenerateLogrank,

    #[error("HR diverges: {0}")]
    HrDiverges(String),

    #[error("tau beyond follow-up: tau = {tau}, last observation = {last}")]
    TauBeyondFollowUp { tau: f64, last: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incomplete grid, missing cells: {}", .0.join(", "))]
    IncompleteGrid(Vec<String>),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Coarse category used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptySample
            | Error::InvalidTime(_)
            | Error::NoEvents
            | Error::Parse { .. }
            | Error::Input(_)
            | Error::Csv(_) => "input",
            Error::IntervalOutOfRange { .. }
            | Error::InvalidParameter(_)
            | Error::IncompleteGrid(_)
            | Error::Config(_) => "config",
            Error::DegenerateVariance
            | Error::CannotPermute(_)
            | Error::DegenerateLogrank
            | Error::HrDiverges(_)
            | Error::TauBeyondFollowUp { .. } => "numeric",
            Error::Io(_) => "io",
        }
    }
}
