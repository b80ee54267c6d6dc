use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller supplied an invalid argument (probability, index, size, name).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{}:{line}: {msg}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("free layer of {n2} vertices exceeds the limit of {cap} for {what}")]
    TooLarge { what: &'static str, n2: usize, cap: usize },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than the environment.
    pub fn is_parameter(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::TooLarge { .. })
    }
}
