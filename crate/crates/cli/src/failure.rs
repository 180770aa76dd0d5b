use std::fmt;

use rwalk_core::Error;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, including values outside a routine's domain.
    Usage(String),
    /// A grid or quadrature did not produce a usable result.
    Numerical { module: &'static str, message: String },
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical { .. } => 3,
            Failure::Io(_) => 1,
        }
    }

    /// Classifies a core error raised inside `module`.
    pub fn from_core(module: &'static str) -> impl Fn(Error) -> Failure {
        move |e| match e {
            Error::Domain(_) | Error::EmptyInput => Failure::Usage(e.to_string()),
            Error::Grid(_) | Error::Convergence { .. } => Failure::Numerical {
                module,
                message: e.to_string(),
            },
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // clap renders its own "error:" prefix and usage block
            Failure::Usage(m) if m.starts_with("error:") => write!(f, "{}", m.trim_end()),
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Numerical { module, message } => write!(f, "error in {module}: {message}"),
            Failure::Io(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
