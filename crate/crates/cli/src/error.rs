use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config file or arguments rejected by the library.
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
        };
        json!({ "error": kind, "message": self.to_string() }).to_string()
    }
}

impl From<ghz_anon::Error> for CliError {
    fn from(e: ghz_anon::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
