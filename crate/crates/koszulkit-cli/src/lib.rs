//! Command surface for koszulkit: a registry of named checks over `.kpres`
//! presentations, the bundled corpus and the acceptance criteria.

pub mod acceptance;
pub mod checks;
pub mod corpus;
pub mod report;

use sha2::{Digest, Sha256};
use thiserror::Error;

use koszulkit::dg::DgError;
use koszulkit::em::EmError;
use koszulkit::ideal::IdealError;
use koszulkit::massey::MasseyError;
use koszulkit::present::{parse_presentation, Presentation};
use koszulkit::quad::QuadError;

pub use checks::{registry, Check, Registry};
pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<EmError> for CliError {
    fn from(e: EmError) -> Self {
        match e {
            EmError::WindowTooLarge { .. } | EmError::NotGraded | EmError::NotConnected(_) => {
                CliError::Input(e.to_string())
            }
            EmError::Ideal(e) => e.into(),
            EmError::Quad(e) => e.into(),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<IdealError> for CliError {
    fn from(e: IdealError) -> Self {
        match e {
            IdealError::LevelTooLarge(..) | IdealError::WrongShape(_) => CliError::Input(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::WindowTooLarge { .. } | QuadError::NotConnected(_) => CliError::Input(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<DgError> for CliError {
    fn from(e: DgError) -> Self {
        match e {
            DgError::WindowEdge(_) => CliError::Input(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<MasseyError> for CliError {
    fn from(e: MasseyError) -> Self {
        match e {
            MasseyError::NotInH1(_) | MasseyError::BadTensor(..) | MasseyError::OutsideDomain(_) => {
                CliError::Input(e.to_string())
            }
            MasseyError::NotConnected(_) => CliError::Input(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

/// A parsed presentation with the digest of its source text.
#[derive(Clone, Debug)]
pub struct Input {
    pub name: String,
    pub text: String,
    pub digest: String,
    pub presentation: Presentation,
}

impl Input {
    pub fn parse(name: &str, text: &str) -> Result<Input, CliError> {
        let presentation = parse_presentation(text).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
        Ok(Input { name: name.to_string(), text: text.to_string(), digest: digest(text), presentation })
    }

    pub fn read(path: &std::path::Path) -> Result<Input, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Input::parse(&name, &text)
    }

    /// Corpus stem of the file name, if it names a bundled entry.
    pub fn stem(&self) -> &str {
        self.name.strip_suffix(".kpres").unwrap_or(&self.name)
    }

    pub fn report(&self, command: &str) -> Report {
        let p = &self.presentation;
        Report::new(command, &self.name, &self.digest, &p.field.name(), p.trunc)
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub window: Option<usize>,
    pub rmax: Option<usize>,
    pub classes: Option<Vec<usize>>,
    pub seed: u64,
}
