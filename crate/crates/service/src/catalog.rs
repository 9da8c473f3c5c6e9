use std::path::{Path, PathBuf};

use policygen_core::engine::{load_bank, QuestionBank};
use policygen_core::evaluation::{load_checklist, load_criteria, CompletenessCriterion, CoverageTopic, Vocabulary};
use policygen_core::generator::PolicyTemplate;
use policygen_core::library::{load_library, ClauseLibrary};
use policygen_core::shipped;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{what} {origin}: {message}")]
    Invalid {
        what: &'static str,
        origin: String,
        message: String,
    },
}

/// Input files; `None` falls back to the bundled data.
#[derive(Debug, Clone, Default)]
pub struct CatalogPaths {
    pub bank: Option<PathBuf>,
    pub library: Option<PathBuf>,
    pub template: Option<PathBuf>,
    pub criteria: Option<PathBuf>,
    pub checklist: Option<PathBuf>,
}

/// Everything loaded once at startup and shared read-only.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub bank: QuestionBank,
    pub library: ClauseLibrary,
    pub template: PolicyTemplate,
    pub vocabulary: Vocabulary,
    pub criteria: Vec<CompletenessCriterion>,
    pub checklist: Vec<CoverageTopic>,
}

fn read(path: Option<&Path>, bundled: &'static str) -> Result<(Vec<u8>, String), CatalogError> {
    match path {
        None => Ok((bundled.as_bytes().to_vec(), "(bundled)".into())),
        Some(p) => std::fs::read(p)
            .map(|b| (b, p.display().to_string()))
            .map_err(|source| CatalogError::Io {
                path: p.to_path_buf(),
                source,
            }),
    }
}

fn invalid(what: &'static str, origin: &str, e: impl std::fmt::Display) -> CatalogError {
    CatalogError::Invalid {
        what,
        origin: origin.to_string(),
        message: e.to_string(),
    }
}

impl Catalog {
    pub fn shipped() -> Self {
        Self::load(&CatalogPaths::default()).expect("bundled data is valid")
    }

    pub fn load(paths: &CatalogPaths) -> Result<Self, CatalogError> {
        let (bytes, origin) = read(paths.bank.as_deref(), shipped::BANK_JSON)?;
        let bank = load_bank(&bytes).map_err(|e| invalid("bank", &origin, e))?;
        let (bytes, origin) = read(paths.library.as_deref(), shipped::LIBRARY_JSON)?;
        let library = load_library(&bytes).map_err(|e| invalid("library", &origin, e))?;
        let (bytes, origin) = read(paths.template.as_deref(), shipped::TEMPLATE_JSON)?;
        let template = PolicyTemplate::load(&bytes, &bank).map_err(|e| invalid("template", &origin, e))?;
        template
            .check_library(&library)
            .map_err(|e| invalid("template", &origin, e))?;
        let vocabulary = Vocabulary::from_sources(&library, Some(&bank));
        let (bytes, origin) = read(paths.criteria.as_deref(), shipped::CRITERIA_JSON)?;
        let criteria = load_criteria(&bytes, &vocabulary).map_err(|e| invalid("criteria", &origin, e))?;
        let (bytes, origin) = read(paths.checklist.as_deref(), shipped::CHECKLIST_JSON)?;
        let checklist = load_checklist(&bytes, &vocabulary).map_err(|e| invalid("checklist", &origin, e))?;
        Ok(Self {
            bank,
            library,
            template,
            vocabulary,
            criteria,
            checklist,
        })
    }
}
