//! The bundled seed data: clause library, question bank, template,
//! completeness criteria and coverage checklist.

use crate::engine::{load_bank, QuestionBank};
use crate::evaluation::{load_checklist, load_criteria, CompletenessCriterion, CoverageTopic, Vocabulary};
use crate::generator::PolicyTemplate;
use crate::library::{load_library, ClauseLibrary};

pub const LIBRARY_JSON: &str = include_str!("../data/library.json");
pub const BANK_JSON: &str = include_str!("../data/bank.json");
pub const TEMPLATE_JSON: &str = include_str!("../data/template.json");
pub const CRITERIA_JSON: &str = include_str!("../data/criteria.json");
pub const CHECKLIST_JSON: &str = include_str!("../data/checklist.json");

pub fn library() -> ClauseLibrary {
    load_library(LIBRARY_JSON.as_bytes()).expect("shipped library is valid")
}

pub fn bank() -> QuestionBank {
    load_bank(BANK_JSON.as_bytes()).expect("shipped bank is valid")
}

pub fn template(bank: &QuestionBank) -> PolicyTemplate {
    PolicyTemplate::load(TEMPLATE_JSON.as_bytes(), bank).expect("shipped template matches the shipped bank")
}

pub fn vocabulary() -> Vocabulary {
    Vocabulary::from_sources(&library(), Some(&bank()))
}

pub fn criteria(vocab: &Vocabulary) -> Vec<CompletenessCriterion> {
    load_criteria(CRITERIA_JSON.as_bytes(), vocab).expect("shipped criteria are valid")
}

pub fn checklist(vocab: &Vocabulary) -> Vec<CoverageTopic> {
    load_checklist(CHECKLIST_JSON.as_bytes(), vocab).expect("shipped checklist is valid")
}

/// Everything above, loaded once.
#[derive(Debug, Clone)]
pub struct Shipped {
    pub library: ClauseLibrary,
    pub bank: QuestionBank,
    pub template: PolicyTemplate,
    pub vocabulary: Vocabulary,
    pub criteria: Vec<CompletenessCriterion>,
    pub checklist: Vec<CoverageTopic>,
}

impl Shipped {
    pub fn load() -> Self {
        let library = library();
        let bank = bank();
        let template = template(&bank);
        let vocabulary = Vocabulary::from_sources(&library, Some(&bank));
        let criteria = criteria(&vocabulary);
        let checklist = checklist(&vocabulary);
        Self {
            library,
            bank,
            template,
            vocabulary,
            criteria,
            checklist,
        }
    }
}
