//! Interactive generation and evaluation of GDPR privacy policies.
//!
//! * [`library`]: metadata taxonomy and privacy clause library
//! * [`engine`]: question banks and interview sessions
//! * [`generator`]: template slots, placeholder substitution, policy rendering
//! * [`evaluation`]: readability, completeness and coverage checks
//! * [`shipped`]: the bundled bank, library, template, criteria and checklist

pub mod engine;
pub mod evaluation;
pub mod generator;
pub mod json;
pub mod library;
pub mod lint;
pub mod shipped;
