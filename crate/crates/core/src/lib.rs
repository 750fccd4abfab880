//! Fuzzy DEMATEL: turns several experts' linguistic pairwise-influence
//! judgments into cause/effect classes, prominence rankings, and influence
//! maps.
//!
//! ```
//! use fuzzy_dematel::{engine, survey, tfn::LinguisticScale};
//!
//! let doc = r#"{
//!   "criteria": [{"code": "A", "label": "a"}, {"code": "B", "label": "b"}, {"code": "C", "label": "c"}],
//!   "level": "main",
//!   "experts": [{"id": "e1", "matrix": [["NI", "HI", "LI"], ["MI", "NI", "VHI"], ["ELI", "MLI", "NI"]]}]
//! }"#;
//! let scale = LinguisticScale::standard();
//! let set = survey::parse_survey_set(doc, &scale).unwrap();
//! let result = engine::run_pipeline(&set.direct_matrices(&scale).unwrap(), &Default::default()).unwrap();
//! assert_eq!(result.scores.len(), 3);
//! ```

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod report;
pub mod survey;
pub mod tfn;

pub use engine::{CausalClass, CriterionScore, DematelResult, FuzzyMatrix, MatrixKind, PipelineOptions};
pub use error::{Error, Result};
pub use matrix::CrispMatrix;
pub use tfn::{LinguisticScale, SignedTriple, Term, Tfn};
