//! Criteria hierarchies and expert survey files.
//!
//! A survey document is JSON:
//!
//! ```json
//! {
//!   "criteria": [{"code": "C1", "label": "Cost"}, {"code": "C11", "label": "Capex", "parent": "C1"}],
//!   "level": "main",
//!   "experts": [{"id": "e1", "matrix": [["NI", "HI"], [3, 0]]}]
//! }
//! ```
//!
//! Cells are scale tokens or crisp levels `0..=10`. A CSV variant holds one
//! expert per file, with criterion codes in the first row and column.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{FuzzyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::tfn::{LinguisticScale, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub code: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

impl Criterion {
    pub fn new(code: impl Into<String>, label: impl Into<String>) -> Self {
        Criterion {
            code: code.into(),
            label: label.into(),
            parent: None,
        }
    }

    pub fn child_of(mut self, parent: impl Into<String>) -> Self {
        self.parent = Some(parent.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Main,
    Sub,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Main => "main",
            Level::Sub => "sub",
        })
    }
}

/// Main criteria (no parent) and their sub-criteria, in file order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CriteriaModel {
    criteria: Vec<Criterion>,
}

impl CriteriaModel {
    pub fn new(criteria: Vec<Criterion>) -> Self {
        CriteriaModel { criteria }
    }

    pub fn all(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn at_level(&self, level: Level) -> Vec<&Criterion> {
        self.criteria
            .iter()
            .filter(|c| c.parent.is_some() == (level == Level::Sub))
            .collect()
    }

    pub fn children(&self, code: &str) -> Vec<&Criterion> {
        self.criteria
            .iter()
            .filter(|c| c.parent.as_deref() == Some(code))
            .collect()
    }

    /// Structural problems; empty when the model is usable at `level`.
    pub fn violations(&self, level: Level) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for c in &self.criteria {
            if !seen.insert(c.code.as_str()) {
                out.push(Violation::DuplicateCode(c.code.clone()));
            }
        }
        let mains: HashSet<&str> = self.at_level(Level::Main).iter().map(|c| c.code.as_str()).collect();
        for c in &self.criteria {
            if let Some(parent) = &c.parent {
                if !mains.contains(parent.as_str()) {
                    out.push(Violation::OrphanSubCriterion {
                        code: c.code.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        let count = self.at_level(level).len();
        if count < 2 {
            out.push(Violation::TooFewCriteria { level, count });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertSurvey {
    pub id: String,
    pub matrix: Vec<Vec<Term>>,
}

/// All experts' judgments over the criteria of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertSurveySet {
    pub criteria: CriteriaModel,
    pub level: Level,
    pub experts: Vec<ExpertSurvey>,
}

/// A single problem found by [`validate_survey_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateCode(String),
    OrphanSubCriterion { code: String, parent: String },
    TooFewCriteria { level: Level, count: usize },
    NoExperts,
    Dimension { expert: String, expected: usize, rows: usize, cols: Vec<usize> },
    LevelMismatch { expert: String, level: Level, expected: usize, found: usize },
    Diagonal { expert: String, index: usize, term: String },
    UnknownTerm { expert: String, row: usize, col: usize, term: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCode(code) => write!(f, "duplicate criterion code `{code}`"),
            Violation::OrphanSubCriterion { code, parent } => {
                write!(f, "sub-criterion `{code}` refers to unknown main criterion `{parent}`")
            }
            Violation::TooFewCriteria { level, count } => {
                write!(f, "{level} level has {count} criteria; at least 2 are required")
            }
            Violation::NoExperts => f.write_str("survey contains no experts"),
            Violation::Dimension { expert, expected, rows, cols } => write!(
                f,
                "expert `{expert}`: matrix must be {expected}x{expected}, found {rows} rows with lengths {cols:?}"
            ),
            Violation::LevelMismatch { expert, level, expected, found } => write!(
                f,
                "expert `{expert}`: {found}x{found} matrix does not match the {expected} {level} criteria"
            ),
            Violation::Diagonal { expert, index, term } => write!(
                f,
                "expert `{expert}`: diagonal cell ({index}, {index}) must be NI/0, found `{term}`"
            ),
            Violation::UnknownTerm { expert, row, col, term } => {
                write!(f, "expert `{expert}`: unknown linguistic term `{term}` at ({row}, {col})")
            }
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        match v {
            Violation::Dimension { expected, rows, cols, .. } => {
                let found = if rows != expected {
                    rows
                } else {
                    cols.into_iter().find(|&c| c != expected).unwrap_or(expected)
                };
                Error::dimension("expert matrix", expected, found)
            }
            Violation::LevelMismatch { expected, found, .. } => {
                Error::dimension("expert matrix for survey level", expected, found)
            }
            Violation::Diagonal { expert, index, term } => Error::DiagonalViolation { expert, index, term },
            Violation::UnknownTerm { term, .. } => Error::UnknownTerm(term),
            other => Error::Invalid(other.to_string()),
        }
    }
}

/// Re-checks every survey invariant and returns all violations found.
pub fn validate_survey_set(set: &ExpertSurveySet, scale: &LinguisticScale) -> Vec<Violation> {
    let mut out = set.criteria.violations(set.level);
    if set.experts.is_empty() {
        out.push(Violation::NoExperts);
    }
    let expected = set.criteria.at_level(set.level).len();
    let other_level = match set.level {
        Level::Main => Level::Sub,
        Level::Sub => Level::Main,
    };
    let other_count = set.criteria.at_level(other_level).len();

    for expert in &set.experts {
        let rows = expert.matrix.len();
        let square = expert.matrix.iter().all(|r| r.len() == rows);
        if !square {
            out.push(Violation::Dimension {
                expert: expert.id.clone(),
                expected,
                rows,
                cols: expert.matrix.iter().map(Vec::len).collect(),
            });
            continue;
        }
        if rows != expected {
            if rows == other_count && rows > 0 {
                out.push(Violation::LevelMismatch {
                    expert: expert.id.clone(),
                    level: set.level,
                    expected,
                    found: rows,
                });
            } else {
                out.push(Violation::Dimension {
                    expert: expert.id.clone(),
                    expected,
                    rows,
                    cols: vec![rows; rows],
                });
            }
            continue;
        }
        for (i, row) in expert.matrix.iter().enumerate() {
            for (j, term) in row.iter().enumerate() {
                match scale.resolve(term) {
                    None => out.push(Violation::UnknownTerm {
                        expert: expert.id.clone(),
                        row: i,
                        col: j,
                        term: term.to_string(),
                    }),
                    Some(entry) if i == j && entry.level != 0 => out.push(Violation::Diagonal {
                        expert: expert.id.clone(),
                        index: i,
                        term: term.to_string(),
                    }),
                    Some(_) => {}
                }
            }
        }
    }
    out
}

impl ExpertSurveySet {
    pub fn codes(&self) -> Vec<&str> {
        self.criteria
            .at_level(self.level)
            .into_iter()
            .map(|c| c.code.as_str())
            .collect()
    }

    /// One direct-relation fuzzy matrix per expert, in file order.
    pub fn direct_matrices(&self, scale: &LinguisticScale) -> Result<Vec<FuzzyMatrix>> {
        self.experts
            .iter()
            .map(|e| {
                let rows = e
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|t| scale.fuzzify(t)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                FuzzyMatrix::new(MatrixKind::Direct, rows)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("survey sets always serialize")
    }
}

/// Reads a JSON survey document without checking its invariants.
pub fn parse_survey_document(document: &str) -> Result<ExpertSurveySet> {
    serde_json::from_str(document).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// Parses and fully validates a JSON survey document.
pub fn parse_survey_set(document: &str, scale: &LinguisticScale) -> Result<ExpertSurveySet> {
    let set = parse_survey_document(document)?;
    if let Some(v) = validate_survey_set(&set, scale).into_iter().next() {
        return Err(v.into());
    }
    Ok(set)
}

/// Reads one expert's grid from CSV: header row and first column carry the
/// criterion codes, which must match in order.
pub fn parse_expert_csv(expert_id: &str, document: &str) -> Result<(Vec<String>, ExpertSurvey)> {
    let parse_err = |location: String, message: String| Error::Parse { location, message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(document.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| parse_err(format!("{expert_id}: line 1"), "empty CSV document".into()))?
        .map_err(|e| parse_err(format!("{expert_id}: line 1"), e.to_string()))?;
    let codes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut matrix = Vec::new();
    for (k, record) in records.enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| parse_err(format!("{expert_id}: line {line}"), e.to_string()))?;
        let row_code = record.get(0).unwrap_or_default();
        if codes.get(k).map(String::as_str) != Some(row_code) {
            return Err(parse_err(
                format!("{expert_id}: line {line}"),
                format!("row label `{row_code}` does not match column header order"),
            ));
        }
        matrix.push(record.iter().skip(1).map(Term::parse).collect());
    }
    Ok((
        codes,
        ExpertSurvey {
            id: expert_id.to_string(),
            matrix,
        },
    ))
}

/// Builds a main-level survey set from per-expert CSV documents, using the
/// header codes as criteria.
pub fn survey_set_from_csv(documents: &[(String, String)], scale: &LinguisticScale) -> Result<ExpertSurveySet> {
    let mut codes: Option<Vec<String>> = None;
    let mut experts = Vec::new();
    for (id, doc) in documents {
        let (these, expert) = parse_expert_csv(id, doc)?;
        match &codes {
            None => codes = Some(these),
            Some(first) if *first != these => {
                return Err(Error::Parse {
                    location: id.clone(),
                    message: format!("criterion codes {these:?} differ from {first:?}"),
                })
            }
            Some(_) => {}
        }
        experts.push(expert);
    }
    let criteria = codes
        .unwrap_or_default()
        .into_iter()
        .map(|c| Criterion::new(c.clone(), c))
        .collect();
    let set = ExpertSurveySet {
        criteria: CriteriaModel::new(criteria),
        level: Level::Main,
        experts,
    };
    if let Some(v) = validate_survey_set(&set, scale).into_iter().next() {
        return Err(v.into());
    }
    Ok(set)
}

/// The five main portfolio criteria and their fifteen sub-criteria.
pub fn portfolio_criteria() -> CriteriaModel {
    serde_json::from_str(include_str!("../fixtures/portfolio-criteria.json"))
        .expect("bundled criteria model is valid JSON")
}
