//! Bundled reference tables for the portfolio-criteria case study.
//!
//! Fixture files share the survey grammar (`criteria`, `level`) and add a
//! `kind` plus its payload; fuzzy triples are `[l, m, u]` arrays.

use serde::{Deserialize, Serialize};

use crate::engine::{CausalClass, DispatchReceive, FuzzyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::matrix::CrispMatrix;
use crate::survey::{Criterion, Level};
use crate::tfn::{SignedTriple, Tfn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrRow {
    pub d: Tfn,
    pub r: Tfn,
    pub d_crisp: f64,
    pub r_crisp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProminenceRow {
    pub prominence: Tfn,
    pub relation: SignedTriple,
    pub prominence_crisp: f64,
    pub relation_crisp: f64,
    pub class: CausalClass,
}

/// How a crisp relation column is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationScale {
    /// Graded mean `(l + 2m + u) / 4`.
    #[default]
    Canonical,
    /// `l + 2m + u`, four times the graded mean.
    PaperTable5,
}

impl RelationScale {
    pub fn factor(self) -> f64 {
        match self {
            RelationScale::Canonical => 1.0,
            RelationScale::PaperTable5 => 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixtureData {
    FuzzyMatrix { matrix: Vec<Vec<[f64; 3]>> },
    CrispMatrix { matrix: Vec<Vec<f64>> },
    DrVectors { rows: Vec<DrRow> },
    ProminenceRelation { relation_scale: RelationScale, rows: Vec<ProminenceRow> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub criteria: Vec<Criterion>,
    pub level: Level,
    #[serde(flatten)]
    pub data: FixtureData,
}

impl Fixture {
    pub fn parse(document: &str) -> Result<Fixture> {
        let fixture: Fixture = serde_json::from_str(document).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let n = fixture.criteria.len();
        let found = match &fixture.data {
            FixtureData::FuzzyMatrix { matrix } => matrix.len(),
            FixtureData::CrispMatrix { matrix } => matrix.len(),
            FixtureData::DrVectors { rows } => rows.len(),
            FixtureData::ProminenceRelation { rows, .. } => rows.len(),
        };
        if found != n {
            return Err(Error::dimension(format!("fixture `{}`", fixture.name), n, found));
        }
        Ok(fixture)
    }

    pub fn codes(&self) -> Vec<&str> {
        self.criteria.iter().map(|c| c.code.as_str()).collect()
    }

    /// e.g. `5×5 fuzzy` or `15 criteria`.
    pub fn shape(&self) -> String {
        let n = self.criteria.len();
        match self.data {
            FixtureData::FuzzyMatrix { .. } => format!("{n}×{n} fuzzy"),
            FixtureData::CrispMatrix { .. } => format!("{n}×{n} crisp"),
            FixtureData::DrVectors { .. } | FixtureData::ProminenceRelation { .. } => format!("{n} criteria"),
        }
    }

    /// The fuzzy matrix payload as a total-relation matrix.
    pub fn total_relation(&self) -> Result<FuzzyMatrix> {
        match &self.data {
            FixtureData::FuzzyMatrix { matrix } => FuzzyMatrix::from_arrays(MatrixKind::Total, matrix),
            _ => Err(self.wrong_kind("fuzzy-matrix")),
        }
    }

    pub fn crisp_matrix(&self) -> Result<CrispMatrix> {
        match &self.data {
            FixtureData::CrispMatrix { matrix } => CrispMatrix::from_rows(matrix.clone()),
            _ => Err(self.wrong_kind("crisp-matrix")),
        }
    }

    pub fn dispatch_receive(&self) -> Result<DispatchReceive> {
        match &self.data {
            FixtureData::DrVectors { rows } => DispatchReceive::new(
                rows.iter().map(|r| r.d).collect(),
                rows.iter().map(|r| r.r).collect(),
            ),
            _ => Err(self.wrong_kind("dr-vectors")),
        }
    }

    fn wrong_kind(&self, expected: &str) -> Error {
        Error::Invalid(format!("fixture `{}` is not a {expected} fixture", self.name))
    }
}

const BUNDLED: [(&str, &str); 6] = [
    ("table2-total-relation", include_str!("../fixtures/table2-total-relation.json")),
    ("table3-crisp-total", include_str!("../fixtures/table3-crisp-total.json")),
    ("table4-dr", include_str!("../fixtures/table4-dr.json")),
    ("table5-prominence-relation", include_str!("../fixtures/table5-prominence-relation.json")),
    ("table6-sub-dr", include_str!("../fixtures/table6-sub-dr.json")),
    ("table7-sub-prominence-relation", include_str!("../fixtures/table7-sub-prominence-relation.json")),
];

/// Names of the bundled fixtures, in listing order.
pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let (_, doc) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    Fixture::parse(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_fixture_loads() {
        for name in fixture_names() {
            let f = load_fixture(name).unwrap();
            assert_eq!(f.name, name);
        }
    }

    #[test]
    fn table2_cells() {
        let s = load_fixture("table2-total-relation").unwrap().total_relation().unwrap();
        assert_eq!(s.order(), 5);
        assert_eq!(s.get(0, 1).to_array(), [0.255, 0.363, 0.555]);
        assert_eq!(s.get(4, 0).to_array(), [0.286, 0.424, 0.675]);
    }

    #[test]
    fn table6_vectors() {
        let f = load_fixture("table6-sub-dr").unwrap();
        let dr = f.dispatch_receive().unwrap();
        assert_eq!(dr.len(), 15);
        let idx = f.codes().iter().position(|c| *c == "M051").unwrap();
        assert_eq!(dr.d[idx].to_array(), [1.041, 1.712, 3.156]);
        assert_eq!(f.level, Level::Sub);
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(load_fixture("bogus"), Err(Error::UnknownFixture(n)) if n == "bogus"));
    }

    #[test]
    fn shapes() {
        assert_eq!(load_fixture("table2-total-relation").unwrap().shape(), "5×5 fuzzy");
        assert_eq!(load_fixture("table6-sub-dr").unwrap().shape(), "15 criteria");
    }

    #[test]
    fn wrong_kind_accessors() {
        let f = load_fixture("table4-dr").unwrap();
        assert!(f.total_relation().is_err());
        assert!(f.crisp_matrix().is_err());
    }

    /// Row and column sums of the total-relation fixture land on the D/R fixture.
    #[test]
    fn total_relation_sums_match_dr_fixture() {
        let s = load_fixture("table2-total-relation").unwrap().total_relation().unwrap();
        let t4 = load_fixture("table4-dr").unwrap().dispatch_receive().unwrap();
        for i in 0..5 {
            let (d, r) = (s.row_sum(i).to_array(), s.col_sum(i).to_array());
            for k in 0..3 {
                assert!((d[k] - t4.d[i].to_array()[k]).abs() <= 0.002 + 1e-9, "D row {i}");
                assert!((r[k] - t4.r[i].to_array()[k]).abs() <= 0.002 + 1e-9, "R col {i}");
            }
        }
    }
}
