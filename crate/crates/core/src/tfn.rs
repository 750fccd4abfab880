//! Triangular fuzzy numbers, the eleven-level linguistic influence scale, and
//! graded-mean defuzzification.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graded-mean defuzzification `(l + 2m + u) / 4`.
pub fn defuzzify(l: f64, m: f64, u: f64) -> f64 {
    (l + 2.0 * m + u) / 4.0
}

/// A triangular fuzzy number `(l, m, u)` with `l <= m <= u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Tfn {
    l: f64,
    m: f64,
    u: f64,
}

impl Tfn {
    pub const ZERO: Tfn = Tfn {
        l: 0.0,
        m: 0.0,
        u: 0.0,
    };

    pub fn new(l: f64, m: f64, u: f64) -> Result<Self> {
        if !(l.is_finite() && m.is_finite() && u.is_finite()) || l > m || m > u {
            return Err(Error::InvalidFuzzyNumber { l, m, u });
        }
        Ok(Tfn { l, m, u })
    }

    /// Like [`Tfn::new`], but absorbs ordering violations no larger than `slack`
    /// (round-off from matrix inversion) by lifting `m` and `u`.
    pub(crate) fn new_with_slack(l: f64, m: f64, u: f64, slack: f64) -> Result<Self> {
        if l > m + slack || m > u + slack {
            return Err(Error::InvalidFuzzyNumber { l, m, u });
        }
        let m = m.max(l);
        Tfn::new(l, m, u.max(m))
    }

    pub fn lower(&self) -> f64 {
        self.l
    }

    pub fn middle(&self) -> f64 {
        self.m
    }

    pub fn upper(&self) -> f64 {
        self.u
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.l, self.m, self.u]
    }

    /// Divides every component by `s > 0`.
    pub fn div_by(self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidScalar(s));
        }
        Ok(Tfn {
            l: self.l / s,
            m: self.m / s,
            u: self.u / s,
        })
    }

    /// Componentwise difference. The result is a signed triple and need not be ordered.
    pub fn sub_componentwise(self, other: Tfn) -> SignedTriple {
        SignedTriple {
            l: self.l - other.l,
            m: self.m - other.m,
            u: self.u - other.u,
        }
    }

    pub fn defuzzify(&self) -> f64 {
        defuzzify(self.l, self.m, self.u)
    }
}

impl Add for Tfn {
    type Output = Tfn;

    fn add(self, rhs: Tfn) -> Tfn {
        Tfn {
            l: self.l + rhs.l,
            m: self.m + rhs.m,
            u: self.u + rhs.u,
        }
    }
}

impl std::iter::Sum for Tfn {
    fn sum<I: Iterator<Item = Tfn>>(iter: I) -> Tfn {
        iter.fold(Tfn::ZERO, Add::add)
    }
}

impl TryFrom<[f64; 3]> for Tfn {
    type Error = Error;

    fn try_from([l, m, u]: [f64; 3]) -> Result<Self> {
        Tfn::new(l, m, u)
    }
}

impl From<Tfn> for [f64; 3] {
    fn from(t: Tfn) -> Self {
        t.to_array()
    }
}

impl fmt::Display for Tfn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.m, self.u)
    }
}

/// A componentwise difference of two fuzzy numbers. Components may be negative
/// and in any order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct SignedTriple {
    pub l: f64,
    pub m: f64,
    pub u: f64,
}

impl SignedTriple {
    pub fn new(l: f64, m: f64, u: f64) -> Self {
        SignedTriple { l, m, u }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.l, self.m, self.u]
    }

    pub fn defuzzify(&self) -> f64 {
        defuzzify(self.l, self.m, self.u)
    }
}

impl From<[f64; 3]> for SignedTriple {
    fn from([l, m, u]: [f64; 3]) -> Self {
        SignedTriple { l, m, u }
    }
}

impl From<SignedTriple> for [f64; 3] {
    fn from(t: SignedTriple) -> Self {
        t.to_array()
    }
}

/// A linguistic judgment as written in a survey: either a scale token or a
/// crisp level `0..=10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Level(i64),
    Token(String),
}

impl Term {
    /// Reads a CSV-style cell: an integer is a level, anything else a token.
    pub fn parse(cell: &str) -> Term {
        let cell = cell.trim();
        match cell.parse::<i64>() {
            Ok(level) => Term::Level(level),
            Err(_) => Term::Token(cell.to_string()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Level(level) => write!(f, "{level}"),
            Term::Token(token) => f.write_str(token),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEntry {
    pub token: &'static str,
    pub name: &'static str,
    pub level: u8,
    pub value: Tfn,
}

/// Maps linguistic influence grades to fuzzy numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticScale {
    entries: Vec<ScaleEntry>,
}

const STANDARD_SCALE: [(&str, &str, [f64; 3]); 11] = [
    ("NI", "No influence", [0.0, 0.0, 0.0]),
    ("ELI", "Extremely low influence", [0.0, 0.0, 0.1]),
    ("VLI", "Very low influence", [0.0, 0.1, 0.2]),
    ("MLI", "Moderately low influence", [0.1, 0.2, 0.3]),
    ("LI", "Low influence", [0.2, 0.3, 0.4]),
    ("MI", "Medium influence", [0.3, 0.4, 0.5]),
    ("HI", "High influence", [0.4, 0.5, 0.6]),
    ("MHI", "Moderately high influence", [0.5, 0.6, 0.7]),
    ("VHI", "Very high influence", [0.6, 0.7, 0.8]),
    ("EHI", "Extremely high influence", [0.7, 0.8, 0.9]),
    ("VELI", "Very extremely high influence", [0.8, 0.9, 1.0]),
];

impl LinguisticScale {
    /// The eleven-level scale, `NI` (level 0) through `VELI` (level 10).
    pub fn standard() -> Self {
        let entries = STANDARD_SCALE
            .iter()
            .enumerate()
            .map(|(level, &(token, name, [l, m, u]))| ScaleEntry {
                token,
                name,
                level: level as u8,
                value: Tfn { l, m, u },
            })
            .collect();
        LinguisticScale { entries }
    }

    pub fn entries(&self) -> &[ScaleEntry] {
        &self.entries
    }

    pub fn by_token(&self, token: &str) -> Option<&ScaleEntry> {
        self.entries.iter().find(|e| e.token == token)
    }

    pub fn by_level(&self, level: i64) -> Option<&ScaleEntry> {
        self.entries.iter().find(|e| i64::from(e.level) == level)
    }

    pub fn resolve(&self, term: &Term) -> Option<&ScaleEntry> {
        match term {
            Term::Level(level) => self.by_level(*level),
            Term::Token(token) => self.by_token(token.trim()),
        }
    }

    pub fn fuzzify(&self, term: &Term) -> Result<Tfn> {
        self.resolve(term)
            .map(|e| e.value)
            .ok_or_else(|| Error::UnknownTerm(term.to_string()))
    }
}

impl Default for LinguisticScale {
    fn default() -> Self {
        LinguisticScale::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tfn(l: f64, m: f64, u: f64) -> Tfn {
        Tfn::new(l, m, u).unwrap()
    }

    fn assert_triple(actual: [f64; 3], expected: [f64; 3], tol: f64) {
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= tol, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn rejects_unordered_or_non_finite() {
        assert!(Tfn::new(0.3, 0.2, 0.4).is_err());
        assert!(Tfn::new(0.1, 0.5, 0.4).is_err());
        assert!(Tfn::new(f64::NAN, 0.5, 0.6).is_err());
        assert!(Tfn::new(0.2, 0.2, 0.2).is_ok());
    }

    #[test]
    fn addition() {
        assert_eq!(Tfn::ZERO + tfn(0.3, 0.4, 0.5), tfn(0.3, 0.4, 0.5));
        assert_triple((tfn(0.1, 0.2, 0.3) + tfn(0.2, 0.3, 0.4)).to_array(), [0.3, 0.5, 0.7], 1e-15);

        let row: Tfn = [
            tfn(0.08, 0.163, 0.327),
            tfn(0.255, 0.363, 0.555),
            tfn(0.236, 0.346, 0.541),
            tfn(0.19, 0.297, 0.491),
            tfn(0.0, 0.067, 0.185),
        ]
        .into_iter()
        .sum();
        assert_triple(row.to_array(), [0.761, 1.236, 2.1], 0.002);
    }

    #[test]
    fn componentwise_subtraction() {
        let d = tfn(0.761, 1.236, 2.1);
        let r = tfn(0.897, 1.415, 2.355);
        assert_triple(d.sub_componentwise(r).to_array(), [-0.137, -0.179, -0.255], 0.002);

        let d = tfn(1.003, 1.692, 3.124);
        let r = tfn(0.098, 0.427, 1.203);
        assert_triple(d.sub_componentwise(r).to_array(), [0.905, 1.265, 1.921], 1e-12);

        let x = tfn(0.2, 0.5, 0.9);
        assert_eq!(x.sub_componentwise(x), SignedTriple::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn division_by_scalar() {
        assert_triple(tfn(0.8, 0.9, 1.0).div_by(2.0).unwrap().to_array(), [0.4, 0.45, 0.5], 1e-15);
        assert_triple(tfn(0.6, 0.7, 0.8).div_by(4.0).unwrap().to_array(), [0.15, 0.175, 0.2], 1e-15);
        let a = tfn(0.1, 0.25, 0.7);
        assert_eq!(a.div_by(1.0).unwrap(), a);
        assert!(matches!(a.div_by(0.0), Err(Error::InvalidScalar(_))));
        assert!(matches!(a.div_by(-2.0), Err(Error::InvalidScalar(_))));
    }

    #[test]
    fn graded_mean() {
        assert!((tfn(0.761, 1.236, 2.1).defuzzify() - 1.333).abs() <= 0.001);
        assert!((tfn(0.08, 0.163, 0.327).defuzzify() - 0.183).abs() <= 0.001);
        assert_eq!(Tfn::ZERO.defuzzify(), 0.0);
        assert!((SignedTriple::new(-0.342, -0.452, -0.687).defuzzify() + 0.483).abs() <= 0.001);
    }

    #[test]
    fn fuzzify_tokens_and_levels() {
        let scale = LinguisticScale::standard();
        assert_eq!(scale.fuzzify(&Term::Token("NI".into())).unwrap(), Tfn::ZERO);
        assert_eq!(scale.fuzzify(&Term::Level(0)).unwrap(), Tfn::ZERO);
        assert_eq!(scale.fuzzify(&Term::Token("MI".into())).unwrap(), tfn(0.3, 0.4, 0.5));
        assert_eq!(scale.fuzzify(&Term::Level(5)).unwrap(), tfn(0.3, 0.4, 0.5));
        assert_eq!(scale.fuzzify(&Term::Token("VELI".into())).unwrap(), tfn(0.8, 0.9, 1.0));
        assert_eq!(scale.fuzzify(&Term::Level(10)).unwrap(), tfn(0.8, 0.9, 1.0));
        match scale.fuzzify(&Term::Token("XYZ".into())) {
            Err(Error::UnknownTerm(t)) => assert_eq!(t, "XYZ"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(scale.fuzzify(&Term::Level(11)), Err(Error::UnknownTerm(_))));
        assert!(matches!(scale.fuzzify(&Term::Level(-1)), Err(Error::UnknownTerm(_))));
    }

    #[test]
    fn scale_shape() {
        let scale = LinguisticScale::standard();
        assert_eq!(scale.entries().len(), 11);
        let mut tokens: Vec<_> = scale.entries().iter().map(|e| e.token).collect();
        tokens.sort_unstable();
        tokens.dedup();
        assert_eq!(tokens.len(), 11);
        for (i, e) in scale.entries().iter().enumerate() {
            assert_eq!(usize::from(e.level), i);
        }
        let crisp: Vec<f64> = scale.entries().iter().map(|e| e.value.defuzzify()).collect();
        assert!(crisp.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn term_parsing() {
        assert_eq!(Term::parse(" 7 "), Term::Level(7));
        assert_eq!(Term::parse("HI"), Term::Token("HI".into()));
        let terms: Vec<Term> = serde_json::from_str(r#"["MI", 3]"#).unwrap();
        assert_eq!(terms, vec![Term::Token("MI".into()), Term::Level(3)]);
    }

    #[test]
    fn serde_as_array() {
        let t: Tfn = serde_json::from_str("[0.1, 0.2, 0.3]").unwrap();
        assert_eq!(t, tfn(0.1, 0.2, 0.3));
        assert!(serde_json::from_str::<Tfn>("[0.3, 0.2, 0.1]").is_err());
        assert_eq!(serde_json::to_string(&t).unwrap(), "[0.1,0.2,0.3]");
    }

    fn arb_tfn() -> impl Strategy<Value = Tfn> {
        (0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64).prop_map(|(a, b, c)| {
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            tfn(v[0], v[1], v[2])
        })
    }

    proptest! {
        #[test]
        fn operations_preserve_ordering(a in arb_tfn(), b in arb_tfn(), s in 0.01..100.0f64) {
            let sum = a + b;
            prop_assert!(sum.lower() <= sum.middle() && sum.middle() <= sum.upper());
            let q = a.div_by(s).unwrap();
            prop_assert!(q.lower() <= q.middle() && q.middle() <= q.upper());
        }

        #[test]
        fn defuzzify_is_linear(a in arb_tfn(), b in arb_tfn(), s in 0.01..100.0f64) {
            prop_assert!(((a + b).defuzzify() - (a.defuzzify() + b.defuzzify())).abs() <= 1e-12);
            prop_assert!((a.div_by(s).unwrap().defuzzify() - a.defuzzify() / s).abs() <= 1e-12);
            prop_assert!((a.sub_componentwise(b).defuzzify() - (a.defuzzify() - b.defuzzify())).abs() <= 1e-12);
        }
    }
}
