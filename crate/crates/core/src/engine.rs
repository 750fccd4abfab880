//! The fuzzy DEMATEL pipeline.
//!
//! Expert direct-relation matrices are averaged, normalized by the largest
//! upper-component row sum, and expanded into a total-relation matrix
//! `G (I - G)^-1` one crisp layer at a time. Row sums (D, dispatched
//! influence) and column sums (R, received influence) then give each
//! criterion a prominence `D + R` and a relation `D - R`; the sign of the
//! crisp relation separates net causes from net effects.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Component, Error, Result, Stage};
use crate::matrix::CrispMatrix;
use crate::tfn::{SignedTriple, Tfn};

/// Relations within this distance of zero are classified as neutral.
pub const NEUTRAL_EPSILON: f64 = 1e-12;

/// Slack allowed on the normalized row-sum bound before inversion.
pub const ROW_SUM_SLACK: f64 = 1e-12;

/// Round-off tolerated when reassembling inverted layers into ordered triples.
const ORDER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Direct,
    Aggregated,
    Normalized,
    Total,
}

impl MatrixKind {
    fn name(self) -> &'static str {
        match self {
            MatrixKind::Direct => "direct-relation",
            MatrixKind::Aggregated => "aggregated",
            MatrixKind::Normalized => "normalized",
            MatrixKind::Total => "total-relation",
        }
    }
}

/// Square matrix of fuzzy numbers tagged with its pipeline role.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyMatrix {
    kind: MatrixKind,
    order: usize,
    entries: Vec<Tfn>,
}

impl FuzzyMatrix {
    /// Direct-relation matrices must have a `(0,0,0)` diagonal; normalized
    /// matrices must have every component in `[0, 1]`.
    pub fn new(kind: MatrixKind, rows: Vec<Vec<Tfn>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::dimension("fuzzy matrix order", 1, 0));
        }
        let mut entries = Vec::with_capacity(order * order);
        for row in rows {
            if row.len() != order {
                return Err(Error::dimension("fuzzy matrix row length", order, row.len()));
            }
            entries.extend(row);
        }
        let m = FuzzyMatrix { kind, order, entries };
        match kind {
            MatrixKind::Direct => {
                if let Some(i) = (0..order).find(|&i| m.get(i, i) != Tfn::ZERO) {
                    return Err(Error::Invalid(format!(
                        "direct-relation diagonal cell ({i}, {i}) must be (0,0,0)"
                    )));
                }
            }
            MatrixKind::Normalized => {
                let in_unit = |x: f64| (0.0..=1.0).contains(&x);
                if !m.entries.iter().all(|t| in_unit(t.lower()) && in_unit(t.upper())) {
                    return Err(Error::Invalid("normalized entries must lie in [0, 1]".into()));
                }
            }
            MatrixKind::Aggregated | MatrixKind::Total => {}
        }
        Ok(m)
    }

    pub fn from_arrays(kind: MatrixKind, rows: &[Vec<[f64; 3]>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&t| Tfn::try_from(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FuzzyMatrix::new(kind, rows)
    }

    /// Reassembles three crisp layers. Ordering violations below round-off are absorbed.
    pub fn from_components(
        kind: MatrixKind,
        lower: &CrispMatrix,
        middle: &CrispMatrix,
        upper: &CrispMatrix,
    ) -> Result<Self> {
        let order = lower.order();
        if middle.order() != order || upper.order() != order {
            return Err(Error::dimension("component order", order, middle.order().max(upper.order())));
        }
        let entries = (0..order * order)
            .map(|k| {
                Tfn::new_with_slack(
                    lower.entries()[k],
                    middle.entries()[k],
                    upper.entries()[k],
                    ORDER_SLACK,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FuzzyMatrix { kind, order, entries })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Tfn {
        self.entries[i * self.order + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<Tfn>> {
        self.entries.chunks(self.order).map(<[Tfn]>::to_vec).collect()
    }

    pub fn to_arrays(&self) -> Vec<Vec<[f64; 3]>> {
        self.entries
            .chunks(self.order)
            .map(|r| r.iter().map(|t| t.to_array()).collect())
            .collect()
    }

    pub fn component(&self, component: Component) -> CrispMatrix {
        CrispMatrix::from_fn(self.order, |i, j| {
            let t = self.get(i, j);
            match component {
                Component::Lower => t.lower(),
                Component::Middle => t.middle(),
                Component::Upper => t.upper(),
            }
        })
    }

    /// Entrywise graded-mean defuzzification.
    pub fn defuzzified(&self) -> CrispMatrix {
        CrispMatrix::from_fn(self.order, |i, j| self.get(i, j).defuzzify())
    }

    pub fn row_sum(&self, i: usize) -> Tfn {
        (0..self.order).map(|j| self.get(i, j)).sum()
    }

    pub fn col_sum(&self, j: usize) -> Tfn {
        (0..self.order).map(|i| self.get(i, j)).sum()
    }

    /// Reorders criteria so that new index `k` holds old criterion `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> FuzzyMatrix {
        assert_eq!(perm.len(), self.order);
        let entries = (0..self.order * self.order)
            .map(|k| self.get(perm[k / self.order], perm[k % self.order]))
            .collect();
        FuzzyMatrix {
            kind: self.kind,
            order: self.order,
            entries,
        }
    }

    fn expect_kind(&self, expected: MatrixKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::KindMismatch {
                expected: expected.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }
}

/// Divisor `c` applied to every aggregated entry: the largest row sum of
/// upper components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationConstant(pub f64);

/// Sum that does not depend on the order of its terms.
fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

/// Entrywise mean of the expert direct-relation matrices.
pub fn aggregate(surveys: &[FuzzyMatrix]) -> Result<FuzzyMatrix> {
    let first = surveys.first().ok_or(Error::NoSurveys)?;
    let n = first.order;
    for s in surveys {
        s.expect_kind(MatrixKind::Direct)?;
        if s.order != n {
            return Err(Error::dimension("survey order", n, s.order));
        }
    }
    let count = surveys.len() as f64;
    let layer = |c: Component| {
        CrispMatrix::from_fn(n, |i, j| {
            let values = surveys
                .iter()
                .map(|s| {
                    let t = s.get(i, j);
                    match c {
                        Component::Lower => t.lower(),
                        Component::Middle => t.middle(),
                        Component::Upper => t.upper(),
                    }
                })
                .collect();
            sorted_sum(values) / count
        })
    };
    FuzzyMatrix::from_components(
        MatrixKind::Aggregated,
        &layer(Component::Lower),
        &layer(Component::Middle),
        &layer(Component::Upper),
    )
}

/// Divides every aggregated entry by the largest upper-component row sum.
pub fn normalize(aggregated: &FuzzyMatrix) -> Result<(FuzzyMatrix, NormalizationConstant)> {
    aggregated.expect_kind(MatrixKind::Aggregated)?;
    if aggregated.entries.iter().any(|t| t.lower() < 0.0) {
        return Err(Error::Degenerate("aggregated influences must be non-negative".into()));
    }
    let c = (0..aggregated.order)
        .map(|i| aggregated.row_sum(i).upper())
        .fold(0.0, f64::max);
    if c <= 0.0 {
        return Err(Error::Degenerate(
            "all aggregated influences are zero; normalization constant would be 0".into(),
        ));
    }
    let entries = aggregated
        .entries
        .iter()
        .map(|t| t.div_by(c))
        .collect::<Result<Vec<_>>>()?;
    let normalized = FuzzyMatrix {
        kind: MatrixKind::Normalized,
        order: aggregated.order,
        entries,
    };
    Ok((normalized, NormalizationConstant(c)))
}

/// Total-relation matrix: each crisp layer `M` becomes `M (I - M)^-1`.
pub fn total_relation(normalized: &FuzzyMatrix) -> Result<FuzzyMatrix> {
    normalized.expect_kind(MatrixKind::Normalized)?;
    let mut layers = Vec::with_capacity(3);
    for component in Component::ALL {
        let layer = normalized.component(component);
        let row_sum = layer.max_abs_row_sum();
        if row_sum > 1.0 + ROW_SUM_SLACK {
            return Err(Error::Divergent { row_sum }.in_component(component));
        }
        layers.push(layer.total_relation().map_err(|e| e.in_component(component))?);
    }
    FuzzyMatrix::from_components(MatrixKind::Total, &layers[0], &layers[1], &layers[2])
}

/// Dispatched (row sums) and received (column sums) influence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispatchReceive {
    pub d: Vec<Tfn>,
    pub r: Vec<Tfn>,
    pub d_crisp: Vec<f64>,
    pub r_crisp: Vec<f64>,
}

impl DispatchReceive {
    pub fn new(d: Vec<Tfn>, r: Vec<Tfn>) -> Result<Self> {
        if d.len() != r.len() {
            return Err(Error::dimension("D/R vector length", d.len(), r.len()));
        }
        let d_crisp = d.iter().map(Tfn::defuzzify).collect();
        let r_crisp = r.iter().map(Tfn::defuzzify).collect();
        Ok(DispatchReceive { d, r, d_crisp, r_crisp })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

pub fn compute_dr(total: &FuzzyMatrix) -> Result<DispatchReceive> {
    total.expect_kind(MatrixKind::Total)?;
    let n = total.order;
    DispatchReceive::new(
        (0..n).map(|i| total.row_sum(i)).collect(),
        (0..n).map(|j| total.col_sum(j)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProminenceRelation {
    pub prominence: Tfn,
    pub relation: SignedTriple,
    pub prominence_crisp: f64,
    pub relation_crisp: f64,
}

/// `D + R` and componentwise `D - R`, fuzzy and defuzzified.
pub fn prominence_relation(d: &[Tfn], r: &[Tfn]) -> Result<Vec<ProminenceRelation>> {
    if d.len() != r.len() {
        return Err(Error::dimension("D/R vector length", d.len(), r.len()));
    }
    Ok(d.iter()
        .zip(r)
        .map(|(&d, &r)| {
            let prominence = d + r;
            let relation = d.sub_componentwise(r);
            ProminenceRelation {
                prominence,
                relation,
                prominence_crisp: prominence.defuzzify(),
                relation_crisp: relation.defuzzify(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalClass {
    NetCause,
    NetEffect,
    Neutral,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalClass::NetCause => "net cause",
            CausalClass::NetEffect => "net effect",
            CausalClass::Neutral => "neutral",
        })
    }
}

pub fn classify(relation_crisp: f64) -> CausalClass {
    if relation_crisp > NEUTRAL_EPSILON {
        CausalClass::NetCause
    } else if relation_crisp < -NEUTRAL_EPSILON {
        CausalClass::NetEffect
    } else {
        CausalClass::Neutral
    }
}

/// 1-based ranks by descending prominence; ties keep input order.
pub fn rank_by_prominence(prominence: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..prominence.len()).collect();
    order.sort_by(|&a, &b| prominence[b].total_cmp(&prominence[a]));
    let mut ranks = vec![0; prominence.len()];
    for (position, &idx) in order.iter().enumerate() {
        ranks[idx] = position + 1;
    }
    ranks
}

/// Above-threshold links of the crisp total-relation matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceMap {
    pub threshold: f64,
    /// `(from, to)` criterion indices in row-major order.
    pub edges: Vec<(usize, usize)>,
}

/// Keeps every off-diagonal entry `>= threshold`. The default threshold is
/// the mean of all `n^2` entries.
pub fn irm_edges(crisp_total: &CrispMatrix, threshold: Option<f64>) -> InfluenceMap {
    let n = crisp_total.order();
    let threshold = threshold.unwrap_or_else(|| {
        sorted_sum(crisp_total.entries().to_vec()) / (n * n) as f64
    });
    let edges = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && crisp_total[(i, j)] >= threshold)
        .collect();
    InfluenceMap { threshold, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionScore {
    pub d: Tfn,
    pub r: Tfn,
    pub d_crisp: f64,
    pub r_crisp: f64,
    pub prominence: Tfn,
    pub relation: SignedTriple,
    pub prominence_crisp: f64,
    pub relation_crisp: f64,
    pub class: CausalClass,
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOptions {
    /// Influence-map threshold; defaults to the mean total-relation entry.
    pub threshold: Option<f64>,
}

/// Everything a run produced. Matrix stages are absent when the run started
/// downstream of them.
#[derive(Debug, Clone, PartialEq)]
pub struct DematelResult {
    pub scores: Vec<CriterionScore>,
    pub aggregated: Option<FuzzyMatrix>,
    pub normalized: Option<FuzzyMatrix>,
    pub normalization: Option<NormalizationConstant>,
    pub total: Option<FuzzyMatrix>,
    pub crisp_total: Option<CrispMatrix>,
    pub influence: Option<InfluenceMap>,
}

impl DematelResult {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn score(dr: &DispatchReceive) -> Result<Vec<CriterionScore>> {
    let pr = prominence_relation(&dr.d, &dr.r).map_err(|e| e.at_stage(Stage::ProminenceRelation))?;
    let prominence: Vec<f64> = pr.iter().map(|p| p.prominence_crisp).collect();
    let ranks = rank_by_prominence(&prominence);
    Ok(pr
        .iter()
        .enumerate()
        .map(|(i, p)| CriterionScore {
            d: dr.d[i],
            r: dr.r[i],
            d_crisp: dr.d_crisp[i],
            r_crisp: dr.r_crisp[i],
            prominence: p.prominence,
            relation: p.relation,
            prominence_crisp: p.prominence_crisp,
            relation_crisp: p.relation_crisp,
            class: classify(p.relation_crisp),
            rank: ranks[i],
        })
        .collect())
}

/// Runs every stage from expert direct-relation matrices.
pub fn run_pipeline(surveys: &[FuzzyMatrix], options: &PipelineOptions) -> Result<DematelResult> {
    let aggregated = aggregate(surveys).map_err(|e| e.at_stage(Stage::Aggregate))?;
    let (normalized, c) = normalize(&aggregated).map_err(|e| e.at_stage(Stage::Normalize))?;
    let total = total_relation(&normalized).map_err(|e| e.at_stage(Stage::TotalRelation))?;
    let mut result = run_from_total(total, options)?;
    result.aggregated = Some(aggregated);
    result.normalized = Some(normalized);
    result.normalization = Some(c);
    Ok(result)
}

/// Starts from an existing total-relation matrix.
pub fn run_from_total(total: FuzzyMatrix, options: &PipelineOptions) -> Result<DematelResult> {
    let dr = compute_dr(&total).map_err(|e| e.at_stage(Stage::DispatchReceive))?;
    let scores = score(&dr)?;
    let crisp_total = total.defuzzified();
    let influence = irm_edges(&crisp_total, options.threshold);
    Ok(DematelResult {
        scores,
        aggregated: None,
        normalized: None,
        normalization: None,
        total: Some(total),
        crisp_total: Some(crisp_total),
        influence: Some(influence),
    })
}

/// Starts from D and R vectors; no matrices or influence map are available.
pub fn run_from_dr(dr: &DispatchReceive) -> Result<DematelResult> {
    Ok(DematelResult {
        scores: score(dr)?,
        aggregated: None,
        normalized: None,
        normalization: None,
        total: None,
        crisp_total: None,
        influence: None,
    })
}
