//! Analysis runs and their renderings: CSV and Markdown tables, a JSON
//! dump of every stage, a causal-diagram point list, and the influence map
//! as Graphviz DOT.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::engine::{self, CausalClass, DematelResult, PipelineOptions};
use crate::error::{Error, Result};
use crate::fixtures::{self, Fixture, FixtureData, RelationScale};
use crate::survey::{self, Criterion, ExpertSurveySet};
use crate::tfn::LinguisticScale;

pub const DEFAULT_PRECISION: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    Surveys,
    Fixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
    Dot,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 4] = [
        OutputFormat::Json,
        OutputFormat::Csv,
        OutputFormat::Markdown,
        OutputFormat::Dot,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub input: Option<PathBuf>,
    pub mode: InputMode,
    pub fixture: Option<String>,
    pub threshold: Option<f64>,
    pub relation_scale: RelationScale,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub precision: usize,
}

impl RunOptions {
    pub fn new(mode: InputMode, out_dir: impl Into<PathBuf>) -> Self {
        RunOptions {
            input: None,
            mode,
            fixture: None,
            threshold: None,
            relation_scale: RelationScale::Canonical,
            out_dir: out_dir.into(),
            formats: OutputFormat::ALL.to_vec(),
            precision: DEFAULT_PRECISION,
        }
    }
}

/// A finished run together with the criteria it was computed over.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub criteria: Vec<Criterion>,
    pub result: DematelResult,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_surveys(path: &Path, scale: &LinguisticScale) -> Result<ExpertSurveySet> {
    let set = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        let docs = files
            .iter()
            .map(|p| {
                let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                read(p).map(|doc| (id, doc))
            })
            .collect::<Result<Vec<_>>>()?;
        return survey::survey_set_from_csv(&docs, scale);
    } else if path.extension().is_some_and(|x| x == "csv") {
        let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        return survey::survey_set_from_csv(&[(id, read(path)?)], scale);
    } else {
        survey::parse_survey_document(&read(path)?)?
    };
    let violations = survey::validate_survey_set(&set, scale);
    if !violations.is_empty() {
        return Err(Error::Validation(violations.iter().map(ToString::to_string).collect()));
    }
    Ok(set)
}

fn analyze_fixture(fixture: &Fixture, options: &PipelineOptions) -> Result<DematelResult> {
    match &fixture.data {
        FixtureData::FuzzyMatrix { .. } => engine::run_from_total(fixture.total_relation()?, options),
        FixtureData::DrVectors { .. } => engine::run_from_dr(&fixture.dispatch_receive()?),
        _ => Err(Error::Invalid(format!(
            "fixture `{}` holds reference results, not an analysis input; use a fuzzy-matrix or dr-vectors fixture",
            fixture.name
        ))),
    }
}

/// Loads the input named by `opts` and runs the pipeline on it.
pub fn run_analysis(opts: &RunOptions) -> Result<Analysis> {
    let pipeline = PipelineOptions {
        threshold: opts.threshold,
    };
    match opts.mode {
        InputMode::Surveys => {
            let path = opts
                .input
                .as_deref()
                .ok_or_else(|| Error::Invalid("surveys mode needs --input".into()))?;
            let scale = LinguisticScale::standard();
            let set = load_surveys(path, &scale)?;
            let result = engine::run_pipeline(&set.direct_matrices(&scale)?, &pipeline)?;
            let criteria = set.criteria.at_level(set.level).into_iter().cloned().collect();
            Ok(Analysis { criteria, result })
        }
        InputMode::Fixture => {
            let fixture = match (&opts.fixture, &opts.input) {
                (Some(name), _) => fixtures::load_fixture(name)?,
                (None, Some(path)) => Fixture::parse(&read(path)?)?,
                (None, None) => return Err(Error::Invalid("fixture mode needs --fixture or --input".into())),
            };
            let result = analyze_fixture(&fixture, &pipeline)?;
            Ok(Analysis {
                criteria: fixture.criteria,
                result,
            })
        }
    }
}

/// Half-away-from-zero rounding to `precision` decimals.
pub fn round_half_away(x: f64, precision: usize) -> f64 {
    let scale = 10f64.powi(precision as i32);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_fixed(x: f64, precision: usize) -> String {
    format!("{:.*}", precision, round_half_away(x, precision))
}

fn fmt_triple(t: [f64; 3], precision: usize) -> String {
    format!(
        "({}, {}, {})",
        fmt_fixed(t[0], precision),
        fmt_fixed(t[1], precision),
        fmt_fixed(t[2], precision)
    )
}

fn class_token(class: CausalClass) -> &'static str {
    match class {
        CausalClass::NetCause => "net-cause",
        CausalClass::NetEffect => "net-effect",
        CausalClass::Neutral => "neutral",
    }
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV output is UTF-8")
}

/// Crisp total-relation matrix, or `None` when the run had no matrix.
pub fn render_total_csv(analysis: &Analysis, precision: usize) -> Option<String> {
    let total = analysis.result.crisp_total.as_ref()?;
    let mut rows = vec![std::iter::once("code".to_string())
        .chain(analysis.criteria.iter().map(|c| c.code.clone()))
        .collect::<Vec<_>>()];
    for (c, row) in analysis.criteria.iter().zip(total.rows()) {
        rows.push(
            std::iter::once(c.code.clone())
                .chain(row.iter().map(|&x| fmt_fixed(x, precision)))
                .collect(),
        );
    }
    Some(csv_string(rows))
}

pub fn render_dr_csv(analysis: &Analysis, precision: usize) -> String {
    let header = ["code", "label", "d_l", "d_m", "d_u", "r_l", "r_m", "r_u", "d_crisp", "r_crisp"];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for (c, s) in analysis.criteria.iter().zip(&analysis.result.scores) {
        let mut row = vec![c.code.clone(), c.label.clone()];
        row.extend(s.d.to_array().iter().map(|&x| fmt_fixed(x, precision)));
        row.extend(s.r.to_array().iter().map(|&x| fmt_fixed(x, precision)));
        row.push(fmt_fixed(s.d_crisp, precision));
        row.push(fmt_fixed(s.r_crisp, precision));
        rows.push(row);
    }
    csv_string(rows)
}

pub fn render_prominence_csv(analysis: &Analysis, scale: RelationScale, precision: usize) -> String {
    let header = [
        "code",
        "label",
        "prominence_l",
        "prominence_m",
        "prominence_u",
        "relation_l",
        "relation_m",
        "relation_u",
        "prominence_crisp",
        "relation_crisp",
        "class",
        "rank",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for (c, s) in analysis.criteria.iter().zip(&analysis.result.scores) {
        let mut row = vec![c.code.clone(), c.label.clone()];
        row.extend(s.prominence.to_array().iter().map(|&x| fmt_fixed(x, precision)));
        row.extend(s.relation.to_array().iter().map(|&x| fmt_fixed(x, precision)));
        row.push(fmt_fixed(s.prominence_crisp, precision));
        row.push(fmt_fixed(s.relation_crisp * scale.factor(), precision));
        row.push(class_token(s.class).to_string());
        row.push(s.rank.to_string());
        rows.push(row);
    }
    csv_string(rows)
}

/// Causal-diagram points: prominence on the horizontal axis, relation on the vertical.
pub fn render_causal_csv(analysis: &Analysis, scale: RelationScale, precision: usize) -> String {
    let mut rows = vec![vec!["code".to_string(), "prominence".into(), "relation".into()]];
    for (c, s) in analysis.criteria.iter().zip(&analysis.result.scores) {
        rows.push(vec![
            c.code.clone(),
            fmt_fixed(s.prominence_crisp, precision),
            fmt_fixed(s.relation_crisp * scale.factor(), precision),
        ]);
    }
    csv_string(rows)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Influence map as a Graphviz digraph. Net causes get a double border.
pub fn render_dot(analysis: &Analysis, precision: usize) -> Option<String> {
    let (map, total) = (analysis.result.influence.as_ref()?, analysis.result.crisp_total.as_ref()?);
    let mut out = String::new();
    out.push_str("digraph irm {\n");
    let _ = writeln!(out, "  // threshold = {}", fmt_fixed(map.threshold, precision));
    out.push_str("  rankdir=LR;\n  node [shape=ellipse];\n");
    for (c, s) in analysis.criteria.iter().zip(&analysis.result.scores) {
        let peripheries = if s.class == CausalClass::NetCause { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{}\\n{}\", peripheries={}, class=\"{}\"];",
            dot_escape(&c.code),
            dot_escape(&c.code),
            dot_escape(&c.label),
            peripheries,
            class_token(s.class)
        );
    }
    for &(i, j) in &map.edges {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(&analysis.criteria[i].code),
            dot_escape(&analysis.criteria[j].code),
            fmt_fixed(total[(i, j)], precision)
        );
    }
    out.push_str("}\n");
    Some(out)
}

fn md_row(cells: impl IntoIterator<Item = String>) -> String {
    let cells: Vec<String> = cells.into_iter().collect();
    format!("| {} |\n", cells.join(" | "))
}

pub fn render_markdown(analysis: &Analysis, scale: RelationScale, precision: usize) -> String {
    let r = &analysis.result;
    let codes: Vec<String> = analysis.criteria.iter().map(|c| c.code.clone()).collect();
    let mut out = String::from("# Fuzzy DEMATEL report\n\n");
    let _ = writeln!(out, "Criteria: {}\n", codes.join(", "));
    if let Some(c) = r.normalization {
        let _ = writeln!(out, "Normalization constant c = {}\n", fmt_fixed(c.0, precision));
    }

    if let Some(total) = &r.crisp_total {
        out.push_str("## Crisp total-relation matrix\n\n");
        out.push_str(&md_row(std::iter::once(String::new()).chain(codes.iter().cloned())));
        out.push_str(&md_row(std::iter::once("---".to_string()).chain(codes.iter().map(|_| "---:".into()))));
        for (code, row) in codes.iter().zip(total.rows()) {
            out.push_str(&md_row(
                std::iter::once(code.clone()).chain(row.iter().map(|&x| fmt_fixed(x, precision))),
            ));
        }
        out.push('\n');
    }

    out.push_str("## Dispatched (D) and received (R) influence\n\n");
    out.push_str("| Code | Criterion | D | R | D crisp | R crisp |\n");
    out.push_str("|---|---|---|---|---:|---:|\n");
    for (c, s) in analysis.criteria.iter().zip(&r.scores) {
        out.push_str(&md_row([
            c.code.clone(),
            c.label.clone(),
            fmt_triple(s.d.to_array(), precision),
            fmt_triple(s.r.to_array(), precision),
            fmt_fixed(s.d_crisp, precision),
            fmt_fixed(s.r_crisp, precision),
        ]));
    }
    out.push('\n');

    out.push_str("## Prominence (D+R) and relation (D-R)\n\n");
    let scale_note = match scale {
        RelationScale::Canonical => "graded mean (l+2m+u)/4",
        RelationScale::PaperTable5 => "l+2m+u (four times the graded mean)",
    };
    let _ = writeln!(out, "Crisp relation scale: {scale_note}\n");
    out.push_str("| Code | Criterion | D+R | D-R | D+R crisp | D-R crisp | Class | Rank |\n");
    out.push_str("|---|---|---|---|---:|---:|---|---:|\n");
    for (c, s) in analysis.criteria.iter().zip(&r.scores) {
        out.push_str(&md_row([
            c.code.clone(),
            c.label.clone(),
            fmt_triple(s.prominence.to_array(), precision),
            fmt_triple(s.relation.to_array(), precision),
            fmt_fixed(s.prominence_crisp, precision),
            fmt_fixed(s.relation_crisp * scale.factor(), precision),
            s.class.to_string(),
            s.rank.to_string(),
        ]));
    }

    if let Some(map) = &r.influence {
        out.push_str("\n## Influence map\n\n");
        let _ = writeln!(out, "Threshold: {}\n", fmt_fixed(map.threshold, precision));
        if map.edges.is_empty() {
            out.push_str("No links at or above the threshold.\n");
        }
        for &(i, j) in &map.edges {
            let _ = writeln!(out, "- {} -> {}", codes[i], codes[j]);
        }
    }
    out
}

#[derive(Serialize)]
struct ScoreRecord<'a> {
    code: &'a str,
    label: &'a str,
    d: [f64; 3],
    r: [f64; 3],
    d_crisp: f64,
    r_crisp: f64,
    prominence: [f64; 3],
    relation: [f64; 3],
    prominence_crisp: f64,
    relation_crisp: f64,
    class: CausalClass,
    rank: usize,
}

#[derive(Serialize)]
struct InfluenceRecord<'a> {
    threshold: f64,
    edges: Vec<[&'a str; 2]>,
}

#[derive(Serialize)]
struct ResultRecord<'a> {
    criteria: &'a [Criterion],
    normalization_constant: Option<f64>,
    aggregated: Option<Vec<Vec<[f64; 3]>>>,
    normalized: Option<Vec<Vec<[f64; 3]>>>,
    total: Option<Vec<Vec<[f64; 3]>>>,
    crisp_total: Option<Vec<Vec<f64>>>,
    scores: Vec<ScoreRecord<'a>>,
    influence_map: Option<InfluenceRecord<'a>>,
}

/// Full-precision JSON of every stage. Crisp relations are on the graded-mean scale.
pub fn render_json(analysis: &Analysis) -> String {
    let r = &analysis.result;
    let code = |i: usize| analysis.criteria[i].code.as_str();
    let record = ResultRecord {
        criteria: &analysis.criteria,
        normalization_constant: r.normalization.map(|c| c.0),
        aggregated: r.aggregated.as_ref().map(|m| m.to_arrays()),
        normalized: r.normalized.as_ref().map(|m| m.to_arrays()),
        total: r.total.as_ref().map(|m| m.to_arrays()),
        crisp_total: r.crisp_total.as_ref().map(|m| m.to_rows()),
        scores: analysis
            .criteria
            .iter()
            .zip(&r.scores)
            .map(|(c, s)| ScoreRecord {
                code: &c.code,
                label: &c.label,
                d: s.d.to_array(),
                r: s.r.to_array(),
                d_crisp: s.d_crisp,
                r_crisp: s.r_crisp,
                prominence: s.prominence.to_array(),
                relation: s.relation.to_array(),
                prominence_crisp: s.prominence_crisp,
                relation_crisp: s.relation_crisp,
                class: s.class,
                rank: s.rank,
            })
            .collect(),
        influence_map: r.influence.as_ref().map(|m| InfluenceRecord {
            threshold: m.threshold,
            edges: m.edges.iter().map(|&(i, j)| [code(i), code(j)]).collect(),
        }),
    };
    let mut s = serde_json::to_string_pretty(&record).expect("result records always serialize");
    s.push('\n');
    s
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes the requested result files and returns their paths.
pub fn write_analysis(analysis: &Analysis, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let dir = opts.out_dir.as_path();
    ensure_dir(dir)?;
    let p = opts.precision;
    let mut formats = opts.formats.clone();
    formats.sort();
    formats.dedup();
    let mut written = Vec::new();
    for format in formats {
        match format {
            OutputFormat::Json => write_file(dir, "result.json", &render_json(analysis), &mut written)?,
            OutputFormat::Csv => {
                if let Some(total) = render_total_csv(analysis, p) {
                    write_file(dir, "total_crisp.csv", &total, &mut written)?;
                }
                write_file(dir, "dr.csv", &render_dr_csv(analysis, p), &mut written)?;
                write_file(
                    dir,
                    "prominence_relation.csv",
                    &render_prominence_csv(analysis, opts.relation_scale, p),
                    &mut written,
                )?;
            }
            OutputFormat::Markdown => write_file(
                dir,
                "report.md",
                &render_markdown(analysis, opts.relation_scale, p),
                &mut written,
            )?,
            OutputFormat::Dot => {
                if let Some(dot) = render_dot(analysis, p) {
                    write_file(dir, "irm.dot", &dot, &mut written)?;
                }
            }
        }
    }
    Ok(written)
}

/// Causal-diagram CSV plus, when a total-relation matrix exists, the influence map.
pub fn write_graphs(analysis: &Analysis, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let dir = opts.out_dir.as_path();
    ensure_dir(dir)?;
    let mut written = Vec::new();
    write_file(
        dir,
        "causal.csv",
        &render_causal_csv(analysis, opts.relation_scale, opts.precision),
        &mut written,
    )?;
    if let Some(dot) = render_dot(analysis, opts.precision) {
        write_file(dir, "irm.dot", &dot, &mut written)?;
    }
    Ok(written)
}

pub fn cmd_analyze(opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let analysis = run_analysis(opts)?;
    write_analysis(&analysis, opts)
}

pub fn cmd_export_graph(opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let analysis = run_analysis(opts)?;
    write_graphs(&analysis, opts)
}

/// One line per bundled fixture: name, shape, description.
pub fn cmd_show_fixtures() -> Result<String> {
    let mut out = String::new();
    for name in fixtures::fixture_names() {
        let f = fixtures::load_fixture(name)?;
        let _ = writeln!(out, "{} {}  {}", f.name, f.shape(), f.description);
    }
    Ok(out)
}
