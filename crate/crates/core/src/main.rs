use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fuzzy_dematel::fixtures::RelationScale;
use fuzzy_dematel::report::{self, InputMode, OutputFormat, RunOptions};

#[derive(Parser, Debug)]
#[command(name = "fuzzy-dematel", version)]
#[command(about = "Fuzzy DEMATEL cause/effect analysis of expert influence surveys")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an analysis and write result tables
    Analyze(RunArgs),
    /// Write the causal-diagram CSV and the influence map (DOT)
    ExportGraph(RunArgs),
    /// List bundled fixtures
    Fixtures,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Surveys,
    Fixture,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Scale {
    Canonical,
    PaperTable5,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
    Dot,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Survey JSON, expert CSV file or directory of CSVs; or a fixture JSON in fixture mode
    #[arg(long)]
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "surveys")]
    mode: Mode,

    /// Bundled fixture name (fixture mode)
    #[arg(long)]
    fixture: Option<String>,

    /// Influence-map threshold; defaults to the mean crisp total-relation entry
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,

    #[arg(long, value_enum, default_value = "canonical")]
    relation_scale: Scale,

    /// Decimal places in tables
    #[arg(long, default_value_t = report::DEFAULT_PRECISION)]
    precision: usize,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,csv,markdown,dot")]
    formats: Vec<Format>,
}

impl RunArgs {
    fn into_options(self) -> RunOptions {
        RunOptions {
            input: self.input,
            mode: match self.mode {
                Mode::Surveys => InputMode::Surveys,
                Mode::Fixture => InputMode::Fixture,
            },
            fixture: self.fixture,
            threshold: self.threshold,
            relation_scale: match self.relation_scale {
                Scale::Canonical => RelationScale::Canonical,
                Scale::PaperTable5 => RelationScale::PaperTable5,
            },
            out_dir: self.out,
            formats: self
                .formats
                .into_iter()
                .map(|f| match f {
                    Format::Json => OutputFormat::Json,
                    Format::Csv => OutputFormat::Csv,
                    Format::Markdown => OutputFormat::Markdown,
                    Format::Dot => OutputFormat::Dot,
                })
                .collect(),
            precision: self.precision,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => report::cmd_analyze(&args.into_options()),
        Command::ExportGraph(args) => report::cmd_export_graph(&args.into_options()),
        Command::Fixtures => report::cmd_show_fixtures().map(|listing| {
            print!("{listing}");
            Vec::new()
        }),
    };
    match outcome {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
