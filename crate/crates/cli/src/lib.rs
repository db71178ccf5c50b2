#![forbid(unsafe_code)]
//! Command implementations behind the `comptext` binary.
//!
//! Each `cmd_*` function loads what it needs, delegates to `comptext-core`
//! and returns the value that the binary serializes.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use comptext_core::workspace::INDEX_FILE;
use comptext_core::{
    load_lexicon, load_stopwords, AnalysisError, IngestError, IngestSummary, LexiconError, Measure, Ranking,
    SentimentLexicon, ShiftReport, TimelinePoint, WordCloudGraph, Workspace, WorkspaceError, DEFAULT_TOP_K,
    DEFAULT_WORDS_PER_NODE,
};
use comptext_server::WorkspaceStore;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("stopwords: {0}")]
    Stopwords(#[from] IngestError),
    #[error("--lexicon is required for {0}")]
    MissingLexicon(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("failed to write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("server error: {0}")]
    Serve(io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "comptext",
    version,
    about = "Compare text corpora through their sentiment-carrying words"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every corpus manifest and write the workspace index
    Ingest(IngestArgs),
    /// Word shift report between a reference and a comparison corpus
    Shift(ShiftArgs),
    /// Corpora-as-nodes overview graph linked by shared top words
    Wordcloud(WordcloudArgs),
    /// Per-corpus sentiment ordered by order key
    Timeline(TimelineArgs),
    /// Serve the read-only HTTP API
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WorkspaceArgs {
    /// Directory holding one subdirectory per corpus
    #[arg(long, env = "COMPTEXT_WORKSPACE")]
    pub workspace: PathBuf,
    /// Sentiment lexicon (`term<TAB>score` per line)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Stopword file, one term per line
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub workspace: WorkspaceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ShiftArgs {
    #[command(flatten)]
    pub workspace: WorkspaceArgs,
    /// proportion, entropy or divergence
    #[arg(long)]
    pub measure: Measure,
    /// Reference corpus id
    #[arg(long = "ref")]
    pub ref_id: String,
    /// Comparison corpus id
    #[arg(long = "comp")]
    pub comp_id: String,
    /// Number of ranked words to report
    #[arg(long = "top-k", default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    /// Compare every word instead of sentiment-carrying words only
    #[arg(long)]
    pub no_sentiment_filter: bool,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WordcloudArgs {
    #[command(flatten)]
    pub workspace: WorkspaceArgs,
    /// Top words kept per corpus node
    #[arg(long = "words-per-node", default_value_t = DEFAULT_WORDS_PER_NODE)]
    pub words_per_node: usize,
    /// frequency (count) or aggregate (|score × count|)
    #[arg(long, default_value_t = Ranking::Frequency)]
    pub ranking: Ranking,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TimelineArgs {
    #[command(flatten)]
    pub workspace: WorkspaceArgs,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub workspace: WorkspaceArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
    /// Directory of built UI assets served next to the API
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

/// Everything a shift, word-cloud or timeline run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub workspace_dir: PathBuf,
    pub lexicon_path: Option<PathBuf>,
    pub stopword_path: Option<PathBuf>,
    pub measure: Option<Measure>,
    pub ref_id: String,
    pub comp_id: String,
    pub k: usize,
    pub sentiment_filter: bool,
    pub ranking: Ranking,
    pub words_per_node: usize,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(workspace_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            workspace_dir: workspace_dir.into(),
            lexicon_path: None,
            stopword_path: None,
            measure: None,
            ref_id: String::new(),
            comp_id: String::new(),
            k: DEFAULT_TOP_K,
            sentiment_filter: true,
            ranking: Ranking::Frequency,
            words_per_node: DEFAULT_WORDS_PER_NODE,
            output_path: None,
        }
    }

    fn with_workspace(args: &WorkspaceArgs) -> Self {
        RunConfig {
            lexicon_path: args.lexicon.clone(),
            stopword_path: args.stopwords.clone(),
            ..RunConfig::new(&args.workspace)
        }
    }

    fn stopwords(&self) -> Result<HashSet<String>, CliError> {
        match &self.stopword_path {
            Some(path) => Ok(load_stopwords(path)?),
            None => Ok(HashSet::new()),
        }
    }

    /// The lexicon, or an empty one when `purpose` does not need sentiment.
    fn lexicon(&self, required_for: Option<&'static str>) -> Result<SentimentLexicon, CliError> {
        match (&self.lexicon_path, required_for) {
            (Some(path), _) => Ok(load_lexicon(path)?),
            (None, Some(purpose)) => Err(CliError::MissingLexicon(purpose)),
            (None, None) => Ok(SentimentLexicon::default()),
        }
    }

    fn load(&self, required_for: Option<&'static str>) -> Result<Workspace, CliError> {
        let lexicon = self.lexicon(required_for)?;
        Ok(Workspace::load(&self.workspace_dir, lexicon, &self.stopwords()?)?)
    }
}

impl From<&ShiftArgs> for RunConfig {
    fn from(args: &ShiftArgs) -> Self {
        RunConfig {
            measure: Some(args.measure),
            ref_id: args.ref_id.clone(),
            comp_id: args.comp_id.clone(),
            k: args.top_k,
            sentiment_filter: !args.no_sentiment_filter,
            output_path: args.out.clone(),
            ..RunConfig::with_workspace(&args.workspace)
        }
    }
}

impl From<&WordcloudArgs> for RunConfig {
    fn from(args: &WordcloudArgs) -> Self {
        RunConfig {
            words_per_node: args.words_per_node,
            ranking: args.ranking,
            output_path: args.out.clone(),
            ..RunConfig::with_workspace(&args.workspace)
        }
    }
}

impl From<&TimelineArgs> for RunConfig {
    fn from(args: &TimelineArgs) -> Self {
        RunConfig {
            output_path: args.out.clone(),
            ..RunConfig::with_workspace(&args.workspace)
        }
    }
}

/// Validates the workspace, writes its index and returns the summary.
pub fn cmd_ingest(args: &WorkspaceArgs) -> Result<IngestSummary, CliError> {
    let config = RunConfig::with_workspace(args);
    let phrases = config.lexicon(None)?.phrases();
    let summary = IngestSummary::collect(&config.workspace_dir, &phrases, &config.stopwords()?)?;
    write_json(&summary, Some(&config.workspace_dir.join(INDEX_FILE)))?;
    Ok(summary)
}

pub fn cmd_shift(config: &RunConfig) -> Result<ShiftReport, CliError> {
    let measure = config
        .measure
        .ok_or_else(|| CliError::InvalidConfig("a measure is required".into()))?;
    if config.k == 0 {
        return Err(CliError::InvalidConfig("--top-k must be at least 1".into()));
    }
    if config.ref_id == config.comp_id {
        return Err(CliError::InvalidConfig(format!(
            "reference and comparison are both `{}`",
            config.ref_id
        )));
    }
    let needs = config.sentiment_filter.then_some("sentiment-filtered shifts");
    let workspace = config.load(needs)?;
    Ok(workspace.shift_report(
        &config.ref_id,
        &config.comp_id,
        measure,
        config.k,
        config.sentiment_filter,
    )?)
}

pub fn cmd_wordcloud(config: &RunConfig) -> Result<WordCloudGraph, CliError> {
    if config.words_per_node == 0 {
        return Err(CliError::InvalidConfig(
            "--words-per-node must be at least 1".into(),
        ));
    }
    let workspace = config.load(Some("the word cloud"))?;
    Ok(workspace.wordcloud(config.words_per_node, config.ranking)?)
}

pub fn cmd_timeline(config: &RunConfig) -> Result<Vec<TimelinePoint>, CliError> {
    let workspace = config.load(Some("the timeline"))?;
    Ok(workspace.timeline()?)
}

/// Loads the workspace and blocks serving it until interrupted.
pub fn cmd_serve(args: &ServeArgs) -> Result<(), CliError> {
    let config = RunConfig::with_workspace(&args.workspace);
    let workspace = config.load(Some("serving"))?;
    let store = Arc::new(WorkspaceStore::new(workspace)?);
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
    runtime
        .block_on(comptext_server::serve(
            store,
            SocketAddr::new(args.host, args.port),
            args.ui_dir.clone(),
        ))
        .map_err(CliError::Serve)
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types always serialize");
    text.push('\n');
    match path {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => {
            let summary = cmd_ingest(&args.workspace)?;
            println!("{} corpora", summary.corpora.len());
            for c in &summary.corpora {
                println!(
                    "{}\t{}\torder {}\t{} documents\t{} tokens\t{} distinct",
                    c.id, c.label, c.order_key, c.documents, c.token_total, c.vocabulary
                );
            }
            Ok(())
        }
        Command::Shift(args) => {
            let config = RunConfig::from(&args);
            write_json(&cmd_shift(&config)?, config.output_path.as_deref())
        }
        Command::Wordcloud(args) => {
            let config = RunConfig::from(&args);
            write_json(&cmd_wordcloud(&config)?, config.output_path.as_deref())
        }
        Command::Timeline(args) => {
            let config = RunConfig::from(&args);
            write_json(&cmd_timeline(&config)?, config.output_path.as_deref())
        }
        Command::Serve(args) => cmd_serve(&args),
    }
}
