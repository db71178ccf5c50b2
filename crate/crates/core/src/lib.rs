#![forbid(unsafe_code)]
//! Corpus comparison focused on sentiment-carrying words.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`corpus`]: manifests, tokenization, frequency distributions
//! - [`sentiment`]: lexicons, tagging, filtering to sentiment words
//! - [`shift`]: proportion, entropy and divergence word shifts
//! - [`graph`]: the multi-corpus word-cloud graph and sentiment timeline
//! - [`workspace`]: a directory of corpora loaded and analysed together
//!
//! Every value produced here is a pure function of its inputs; distributions,
//! lexicons and reports are immutable once built.

pub mod corpus;
pub mod graph;
pub mod sentiment;
pub mod shift;
pub mod workspace;

pub use corpus::{
    build_distribution, load_corpus, load_stopwords, tokenize, Corpus, Document, IngestError, PhraseSet,
    TokenDistribution,
};
pub use graph::{
    build_timeline, build_wordcloud, CorpusSentiment, GraphError, Ranking, TimelinePoint, TimelinePolarity,
    TopWord, WordCloudEdge, WordCloudGraph, WordCloudNode, DEFAULT_WORDS_PER_NODE,
};
pub use sentiment::{
    aggregate_sentiment, annotate, corpus_sentiment_total, load_lexicon, AnnotatedDistribution, LexiconError,
    Polarity, SentimentLexicon, SentimentTag,
};
pub use shift::{
    build_report, divergence_shift_items, entropy_difference, entropy_shift_items, kl_divergence_common,
    proportion_shift_items, shannon_entropy, CumulativePoint, Direction, Measure, Role, ShiftError,
    ShiftItem, ShiftReport, DEFAULT_TOP_K,
};
pub use workspace::{AnalysisError, CorpusRecord, IngestSummary, Workspace, WorkspaceError};
