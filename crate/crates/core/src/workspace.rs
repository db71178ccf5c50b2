//! A workspace is a directory whose subdirectories each hold one corpus
//! manifest. Loading a workspace tokenizes every corpus once and keeps both
//! its raw and its sentiment-filtered distribution.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{load_corpus, Corpus, IngestError, PhraseSet, TokenDistribution, MANIFEST_FILE};
use crate::graph::{
    build_timeline, build_wordcloud, CorpusSentiment, GraphError, Ranking, TimelinePoint, WordCloudGraph,
};
use crate::sentiment::{annotate, load_lexicon, AnnotatedDistribution, LexiconError, SentimentLexicon};
use crate::shift::{build_report, Measure, ShiftError, ShiftReport};

/// Ingestion summary written by `ingest` at the workspace root.
pub const INDEX_FILE: &str = "comptext-index.json";
/// Optional per-corpus sentiment overrides, in lexicon format.
pub const ANNOTATIONS_FILE: &str = "annotations.tsv";

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("workspace directory {} does not exist", root.display())]
    NotFound { root: PathBuf },
    #[error("failed to read workspace {}: {source}", root.display())]
    Io {
        root: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("no corpus manifests found in {}", root.display())]
    Empty { root: PathBuf },
    #[error("corpus id `{id}` is declared by both {} and {}", first.display(), second.display())]
    DuplicateCorpusId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),
    #[error("corpus `{0}` has no sentiment-carrying words")]
    EmptySentimentVocabulary(String),
    #[error("corpus `{0}` has no tokens")]
    EmptyCorpus(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRecord {
    pub id: String,
    pub label: String,
    pub order_key: i64,
    pub directory: PathBuf,
    pub document_count: usize,
    pub raw: TokenDistribution,
    pub annotated: AnnotatedDistribution,
}

impl CorpusRecord {
    /// Builds the record for `corpus` with the given effective lexicon.
    pub fn build(
        corpus: &Corpus,
        directory: PathBuf,
        lexicon: &SentimentLexicon,
        stopwords: &HashSet<String>,
    ) -> Self {
        let raw = corpus.distribution(&lexicon.phrases(), stopwords);
        let annotated = annotate(&raw, lexicon);
        CorpusRecord {
            id: corpus.id.clone(),
            label: corpus.label.clone(),
            order_key: corpus.order_key,
            directory,
            document_count: corpus.documents.len(),
            raw,
            annotated,
        }
    }

    /// The sentiment-filtered distribution, or the raw one.
    pub fn distribution(&self, filtered: bool) -> &TokenDistribution {
        if filtered {
            &self.annotated.base
        } else {
            &self.raw
        }
    }

    pub fn sentiment_view(&self) -> CorpusSentiment<'_> {
        CorpusSentiment {
            id: &self.id,
            label: &self.label,
            order_key: self.order_key,
            annotation: &self.annotated,
        }
    }
}

/// Corpus directories under `root`, sorted by path.
pub fn discover(root: &Path) -> Result<Vec<PathBuf>, WorkspaceError> {
    if !root.is_dir() {
        return Err(WorkspaceError::NotFound {
            root: root.to_path_buf(),
        });
    }
    let io_err = |source| WorkspaceError::Io {
        root: root.to_path_buf(),
        source,
    };
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_dir() && path.join(MANIFEST_FILE).is_file() {
            dirs.push(path);
        }
    }
    if dirs.is_empty() {
        return Err(WorkspaceError::Empty {
            root: root.to_path_buf(),
        });
    }
    dirs.sort();
    Ok(dirs)
}

/// Parses every manifest under `root`, rejecting repeated corpus ids.
pub fn load_corpora(root: &Path) -> Result<Vec<(PathBuf, Corpus)>, WorkspaceError> {
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut out = Vec::new();
    for dir in discover(root)? {
        let corpus = load_corpus(&dir)?;
        if let Some(first) = seen.insert(corpus.id.clone(), dir.clone()) {
            return Err(WorkspaceError::DuplicateCorpusId {
                id: corpus.id,
                first,
                second: dir,
            });
        }
        out.push((dir, corpus));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub id: String,
    pub label: String,
    pub order_key: i64,
    /// Relative to the workspace root.
    pub directory: String,
    pub documents: usize,
    pub token_total: u64,
    pub vocabulary: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub corpora: Vec<CorpusSummary>,
}

impl IngestSummary {
    /// Validates and tokenizes every corpus under `root`.
    pub fn collect(
        root: &Path,
        phrases: &PhraseSet,
        stopwords: &HashSet<String>,
    ) -> Result<Self, WorkspaceError> {
        let mut corpora: Vec<CorpusSummary> = load_corpora(root)?
            .into_iter()
            .map(|(dir, corpus)| {
                let dist = corpus.distribution(phrases, stopwords);
                CorpusSummary {
                    directory: dir
                        .strip_prefix(root)
                        .unwrap_or(&dir)
                        .to_string_lossy()
                        .into_owned(),
                    id: corpus.id,
                    label: corpus.label,
                    order_key: corpus.order_key,
                    documents: corpus.documents.len(),
                    token_total: dist.total(),
                    vocabulary: dist.len(),
                }
            })
            .collect();
        corpora.sort_by(|a, b| (a.order_key, &a.id).cmp(&(b.order_key, &b.id)));
        Ok(IngestSummary { corpora })
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
    pub lexicon: SentimentLexicon,
    corpora: BTreeMap<String, CorpusRecord>,
}

impl Workspace {
    /// Loads every corpus under `root`. A corpus directory holding an
    /// `annotations.tsv` file uses it to override `lexicon` for that corpus.
    pub fn load(
        root: &Path,
        lexicon: SentimentLexicon,
        stopwords: &HashSet<String>,
    ) -> Result<Self, WorkspaceError> {
        let corpora = load_corpora(root)?;

        let records: Vec<Result<CorpusRecord, WorkspaceError>> = thread::scope(|scope| {
            let handles: Vec<_> = corpora
                .iter()
                .map(|(dir, corpus)| {
                    let lexicon = &lexicon;
                    scope.spawn(move || {
                        let overrides = dir.join(ANNOTATIONS_FILE);
                        let effective = if overrides.is_file() {
                            lexicon.with_overrides(&load_lexicon(&overrides)?)
                        } else {
                            lexicon.clone()
                        };
                        Ok(CorpusRecord::build(corpus, dir.clone(), &effective, stopwords))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("corpus loader panicked"))
                .collect()
        });

        let mut map = BTreeMap::new();
        for record in records {
            let record = record?;
            map.insert(record.id.clone(), record);
        }
        Ok(Workspace {
            root: root.to_path_buf(),
            lexicon,
            corpora: map,
        })
    }

    /// A workspace over already-built records.
    pub fn from_records(root: PathBuf, lexicon: SentimentLexicon, records: Vec<CorpusRecord>) -> Self {
        Workspace {
            root,
            lexicon,
            corpora: records.into_iter().map(|r| (r.id.clone(), r)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&CorpusRecord> {
        self.corpora.get(id)
    }

    pub fn len(&self) -> usize {
        self.corpora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    /// Records sorted by order key, then id.
    pub fn corpora(&self) -> Vec<&CorpusRecord> {
        let mut records: Vec<_> = self.corpora.values().collect();
        records.sort_by(|a, b| (a.order_key, &a.id).cmp(&(b.order_key, &b.id)));
        records
    }

    pub fn sentiment_views(&self) -> Vec<CorpusSentiment<'_>> {
        self.corpora()
            .into_iter()
            .map(CorpusRecord::sentiment_view)
            .collect()
    }

    fn distribution(&self, id: &str, filtered: bool) -> Result<&TokenDistribution, AnalysisError> {
        let record = self
            .get(id)
            .ok_or_else(|| AnalysisError::UnknownCorpus(id.to_owned()))?;
        let dist = record.distribution(filtered);
        if dist.is_empty() {
            return Err(if filtered {
                AnalysisError::EmptySentimentVocabulary(id.to_owned())
            } else {
                AnalysisError::EmptyCorpus(id.to_owned())
            });
        }
        Ok(dist)
    }

    /// Shift report between two corpora, always restricted to common words.
    pub fn shift_report(
        &self,
        ref_id: &str,
        comp_id: &str,
        measure: Measure,
        k: usize,
        filtered: bool,
    ) -> Result<ShiftReport, AnalysisError> {
        let reference = self.distribution(ref_id, filtered)?;
        let comparison = self.distribution(comp_id, filtered)?;
        Ok(build_report(
            measure, ref_id, reference, comp_id, comparison, k, true,
        )?)
    }

    pub fn wordcloud(&self, m: usize, ranking: Ranking) -> Result<WordCloudGraph, AnalysisError> {
        Ok(build_wordcloud(&self.sentiment_views(), m, ranking)?)
    }

    pub fn timeline(&self) -> Result<Vec<TimelinePoint>, AnalysisError> {
        Ok(build_timeline(&self.sentiment_views())?)
    }
}
