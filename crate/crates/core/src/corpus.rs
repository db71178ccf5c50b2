//! Corpus manifests, tokenization and word frequency distributions.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// File name of the per-corpus manifest inside a corpus directory.
pub const MANIFEST_FILE: &str = "corpus.json";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("not found: {}", path.display())]
    NotFound { path: PathBuf },
    #[error("failed to read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed manifest {}: {message}", path.display())]
    MalformedManifest { path: PathBuf, message: String },
    #[error("duplicate document id `{id}` in {}", path.display())]
    DuplicateDocument { path: PathBuf, id: String },
    #[error("document `{id}` in {} points at missing file {}", manifest.display(), file.display())]
    MissingDocumentFile {
        manifest: PathBuf,
        id: String,
        file: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            IngestError::NotFound {
                path: path.to_path_buf(),
            }
        } else {
            IngestError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub source: Option<String>,
}

/// An ordered collection of documents, concatenated in manifest order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub id: String,
    pub label: String,
    /// Chronological sort key used by the timeline.
    pub order_key: i64,
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Tokens of every document in order. Phrases never span two documents.
    pub fn tokens(&self, phrases: &PhraseSet) -> Vec<String> {
        self.documents
            .iter()
            .flat_map(|doc| tokenize(&doc.text, phrases))
            .collect()
    }

    pub fn distribution(&self, phrases: &PhraseSet, stopwords: &HashSet<String>) -> TokenDistribution {
        build_distribution(&self.tokens(phrases), stopwords)
    }
}

#[derive(Deserialize)]
struct Manifest {
    id: String,
    label: String,
    order_key: i64,
    documents: Vec<ManifestDocument>,
}

#[derive(Deserialize)]
struct ManifestDocument {
    id: String,
    file: String,
    source: Option<String>,
}

/// Loads a corpus from its directory, or directly from its `corpus.json`.
pub fn load_corpus(path: &Path) -> Result<Corpus, IngestError> {
    let manifest_path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let raw = read_text(&manifest_path)?;
    let manifest: Manifest = serde_json::from_str(&raw).map_err(|e| IngestError::MalformedManifest {
        path: manifest_path.clone(),
        message: e.to_string(),
    })?;
    if manifest.id.trim().is_empty() {
        return Err(IngestError::MalformedManifest {
            path: manifest_path,
            message: "corpus id must not be empty".into(),
        });
    }

    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = HashSet::new();
    let mut documents = Vec::with_capacity(manifest.documents.len());
    for doc in manifest.documents {
        if doc.id.trim().is_empty() {
            return Err(IngestError::MalformedManifest {
                path: manifest_path,
                message: "document id must not be empty".into(),
            });
        }
        if !seen.insert(doc.id.clone()) {
            return Err(IngestError::DuplicateDocument {
                path: manifest_path,
                id: doc.id,
            });
        }
        let file = base.join(&doc.file);
        let text = match read_text(&file) {
            Ok(text) => text,
            Err(IngestError::NotFound { .. }) => {
                return Err(IngestError::MissingDocumentFile {
                    manifest: manifest_path,
                    id: doc.id,
                    file,
                })
            }
            Err(e) => return Err(e),
        };
        documents.push(Document {
            id: doc.id,
            text,
            source: doc.source,
        });
    }

    Ok(Corpus {
        id: manifest.id,
        label: manifest.label,
        order_key: manifest.order_key,
        documents,
    })
}

/// Reads a stopword file: one term per line, blank lines and `#` comments skipped.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>, IngestError> {
    let raw = read_text(path)?;
    Ok(raw
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}

/// Multi-word terms merged into single tokens during tokenization.
#[derive(Debug, Clone, Default)]
pub struct PhraseSet {
    phrases: HashSet<String>,
    max_words: usize,
}

impl PhraseSet {
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = PhraseSet::default();
        for phrase in phrases {
            let words = split_words(phrase.as_ref());
            if words.len() < 2 {
                continue;
            }
            set.max_words = set.max_words.max(words.len());
            set.phrases.insert(words.join(" "));
        }
        set
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.phrases.contains(phrase)
    }

    /// Greedy longest-match merge, left to right.
    fn merge(&self, words: Vec<String>) -> Vec<String> {
        if self.phrases.is_empty() {
            return words;
        }
        let mut out = Vec::with_capacity(words.len());
        let mut i = 0;
        while i < words.len() {
            let longest = (2..=self.max_words.min(words.len() - i))
                .rev()
                .map(|n| (n, words[i..i + n].join(" ")))
                .find(|(_, joined)| self.phrases.contains(joined));
            match longest {
                Some((n, joined)) => {
                    out.push(joined);
                    i += n;
                }
                None => {
                    out.push(words[i].clone());
                    i += 1;
                }
            }
        }
        out
    }
}

fn joiner(c: char) -> Option<char> {
    match c {
        '\'' | '\u{2019}' => Some('\''),
        '-' | '\u{2010}' => Some('-'),
        _ => None,
    }
}

fn split_words(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let chars: Vec<char> = lowered.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();

    let mut flush = |current: &mut String| {
        if current.chars().any(char::is_alphabetic) {
            words.push(std::mem::take(current));
        } else {
            current.clear();
        }
    };

    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        // apostrophes and hyphens survive only between two word characters
        let next_is_word = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        match joiner(c) {
            Some(j) if !current.is_empty() && next_is_word => current.push(j),
            _ => flush(&mut current),
        }
    }
    flush(&mut current);
    words
}

/// Lowercases, strips punctuation (keeping intra-word apostrophes and
/// hyphens), drops tokens without letters and merges known phrases.
pub fn tokenize(text: &str, phrases: &PhraseSet) -> Vec<String> {
    phrases.merge(split_words(text))
}

/// Word counts of a text and their relative frequencies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDistribution {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl TokenDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a distribution from (term, count) pairs. Zero counts are
    /// dropped and repeated terms accumulate.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut dist = Self::new();
        for (term, count) in counts {
            dist.add(term.into(), count);
        }
        dist
    }

    fn add(&mut self, term: String, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(term).or_insert(0) += count;
        self.total += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Vocabulary size.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, term: &str) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.counts.contains_key(term)
    }

    /// Relative frequency of `term`; 0 for absent terms and empty distributions.
    pub fn probability(&self, term: &str) -> f64 {
        match self.counts.get(term) {
            Some(&c) if self.total > 0 => c as f64 / self.total as f64,
            _ => 0.0,
        }
    }

    /// Terms with nonzero count, in lexicographic order.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    /// Keeps only the terms matching `keep`, returning the subset and the
    /// number of tokens dropped.
    pub fn partition<F>(&self, mut keep: F) -> (TokenDistribution, u64)
    where
        F: FnMut(&str) -> bool,
    {
        let mut kept = TokenDistribution::new();
        let mut dropped = 0;
        for (term, count) in self.iter() {
            if keep(term) {
                kept.add(term.to_owned(), count);
            } else {
                dropped += count;
            }
        }
        (kept, dropped)
    }
}

/// Counts `tokens`, skipping stopwords.
pub fn build_distribution<S: AsRef<str>>(tokens: &[S], stopwords: &HashSet<String>) -> TokenDistribution {
    let mut dist = TokenDistribution::new();
    for token in tokens {
        let token = token.as_ref();
        if !stopwords.contains(token) {
            dist.add(token.to_owned(), 1);
        }
    }
    dist
}
