//! Sentiment lexicons and filtering of distributions to sentiment-carrying words.
//!
//! A lexicon maps terms (single words or space-separated phrases) to a signed
//! score in `[-1, 1]`. Zero is reserved for "not sentiment-carrying" and is
//! therefore never stored. Per-corpus annotation files use the same format and
//! override the shared lexicon term by term.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{PhraseSet, TokenDistribution};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: malformed entry, expected `term<TAB>score`", path.display())]
    Malformed { path: PathBuf, line: usize },
    #[error("{}:{line}: score {score} for `{term}` is outside [-1, 1]", path.display())]
    ScoreOutOfRange {
        path: PathBuf,
        line: usize,
        term: String,
        score: f64,
    },
    #[error("{}:{line}: `{term}` has score 0; neutral terms must be left out", path.display())]
    ZeroScore {
        path: PathBuf,
        line: usize,
        term: String,
    },
    #[error("{}:{line}: duplicate term `{term}` (first defined on line {first})", path.display())]
    DuplicateTerm {
        path: PathBuf,
        line: usize,
        first: usize,
        term: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// Polarity of a nonzero score.
    pub fn of(score: f64) -> Self {
        if score > 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentTag {
    pub term: String,
    pub score: f64,
    pub polarity: Polarity,
}

impl SentimentTag {
    pub fn new(term: impl Into<String>, score: f64) -> Self {
        Self {
            term: term.into(),
            score,
            polarity: Polarity::of(score),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    pub name: String,
    pub version: String,
    entries: BTreeMap<String, f64>,
}

fn normalize_term(term: &str) -> String {
    term.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl SentimentLexicon {
    /// Builds a lexicon from in-memory entries. Terms are lowercased, zero
    /// scores are skipped and scores are clamped to `[-1, 1]`; later entries
    /// replace earlier ones.
    pub fn from_entries<I, S>(name: impl Into<String>, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = SentimentLexicon {
            name: name.into(),
            version: String::new(),
            entries: BTreeMap::new(),
        };
        for (term, score) in entries {
            let term = normalize_term(term.as_ref());
            if term.is_empty() || score == 0.0 || !score.is_finite() {
                continue;
            }
            lex.entries.insert(term, score.clamp(-1.0, 1.0));
        }
        lex
    }

    /// Parses the tab-separated lexicon format. `# name:` and `# version:`
    /// comment lines set the metadata.
    pub fn parse(path: &Path, contents: &str) -> Result<Self, LexiconError> {
        let mut lex = SentimentLexicon {
            name: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            version: String::new(),
            entries: BTreeMap::new(),
        };
        let mut first_seen: BTreeMap<String, usize> = BTreeMap::new();

        for (idx, raw) in contents.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(name) = comment.strip_prefix("name:") {
                    lex.name = name.trim().to_owned();
                } else if let Some(version) = comment.strip_prefix("version:") {
                    lex.version = version.trim().to_owned();
                }
                continue;
            }

            let malformed = || LexiconError::Malformed {
                path: path.to_path_buf(),
                line,
            };
            let mut fields = trimmed.split('\t');
            let (Some(term), Some(score), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(malformed());
            };
            let term = normalize_term(term);
            if term.is_empty() {
                return Err(malformed());
            }
            let score: f64 = score.trim().parse().map_err(|_| malformed())?;
            if !score.is_finite() || !(-1.0..=1.0).contains(&score) {
                return Err(LexiconError::ScoreOutOfRange {
                    path: path.to_path_buf(),
                    line,
                    term,
                    score,
                });
            }
            if score == 0.0 {
                return Err(LexiconError::ZeroScore {
                    path: path.to_path_buf(),
                    line,
                    term,
                });
            }
            if let Some(&first) = first_seen.get(&term) {
                return Err(LexiconError::DuplicateTerm {
                    path: path.to_path_buf(),
                    line,
                    first,
                    term,
                });
            }
            first_seen.insert(term.clone(), line);
            lex.entries.insert(term, score);
        }
        Ok(lex)
    }

    pub fn score(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.entries.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(t, &s)| (t.as_str(), s))
    }

    /// Multi-word entries, for phrase-aware tokenization.
    pub fn phrases(&self) -> PhraseSet {
        PhraseSet::new(self.entries.keys().filter(|t| t.contains(' ')))
    }

    /// A copy of this lexicon where every term in `overrides` takes the
    /// override's score.
    pub fn with_overrides(&self, overrides: &SentimentLexicon) -> SentimentLexicon {
        let mut merged = self.clone();
        for (term, score) in overrides.iter() {
            merged.entries.insert(term.to_owned(), score);
        }
        merged
    }

    /// Every score negated.
    pub fn negated(&self) -> SentimentLexicon {
        SentimentLexicon {
            name: self.name.clone(),
            version: self.version.clone(),
            entries: self.entries.iter().map(|(t, &s)| (t.clone(), -s)).collect(),
        }
    }
}

pub fn load_lexicon(path: &Path) -> Result<SentimentLexicon, LexiconError> {
    let contents = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SentimentLexicon::parse(path, &contents)
}

/// A distribution restricted to sentiment-carrying terms, with their tags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDistribution {
    pub base: TokenDistribution,
    pub tags: BTreeMap<String, SentimentTag>,
    /// Tokens dropped because their term is not in the lexicon.
    pub excluded_total: u64,
}

impl AnnotatedDistribution {
    pub fn score(&self, term: &str) -> Option<f64> {
        self.tags.get(term).map(|t| t.score)
    }
}

pub fn annotate(dist: &TokenDistribution, lex: &SentimentLexicon) -> AnnotatedDistribution {
    let (base, excluded_total) = dist.partition(|term| lex.contains(term));
    let tags = base
        .vocabulary()
        .filter_map(|term| {
            lex.score(term)
                .map(|s| (term.to_owned(), SentimentTag::new(term, s)))
        })
        .collect();
    AnnotatedDistribution {
        base,
        tags,
        excluded_total,
    }
}

/// Score times count, per sentiment term.
pub fn aggregate_sentiment(ann: &AnnotatedDistribution) -> BTreeMap<String, f64> {
    ann.base
        .iter()
        .filter_map(|(term, count)| ann.score(term).map(|s| (term.to_owned(), s * count as f64)))
        .collect()
}

/// Mean score per sentiment token, in `[-1, 1]`. Zero for an empty annotation.
pub fn corpus_sentiment_total(ann: &AnnotatedDistribution) -> f64 {
    let mass: f64 = ann
        .base
        .iter()
        .filter_map(|(term, count)| ann.score(term).map(|s| s * count as f64))
        .sum();
    mass / ann.base.total().max(1) as f64
}
