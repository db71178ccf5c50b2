//! Multi-corpus overview: the word-cloud graph and the sentiment timeline.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sentiment::{corpus_sentiment_total, AnnotatedDistribution, Polarity};

/// Words shown per node unless configured otherwise.
pub const DEFAULT_WORDS_PER_NODE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("no corpora to build a graph from")]
    NoCorpora,
    #[error("words per node must be at least 1")]
    ZeroWordsPerNode,
    #[error("corpora `{first}` and `{second}` share order key {order_key}")]
    DuplicateOrderKey {
        order_key: i64,
        first: String,
        second: String,
    },
}

/// How a node picks its top words.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranking {
    /// Raw count.
    #[default]
    Frequency,
    /// Absolute value of score × count.
    Aggregate,
}

impl Ranking {
    pub fn as_str(self) -> &'static str {
        match self {
            Ranking::Frequency => "frequency",
            Ranking::Aggregate => "aggregate",
        }
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ranking {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "frequency" => Ok(Ranking::Frequency),
            "aggregate" => Ok(Ranking::Aggregate),
            _ => Err(format!("unknown ranking `{s}` (expected frequency or aggregate)")),
        }
    }
}

/// A corpus as seen by the overview builders.
#[derive(Debug, Clone, Copy)]
pub struct CorpusSentiment<'a> {
    pub id: &'a str,
    pub label: &'a str,
    pub order_key: i64,
    pub annotation: &'a AnnotatedDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopWord {
    pub term: String,
    pub polarity: Polarity,
    pub aggregate_score: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudNode {
    pub corpus_id: String,
    pub label: String,
    pub top_words: Vec<TopWord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCloudEdge {
    pub corpus_a: String,
    pub corpus_b: String,
    /// Sorted, never empty.
    pub shared_terms: Vec<String>,
}

/// Corpora as nodes, linked when their top words overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudGraph {
    pub nodes: Vec<WordCloudNode>,
    pub edges: Vec<WordCloudEdge>,
}

fn top_words(annotation: &AnnotatedDistribution, m: usize, ranking: Ranking) -> Vec<TopWord> {
    let mut words: Vec<TopWord> = annotation
        .base
        .iter()
        .filter_map(|(term, count)| {
            let tag = annotation.tags.get(term)?;
            Some(TopWord {
                term: term.to_owned(),
                polarity: tag.polarity,
                aggregate_score: tag.score * count as f64,
                count,
            })
        })
        .collect();
    let key = |w: &TopWord, other: &TopWord| -> Ordering {
        match ranking {
            Ranking::Frequency => other.count.cmp(&w.count),
            Ranking::Aggregate => other.aggregate_score.abs().total_cmp(&w.aggregate_score.abs()),
        }
    };
    words.sort_by(|a, b| key(a, b).then_with(|| a.term.cmp(&b.term)));
    words.truncate(m);
    words
}

fn by_order(a: &CorpusSentiment<'_>, b: &CorpusSentiment<'_>) -> Ordering {
    a.order_key.cmp(&b.order_key).then_with(|| a.id.cmp(b.id))
}

/// Nodes are listed by order key; edges are keyed by the lexicographically
/// smaller corpus id first and sorted, so the graph does not depend on the
/// order of `corpora`.
pub fn build_wordcloud(
    corpora: &[CorpusSentiment<'_>],
    m: usize,
    ranking: Ranking,
) -> Result<WordCloudGraph, GraphError> {
    if corpora.is_empty() {
        return Err(GraphError::NoCorpora);
    }
    if m == 0 {
        return Err(GraphError::ZeroWordsPerNode);
    }
    let mut ordered = corpora.to_vec();
    ordered.sort_by(by_order);

    let nodes: Vec<WordCloudNode> = ordered
        .iter()
        .map(|c| WordCloudNode {
            corpus_id: c.id.to_owned(),
            label: c.label.to_owned(),
            top_words: top_words(c.annotation, m, ranking),
        })
        .collect();

    let term_sets: Vec<BTreeSet<&str>> = nodes
        .iter()
        .map(|n| n.top_words.iter().map(|w| w.term.as_str()).collect())
        .collect();

    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let shared: Vec<String> = term_sets[i]
                .intersection(&term_sets[j])
                .map(|t| (*t).to_owned())
                .collect();
            if shared.is_empty() || nodes[i].corpus_id == nodes[j].corpus_id {
                continue;
            }
            let (a, b) = if nodes[i].corpus_id <= nodes[j].corpus_id {
                (&nodes[i].corpus_id, &nodes[j].corpus_id)
            } else {
                (&nodes[j].corpus_id, &nodes[i].corpus_id)
            };
            edges.push(WordCloudEdge {
                corpus_a: a.clone(),
                corpus_b: b.clone(),
                shared_terms: shared,
            });
        }
    }
    edges.sort_by(|x, y| (&x.corpus_a, &x.corpus_b).cmp(&(&y.corpus_a, &y.corpus_b)));

    Ok(WordCloudGraph { nodes, edges })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimelinePolarity {
    Positive,
    Negative,
    Neutral,
}

impl TimelinePolarity {
    pub fn of(sentiment: f64) -> Self {
        if sentiment > 0.0 {
            TimelinePolarity::Positive
        } else if sentiment < 0.0 {
            TimelinePolarity::Negative
        } else {
            TimelinePolarity::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub corpus_id: String,
    pub order_key: i64,
    pub sentiment: f64,
    pub polarity: TimelinePolarity,
}

/// One point per corpus, ascending by order key.
pub fn build_timeline(corpora: &[CorpusSentiment<'_>]) -> Result<Vec<TimelinePoint>, GraphError> {
    let mut seen: HashMap<i64, &str> = HashMap::new();
    for c in corpora {
        if let Some(first) = seen.insert(c.order_key, c.id) {
            let (first, second) = if first <= c.id {
                (first, c.id)
            } else {
                (c.id, first)
            };
            return Err(GraphError::DuplicateOrderKey {
                order_key: c.order_key,
                first: first.to_owned(),
                second: second.to_owned(),
            });
        }
    }
    let mut ordered = corpora.to_vec();
    ordered.sort_by(by_order);
    Ok(ordered
        .iter()
        .map(|c| {
            let sentiment = corpus_sentiment_total(c.annotation);
            TimelinePoint {
                corpus_id: c.id.to_owned(),
                order_key: c.order_key,
                sentiment,
                polarity: TimelinePolarity::of(sentiment),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TokenDistribution;
    use crate::sentiment::{annotate, SentimentLexicon};

    fn lexicon() -> SentimentLexicon {
        SentimentLexicon::from_entries(
            "t",
            [
                ("great", 0.8),
                ("jobs", 0.3),
                ("health", 0.4),
                ("war", -0.9),
                ("fear", -0.6),
            ],
        )
    }

    fn ann(counts: &[(&str, u64)]) -> AnnotatedDistribution {
        annotate(
            &TokenDistribution::from_counts(counts.iter().copied()),
            &lexicon(),
        )
    }

    fn view<'a>(id: &'a str, order_key: i64, a: &'a AnnotatedDistribution) -> CorpusSentiment<'a> {
        CorpusSentiment {
            id,
            label: id,
            order_key,
            annotation: a,
        }
    }

    #[test]
    fn single_corpus_has_no_edges() {
        let a = ann(&[("great", 2)]);
        let g = build_wordcloud(&[view("a", 0, &a)], 10, Ranking::Frequency).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn disjoint_corpora_have_no_edges() {
        let a = ann(&[("great", 2)]);
        let b = ann(&[("war", 2)]);
        let g = build_wordcloud(&[view("a", 0, &a), view("b", 1, &b)], 10, Ranking::Frequency).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn shared_top_word_links_corpora() {
        let a = ann(&[("great", 3), ("jobs", 2), ("war", 1)]);
        let b = ann(&[("great", 2), ("health", 5), ("fear", 1)]);
        let g = build_wordcloud(&[view("b", 1, &b), view("a", 0, &a)], 2, Ranking::Frequency).unwrap();
        assert_eq!(
            g.edges,
            [WordCloudEdge {
                corpus_a: "a".into(),
                corpus_b: "b".into(),
                shared_terms: vec!["great".into()],
            }]
        );
        assert_eq!(g.nodes[0].corpus_id, "a");
        let terms: Vec<_> = g.nodes[1].top_words.iter().map(|w| w.term.as_str()).collect();
        assert_eq!(terms, ["health", "great"]);
    }

    #[test]
    fn aggregate_ranking_uses_magnitude() {
        let a = ann(&[("great", 1), ("jobs", 2), ("war", 1)]);
        let g = build_wordcloud(&[view("a", 0, &a)], 2, Ranking::Aggregate).unwrap();
        let terms: Vec<_> = g.nodes[0].top_words.iter().map(|w| w.term.as_str()).collect();
        assert_eq!(terms, ["war", "great"]);
        assert_eq!(g.nodes[0].top_words[0].polarity, Polarity::Negative);
    }

    #[test]
    fn wordcloud_errors() {
        assert_eq!(
            build_wordcloud(&[], 3, Ranking::Frequency),
            Err(GraphError::NoCorpora)
        );
        let a = ann(&[("great", 1)]);
        assert_eq!(
            build_wordcloud(&[view("a", 0, &a)], 0, Ranking::Frequency),
            Err(GraphError::ZeroWordsPerNode)
        );
    }

    #[test]
    fn timeline_examples() {
        let pos = ann(&[("great", 2)]);
        let points = build_timeline(&[view("p", 0, &pos)]).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].polarity, TimelinePolarity::Positive);

        let balanced = annotate(
            &TokenDistribution::from_counts([("good", 2), ("bad", 2)]),
            &SentimentLexicon::from_entries("b", [("good", 0.5), ("bad", -0.5)]),
        );
        let points = build_timeline(&[view("z", 0, &balanced)]).unwrap();
        assert_eq!(points[0].sentiment, 0.0);
        assert_eq!(points[0].polarity, TimelinePolarity::Neutral);

        let keys: Vec<_> = build_timeline(&[view("c", 3, &pos), view("a", 1, &pos), view("b", 2, &pos)])
            .unwrap()
            .iter()
            .map(|p| p.order_key)
            .collect();
        assert_eq!(keys, [1, 2, 3]);
    }

    #[test]
    fn timeline_rejects_shared_order_keys() {
        let a = ann(&[("great", 1)]);
        match build_timeline(&[view("y", 5, &a), view("x", 5, &a)]) {
            Err(GraphError::DuplicateOrderKey {
                order_key,
                first,
                second,
            }) => {
                assert_eq!((order_key, first.as_str(), second.as_str()), (5, "x", "y"));
            }
            other => panic!("expected duplicate order key, got {other:?}"),
        }
    }
}
