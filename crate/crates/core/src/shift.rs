//! Word shifts between a reference and a comparison distribution.
//!
//! Three measures decompose the difference between two texts into signed
//! per-word contributions, all logarithms base 2:
//!
//! | measure      | contribution of word `w`                         | summed over       |
//! |--------------|--------------------------------------------------|-------------------|
//! | `proportion` | `p_comp(w) - p_ref(w)`                           | union of supports |
//! | `entropy`    | `p_comp(w)·log2(1/p_comp(w)) - p_ref(w)·log2(1/p_ref(w))` | union of supports |
//! | `divergence` | `p_comp(w)·log2(p_comp(w)/p_ref(w))`             | common words only |
//!
//! Entropy contributions sum to `H(comp) - H(ref)`; divergence contributions
//! sum to the Kullback-Leibler divergence of the comparison from the
//! reference, restricted to the words both texts use. A positive contribution
//! always points toward the comparison text.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TokenDistribution;

/// Number of ranked words kept in a report unless configured otherwise.
pub const DEFAULT_TOP_K: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Reference,
    Comparison,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Reference => "reference",
            Role::Comparison => "comparison",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("entropy is undefined for an empty distribution")]
    UndefinedEntropy,
    #[error("the {0} distribution is empty")]
    EmptyDistribution(Role),
    #[error("the two distributions share no words")]
    NoCommonSupport,
    #[error("top-k cutoff must be at least 1")]
    ZeroCutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Proportion,
    Entropy,
    Divergence,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Proportion, Measure::Entropy, Measure::Divergence];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Proportion => "proportion",
            Measure::Entropy => "entropy",
            Measure::Divergence => "divergence",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown measure `{s}` (expected proportion, entropy or divergence)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardComparison,
    TowardReference,
}

impl Direction {
    pub fn of(contribution: f64) -> Self {
        if contribution > 0.0 {
            Direction::TowardComparison
        } else {
            Direction::TowardReference
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftItem {
    pub term: String,
    /// Probability for proportion shifts, bits for entropy and divergence.
    pub contribution: f64,
    pub p_ref: f64,
    pub p_comp: f64,
    pub direction: Direction,
}

impl ShiftItem {
    fn new(term: &str, contribution: f64, p_ref: f64, p_comp: f64) -> Self {
        ShiftItem {
            term: term.to_owned(),
            contribution,
            p_ref,
            p_comp,
            direction: Direction::of(contribution),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulativePoint {
    /// 1-based rank.
    pub rank: usize,
    /// Sum of absolute contributions of ranks `1..=rank`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub measure: Measure,
    pub ref_id: String,
    pub comp_id: String,
    pub k: usize,
    /// The top `k` items by absolute contribution.
    pub items: Vec<ShiftItem>,
    /// Running absolute sum over every ranked item, not only the top `k`.
    pub cumulative: Vec<CumulativePoint>,
    pub total_shift: f64,
    pub ref_size: u64,
    pub comp_size: u64,
}

/// `p·log2(1/p)`, with the `0·log 0 = 0` convention.
fn surprisal_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn require_nonempty(dist: &TokenDistribution, role: Role) -> Result<(), ShiftError> {
    if dist.is_empty() {
        Err(ShiftError::EmptyDistribution(role))
    } else {
        Ok(())
    }
}

fn union_vocabulary<'a>(a: &'a TokenDistribution, b: &'a TokenDistribution) -> BTreeSet<&'a str> {
    a.vocabulary().chain(b.vocabulary()).collect()
}

fn common_vocabulary<'a>(reference: &'a TokenDistribution, comparison: &TokenDistribution) -> Vec<&'a str> {
    reference
        .vocabulary()
        .filter(|t| comparison.contains(t))
        .collect()
}

/// Shannon entropy in bits.
pub fn shannon_entropy(dist: &TokenDistribution) -> Result<f64, ShiftError> {
    if dist.is_empty() {
        return Err(ShiftError::UndefinedEntropy);
    }
    Ok(dist
        .vocabulary()
        .map(|t| surprisal_term(dist.probability(t)))
        .sum())
}

/// `H(comparison) - H(reference)`; positive when the comparison text is the
/// less predictable one.
pub fn entropy_difference(
    reference: &TokenDistribution,
    comparison: &TokenDistribution,
) -> Result<f64, ShiftError> {
    Ok(shannon_entropy(comparison)? - shannon_entropy(reference)?)
}

fn divergence_term(p_ref: f64, p_comp: f64) -> f64 {
    p_comp * (p_comp / p_ref).log2()
}

/// Kullback-Leibler divergence of the comparison from the reference, summed
/// over the words present in both. Frequencies are taken from each full
/// distribution, so with partial overlap the result may be negative.
pub fn kl_divergence_common(
    reference: &TokenDistribution,
    comparison: &TokenDistribution,
) -> Result<f64, ShiftError> {
    let common = common_vocabulary(reference, comparison);
    if common.is_empty() {
        return Err(ShiftError::NoCommonSupport);
    }
    Ok(common
        .into_iter()
        .map(|t| divergence_term(reference.probability(t), comparison.probability(t)))
        .sum())
}

/// One item per word in either text; contributions sum to zero.
pub fn proportion_shift_items(
    reference: &TokenDistribution,
    comparison: &TokenDistribution,
) -> Result<Vec<ShiftItem>, ShiftError> {
    require_nonempty(reference, Role::Reference)?;
    require_nonempty(comparison, Role::Comparison)?;
    Ok(union_vocabulary(reference, comparison)
        .into_iter()
        .map(|t| {
            let (p_ref, p_comp) = (reference.probability(t), comparison.probability(t));
            ShiftItem::new(t, p_comp - p_ref, p_ref, p_comp)
        })
        .collect())
}

/// One item per word in either text; contributions sum to
/// [`entropy_difference`].
pub fn entropy_shift_items(
    reference: &TokenDistribution,
    comparison: &TokenDistribution,
) -> Result<Vec<ShiftItem>, ShiftError> {
    require_nonempty(reference, Role::Reference)?;
    require_nonempty(comparison, Role::Comparison)?;
    Ok(union_vocabulary(reference, comparison)
        .into_iter()
        .map(|t| {
            let (p_ref, p_comp) = (reference.probability(t), comparison.probability(t));
            ShiftItem::new(t, surprisal_term(p_comp) - surprisal_term(p_ref), p_ref, p_comp)
        })
        .collect())
}

/// One item per common word; contributions sum to [`kl_divergence_common`].
pub fn divergence_shift_items(
    reference: &TokenDistribution,
    comparison: &TokenDistribution,
) -> Result<Vec<ShiftItem>, ShiftError> {
    let common = common_vocabulary(reference, comparison);
    if common.is_empty() {
        return Err(ShiftError::NoCommonSupport);
    }
    Ok(common
        .into_iter()
        .map(|t| {
            let (p_ref, p_comp) = (reference.probability(t), comparison.probability(t));
            ShiftItem::new(t, divergence_term(p_ref, p_comp), p_ref, p_comp)
        })
        .collect())
}

/// Largest absolute contribution first; ties in lexicographic term order.
fn rank_order(a: &ShiftItem, b: &ShiftItem) -> Ordering {
    b.contribution
        .abs()
        .total_cmp(&a.contribution.abs())
        .then_with(|| a.term.cmp(&b.term))
}

fn cumulative_curve(ranked: &[ShiftItem]) -> Vec<CumulativePoint> {
    ranked
        .iter()
        .scan(0.0, |acc, item| {
            *acc += item.contribution.abs();
            Some(*acc)
        })
        .enumerate()
        .map(|(i, value)| CumulativePoint { rank: i + 1, value })
        .collect()
}

/// Ranks the words of one measure and keeps the top `k`.
///
/// With `common_only` (the default mode) proportion and entropy items are
/// restricted to words both texts use before ranking; divergence is always
/// restricted. `total_shift` is `Σ|δp|` over the ranked words for proportion,
/// the full entropy difference for entropy and the common-word divergence for
/// divergence.
pub fn build_report(
    measure: Measure,
    ref_id: &str,
    reference: &TokenDistribution,
    comp_id: &str,
    comparison: &TokenDistribution,
    k: usize,
    common_only: bool,
) -> Result<ShiftReport, ShiftError> {
    if k == 0 {
        return Err(ShiftError::ZeroCutoff);
    }
    require_nonempty(reference, Role::Reference)?;
    require_nonempty(comparison, Role::Comparison)?;

    let mut items = match measure {
        Measure::Proportion => proportion_shift_items(reference, comparison)?,
        Measure::Entropy => entropy_shift_items(reference, comparison)?,
        Measure::Divergence => divergence_shift_items(reference, comparison)?,
    };
    if common_only && measure != Measure::Divergence {
        items.retain(|item| item.p_ref > 0.0 && item.p_comp > 0.0);
    }
    if measure == Measure::Proportion {
        // δp = (c_comp·N_ref - c_ref·N_comp) / (N_ref·N_comp): rank on the
        // integer numerator so equal rational shifts tie exactly
        let exact = |item: &ShiftItem| {
            let lhs = u128::from(comparison.count(&item.term)) * u128::from(reference.total());
            let rhs = u128::from(reference.count(&item.term)) * u128::from(comparison.total());
            lhs.abs_diff(rhs)
        };
        items.sort_by_cached_key(|item| (Reverse(exact(item)), item.term.clone()));
    } else {
        items.sort_by(rank_order);
    }

    let cumulative = cumulative_curve(&items);
    let total_shift = match measure {
        Measure::Proportion => items.iter().map(|i| i.contribution.abs()).sum(),
        Measure::Entropy => entropy_difference(reference, comparison)?,
        Measure::Divergence => kl_divergence_common(reference, comparison)?,
    };
    items.truncate(k);

    Ok(ShiftReport {
        measure,
        ref_id: ref_id.to_owned(),
        comp_id: comp_id.to_owned(),
        k,
        items,
        cumulative,
        total_shift,
        ref_size: reference.total(),
        comp_size: comparison.total(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(counts: &[(&str, u64)]) -> TokenDistribution {
        TokenDistribution::from_counts(counts.iter().copied())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&dist(&[("solo", 7)])).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&dist(&[("a", 1), ("b", 1)])).unwrap(), 1.0);
        let h = shannon_entropy(&dist(&[("a", 1), ("b", 3)])).unwrap();
        assert!(close(h, 0.811278, 1e-6), "{h}");
        assert_eq!(
            shannon_entropy(&TokenDistribution::new()),
            Err(ShiftError::UndefinedEntropy)
        );
    }

    #[test]
    fn entropy_difference_examples() {
        let half = dist(&[("a", 1), ("b", 1)]);
        let quarters = dist(&[("a", 1), ("b", 1), ("c", 1), ("d", 1)]);
        assert_eq!(entropy_difference(&half, &half).unwrap(), 0.0);
        assert_eq!(entropy_difference(&half, &quarters).unwrap(), 1.0);
        let skewed = dist(&[("a", 1), ("b", 3)]);
        assert!(close(
            entropy_difference(&half, &skewed).unwrap(),
            -0.188722,
            1e-6
        ));
        assert_eq!(
            entropy_difference(&TokenDistribution::new(), &half),
            Err(ShiftError::UndefinedEntropy)
        );
    }

    #[test]
    fn divergence_examples() {
        let half = dist(&[("a", 1), ("b", 1)]);
        assert_eq!(kl_divergence_common(&half, &half).unwrap(), 0.0);
        let skewed = dist(&[("a", 1), ("b", 3)]);
        assert!(close(
            kl_divergence_common(&half, &skewed).unwrap(),
            0.188722,
            1e-6
        ));
        assert_eq!(kl_divergence_common(&half, &dist(&[("a", 4)])).unwrap(), 1.0);
        assert_eq!(
            kl_divergence_common(&half, &dist(&[("z", 1)])),
            Err(ShiftError::NoCommonSupport)
        );
        // asymmetric
        let forward = kl_divergence_common(&half, &skewed).unwrap();
        let backward = kl_divergence_common(&skewed, &half).unwrap();
        assert!(!close(forward, backward, 1e-6));
    }

    #[test]
    fn proportion_item_examples() {
        // p_ref(w) = 0.02, p_comp(w) = 0.05
        let reference = dist(&[("w", 2), ("rest", 98)]);
        let comparison = dist(&[("w", 5), ("rest", 95)]);
        let items = proportion_shift_items(&reference, &comparison).unwrap();
        let w = items.iter().find(|i| i.term == "w").unwrap();
        assert!(close(w.contribution, 0.03, 1e-15));
        assert_eq!(w.direction, Direction::TowardComparison);

        let items = proportion_shift_items(&dist(&[("a", 1)]), &dist(&[("b", 1)])).unwrap();
        let got: Vec<_> = items.iter().map(|i| (i.term.as_str(), i.contribution)).collect();
        assert_eq!(got, [("a", -1.0), ("b", 1.0)]);
        assert_eq!(items[0].direction, Direction::TowardReference);

        assert_eq!(
            proportion_shift_items(&TokenDistribution::new(), &dist(&[("b", 1)])),
            Err(ShiftError::EmptyDistribution(Role::Reference))
        );
    }

    #[test]
    fn entropy_item_examples() {
        let reference = dist(&[("w", 1), ("x", 1)]);
        let comparison = dist(&[("w", 1), ("y", 3)]);
        let items = entropy_shift_items(&reference, &comparison).unwrap();
        let w = items.iter().find(|i| i.term == "w").unwrap();
        assert_eq!(w.contribution, 0.0);

        // p_ref = 0.1, p_comp = 0.2
        let reference = dist(&[("w", 1), ("x", 9)]);
        let comparison = dist(&[("w", 2), ("x", 8)]);
        let items = entropy_shift_items(&reference, &comparison).unwrap();
        let w = items.iter().find(|i| i.term == "w").unwrap();
        assert!(close(w.contribution, 0.132193, 1e-6), "{}", w.contribution);
    }

    #[test]
    fn divergence_item_examples() {
        let reference = dist(&[("w", 1), ("x", 1)]);
        let comparison = dist(&[("w", 1), ("y", 3)]);
        let items = divergence_shift_items(&reference, &comparison).unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].contribution, -0.25);

        let reference = dist(&[("w", 1), ("x", 3)]);
        let comparison = dist(&[("w", 1), ("y", 1)]);
        let items = divergence_shift_items(&reference, &comparison).unwrap();
        assert_eq!(items[0].contribution, 0.5);
        assert_eq!(items[0].direction, Direction::TowardComparison);
    }

    #[test]
    fn three_token_report() {
        let reference = dist(&[("a", 2), ("b", 1)]);
        let comparison = dist(&[("a", 1), ("b", 2)]);
        let report = build_report(Measure::Proportion, "r", &reference, "c", &comparison, 2, true).unwrap();
        let got: Vec<_> = report
            .items
            .iter()
            .map(|i| (i.term.as_str(), i.contribution))
            .collect();
        assert_eq!(got, [("a", -1.0 / 3.0), ("b", 1.0 / 3.0)]);
        let curve: Vec<_> = report.cumulative.iter().map(|p| p.value).collect();
        assert_eq!(curve, [1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!((report.ref_size, report.comp_size), (3, 3));
    }

    #[test]
    fn identical_corpora_give_zero_reports() {
        let d = dist(&[("a", 3), ("b", 1), ("c", 2)]);
        for measure in Measure::ALL {
            let report = build_report(measure, "x", &d, "x", &d, 10, true).unwrap();
            assert_eq!(report.items.len(), 3);
            assert!(report.items.iter().all(|i| i.contribution == 0.0));
            assert!(report.cumulative.iter().all(|p| p.value == 0.0));
            assert_eq!(report.total_shift, 0.0);
        }
    }

    #[test]
    fn cutoff_truncates_without_padding() {
        let reference = dist(&[("a", 1), ("b", 2), ("c", 3)]);
        let comparison = dist(&[("a", 3), ("b", 2), ("c", 1)]);
        let report = build_report(Measure::Entropy, "r", &reference, "c", &comparison, 5, true).unwrap();
        assert_eq!(report.items.len(), 3);
        assert_eq!(report.k, 5);

        let short = build_report(Measure::Entropy, "r", &reference, "c", &comparison, 1, true).unwrap();
        assert_eq!(short.items[..], report.items[..1]);
        assert_eq!(short.cumulative, report.cumulative);

        assert_eq!(
            build_report(Measure::Entropy, "r", &reference, "c", &comparison, 0, true),
            Err(ShiftError::ZeroCutoff)
        );
    }

    #[test]
    fn common_only_restricts_proportion_and_entropy() {
        let reference = dist(&[("a", 1), ("only_ref", 1)]);
        let comparison = dist(&[("a", 2), ("only_comp", 1)]);
        for measure in [Measure::Proportion, Measure::Entropy] {
            let common = build_report(measure, "r", &reference, "c", &comparison, 10, true).unwrap();
            assert_eq!(common.items.len(), 1);
            let all = build_report(measure, "r", &reference, "c", &comparison, 10, false).unwrap();
            assert_eq!(all.items.len(), 3);
        }
        let div = build_report(Measure::Divergence, "r", &reference, "c", &comparison, 10, false).unwrap();
        assert_eq!(div.items.len(), 1);
        assert_eq!(
            build_report(
                Measure::Divergence,
                "r",
                &dist(&[("x", 1)]),
                "c",
                &dist(&[("y", 1)]),
                10,
                true
            ),
            Err(ShiftError::NoCommonSupport)
        );
    }

    #[test]
    fn ties_rank_lexicographically() {
        let reference = dist(&[("b", 1), ("a", 1), ("c", 2)]);
        let comparison = dist(&[("b", 2), ("a", 2), ("c", 0), ("d", 0)]);
        let report = build_report(Measure::Proportion, "r", &reference, "c", &comparison, 10, false).unwrap();
        let terms: Vec<_> = report.items.iter().map(|i| i.term.as_str()).collect();
        assert_eq!(terms, ["c", "a", "b"]);
    }

    #[test]
    fn rational_proportion_ties_are_exact() {
        // 1/7 - 2/15 = 1/105 and 6/7 - 13/15 = -1/105, whatever the rounding
        let reference = dist(&[("with", 2), ("and", 13)]);
        let comparison = dist(&[("with", 1), ("and", 6)]);
        let report = build_report(Measure::Proportion, "r", &reference, "c", &comparison, 10, true).unwrap();
        let terms: Vec<_> = report.items.iter().map(|i| i.term.as_str()).collect();
        assert_eq!(terms, ["and", "with"]);
        assert!(close(report.items[0].contribution, -1.0 / 105.0, 1e-15));
    }

    #[test]
    fn measure_parses_from_name() {
        assert_eq!("entropy".parse::<Measure>(), Ok(Measure::Entropy));
        assert!("kld".parse::<Measure>().is_err());
    }
}
