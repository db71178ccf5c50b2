use comptext_core::{
    build_report, divergence_shift_items, entropy_difference, entropy_shift_items, kl_divergence_common,
    proportion_shift_items, shannon_entropy, Measure, ShiftReport, TokenDistribution,
};
use proptest::prelude::*;

fn distribution() -> impl Strategy<Value = TokenDistribution> {
    prop::collection::btree_map("[a-p]", 1u64..40, 1..12).prop_map(TokenDistribution::from_counts)
}

fn same_support_pair() -> impl Strategy<Value = (TokenDistribution, TokenDistribution)> {
    prop::collection::btree_set("[a-p]", 1..12).prop_flat_map(|terms| {
        let n = terms.len();
        let terms: Vec<String> = terms.into_iter().collect();
        (
            prop::collection::vec(1u64..40, n),
            prop::collection::vec(1u64..40, n),
        )
            .prop_map(move |(a, b)| {
                (
                    TokenDistribution::from_counts(terms.iter().cloned().zip(a)),
                    TokenDistribution::from_counts(terms.iter().cloned().zip(b)),
                )
            })
    })
}

fn same_probabilities(a: &TokenDistribution, b: &TokenDistribution) -> bool {
    a.len() == b.len() && a.vocabulary().all(|t| a.probability(t) == b.probability(t))
}

fn check_curve(report: &ShiftReport, full_len: usize) -> Result<(), TestCaseError> {
    prop_assert_eq!(report.cumulative.len(), full_len);
    for pair in report.cumulative.windows(2) {
        prop_assert!(pair[1].value >= pair[0].value);
    }
    Ok(())
}

proptest! {
    #[test]
    fn entropy_is_bounded(dist in distribution()) {
        let h = shannon_entropy(&dist).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (dist.len() as f64).log2() + 1e-9);
        if dist.len() == 1 {
            prop_assert_eq!(h, 0.0);
        } else {
            prop_assert!(h > 0.0);
        }
        let uniform = dist.iter().all(|(_, c)| c == dist.iter().next().unwrap().1);
        if uniform {
            prop_assert!((h - (dist.len() as f64).log2()).abs() <= 1e-9);
        }
    }

    #[test]
    fn gibbs_on_shared_support((reference, comparison) in same_support_pair()) {
        let d = kl_divergence_common(&reference, &comparison).unwrap();
        prop_assert!(d >= -1e-12);
        if same_probabilities(&reference, &comparison) {
            prop_assert!(d.abs() <= 1e-12);
        } else {
            prop_assert!(d > 1e-12);
        }
    }

    #[test]
    fn item_sums_match_totals(reference in distribution(), comparison in distribution()) {
        let proportion: f64 = proportion_shift_items(&reference, &comparison)
            .unwrap()
            .iter()
            .map(|i| i.contribution)
            .sum();
        prop_assert!(proportion.abs() <= 1e-12);

        let entropy: f64 = entropy_shift_items(&reference, &comparison)
            .unwrap()
            .iter()
            .map(|i| i.contribution)
            .sum();
        prop_assert!((entropy - entropy_difference(&reference, &comparison).unwrap()).abs() <= 1e-12);

        if let Ok(items) = divergence_shift_items(&reference, &comparison) {
            let divergence: f64 = items.iter().map(|i| i.contribution).sum();
            let kld = kl_divergence_common(&reference, &comparison).unwrap();
            prop_assert!((divergence - kld).abs() <= 1e-12);
        }
    }

    #[test]
    fn k_only_truncates(
        reference in distribution(),
        comparison in distribution(),
        k in 1usize..20,
        common_only in any::<bool>(),
    ) {
        for measure in Measure::ALL {
            let Ok(full) = build_report(measure, "r", &reference, "c", &comparison, usize::MAX, common_only) else {
                continue;
            };
            let cut = build_report(measure, "r", &reference, "c", &comparison, k, common_only).unwrap();
            prop_assert_eq!(&cut.items[..], &full.items[..k.min(full.items.len())]);
            prop_assert_eq!(&cut.cumulative, &full.cumulative);
            check_curve(&full, full.items.len())?;
            let abs_sum: f64 = full.items.iter().map(|i| i.contribution.abs()).sum();
            let last = full.cumulative.last().map_or(0.0, |p| p.value);
            prop_assert!((last - abs_sum).abs() <= 1e-12);
            for item in &full.items {
                prop_assert_eq!(item.direction == comptext_core::Direction::TowardComparison, item.contribution > 0.0);
                prop_assert!((0.0..=1.0).contains(&item.p_ref) && (0.0..=1.0).contains(&item.p_comp));
            }
        }
    }

    #[test]
    fn report_json_round_trips(reference in distribution(), comparison in distribution()) {
        let report = build_report(Measure::Entropy, "r", &reference, "c", &comparison, 30, false).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: ShiftReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }
}
