//! Property tests for the structural invariants: enumeration bijectivity,
//! serialization round-trips, agreement of the fast sweep arithmetic with
//! the exact reference semantics, and the information inequalities.

use proptest::prelude::*;
use racbox_core::boxes::BipartiteBox;
use racbox_core::info;
use racbox_core::joint::JointDistribution;
use racbox_core::rational::q;
use racbox_core::strategies::sweep::{fast_induced_channel, fast_success, BoxKind};
use racbox_core::strategies::{
    self, enumerate_strategies, strategy_space_size, DeterministicStrategy, InputDist,
};
use racbox_core::vars::VariableSpec;

proptest! {
    #[test]
    fn strategy_index_bijection(idx in 0u64..(1u64 << 38)) {
        let s = DeterministicStrategy::from_index(idx).unwrap();
        prop_assert_eq!(s.to_index(), idx);
    }

    #[test]
    fn fast_engine_matches_reference(idx in 0u64..(1u64 << 38), signalling: bool) {
        let kind = if signalling { BoxKind::Signalling } else { BoxKind::Nonsignalling };
        let b = match kind {
            BoxKind::Signalling => racbox_core::boxes::make_signalling_racbox(),
            BoxKind::Nonsignalling => racbox_core::boxes::make_nonsignalling_racbox(),
        };
        let s = DeterministicStrategy::from_index(idx).unwrap();
        let joint = strategies::run_strategy(&s, &b, &InputDist::default()).unwrap();
        prop_assert_eq!(
            fast_success(&s, kind),
            strategies::pr_success_probability(&joint).unwrap()
        );
        let ch_ref = strategies::induced_channel(&joint).unwrap();
        let ch_fast = fast_induced_channel(&s, kind);
        prop_assert_eq!(ch_ref.table(), ch_fast.table());
    }

    #[test]
    fn box_text_roundtrip(weights in proptest::collection::vec(0u8..4, 16)) {
        // random box on the PR signature with eighth-unit probabilities
        let mut rows = vec![vec![q(0, 1); 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            let w: Vec<i64> = weights[i * 4..(i + 1) * 4].iter().map(|&x| x as i64 + 1).collect();
            let total: i64 = w.iter().sum();
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = q(w[j], total);
            }
        }
        let b = BipartiteBox::new(
            vec![VariableSpec::bit("x")],
            vec![VariableSpec::bit("a")],
            vec![VariableSpec::bit("y")],
            vec![VariableSpec::bit("b")],
            rows,
        )
        .unwrap();
        let parsed = BipartiteBox::from_text(&b.to_text()).unwrap();
        prop_assert_eq!(parsed, b);
    }

    #[test]
    fn information_identities(weights in proptest::collection::vec(0i64..=100, 16)) {
        prop_assume!(weights.iter().sum::<i64>() > 0);
        let total: i64 = weights.iter().sum();
        let probs: Vec<_> = weights.iter().map(|&w| q(w, total)).collect();
        let vars = ["a", "b", "c", "d"].iter().map(|n| VariableSpec::bit(*n)).collect();
        let dist = JointDistribution::new(vars, probs).unwrap();
        // chain rule
        let lhs = info::mutual_information(&dist, &["a"], &["b", "c"], &[]).unwrap();
        let rhs = info::mutual_information(&dist, &["a"], &["b"], &[]).unwrap()
            + info::mutual_information(&dist, &["a"], &["c"], &["b"]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        // conditioning never increases entropy
        let h = info::entropy(&dist, &["a"], &[]).unwrap();
        let hc = info::entropy(&dist, &["a"], &["b", "d"]).unwrap();
        prop_assert!(hc <= h + 1e-12);
        // the single-wire inequality and its strong-subadditivity form
        let (ineq, ssa) = info::verify_lemma5(&dist, &["a"], &["b"], &["c"], &["d"]).unwrap();
        prop_assert!(ineq.satisfied);
        prop_assert!(ssa.satisfied);
        // guessed information sits between the blind guess and certainty
        let j = info::guessed_information(&dist, &["a", "b"], &["c"]).unwrap();
        let marg = dist.marginal(&["c"]).unwrap();
        let blind = marg.probs().iter().max().unwrap().clone();
        prop_assert!(j >= blind && j <= q(1, 1));
    }
}

#[test]
fn enumeration_prefix_matches_indices() {
    for (i, s) in enumerate_strategies().take(4096).enumerate() {
        assert_eq!(s.to_index(), i as u64);
    }
    assert_eq!(strategy_space_size(), 256 * 256 * 256 * 4 * 16 * 256);
}
