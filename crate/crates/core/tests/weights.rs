//! Reward-to-weight dynamics over arbitrary rating sequences.

use elegance_core::evolution::reward::RewardState;
use elegance_core::metrics::Elegance;
use elegance_core::Stars;
use proptest::prelude::*;

fn rating() -> impl Strategy<Value = (Elegance, Stars)> {
    (0usize..4, 1i64..=5).prop_map(|(e, s)| (Elegance::from_index(e).unwrap(), Stars::new(s).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn weights_stay_closed_and_bounded(seq in prop::collection::vec(rating(), 0..60)) {
        let mut state = RewardState::new();
        let w = state.weights();
        prop_assert_eq!(w.coupling, 1.0);
        for (measure, stars) in seq {
            let first = state.ratings(measure).is_empty();
            state.record(measure, stars);
            let w = state.weights();
            prop_assert!((w.sum() - 1.0).abs() <= f64::EPSILON, "sum {}", w.sum());
            prop_assert!((0.2..=1.0).contains(&w.coupling));
            for x in w.elegance {
                prop_assert!((0.0..=0.2).contains(&x));
            }
            if first && stars.get() == 5 {
                prop_assert_eq!(w.elegance[measure.index()], 0.2);
            }
        }
    }

    #[test]
    fn five_stars_never_lower_a_weight(
        prefix in prop::collection::vec(1i64..=5, 0..20),
        measure in 0usize..4,
        fives in 1usize..30,
    ) {
        let e = Elegance::from_index(measure).unwrap();
        let mut state = RewardState::new();
        for s in prefix {
            state.record(e, Stars::new(s).unwrap());
        }
        let mut last = state.weights().elegance[measure];
        for _ in 0..fives {
            state.record(e, Stars::new(5).unwrap());
            let now = state.weights().elegance[measure];
            prop_assert!(now >= last && now <= 0.2);
            last = now;
        }
    }
}

#[test]
fn unrated_measures_keep_zero_weight() {
    let mut state = RewardState::new();
    state.record(Elegance::Iu, Stars::new(4).unwrap());
    let w = state.weights();
    assert_eq!(w.elegance, [0.0, 0.0, 0.16, 0.0]);
    assert_eq!(w.coupling, 1.0 - 0.16);
}
