mod common;

use common::brute_in_core;
use isv::game::shapley_exact;
use isv::isv::indivisible_shapley;
use isv::matching::{
    floor_matching, game_from_owners, isv_allocation, isv_from_dividends, shapley_from_owners, OwnerList,
};
use isv::{Coalition, Scalar};
use proptest::prelude::*;

fn owner_list(max_n: usize, max_objects: usize) -> impl Strategy<Value = OwnerList> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(1u64..1 << n, 0..=max_objects)
            .prop_map(move |sets| OwnerList::new(n, sets.into_iter().map(Coalition::from_bits).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn allocation_matches_indivisible_shapley(list in owner_list(6, 8)) {
        let (allocation, counts) = isv_allocation(&list);
        let game = game_from_owners(&list).unwrap();
        prop_assert_eq!(&counts, &indivisible_shapley(&game).unwrap().payoffs);
        prop_assert_eq!(allocation.assignment.len(), list.objects());
        for (j, &p) in allocation.assignment.iter().enumerate() {
            prop_assert!(list.owners()[j].contains(p));
        }
        prop_assert_eq!(counts.iter().sum::<i64>() as usize, list.objects());
    }

    #[test]
    fn quotas_and_core(list in owner_list(7, 8)) {
        let (_, counts) = isv_allocation(&list);
        let sv = shapley_from_owners(&list);
        let game = game_from_owners(&list).unwrap();
        prop_assert_eq!(&sv, &shapley_exact(&game));
        for (x, s) in counts.iter().zip(&sv) {
            prop_assert!(Scalar::floor(s).to_i64_exact().unwrap() <= *x);
            prop_assert!(*x <= Scalar::ceil(s).to_i64_exact().unwrap());
        }
        prop_assert!(brute_in_core(&game, &counts));
    }

    #[test]
    fn floor_copies_always_fit(list in owner_list(7, 10)) {
        let state = floor_matching(&list, &shapley_from_owners(&list));
        prop_assert!(state.saturates_left());
        prop_assert!(state.is_consistent());
    }

    #[test]
    fn dividends_route_agrees(n in 1usize..=6, raw in prop::collection::vec((1u64..64, 0i64..=9), 0..8)) {
        let dividends: Vec<_> = raw
            .into_iter()
            .map(|(s, d)| (Coalition::from_bits(s & ((1 << n) - 1)), common::q(d, 1)))
            .filter(|(s, _)| !s.is_empty())
            .collect();
        let game = common::game_from_dividends(n, &dividends);
        prop_assert_eq!(isv_from_dividends(n, &dividends).unwrap(), indivisible_shapley(&game).unwrap().payoffs);
    }
}
