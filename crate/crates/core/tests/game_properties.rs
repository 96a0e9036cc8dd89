mod common;

use common::{c, game_from_dividends, permutation_shapley, q};
use isv::game::{
    harsanyi_dividends, in_core, is_convex, is_convex_marginal, is_positive, is_size_bounded, reduced_game,
    shapley_exact, shapley_matrix_exact,
};
use isv::{Coalition, Game, Rational, Scalar, TableGame};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn dividend_game(max_n: usize) -> impl Strategy<Value = Game> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((1u64..1 << n, small_rational()), 0..=2 * n)
            .prop_map(move |d| {
                let d: Vec<_> = d.into_iter().map(|(s, v)| (Coalition::from_bits(s), v)).collect();
                game_from_dividends(n, &d)
            })
    })
}

fn table_game(max_n: usize) -> impl Strategy<Value = Game> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(small_rational(), 1 << n).prop_map(move |mut values| {
            values[0] = Rational::zero();
            TableGame::from_table(n, values).unwrap()
        })
    })
}

/// Convex integer games from nonnegative dividends on coalitions of size at
/// least two, kept only when size-bounded.
fn convex_size_bounded_game() -> impl Strategy<Value = Game> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec((1u64..1 << n, 1i64..=2), 0..=n).prop_filter_map("not size-bounded", move |d| {
            let d: Vec<_> = d
                .into_iter()
                .map(|(s, v)| (Coalition::from_bits(s), q(v, 1)))
                .filter(|(s, _)| s.len() >= 2)
                .collect();
            let g = game_from_dividends(n, &d);
            is_size_bounded(&g).then_some(g)
        })
    })
}

fn convex_integer_game(max_n: usize) -> impl Strategy<Value = Game> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((1u64..1 << n, 0i64..=3), 0..=2 * n).prop_map(move |d| {
            let d: Vec<_> = d.into_iter().map(|(s, v)| (Coalition::from_bits(s), q(v, 1))).collect();
            game_from_dividends(n, &d)
        })
    })
}

/// Marginal vector of the order `0, 1, …, n−1` rotated by `shift`.
fn marginal_vector(game: &Game, shift: usize) -> Vec<Rational> {
    let n = game.players();
    let mut x = vec![Rational::zero(); n];
    let mut prefix = Coalition::EMPTY;
    for k in 0..n {
        let i = (k + shift) % n;
        x[i] = game.value(prefix.with(i)) - game.value(prefix);
        prefix = prefix.with(i);
    }
    x
}

fn lift(reduced: &[Rational], at: usize, payoff: &Rational) -> Vec<Rational> {
    let mut x = reduced.to_vec();
    x.insert(at, payoff.clone());
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dividends_reconstruct_the_table(game in table_game(8)) {
        prop_assert_eq!(harsanyi_dividends(&game).reconstruct(), game);
    }

    #[test]
    fn shapley_matches_permutation_average(game in dividend_game(6)) {
        prop_assert_eq!(shapley_exact(&game), permutation_shapley(&game));
    }

    #[test]
    fn shapley_axioms(game in table_game(6)) {
        let sv = shapley_exact(&game);
        let total = sv.iter().fold(Rational::zero(), |a, b| a + b);
        prop_assert_eq!(&total, game.grand_value());
        for i in 0..game.players() {
            if game.is_null_player(i) {
                prop_assert!(sv[i].is_zero());
            }
            for j in i + 1..game.players() {
                if game.are_symmetric(i, j) {
                    prop_assert_eq!(&sv[i], &sv[j]);
                }
            }
        }
    }

    #[test]
    fn null_and_symmetric_players_in_sparse_games(n in 3usize..=6, w in 1i64..5) {
        // Player n-1 is null; players 0 and 1 are symmetric.
        let g = game_from_dividends(n, &[(c(&[0, 1]), q(w, 1)), (Coalition::grand(n - 1), q(1, 2))]);
        let sv = shapley_exact(&g);
        prop_assert!(sv[n - 1].is_zero());
        prop_assert_eq!(&sv[0], &sv[1]);
    }

    #[test]
    fn matrix_is_symmetric_with_shapley_row_sums(game in table_game(6)) {
        let m = shapley_matrix_exact(&game);
        let sv = shapley_exact(&game);
        prop_assert!(m.is_symmetric());
        for (i, row) in m.rows().enumerate() {
            let sum = row.iter().fold(Rational::zero(), |a, b| a + b);
            prop_assert_eq!(&sum, &sv[i]);
        }
    }

    #[test]
    fn convexity_checks_agree(game in table_game(5)) {
        prop_assert_eq!(is_convex(&game), is_convex_marginal(&game));
    }

    #[test]
    fn positive_games_are_convex(game in convex_integer_game(6)) {
        prop_assert!(is_positive(&game));
        prop_assert!(is_convex(&game));
    }

    #[test]
    fn reduction_preserves_convexity_and_size_bound(game in convex_size_bounded_game(), pick in 0usize..7) {
        let n = game.players();
        let i = pick % n;
        let lo = game.value(Coalition::singleton(i)).to_i64_exact().unwrap();
        let hi = (game.grand_value() - game.value(game.grand().without(i))).to_i64_exact().unwrap();
        for c in lo.max(0)..=hi {
            let reduced = reduced_game(&game, i, &q(c, 1)).unwrap().game;
            prop_assert!(is_convex(&reduced), "c = {}", c);
            if c >= 1 {
                prop_assert!(is_size_bounded(&reduced), "c = {}", c);
            }
        }
    }

    #[test]
    fn core_vectors_of_reduced_games_lift(game in convex_integer_game(6), pick in 0usize..6, shift in 0usize..6) {
        let n = game.players();
        prop_assume!(n >= 2);
        let i = pick % n;
        let lo = game.value(Coalition::singleton(i)).to_i64_exact().unwrap();
        let hi = (game.grand_value() - game.value(game.grand().without(i))).to_i64_exact().unwrap();
        for c in lo.max(0)..=hi {
            let c = q(c, 1);
            let reduced = reduced_game(&game, i, &c).unwrap().game;
            for y in [shapley_exact(&reduced), marginal_vector(&reduced, shift)] {
                if in_core(&reduced, &y).unwrap() {
                    prop_assert!(in_core(&game, &lift(&y, i, &c)).unwrap());
                }
            }
        }
    }

    #[test]
    fn shapley_lies_in_core_of_convex_games(game in convex_integer_game(7)) {
        prop_assert!(in_core(&game, &shapley_exact(&game)).unwrap());
    }
}

#[test]
fn fixed_games() {
    let half = common::half_game();
    assert!(!is_convex(&half));
    assert!(!is_positive(&half));
    assert!(is_size_bounded(&half));
    assert!(in_core(&half, &[q(1, 2), q(1, 2), q(1, 2), q(1, 2)]).unwrap());
    assert!(!in_core(&half, &[q(1, 1), q(1, 1), q(0, 1), q(0, 1)]).unwrap());

    let g = common::triple_and_pair();
    assert_eq!(shapley_exact(&g), vec![q(2, 3), q(2, 3), q(2, 3), q(1, 2), q(1, 2)]);
    let m = shapley_matrix_exact(&g);
    assert_eq!(m.get(0, 1), &q(2, 9));
    assert!(m.get(0, 3).is_zero());
}
