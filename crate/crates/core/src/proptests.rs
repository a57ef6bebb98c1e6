//! Randomized invariants across the whole pipeline.

#[path = "../tests/common/mod.rs"]
mod common;

use num::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use satisfice::bench::{gen_belt, gen_grid, BeltConfig, GridConfig};
use satisfice::ds::{
    dsum_lasso, gap_exact, gap_low, int, int_word, rat, round_low, Comparator, DiscountParams,
    Relation,
};
use satisfice::game::{Player, PropSet};
use satisfice::objective::{eval_fragment_on_lasso, Objective};
use satisfice::product::{full_product, reach_product, ProductOrder};
use satisfice::solver::{
    attractor, attractor_in, reachability_as_parity, simulate, solve, FiniteMemoryStrategy,
};
use satisfice::{Deadline, Lasso};

fn params(k: u32, p: u32) -> DiscountParams {
    DiscountParams::new(k, p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_low_brackets(num in -10_000i64..10_000, den in 1i64..500, k in 1u32..4, p in 1u32..4) {
        let pr = params(k, p);
        let x = rat(num, den);
        let y = round_low(&x, pr);
        prop_assert_eq!(round_low(&y, pr), y.clone());
        prop_assert!(y <= x);
        prop_assert!(&x - &y < pr.resolution());
        let x2 = &x + rat(1, den);
        prop_assert!(round_low(&x2, pr) >= y);
    }

    #[test]
    fn lemma_two_bracket(word in prop::collection::vec(-5i64..=5, 1..12), k in 1u32..4, p in 1u32..4) {
        let pr = params(k, p);
        let d = pr.discount();
        let u: Vec<_> = word.iter().map(|&a| int(a)).collect();
        let diff = gap_exact(&u, &d) - gap_low(&u, pr);
        let bound = gap_exact(&vec![pr.resolution(); u.len()], &d);
        prop_assert!(!diff.is_negative());
        prop_assert!(diff < bound);
    }

    /// Soundness against arbitrary thresholds, not only 0.
    #[test]
    fn comparator_sound_for_threshold(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mu = rng.gen_range(1..=3);
        let pr = params(rng.gen_range(1..=2), rng.gen_range(1..=2));
        let threshold = random_threshold(&mut rng, 2);
        let c = Comparator::new(mu, pr, Relation::Geq, threshold.clone()).unwrap();
        let d = pr.discount();
        let v = dsum_lasso(&threshold, &d);
        for _ in 0..20 {
            let w = random_int_lasso(&mut rng, mu, 4, 3);
            let ds = dsum_lasso(&int_word(&w), &d);
            if c.accepts(&w).unwrap() {
                prop_assert!(ds >= v, "accepted {:?} with dsum {} < {}", w, ds, v);
            } else {
                prop_assert!(ds < &v + pr.approximation_bound());
            }
        }
    }

    #[test]
    fn leq_mirrors_geq(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mu = rng.gen_range(1..=3);
        let pr = params(rng.gen_range(1..=2), rng.gen_range(1..=2));
        let geq = Comparator::zero_threshold(mu, pr, Relation::Geq).unwrap();
        let leq = Comparator::zero_threshold(mu, pr, Relation::Leq).unwrap();
        let w = random_int_lasso(&mut rng, mu, 4, 3);
        prop_assert_eq!(leq.accepts(&w).unwrap(), geq.accepts(&w.map(|a| -a)).unwrap());
    }

    #[test]
    fn attractor_monotone_idempotent_linear(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=40);
        let pg = random_product(&mut rng, n, None);
        let t: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.2)).collect();
        let bigger: Vec<bool> = t.iter().map(|&b| b || rng.gen_bool(0.2)).collect();
        for player in [Player::System, Player::Environment] {
            let a = attractor_in(&pg, &vec![true; n], &t, player);
            let b = attractor(&pg, &bigger, player);
            prop_assert!(a.set.iter().zip(&b).all(|(&x, &y)| !x || y));
            prop_assert_eq!(attractor(&pg, &a.set, player), a.set.clone());
            prop_assert!(a.steps as usize <= 2 * n + 2 * pg.num_edges());
        }
    }

    #[test]
    fn regions_partition_and_strategies_stay_inside(seed in any::<u64>(), parity in any::<bool>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=40);
        let pg = random_product(&mut rng, n, parity.then_some(5));
        let r = solve(&pg, &Deadline::NONE).unwrap();
        for player in [Player::System, Player::Environment] {
            let region = r.region(player);
            for u in 0..n as u32 {
                if !region[u as usize] {
                    continue;
                }
                if pg.owner(u) == player {
                    let w = r.strategy(player)[u as usize];
                    prop_assert!(w.is_some_and(|w| pg.successors(u).contains(&w)));
                    // A reached target needs no further progress.
                    if parity || !pg.is_target(u) {
                        prop_assert!(region[w.unwrap() as usize]);
                    }
                } else if parity || !pg.is_target(u) {
                    prop_assert!(pg.successors(u).iter().all(|&w| region[w as usize]));
                }
            }
        }
    }

    #[test]
    fn extracted_strategies_win_their_regions(seed in any::<u64>(), parity in any::<bool>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=10);
        let pg = random_product(&mut rng, n, parity.then_some(5));
        let r = solve(&pg, &Deadline::NONE).unwrap();
        for player in [Player::System, Player::Environment] {
            prop_assert!(strategy_wins_region(&pg, player, r.strategy(player), &r.region(player)));
        }
    }

    #[test]
    fn parity_encoding_agrees_with_reachability(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=40);
        let pg = random_product(&mut rng, n, None);
        let a = solve(&pg, &Deadline::NONE).unwrap();
        let b = solve(&reachability_as_parity(&pg), &Deadline::NONE).unwrap();
        prop_assert_eq!(a.region_system, b.region_system);
    }

    #[test]
    fn monitor_agrees_with_direct_evaluation(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let text = random_fragment_text(&mut rng, 4, 3, 3);
        let f = satisfice::objective::parse_fragment(&text).unwrap();
        let universe: Vec<String> = PROPS.iter().map(|s| s.to_string()).collect();
        let obj = Objective::fragment(&f, &universe).unwrap();
        for _ in 0..20 {
            let labels = Lasso::new(
                (0..rng.gen_range(0..=4)).map(|_| PropSet(rng.gen_range(0..16))).collect(),
                (0..rng.gen_range(1..=4)).map(|_| PropSet(rng.gen_range(0..16))).collect(),
            );
            prop_assert_eq!(
                obj.accepts(&labels),
                eval_fragment_on_lasso(&f, &universe, &labels).unwrap(),
                "{} on {:?}", text, labels
            );
        }
    }

    #[test]
    fn product_projects_onto_game_and_respects_size_bound(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=25);
        let g = random_game(&mut rng, n, 2, 1, 3);
        let f = random_fragment(&mut rng, 3);
        let obj = Objective::fragment(&f, g.propositions()).unwrap();
        let c = Comparator::zero_threshold(g.mu(), params(1, 1), Relation::Geq).unwrap();
        let pg = full_product(&g, &c, &obj, ProductOrder::ComparatorFirst, &Deadline::NONE).unwrap();
        prop_assert!(pg.validate(Some(&g)).is_ok());
        prop_assert!(pg.num_states() <= g.num_states() * c.num_states() * obj.num_states() + 1);
        for u in 0..pg.num_states() as u32 {
            let Some(o) = pg.origin(u) else { continue };
            for (i, &w) in pg.successors(u).iter().enumerate() {
                let e = &g.edges()[pg.game_edge(u, i).unwrap()];
                prop_assert_eq!(e.src, o.game);
                if let Some(ow) = pg.origin(w) {
                    prop_assert_eq!(e.dst, ow.game);
                    let s = o.comparator.unwrap();
                    prop_assert_eq!(ow.comparator, Some(c.step(s, e.cost)));
                }
            }
        }
    }

    #[test]
    fn simulated_plays_are_valid_lassos(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..=30);
        let g = random_game(&mut rng, n, 2, 1, 2);
        let sys = FiniteMemoryStrategy::random_memoryless(&g, Player::System, seed);
        let env = FiniteMemoryStrategy::random_memoryless(&g, Player::Environment, seed ^ 1);
        let play = simulate(&g, &sys, &env).unwrap();
        prop_assert!(g.check_play(&play).is_ok());
        prop_assert!(!play.cycle.is_empty());
    }

    #[test]
    fn strategy_text_round_trips(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(2..=20);
        let g = random_game(&mut rng, n, 2, 1, 2);
        let c = Comparator::zero_threshold(g.mu(), params(1, 1), Relation::Geq).unwrap();
        let pg = reach_product(&g, &c, &Deadline::NONE).unwrap();
        let r = solve(&pg, &Deadline::NONE).unwrap();
        let s = satisfice::solver::lift_strategy(&pg, &g, &r, r.winner_from_initial).unwrap();
        let back = FiniteMemoryStrategy::from_text(&s.to_text()).unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_turns_alternate_and_bonus_is_paid_at_most_twice(
        n in 4u32..7, pos in 3i64..20, k in 1u32..3, seed in any::<u64>()
    ) {
        // With neg = -1 every non-bonus move costs exactly -1.
        let cfg = GridConfig::new(n, pos, -1, k);
        let (g, _) = gen_grid(&cfg).unwrap();
        let (g2, _) = gen_grid(&cfg).unwrap();
        prop_assert_eq!(&g, &g2);
        for e in g.edges() {
            prop_assert_ne!(g.owner(e.src), g.owner(e.dst));
        }
        let sys = FiniteMemoryStrategy::random_memoryless(&g, Player::System, seed);
        let env = FiniteMemoryStrategy::random_memoryless(&g, Player::Environment, seed ^ 7);
        let play = simulate(&g, &sys, &env).unwrap();
        let costs = g.cost_sequence(&play).unwrap();
        let bonus = |c: &i64| *c > 0;
        prop_assert_eq!(costs.cycle.iter().filter(|c| bonus(c)).count(), 0);
        prop_assert!(costs.prefix.iter().filter(|c| bonus(c)).count() <= 2);
    }

    #[test]
    fn belt_turns_alternate_and_generation_is_deterministic(rows in 2u32..5, cols in 2u32..4, three in any::<bool>()) {
        let cfg = if three && rows >= 3 {
            BeltConfig::three_block(rows, cols, 10, -2, 1)
        } else {
            BeltConfig::two_block(rows, cols, 10, -2, 1)
        };
        let Ok((g, _)) = gen_belt(&cfg) else { return Ok(()) };
        prop_assert_eq!(&g, &gen_belt(&cfg).unwrap().0);
        prop_assert!(g.validate().is_empty());
        for e in g.edges() {
            prop_assert_ne!(g.owner(e.src), g.owner(e.dst));
        }
    }
}

#[test]
fn exact_dsum_is_representation_independent() {
    let d = params(2, 1).discount();
    let w = Lasso::new(vec![1, -2], vec![0, 3]);
    let unrolled = w.unroll_once();
    assert_eq!(dsum_lasso(&int_word(&w), &d), dsum_lasso(&int_word(&unrolled), &d));
    assert!(dsum_lasso(&int_word(&Lasso::constant(0)), &d).is_zero());
}
