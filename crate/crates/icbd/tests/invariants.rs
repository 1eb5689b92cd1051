use icbd::cardinal::{canonical_profile, m_operator};
use icbd::dominance::admissible_set;
use icbd::io::format::{parse_game, serialize_game};
use icbd::io::generator::{generate_game, GeneratorSpec};
use icbd::solvers::bi::backward_induction;
use icbd::solvers::perfect_info::icbd_perfect_info;
use icbd::solvers::{icbd, u_operator};
use icbd::strategies::{Restriction, StrategySpace};
use icbd::witness::{construct_sequential_witness, verify_certificate};
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = GeneratorSpec> {
    (
        any::<u64>(),
        1usize..=3,
        2usize..=3,
        1usize..=3,
        prop::sample::select(vec!["0", "1/5", "1/2"]),
    )
        .prop_map(|(seed, max_depth, max_actions, player_count, ties)| GeneratorSpec {
            seed,
            max_depth,
            // keep three-player, depth-three games at desk scale
            max_actions: if player_count == 3 && max_depth == 3 {
                2
            } else {
                max_actions
            },
            player_count,
            tie_probability: ties.into(),
            force_nrt: false,
            force_perfect_info: false,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn files_round_trip_byte_for_byte(spec in spec()) {
        let g = generate_game(&spec).unwrap();
        let text = serialize_game(&g);
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(serialize_game(&back), text);
    }

    #[test]
    fn icbd_is_a_nested_nonempty_fixpoint(spec in spec()) {
        let g = generate_game(&spec).unwrap();
        let sp = StrategySpace::new(&g);
        let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
        for k in 0..res.iterations_to_fixpoint {
            prop_assert!(res.trace.snapshot(k + 1).is_subset(res.trace.snapshot(k)));
            prop_assert!(res.trace.snapshot(k + 1).is_valid());
        }
        prop_assert_eq!(u_operator(&sp, &res.fixpoint), res.fixpoint.clone());
        prop_assert!(res.trace.replay(&sp, None).is_empty());
        prop_assert!(!res.outcomes.is_empty());
    }

    #[test]
    fn admissible_and_cardinal_survivors_pass_icbd(spec in spec()) {
        let g = generate_game(&spec).unwrap();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let u = u_operator(&sp, &full);
        for i in 0..g.num_players() {
            for s in admissible_set(&sp, i, &full) {
                prop_assert!(u.contains(i, s));
            }
        }
        let (m, _) = m_operator(&sp, &full, &canonical_profile(&g)).unwrap();
        prop_assert!(m.is_subset(&u));
    }

    #[test]
    fn survivors_have_certificates_and_others_do_not(spec in spec()) {
        let g = generate_game(&spec).unwrap();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let u = u_operator(&sp, &full);
        for i in 0..g.num_players() {
            for s in 0..sp.strategies[i].len() {
                match construct_sequential_witness(&sp, i, s, &full) {
                    Ok(cert) => {
                        prop_assert!(u.contains(i, s));
                        prop_assert!(verify_certificate(&sp, &cert).is_empty());
                    }
                    Err(_) => prop_assert!(!u.contains(i, s)),
                }
            }
        }
    }

    #[test]
    fn nrt_games_solve_to_the_backward_induction_outcome(seed in any::<u64>(), players in 1usize..=3) {
        let spec = GeneratorSpec {
            seed,
            player_count: players,
            force_nrt: true,
            ..GeneratorSpec::default()
        };
        let g = generate_game(&spec).unwrap();
        let bi = backward_induction(&g).unwrap();
        let pi = icbd_perfect_info(&g).unwrap();
        prop_assert!(bi.unique);
        prop_assert_eq!(pi.outcomes, [bi.outcome].into_iter().collect());
    }
}
