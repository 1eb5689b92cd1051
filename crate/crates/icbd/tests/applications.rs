use std::collections::BTreeSet;

use icbd::applications::agenda::{
    all_agendas, analyse_agenda, majority_relation, sophisticated_outcome, AgendaError, AgendaNode, BinaryAgenda,
};
use icbd::applications::moneyburn::{default_cap, delta_gap, money_burn_solve, random_base, MoneyBurnConfig};
use icbd::rational::Rational;
use icbd::solvers::SolverError;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sophisticated voting straight from the majority relation.
fn backward(node: &AgendaNode, agenda: &BinaryAgenda) -> String {
    if node.children.is_empty() {
        return node.alternatives.iter().next().unwrap().clone();
    }
    let a = backward(&node.children[0], agenda);
    let b = backward(&node.children[1], agenda);
    let maj = majority_relation(agenda).unwrap();
    if a == b || maj.prefers(&a, &b) {
        a
    } else {
        b
    }
}

fn random_agenda(rng: &mut ChaCha8Rng, alts: &[String], agendas: &[AgendaNode], voters: usize) -> BinaryAgenda {
    let tree = agendas.choose(rng).unwrap().clone();
    let prefs: Vec<Vec<String>> = (0..voters)
        .map(|_| {
            let mut p = alts.to_vec();
            p.shuffle(rng);
            p
        })
        .collect();
    let names = (1..=voters).map(|k| format!("v{k}")).collect();
    BinaryAgenda::new(names, prefs, tree).unwrap()
}

#[test]
fn random_agendas_agree_with_majority_backward_induction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alts: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let agendas = all_agendas(&alts);
    for _ in 0..60 {
        let agenda = random_agenda(&mut rng, &alts, &agendas, 3);
        let expected = backward(&agenda.tree, &agenda);
        let a = analyse_agenda(&agenda).unwrap();
        assert_eq!(a.icbd_alternatives, BTreeSet::from([expected.clone()]));
        assert!(a.tdi_violation.is_none());
        assert!(a.perfect_information);
        assert_eq!(sophisticated_outcome(&agenda).unwrap(), expected);
    }
}

#[test]
fn oversized_agendas_fail_cleanly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (alts, voters) in [(&["w", "x", "y", "z"][..], 3), (&["x", "y", "z"][..], 5)] {
        let alts: Vec<String> = alts.iter().map(|s| s.to_string()).collect();
        let agendas = all_agendas(&alts);
        let mut refused = 0;
        for _ in 0..5 {
            let agenda = random_agenda(&mut rng, &alts, &agendas, voters);
            match analyse_agenda(&agenda) {
                Ok(_) => {}
                Err(AgendaError::Solver(SolverError::SizeCap(_))) => refused += 1,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(refused > 0);
    }
}

#[test]
fn condorcet_winner_wins_every_agenda() {
    let alts: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let prefs = vec![
        vec!["y".to_string(), "x".into(), "z".into()],
        vec!["x".to_string(), "y".into(), "z".into()],
        vec!["y".to_string(), "z".into(), "x".into()],
    ];
    for tree in all_agendas(&alts) {
        let agenda = BinaryAgenda::new(vec!["a".into(), "b".into(), "c".into()], prefs.clone(), tree).unwrap();
        assert_eq!(majority_relation(&agenda).unwrap().condorcet_winner(), Some("y"));
        assert_eq!(sophisticated_outcome(&agenda).unwrap(), "y");
    }
}

#[test]
fn money_burning_on_random_bases() {
    for seed in 100..110u64 {
        let base = random_base(seed, 2, 2 + (seed % 2) as usize);
        let epsilon = delta_gap(&base) / Rational::from_integer(2.into());
        let cap = default_cap(&base, &epsilon);
        let report = money_burn_solve(
            &base,
            &MoneyBurnConfig {
                epsilon,
                budget_cap: cap,
            },
        )
        .unwrap();
        assert_eq!(report.outcome_labels, BTreeSet::from([report.predicted.clone()]));
        assert!(report.predicted.starts_with("0:"));
    }
}

#[test]
fn money_burning_rejects_large_epsilon() {
    let base = random_base(3, 2, 2);
    let epsilon = delta_gap(&base);
    assert!(money_burn_solve(&base, &MoneyBurnConfig { epsilon, budget_cap: 2 }).is_err());
}
