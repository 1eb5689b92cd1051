//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p icbd --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use icbd::applications::agenda::{
    all_agendas, all_strict_profiles, analyse_agenda, sophisticated_outcome, AgendaNode, BinaryAgenda,
};
use icbd::applications::moneyburn::{default_cap, delta_gap, money_burn_solve, random_base, MoneyBurnConfig};
use icbd::cardinal::{canonical_profile, m_operator, mixed_strictly_dominated, profile_from_values};
use icbd::dominance::{admissible_set, weakly_dominates};
use icbd::fixtures;
use icbd::game::Game;
use icbd::io::generator::{generate_game, GeneratorSpec};
use icbd::rational::{ratio, Rational};
use icbd::solvers::bi::backward_induction;
use icbd::solvers::conditions::{check_nrt, check_tdi};
use icbd::solvers::{
    full_reduction_weak_dominance, icbd, icd, iterated_admissibility, local_first_round_variant, outcome_labels,
    restriction_names, u_operator, OrderPolicy,
};
use icbd::strategies::{Restriction, StrategySpace};
use icbd::witness::{construct_sequential_witness, verify_certificate, WitnessError};
use num_traits::Zero;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn names(sp: &StrategySpace, r: &Restriction) -> Vec<Vec<String>> {
    restriction_names(sp, r)
}

fn strs(v: &[&[&str]]) -> Vec<Vec<String>> {
    v.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect()
}

fn find(sp: &StrategySpace, i: usize, name: &str) -> Result<usize, String> {
    sp.find(i, name)
        .ok_or_else(|| format!("no strategy {name} for player {i}"))
}

fn bos_trace() -> Outcome {
    let g = fixtures::bos_outside();
    let sp = StrategySpace::new(&g);
    let res = icbd(&sp, &Restriction::full(&sp)).map_err(|e| e.to_string())?;
    let order: Vec<Vec<String>> = res
        .trace
        .iterations
        .iter()
        .map(|it| it.eliminated.iter().map(|e| sp.name(e.player, e.strategy)).collect())
        .collect();
    ensure(order == strs(&[&["ID"], &["R"], &["O"]]), || {
        format!("elimination order {order:?}")
    })?;
    ensure(names(&sp, &res.fixpoint) == strs(&[&["IT"], &["L"]]), || {
        format!("fixpoint {:?}", names(&sp, &res.fixpoint))
    })?;
    ensure(res.trace.replay(&sp, None).is_empty(), || {
        "trace does not replay".into()
    })?;
    Ok("ID -> R -> O, fixpoint {(IT, L)}".into())
}

/// Checks that `stages` is a valid iterated weak-dominance reduction: every
/// strategy removed at a stage is weakly dominated, relative to the current
/// restriction, by a strategy that is still present.
fn valid_reduction(sp: &StrategySpace, stages: &[Vec<(usize, &str)>]) -> Result<Restriction, String> {
    let mut r = Restriction::full(sp);
    for stage in stages {
        let mut next = r.sets.clone();
        for &(i, name) in stage {
            let s = find(sp, i, name)?;
            let dominated = r.sets[i]
                .iter()
                .any(|&d| d != s && weakly_dominates(sp, i, d, s, &r).unwrap_or(false));
            ensure(dominated, || {
                format!("{name} is not weakly dominated at stage {stage:?}")
            })?;
            next[i].retain(|&x| x != s);
        }
        r = Restriction::new(next);
    }
    Ok(r)
}

fn centipede() -> Outcome {
    let g = fixtures::centipede();
    let sp = StrategySpace::new(&g);
    let full = Restriction::full(&sp);
    let target = strs(&[&["A"], &["DG"]]);
    let res = icbd(&sp, &full).map_err(|e| e.to_string())?;
    ensure(names(&sp, &res.fixpoint) == target, || {
        format!("ICBD fixpoint {:?}", names(&sp, &res.fixpoint))
    })?;
    let zeta = outcome_labels(&sp, &res.outcomes);
    let a_outcome = g.label(g.child(g.root(), |_| 0)).to_string();
    ensure(zeta == BTreeSet::from([a_outcome.clone()]), || {
        format!("ICBD outcomes {zeta:?}")
    })?;

    let ia = iterated_admissibility(&sp).map_err(|e| e.to_string())?;
    ensure(names(&sp, &ia.fixpoint) == target, || {
        format!("IA fixpoint {:?}", names(&sp, &ia.fixpoint))
    })?;
    let staged = valid_reduction(&sp, &[vec![(0, "BE")], vec![(1, "C"), (1, "DH")], vec![(0, "BF")]])?;
    ensure(names(&sp, &staged) == target, || {
        format!("staged reduction ends at {:?}", names(&sp, &staged))
    })?;

    ensure(check_nrt(&g).map_err(|e| e.to_string())?.is_none(), || {
        "NRT fails".into()
    })?;
    ensure(check_tdi(&sp).is_none(), || "TDI fails".into())?;
    let bi = backward_induction(&g).map_err(|e| e.to_string())?;
    ensure(bi.unique && bi.outcomes == res.outcomes, || {
        format!("BI outcomes {:?}", bi.labels(&g))
    })?;
    Ok(format!(
        "ICBD = IA = {{(A, DG)}}; BE -> {{C, DH}} -> BF is a valid reduction; NRT, TDI hold; zeta = {{z_BI}} = {{{a_outcome}}}"
    ))
}

fn order_dependence() -> Outcome {
    let g = fixtures::order_dependence();
    let sp = StrategySpace::new(&g);
    let res = icbd(&sp, &Restriction::full(&sp)).map_err(|e| e.to_string())?;
    ensure(names(&sp, &res.fixpoint) == strs(&[&["O"], &["C"]]), || {
        format!("ICBD fixpoint {:?}", names(&sp, &res.fixpoint))
    })?;
    let local = local_first_round_variant(&sp).map_err(|e| e.to_string())?;
    ensure(names(&sp, &local.fixpoint) == strs(&[&["O"], &["L"]]), || {
        format!("local variant fixpoint {:?}", names(&sp, &local.fixpoint))
    })?;
    Ok("ICBD {(O, C)}, local variant {(O, L)}".into())
}

fn cardinal_refinement() -> Outcome {
    let g = fixtures::outside_tmd();
    let sp = StrategySpace::new(&g);
    let full = Restriction::full(&sp);
    let o = find(&sp, 0, "O")?;
    let b = icbd(&sp, &full).map_err(|e| e.to_string())?;
    let expected_a: Vec<usize> = full.sets[0].iter().copied().filter(|&s| s != o).collect();
    ensure(
        b.fixpoint.sets[0] == expected_a && b.fixpoint.sets[1] == full.sets[1],
        || format!("ICBD fixpoint {:?}", names(&sp, &b.fixpoint)),
    )?;
    let u = profile_from_values(fixtures::outside_tmd_utilities(&g));
    let m = icd(&sp, &u, &full).map_err(|e| e.to_string())?;
    ensure(names(&sp, &m.fixpoint) == strs(&[&["IT"], &["L"]]), || {
        format!("cardinal fixpoint {:?}", names(&sp, &m.fixpoint))
    })?;
    let inner = g.own_info_sets(0)[1];
    let problem = sp.reaching_sets(inner, &full);
    let (it, id) = (find(&sp, 0, "IT")?, find(&sp, 0, "ID")?);
    let sigma = mixed_strictly_dominated(&sp, id, &problem, &u[0])
        .map_err(|e| e.to_string())?
        .ok_or("D is not dominated by a mixture")?;
    let wt = sigma.weights.get(&it).cloned().unwrap_or_else(Rational::zero);
    ensure(wt > ratio(1, 3) && wt < ratio(2, 3), || format!("weight on T is {wt}"))?;
    Ok(format!(
        "U^inf = (S_a \\ {{O}}) x S_b, M^inf = {{(IT, L)}}, weight on T = {wt}"
    ))
}

fn random_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        seed,
        max_depth: 2 + (seed % 2) as usize,
        max_actions: 2 + (seed / 2 % 2) as usize,
        player_count: 2 + (seed / 4 % 2) as usize,
        tie_probability: "1/5".into(),
        force_nrt: false,
        force_perfect_info: false,
    }
}

fn property_suite() -> Outcome {
    let mut certificates = 0usize;
    let mut refusals = 0usize;
    for seed in 0..500u64 {
        let g = generate_game(&random_spec(seed)).map_err(|e| format!("seed {seed}: {e}"))?;
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let res = icbd(&sp, &full).map_err(|e| format!("seed {seed}: {e}"))?;
        let canonical = canonical_profile(&g);
        for k in 0..=res.iterations_to_fixpoint {
            let r = res.trace.snapshot(k);
            ensure(r.is_valid(), || {
                format!("seed {seed}: round {k} is empty for some player")
            })?;
            if k > 0 {
                ensure(r.is_subset(res.trace.snapshot(k - 1)), || {
                    format!("seed {seed}: round {k} grows")
                })?;
            }
            let ur = u_operator(&sp, r);
            for i in 0..g.num_players() {
                let a = admissible_set(&sp, i, r);
                ensure(a.iter().all(|s| ur.sets[i].contains(s)), || {
                    format!("seed {seed}: admissible strategy of player {i} removed at round {k}")
                })?;
            }
            let (mr, _) = m_operator(&sp, r, &canonical).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(mr.is_subset(&ur), || {
                format!("seed {seed}: cardinal operator keeps more at round {k}")
            })?;
        }
        let u1 = u_operator(&sp, &full);
        for i in 0..g.num_players() {
            for s in 0..sp.strategies[i].len() {
                let w = construct_sequential_witness(&sp, i, s, &full);
                if u1.contains(i, s) {
                    let cert =
                        w.map_err(|e| format!("seed {seed}: survivor {} has no certificate: {e}", sp.name(i, s)))?;
                    let errs = verify_certificate(&sp, &cert);
                    ensure(errs.is_empty(), || format!("seed {seed}: certificate fails: {errs:?}"))?;
                    certificates += 1;
                } else {
                    ensure(matches!(w, Err(WitnessError::HypothesisViolated { .. })), || {
                        format!("seed {seed}: non-survivor {} was not refused", sp.name(i, s))
                    })?;
                    refusals += 1;
                }
            }
        }
    }
    Ok(format!(
        "500 games; monotone nonempty rounds, A <= U, M <= U; {certificates} certificates verified, {refusals} refusals"
    ))
}

fn nrt_backward_induction() -> Outcome {
    let mut found = 0;
    let mut seed = 0u64;
    while found < 300 {
        ensure(seed < 10_000, || {
            format!("only {found} qualifying games in 10000 seeds")
        })?;
        let spec = GeneratorSpec {
            seed,
            max_depth: 3,
            max_actions: 2 + (seed % 2) as usize,
            player_count: 2 + (seed / 2 % 2) as usize,
            tie_probability: "1/3".into(),
            force_nrt: true,
            force_perfect_info: true,
        };
        seed += 1;
        let g = generate_game(&spec).map_err(|e| format!("seed {}: {e}", spec.seed))?;
        if g.terminals().len() > 20 {
            continue;
        }
        found += 1;
        check_ok(&g, spec.seed)?;
    }
    return Ok("300 NRT perfect-information games; zeta(ICBD) = {z_BI}, U = A every round".into());

    fn check_ok(g: &Game, seed: u64) -> Result<(), String> {
        ensure(check_nrt(g).map_err(|e| e.to_string())?.is_none(), || {
            format!("seed {seed}: generator broke NRT")
        })?;
        let sp = StrategySpace::new(g);
        let res = icbd(&sp, &Restriction::full(&sp)).map_err(|e| format!("seed {seed}: {e}"))?;
        let bi = backward_induction(g).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(res.outcomes == BTreeSet::from([bi.outcome]) && bi.unique, || {
            format!("seed {seed}: ICBD {:?} vs BI {:?}", res.outcomes, bi.outcomes)
        })?;
        for k in 0..=res.iterations_to_fixpoint {
            let r = res.trace.snapshot(k);
            let ur = u_operator(&sp, r);
            for i in 0..g.num_players() {
                ensure(admissible_set(&sp, i, r) == ur.sets[i], || {
                    format!("seed {seed}: U and A differ for player {i} at round {k}")
                })?;
            }
        }
        Ok(())
    }
}

fn outcome_invariance() -> Outcome {
    let mut found = 0;
    let mut seed = 0u64;
    let mut with_ties = 0;
    let mut history_splits = 0;
    while found < 100 {
        ensure(seed < 10_000, || format!("only {found} TDI games in 10000 seeds"))?;
        let spec = GeneratorSpec {
            tie_probability: "1/3".into(),
            ..random_spec(seed)
        };
        seed += 1;
        let g = generate_game(&spec).map_err(|e| format!("seed {}: {e}", spec.seed))?;
        let sp = StrategySpace::new(&g);
        if check_tdi(&sp).is_some() {
            continue;
        }
        found += 1;
        if g.outcome_labels().len()
            > (0..g.num_players())
                .map(|i| g.max_rank(i) as usize + 1)
                .min()
                .unwrap_or(0)
        {
            with_ties += 1;
        }
        // Under TDI, terminals every player ranks alike are one outcome; compare
        // images as sets of rank vectors.
        let payoff = |z: usize| (0..g.num_players()).map(|i| g.rank(i, z)).collect::<Vec<u32>>();
        let mut images = BTreeSet::new();
        let mut histories = BTreeSet::new();
        for k in 0..25 {
            let red = full_reduction_weak_dominance(&sp, OrderPolicy::Seeded(k)).map_err(|e| e.to_string())?;
            images.insert(red.outcomes.iter().map(|&z| payoff(z)).collect::<BTreeSet<_>>());
            histories.insert(red.outcomes.clone());
        }
        ensure(images.len() == 1, || {
            format!("seed {}: {} distinct outcome images", spec.seed, images.len())
        })?;
        if histories.len() > 1 {
            history_splits += 1;
        }
    }
    Ok(format!(
        "100 TDI games ({with_ties} with ties) x 25 seeded full reductions, one outcome image each \
         ({history_splits} reach different but jointly indifferent terminals)"
    ))
}

/// Sophisticated voting computed directly on the majority relation.
fn sophisticated(node: &AgendaNode, prefs: &[Vec<String>]) -> String {
    if node.children.is_empty() {
        return node.alternatives.iter().next().expect("leaf").clone();
    }
    let a = sophisticated(&node.children[0], prefs);
    let b = sophisticated(&node.children[1], prefs);
    let pos = |p: &Vec<String>, x: &str| p.iter().position(|y| y == x);
    let for_a = prefs.iter().filter(|p| pos(p, &a) < pos(p, &b)).count();
    if a == b || 2 * for_a > prefs.len() {
        a
    } else {
        b
    }
}

fn voting_sweep() -> Outcome {
    let alts: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let voters: Vec<String> = ["v1", "v2", "v3"].iter().map(|s| s.to_string()).collect();
    let agendas = all_agendas(&alts);
    let profiles = all_strict_profiles(&alts, 3);
    let mut cases = 0;
    for tree in &agendas {
        for prefs in &profiles {
            let agenda = BinaryAgenda::new(voters.clone(), prefs.clone(), tree.clone()).map_err(|e| e.to_string())?;
            let expected = sophisticated(tree, prefs);
            let a = analyse_agenda(&agenda).map_err(|e| e.to_string())?;
            let single = BTreeSet::from([expected.clone()]);
            ensure(a.icbd_alternatives == single && a.bi_alternatives == single, || {
                format!(
                    "agenda {:?}, profile {prefs:?}: ICBD {:?}, BI {:?}, expected {expected}",
                    tree.to_doc(),
                    a.icbd_alternatives,
                    a.bi_alternatives
                )
            })?;
            ensure(a.tdi_violation.is_none(), || format!("TDI fails for profile {prefs:?}"))?;
            let s = sophisticated_outcome(&agenda).map_err(|e| e.to_string())?;
            ensure(s == expected, || {
                format!("sophisticated outcome {s}, expected {expected}")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{} agendas x {} profiles = {cases} cases agree; TDI holds throughout",
        agendas.len(),
        profiles.len()
    ))
}

fn money_burning() -> Outcome {
    for seed in 0..10u64 {
        let (rows, cols) = (2 + (seed % 2) as usize, 2 + (seed / 2 % 2) as usize);
        let base = random_base(seed, rows, cols);
        let epsilon = delta_gap(&base) / Rational::from_integer(2.into());
        let cap = default_cap(&base, &epsilon);
        let mut images = Vec::new();
        for budget_cap in [cap, cap + 2] {
            let config = MoneyBurnConfig {
                epsilon: epsilon.clone(),
                budget_cap,
            };
            let report = money_burn_solve(&base, &config).map_err(|e| format!("seed {seed}, cap {budget_cap}: {e}"))?;
            images.push(report.outcome_labels);
        }
        ensure(images[0] == images[1], || {
            format!("seed {seed}: raising the cap changed {images:?}")
        })?;
    }
    Ok("10 bases at eps = delta/2: outcome ((0, a*_a), a*_b) at the default cap and cap + 2".into())
}

fn exactness() -> Outcome {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let files = [
        "solvers/mod.rs",
        "solvers/bi.rs",
        "solvers/conditions.rs",
        "solvers/perfect_info.rs",
        "witness.rs",
        "lp.rs",
        "cardinal.rs",
        "dominance.rs",
        "rational.rs",
        "strategies.rs",
        "game.rs",
    ];
    let mut hits = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(src.join(f)).map_err(|e| format!("{f}: {e}"))?;
        for (n, line) in text.lines().enumerate() {
            let tokens = line.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'));
            if tokens.into_iter().any(|t| t == "f32" || t == "f64") {
                hits.push(format!("{f}:{}", n + 1));
            }
            // float literals such as `0.5` or `1e-9`
            let bytes = line.as_bytes();
            if bytes
                .windows(3)
                .any(|w| w[0].is_ascii_digit() && w[1] == b'.' && w[2].is_ascii_digit())
                && !line.trim_start().starts_with("//")
            {
                hits.push(format!("{f}:{} (float literal)", n + 1));
            }
        }
    }
    ensure(hits.is_empty(), || format!("floating point in {hits:?}"))?;
    Ok(format!(
        "{} solver/witness/LP sources use only exact rationals and integers",
        files.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("bos-outside trace", bos_trace),
        ("centipede", centipede),
        ("order dependence", order_dependence),
        ("cardinal refinement", cardinal_refinement),
        ("property suite", property_suite),
        ("NRT backward induction", nrt_backward_induction),
        ("outcome invariance under TDI", outcome_invariance),
        ("voting sweep", voting_sweep),
        ("money burning", money_burning),
        ("exactness", exactness),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f32();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
