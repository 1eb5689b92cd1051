//! Money-burning extensions of two-player simultaneous games.
//!
//! Ann first publicly burns `n ∈ {0, …, N_max}` units; then Ann and Bob play
//! the base game, Bob knowing `n` but not Ann's action. Ann's payoff drops by
//! `ε·n`; Bob's is unchanged. Preferences are the orders induced by these
//! exact rational payoffs.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{mv, validate_game, Game, GameError, InfoSetId, Tree};
use crate::io::format::{fmt_rational, parse_rational, BaseGameDocument, FormatError, FORMAT_VERSION};
use crate::rational::{int, Rational};
use crate::solvers::{icbd, outcome_labels, SolveResult, SolverError};
use crate::strategies::{Restriction, StrategySpace};

#[derive(Debug, Error)]
pub enum MoneyBurnError {
    #[error("invalid base game: {0}")]
    InvalidBase(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("epsilon {epsilon} is not below the payoff gap {delta}")]
    EpsilonTooLarge { epsilon: String, delta: String },
    #[error("prediction failed: {0}")]
    PredictionFailed(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A two-player base game with a profile `star` that is Ann's unique best
/// outcome and against whose Ann-action Bob's `star` action is his unique best
/// reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoneyBurnBaseGame {
    pub actions_a: Vec<String>,
    pub actions_b: Vec<String>,
    /// `v_a[a][b]`: Ann's payoff when Ann plays `a` and Bob `b`.
    pub v_a: Vec<Vec<Rational>>,
    pub v_b: Vec<Vec<Rational>>,
    pub star: (usize, usize),
}

impl MoneyBurnBaseGame {
    pub fn new(
        actions_a: Vec<String>,
        actions_b: Vec<String>,
        v_a: Vec<Vec<Rational>>,
        v_b: Vec<Vec<Rational>>,
        star: (usize, usize),
    ) -> Result<MoneyBurnBaseGame, MoneyBurnError> {
        let bad = |m: &str| Err(MoneyBurnError::InvalidBase(m.to_string()));
        let (na, nb) = (actions_a.len(), actions_b.len());
        if na < 2 || nb == 0 {
            return bad("Ann needs at least two actions and Bob at least one");
        }
        let distinct = |xs: &[String]| xs.iter().collect::<BTreeSet<_>>().len() == xs.len();
        if !distinct(&actions_a) || !distinct(&actions_b) {
            return bad("duplicate action names");
        }
        let shaped = |v: &[Vec<Rational>]| v.len() == na && v.iter().all(|row| row.len() == nb);
        if !shaped(&v_a) || !shaped(&v_b) {
            return bad("payoff matrices must be |A_a| x |A_b|");
        }
        let (sa, sb) = star;
        if sa >= na || sb >= nb {
            return bad("star profile out of range");
        }
        for a in 0..na {
            for b in 0..nb {
                if (a, b) != star && v_a[a][b] >= v_a[sa][sb] {
                    return bad("the star profile must be Ann's unique best outcome");
                }
            }
        }
        if (0..nb).any(|b| b != sb && v_b[sa][b] >= v_b[sa][sb]) {
            return bad("Bob's star action must be his unique best reply to Ann's star action");
        }
        Ok(MoneyBurnBaseGame {
            actions_a,
            actions_b,
            v_a,
            v_b,
            star,
        })
    }

    pub fn from_document(doc: &BaseGameDocument) -> Result<MoneyBurnBaseGame, MoneyBurnError> {
        let matrix = |m: &[Vec<String>]| -> Result<Vec<Vec<Rational>>, FormatError> {
            m.iter()
                .map(|row| row.iter().map(|q| parse_rational(q)).collect())
                .collect()
        };
        let find = |xs: &[String], x: &str| {
            xs.iter()
                .position(|y| y == x)
                .ok_or_else(|| MoneyBurnError::InvalidBase(format!("star action `{x}` is not an action")))
        };
        let star = (find(&doc.actions_a, &doc.star[0])?, find(&doc.actions_b, &doc.star[1])?);
        MoneyBurnBaseGame::new(
            doc.actions_a.clone(),
            doc.actions_b.clone(),
            matrix(&doc.v_a)?,
            matrix(&doc.v_b)?,
            star,
        )
    }

    pub fn to_document(&self) -> BaseGameDocument {
        let matrix = |m: &[Vec<Rational>]| m.iter().map(|row| row.iter().map(fmt_rational).collect()).collect();
        BaseGameDocument {
            format_version: FORMAT_VERSION,
            actions_a: self.actions_a.clone(),
            actions_b: self.actions_b.clone(),
            v_a: matrix(&self.v_a),
            v_b: matrix(&self.v_b),
            star: [self.actions_a[self.star.0].clone(), self.actions_b[self.star.1].clone()],
        }
    }

    fn ann_star_value(&self) -> &Rational {
        &self.v_a[self.star.0][self.star.1]
    }

    /// Largest minus smallest of Ann's payoffs.
    pub fn spread(&self) -> Rational {
        let all = self.v_a.iter().flatten();
        let max = all.clone().max().expect("nonempty");
        let min = all.min().expect("nonempty");
        max - min
    }

    /// Label of the terminal history after burning `n` and playing `(a, b)`.
    pub fn label(&self, n: usize, a: usize, b: usize) -> String {
        format!("{n}:{}:{}", self.actions_a[a], self.actions_b[b])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoneyBurnConfig {
    pub epsilon: Rational,
    /// Largest burn level `N_max`.
    pub budget_cap: usize,
}

/// Smallest loss Ann suffers by leaving her star action, over all Bob actions.
pub fn delta_gap(base: &MoneyBurnBaseGame) -> Rational {
    let best = base.ann_star_value();
    (0..base.actions_a.len())
        .filter(|&a| a != base.star.0)
        .flat_map(|a| base.v_a[a].iter().map(move |v| best - v))
        .min()
        .expect("Ann has at least two actions")
}

/// Burn levels with `ε·n` above Ann's payoff spread are strictly worse than
/// burning nothing, so this cap loses nothing: `ceil(spread/ε) + 1`.
pub fn default_cap(base: &MoneyBurnBaseGame, epsilon: &Rational) -> usize {
    let q = base.spread() / epsilon;
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let ceil = n.div_ceil(&d);
    ceil.to_usize().expect("cap fits in usize") + 1
}

fn check_config(base: &MoneyBurnBaseGame, config: &MoneyBurnConfig) -> Result<(), MoneyBurnError> {
    if !config.epsilon.is_positive() {
        return Err(MoneyBurnError::InvalidConfig("epsilon must be positive".into()));
    }
    if config.budget_cap == 0 {
        return Err(MoneyBurnError::InvalidConfig("the burn cap must be at least 1".into()));
    }
    let delta = delta_gap(base);
    if config.epsilon >= delta {
        return Err(MoneyBurnError::EpsilonTooLarge {
            epsilon: fmt_rational(&config.epsilon),
            delta: fmt_rational(&delta),
        });
    }
    Ok(())
}

fn tiers_by_value(values: BTreeMap<String, Rational>) -> Vec<Vec<String>> {
    let mut by_value: BTreeMap<Rational, Vec<String>> = BTreeMap::new();
    for (label, v) in values {
        by_value.entry(v).or_default().push(label);
    }
    by_value.into_values().rev().collect()
}

fn ann_info_set(n: usize) -> String {
    format!("ann{n}")
}

fn strs(xs: &[String]) -> Vec<&str> {
    xs.iter().map(String::as_str).collect()
}

fn bob_info_set(n: usize) -> String {
    format!("bob{n}")
}

pub fn money_burn_game(base: &MoneyBurnBaseGame, config: &MoneyBurnConfig) -> Result<Game, MoneyBurnError> {
    check_config(base, config)?;
    let levels: Vec<String> = (0..=config.budget_cap).map(|n| n.to_string()).collect();
    let (aa, ab) = (strs(&base.actions_a), strs(&base.actions_b));
    let mut ann = BTreeMap::new();
    let mut bob = BTreeMap::new();
    let stages = (0..=config.budget_cap)
        .map(|n| {
            let mut leaves = Vec::new();
            for a in 0..aa.len() {
                for b in 0..ab.len() {
                    let label = base.label(n, a, b);
                    ann.insert(label.clone(), &base.v_a[a][b] - &config.epsilon * int(n as i64));
                    bob.insert(label.clone(), base.v_b[a][b].clone());
                    leaves.push(Tree::leaf(&label));
                }
            }
            Tree::joint(
                vec![mv("Ann", &ann_info_set(n), &aa), mv("Bob", &bob_info_set(n), &ab)],
                leaves,
            )
        })
        .collect();
    let tree = Tree::choice("Ann", "burn", &strs(&levels), stages);
    let prefs = vec![tiers_by_value(ann), tiers_by_value(bob)];
    Ok(validate_game(&tree.into_raw(&["Ann", "Bob"], prefs))?)
}

#[derive(Debug, Clone)]
pub struct MoneyBurnReport {
    pub game: Game,
    pub solve: SolveResult,
    pub outcome_labels: BTreeSet<String>,
    /// Zero burn followed by the star profile.
    pub predicted: String,
}

struct Layout {
    /// Ann's burn decision, then her stage decision after each burn level.
    burn: InfoSetId,
    ann_stage: Vec<InfoSetId>,
    bob_stage: Vec<InfoSetId>,
}

impl Layout {
    fn of(g: &Game, cap: usize) -> Layout {
        let find = |name: &str| {
            g.info_sets()
                .iter()
                .position(|h| h.name == name)
                .expect("generated game")
        };
        let ann_stage = (0..=cap).map(|n| find(&ann_info_set(n))).collect();
        let bob_stage = (0..=cap).map(|n| find(&bob_info_set(n))).collect();
        Layout {
            burn: find("burn"),
            ann_stage,
            bob_stage,
        }
    }
}

fn action_at(space: &StrategySpace, i: usize, s: usize, h: InfoSetId) -> Option<usize> {
    space.strategy(i, s).choices[space_local(space, h)]
}

fn space_local(space: &StrategySpace, h: InfoSetId) -> usize {
    let g = space.game;
    g.own_info_sets(g.info_set(h).owner)
        .iter()
        .position(|&k| k == h)
        .expect("own information set")
}

/// Structural facts about one snapshot of the elimination: Bob's surviving
/// plans factor across burn levels, and whenever Ann may still burn `n` and
/// then play her star action, Bob's star action is still available after `n`.
fn snapshot_violations(
    space: &StrategySpace,
    base: &MoneyBurnBaseGame,
    layout: &Layout,
    r: &Restriction,
    round: usize,
) -> Vec<String> {
    let mut out = Vec::new();
    let levels = layout.bob_stage.len();
    let projections: Vec<BTreeSet<usize>> = (0..levels)
        .map(|n| {
            r.sets[1]
                .iter()
                .filter_map(|&s| action_at(space, 1, s, layout.bob_stage[n]))
                .collect()
        })
        .collect();
    let product: usize = projections.iter().map(BTreeSet::len).product();
    if product != r.sets[1].len() {
        out.push(format!(
            "round {round}: Bob's {} surviving plans do not factor across burn levels",
            r.sets[1].len()
        ));
    }
    for n in 0..levels {
        let ann_star = r.sets[0].iter().any(|&s| {
            action_at(space, 0, s, layout.burn) == Some(n)
                && action_at(space, 0, s, layout.ann_stage[n]) == Some(base.star.0)
        });
        if ann_star && !projections[n].contains(&base.star.1) {
            out.push(format!(
                "round {round}: Ann may burn {n} and play {} but Bob no longer plays {} there",
                base.actions_a[base.star.0], base.actions_b[base.star.1]
            ));
        }
    }
    out
}

/// Runs ICBD on the money-burning game and checks the predicted outcome and
/// the structural facts above at every round.
pub fn money_burn_solve(base: &MoneyBurnBaseGame, config: &MoneyBurnConfig) -> Result<MoneyBurnReport, MoneyBurnError> {
    let game = money_burn_game(base, config)?;
    let (solve, labels) = {
        let space = StrategySpace::new(&game);
        let solve = icbd(&space, &Restriction::full(&space))?;
        let layout = Layout::of(&game, config.budget_cap);
        let mut problems = snapshot_violations(&space, base, &layout, &solve.trace.initial, 0);
        for (k, it) in solve.trace.iterations.iter().enumerate() {
            problems.extend(snapshot_violations(&space, base, &layout, &it.surviving, k + 1));
        }
        if !problems.is_empty() {
            return Err(MoneyBurnError::PredictionFailed(problems.join("; ")));
        }
        let labels = outcome_labels(&space, &solve.outcomes);
        (solve, labels)
    };
    let predicted = base.label(0, base.star.0, base.star.1);
    if labels.len() != 1 || !labels.contains(&predicted) {
        return Err(MoneyBurnError::PredictionFailed(format!(
            "surviving outcomes {labels:?}, expected {{{predicted}}}"
        )));
    }
    Ok(MoneyBurnReport {
        game,
        solve,
        outcome_labels: labels,
        predicted,
    })
}

/// A seeded base game on `rows x cols` actions with small integer payoffs.
/// Ann's star payoff is 4 and her other payoffs lie in `0..=2`, so the
/// default cap at `ε = δ/2` stays small.
pub fn random_base(seed: u64, rows: usize, cols: usize) -> MoneyBurnBaseGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let star = (rng.gen_range(0..rows), rng.gen_range(0..cols));
    let mut v_a = vec![vec![int(0); cols]; rows];
    let mut v_b = vec![vec![int(0); cols]; rows];
    for a in 0..rows {
        for b in 0..cols {
            v_a[a][b] = int(rng.gen_range(0..=2));
            v_b[a][b] = int(if a == star.0 {
                rng.gen_range(0..=2)
            } else {
                rng.gen_range(0..=3)
            });
        }
    }
    v_a[star.0][star.1] = int(4);
    v_b[star.0][star.1] = int(3);
    let names = |prefix: char, k: usize| (0..k).map(|j| format!("{prefix}{j}")).collect();
    MoneyBurnBaseGame::new(names('a', rows), names('b', cols), v_a, v_b, star).expect("valid by construction")
}
