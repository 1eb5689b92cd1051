//! Cardinal machinery: utilities originating from ordinal preferences,
//! conditional probability systems, expected utility at information sets,
//! and dominance by mixed strategies.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::game::{Game, HistoryId, InfoSetId, PlayerId};
use crate::lp::{maximin, LpError};
use crate::rational::{int, Rational};
use crate::strategies::{ConditionalProblem, OppProfile, Restriction, StrategySpace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CardinalError {
    #[error("unknown conditioning event: {0}")]
    UnknownConditioningEvent(String),
    #[error("invalid conditional probability system: {0}")]
    InvalidCps(String),
    #[error("conditional problem is empty")]
    EmptyProblem,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Bernoulli utility of one player, indexed by outcome label id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityFunction {
    pub owner: PlayerId,
    pub values: Vec<Rational>,
}

impl UtilityFunction {
    pub fn at(&self, g: &Game, z: HistoryId) -> &Rational {
        &self.values[g.history(z).outcome.expect("terminal history")]
    }

    /// Does the utility represent the owner's ordinal preference exactly?
    pub fn originates_from(&self, g: &Game) -> bool {
        let n = g.outcome_labels().len();
        self.values.len() == n
            && (0..n).all(|a| {
                (0..n).all(|b| {
                    let ra = g.label_rank(self.owner, a);
                    let rb = g.label_rank(self.owner, b);
                    (self.values[a] >= self.values[b]) == (ra <= rb)
                })
            })
    }
}

/// `max rank − rank`: the integer utility read off the preference.
pub fn canonical_utility(g: &Game, i: PlayerId) -> UtilityFunction {
    let top = g.max_rank(i);
    UtilityFunction {
        owner: i,
        values: (0..g.outcome_labels().len())
            .map(|l| int(i64::from(top - g.label_rank(i, l))))
            .collect(),
    }
}

pub fn canonical_profile(g: &Game) -> Vec<UtilityFunction> {
    (0..g.num_players()).map(|i| canonical_utility(g, i)).collect()
}

/// Utility profile from per-player label-indexed values.
pub fn profile_from_values(values: Vec<Vec<Rational>>) -> Vec<UtilityFunction> {
    values
        .into_iter()
        .enumerate()
        .map(|(owner, values)| UtilityFunction { owner, values })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    pub owner: PlayerId,
    pub weights: BTreeMap<usize, Rational>,
}

impl MixedStrategy {
    pub fn pure(owner: PlayerId, s: usize) -> MixedStrategy {
        MixedStrategy {
            owner,
            weights: BTreeMap::from([(s, Rational::one())]),
        }
    }
    pub fn is_valid(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative()) && self.weights.values().sum::<Rational>() == Rational::one()
    }
}

/// A probability measure over opponent profiles (zero entries omitted).
pub type Measure = BTreeMap<OppProfile, Rational>;

/// One conditioning event `S_{-i}(h)` shared by the listed information sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpsEntry {
    pub info_sets: Vec<InfoSetId>,
    pub event: Vec<OppProfile>,
    pub measure: Measure,
}

/// Conditional probability system of `owner`, one measure per distinct
/// conditioning event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cps {
    pub owner: PlayerId,
    pub entries: Vec<CpsEntry>,
}

impl Cps {
    pub fn entry(&self, h: InfoSetId) -> Option<&CpsEntry> {
        self.entries.iter().find(|e| e.info_sets.contains(&h))
    }
    pub fn measure(&self, h: InfoSetId) -> Option<&Measure> {
        self.entry(h).map(|e| &e.measure)
    }
}

/// Conditioning events of `i`, grouped by content, in order of first info set.
pub fn conditioning_events(space: &StrategySpace, i: PlayerId) -> Vec<(Vec<InfoSetId>, Vec<OppProfile>)> {
    let full = Restriction::full(space);
    let mut out: Vec<(Vec<InfoSetId>, Vec<OppProfile>)> = Vec::new();
    for &h in space.game.own_info_sets(i) {
        let ev = space.opp_reaching(i, h, &full);
        match out.iter_mut().find(|(_, e)| *e == ev) {
            Some((hs, _)) => hs.push(h),
            None => out.push((vec![h], ev)),
        }
    }
    out
}

/// A violated axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpsViolation {
    pub axiom: String,
    pub detail: String,
}

fn mass(m: &Measure, ev: &BTreeSet<&OppProfile>) -> Rational {
    m.iter().filter(|(y, _)| ev.contains(y)).map(|(_, w)| w.clone()).sum()
}

/// Check the axioms exactly: each measure is a probability (A2), gives its
/// event full mass (A1), and nested events obey the chain rule (A3).
pub fn validate_cps(space: &StrategySpace, cps: &Cps) -> Result<Vec<CpsViolation>, CardinalError> {
    let g = space.game;
    let i = cps.owner;
    let events = conditioning_events(space, i);
    for e in &cps.entries {
        for &h in &e.info_sets {
            let known = events.iter().find(|(hs, _)| hs.contains(&h));
            match known {
                Some((_, ev)) if *ev == e.event => {}
                Some(_) => {
                    return Err(CardinalError::UnknownConditioningEvent(format!(
                        "event listed for `{}` does not match its conditioning event",
                        g.info_set(h).name
                    )))
                }
                None => {
                    return Err(CardinalError::UnknownConditioningEvent(format!(
                        "information set {h} is not owned by player {i}"
                    )))
                }
            }
        }
    }
    let mut v = Vec::new();
    for (hs, _) in &events {
        if !cps.entries.iter().any(|e| e.info_sets.iter().any(|h| hs.contains(h))) {
            v.push(CpsViolation {
                axiom: "A2".into(),
                detail: format!("no measure for `{}`", g.info_set(hs[0]).name),
            });
        }
    }
    for (k, e) in cps.entries.iter().enumerate() {
        let total: Rational = e.measure.values().sum();
        if e.measure.values().any(|w| w.is_negative()) || total != Rational::one() {
            v.push(CpsViolation {
                axiom: "A2".into(),
                detail: format!("measure {k} is not a probability (total {total})"),
            });
        }
        let ev: BTreeSet<&OppProfile> = e.event.iter().collect();
        let inside = mass(&e.measure, &ev);
        if inside != Rational::one() {
            v.push(CpsViolation {
                axiom: "A1".into(),
                detail: format!("measure {k} gives its event mass {inside}"),
            });
        }
    }
    for (k, big) in cps.entries.iter().enumerate() {
        let big_ev: BTreeSet<&OppProfile> = big.event.iter().collect();
        for (l, small) in cps.entries.iter().enumerate() {
            if k == l || !small.event.iter().all(|y| big_ev.contains(y)) {
                continue;
            }
            let small_ev: BTreeSet<&OppProfile> = small.event.iter().collect();
            let scale = mass(&big.measure, &small_ev);
            for y in &small.event {
                let lhs = big.measure.get(y).cloned().unwrap_or_else(Rational::zero);
                let rhs = small.measure.get(y).cloned().unwrap_or_else(Rational::zero) * &scale;
                if lhs != rhs {
                    v.push(CpsViolation {
                        axiom: "A3".into(),
                        detail: format!("chain rule fails for events ({k}, {l}) at profile {y:?}: {lhs} != {rhs}"),
                    });
                    break;
                }
            }
        }
    }
    Ok(v)
}

/// Expected utility at `h` of a mixed strategy under the measure for `h`.
pub fn expected_utility_at(
    space: &StrategySpace,
    h: InfoSetId,
    sigma: &MixedStrategy,
    cps: &Cps,
    u: &UtilityFunction,
) -> Result<Rational, CardinalError> {
    let g = space.game;
    let i = sigma.owner;
    let m = cps
        .measure(h)
        .ok_or_else(|| CardinalError::UnknownConditioningEvent(format!("no measure for information set {h}")))?;
    let mut total = Rational::zero();
    for (&s, w) in &sigma.weights {
        for (y, p) in m {
            total += u.at(g, space.outcome_vs(i, s, y)) * w * p;
        }
    }
    Ok(total)
}

/// Utility matrix of a problem: rows = own strategies, columns = opponent profiles.
pub fn utility_matrix(
    space: &StrategySpace,
    u: &UtilityFunction,
    own: &[usize],
    opp: &[OppProfile],
) -> Vec<Vec<Rational>> {
    let g = space.game;
    own.iter()
        .map(|&s| {
            opp.iter()
                .map(|y| u.at(g, space.outcome_vs(u.owner, s, y)).clone())
                .collect()
        })
        .collect()
}

/// Row `r` strictly dominated by a mixture of rows? Returns the mixture
/// (weights by row position) maximizing the minimum margin.
pub fn mixed_dominator_rows(m: &[Vec<Rational>], r: usize) -> Result<Option<(Vec<Rational>, Rational)>, CardinalError> {
    if m.is_empty() || m[0].is_empty() {
        return Err(CardinalError::EmptyProblem);
    }
    let diff: Vec<Vec<Rational>> = m
        .iter()
        .map(|row| row.iter().zip(&m[r]).map(|(a, b)| a - b).collect())
        .collect();
    // a row that is a best reply to some column cannot be strictly dominated
    if (0..diff[0].len()).any(|c| diff.iter().all(|row| !row[c].is_positive())) {
        return Ok(None);
    }
    let (p, v) = maximin(&diff)?;
    Ok(v.is_positive().then_some((p, v)))
}

/// Belief over columns making row `r` a best reply, if any (weights by column).
pub fn best_reply_belief_rows(m: &[Vec<Rational>], r: usize) -> Result<Option<Vec<Rational>>, CardinalError> {
    if m.is_empty() || m[0].is_empty() {
        return Err(CardinalError::EmptyProblem);
    }
    let cols = m[0].len();
    // transpose: columns choose a belief to maximize the worst advantage of r
    let adv: Vec<Vec<Rational>> = (0..cols)
        .map(|c| m.iter().map(|row| &m[r][c] - &row[c]).collect())
        .collect();
    let (p, v) = maximin(&adv)?;
    Ok((!v.is_negative()).then_some(p))
}

/// `s ∈ md_i(problem)`: returns a strictly dominating mixture over the own side.
pub fn mixed_strictly_dominated(
    space: &StrategySpace,
    s: usize,
    problem: &ConditionalProblem,
    u: &UtilityFunction,
) -> Result<Option<MixedStrategy>, CardinalError> {
    if !problem.is_nonempty() {
        return Err(CardinalError::EmptyProblem);
    }
    let r = problem
        .own
        .iter()
        .position(|&x| x == s)
        .ok_or(CardinalError::EmptyProblem)?;
    let m = utility_matrix(space, u, &problem.own, &problem.opp);
    Ok(mixed_dominator_rows(&m, r)?.map(|(p, _)| MixedStrategy {
        owner: u.owner,
        weights: problem
            .own
            .iter()
            .zip(p)
            .filter(|(_, w)| !w.is_zero())
            .map(|(&s, w)| (s, w))
            .collect(),
    }))
}

/// A belief on the problem's opponent side against which `s` is a best reply.
pub fn best_reply_belief(
    space: &StrategySpace,
    s: usize,
    problem: &ConditionalProblem,
    u: &UtilityFunction,
) -> Result<Option<Measure>, CardinalError> {
    if !problem.is_nonempty() {
        return Err(CardinalError::EmptyProblem);
    }
    let r = problem
        .own
        .iter()
        .position(|&x| x == s)
        .ok_or(CardinalError::EmptyProblem)?;
    let m = utility_matrix(space, u, &problem.own, &problem.opp);
    Ok(best_reply_belief_rows(&m, r)?.map(|p| {
        problem
            .opp
            .iter()
            .zip(p)
            .filter(|(_, w)| !w.is_zero())
            .map(|(y, w)| (y.clone(), w))
            .collect()
    }))
}

/// Why a strategy fails the cardinal operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedElimination {
    pub player: PlayerId,
    pub strategy: usize,
    pub info_set: InfoSetId,
    pub dominator: MixedStrategy,
}

/// `M_i(R)` for one player: survivors and the reason for each elimination.
pub fn m_operator_player(
    space: &StrategySpace,
    i: PlayerId,
    r: &Restriction,
    u: &UtilityFunction,
) -> Result<(Vec<usize>, Vec<MixedElimination>), CardinalError> {
    let g = space.game;
    let mut dead: BTreeMap<usize, MixedElimination> = BTreeMap::new();
    for &h in g.own_info_sets(i) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let m = utility_matrix(space, u, &p.own, &p.opp);
        for (k, &s) in p.own.iter().enumerate() {
            if dead.contains_key(&s) {
                continue;
            }
            if let Some((w, _)) = mixed_dominator_rows(&m, k)? {
                let weights = p
                    .own
                    .iter()
                    .zip(w)
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(&s, w)| (s, w))
                    .collect();
                dead.insert(
                    s,
                    MixedElimination {
                        player: i,
                        strategy: s,
                        info_set: h,
                        dominator: MixedStrategy { owner: i, weights },
                    },
                );
            }
        }
    }
    let keep = r.sets[i].iter().copied().filter(|s| !dead.contains_key(s)).collect();
    Ok((keep, dead.into_values().collect()))
}

/// `M(R)`: drop strategies strictly dominated by a mixture on some allowed,
/// nonempty conditional problem (lowest information set recorded).
pub fn m_operator(
    space: &StrategySpace,
    r: &Restriction,
    u: &[UtilityFunction],
) -> Result<(Restriction, Vec<MixedElimination>), CardinalError> {
    let mut sets = Vec::new();
    let mut why = Vec::new();
    for i in 0..space.num_players() {
        let (keep, dead) = m_operator_player(space, i, r, &u[i])?;
        sets.push(keep);
        why.extend(dead);
    }
    Ok((Restriction::new(sets), why))
}

/// Best-reply form of the cardinal operator: keep `s` when at every allowed
/// nonempty conditional problem some belief makes it a best reply.
pub fn r_operator(space: &StrategySpace, r: &Restriction, u: &[UtilityFunction]) -> Result<Restriction, CardinalError> {
    let mut sets = Vec::new();
    for i in 0..space.num_players() {
        let mut keep = Vec::new();
        for &s in &r.sets[i] {
            let mut ok = true;
            for h in space.allowed_info_sets(i, s) {
                let p = space.reaching_sets(h, r);
                if p.is_nonempty() && best_reply_belief(space, s, &p, &u[i])?.is_none() {
                    ok = false;
                    break;
                }
            }
            if ok {
                keep.push(s);
            }
        }
        sets.push(keep);
    }
    Ok(Restriction::new(sets))
}
