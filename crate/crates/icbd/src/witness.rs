//! Sequential-rationality certificates: a utility originating from the
//! ordinal preference plus a conditional probability system under which a
//! strategy maximizes conditional expected utility at every relevant
//! information set.
//!
//! Construction peels off, level by level, the opponent profiles where the
//! target strategy does worst: the inner levels are solved recursively, then
//! a small weight `ε` is moved onto the peeled profiles and every outcome
//! worse than the peeled one is pushed down by `δ`. Both constants are
//! computed exactly from the recursive solution, and every certificate is
//! re-verified independently.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};
use thiserror::Error;

use crate::cardinal::{
    canonical_utility, conditioning_events, m_operator_player, validate_cps, CardinalError, Cps, CpsEntry, Measure,
    UtilityFunction,
};
use crate::dominance::{bd_chain, weakly_dom_on, DominanceError, RankMatrix};
use crate::game::{InfoSetId, PlayerId};
use crate::rational::{int, Rational};
use crate::strategies::{OppProfile, Restriction, StrategySpace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("hypothesis violated at information set {info_set}: {detail}")]
    HypothesisViolated { info_set: InfoSetId, detail: String },
    #[error("strategy {0} is not in the restriction")]
    NotInRestriction(usize),
    #[error("no utility in the search family works: {0}")]
    WitnessSearchExhausted(String),
    #[error("ranking domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("internal witness error: {0}")]
    Internal(String),
    #[error(transparent)]
    Cardinal(#[from] CardinalError),
    #[error(transparent)]
    Dominance(#[from] DominanceError),
}

/// Utility plus CPS making `strategy` sequentially rational given `restriction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalityCertificate {
    pub player: PlayerId,
    pub strategy: usize,
    pub restriction: Restriction,
    pub utility: UtilityFunction,
    pub cps: Cps,
    pub cautious: bool,
}

fn measure_mass(m: &Measure, ev: &BTreeSet<&OppProfile>) -> Rational {
    m.iter().filter(|(y, _)| ev.contains(y)).map(|(_, w)| w.clone()).sum()
}

/// Re-check a certificate exactly. Returns the list of violations (empty
/// when the certificate is valid).
pub fn verify_certificate(space: &StrategySpace, cert: &RationalityCertificate) -> Vec<String> {
    let g = space.game;
    let i = cert.player;
    let r = &cert.restriction;
    let mut v = Vec::new();
    if cert.utility.owner != i || cert.cps.owner != i {
        v.push("certificate parts belong to different players".to_string());
        return v;
    }
    if !r.contains(i, cert.strategy) {
        v.push("strategy is not in the restriction".to_string());
        return v;
    }
    if !cert.utility.originates_from(g) {
        v.push("utility does not represent the ordinal preference".to_string());
    }
    match validate_cps(space, &cert.cps) {
        Err(e) => {
            v.push(format!("malformed CPS: {e}"));
            return v;
        }
        Ok(errs) => v.extend(errs.into_iter().map(|e| format!("{}: {}", e.axiom, e.detail))),
    }
    let allowed: BTreeSet<InfoSetId> = space.allowed_info_sets(i, cert.strategy).into_iter().collect();
    for &h in g.own_info_sets(i) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let name = &g.info_set(h).name;
        let Some(m) = cert.cps.measure(h) else {
            v.push(format!("no measure at `{name}`"));
            continue;
        };
        let inside: BTreeSet<&OppProfile> = p.opp.iter().collect();
        if measure_mass(m, &inside) != Rational::one() {
            v.push(format!("belief at `{name}` leaves the restriction"));
            continue;
        }
        if !allowed.contains(&h) {
            continue;
        }
        if cert.cautious {
            let support: BTreeSet<&OppProfile> = m.iter().filter(|(_, w)| w.is_positive()).map(|(y, _)| y).collect();
            if support != inside {
                v.push(format!("belief at `{name}` lacks full support on the restriction"));
            }
        }
        let eu = |x: usize| -> Rational {
            m.iter()
                .map(|(y, w)| cert.utility.at(g, space.outcome_vs(i, x, y)) * w)
                .sum()
        };
        let best = eu(cert.strategy);
        for &x in &p.own {
            let other = eu(x);
            if other > best {
                v.push(format!("at `{name}`, {} earns {other} > {best}", space.name(i, x)));
            }
        }
    }
    v
}

/// A per-information-set requirement for the construction: the target must
/// beat every row in `xs` (row positions) in expectation over `ys`.
#[derive(Debug, Clone)]
struct Task {
    h: InfoSetId,
    xs: Vec<usize>,
    ys: Vec<usize>,
}

struct Ctx {
    /// ranks[row][col] over `R_i × R_{-i}`.
    ranks: Vec<Vec<u32>>,
    target: usize,
    max_rank: u32,
}

fn canonical_by_rank(max_rank: u32) -> Vec<Rational> {
    (0..=max_rank).map(|r| int(i64::from(max_rank - r))).collect()
}

/// The largest `2^-k` (`k ≥ 1`) not above `x`, for `0 < x`. Only the strict
/// bounds matter for correctness, and dyadic values keep the numbers small.
fn dyadic_at_most(x: &Rational) -> Rational {
    let mut d = Rational::new(1.into(), 2.into());
    while &d > x {
        d /= Rational::from_integer(2.into());
    }
    d
}

impl Ctx {
    fn same_on(&self, x: usize, cols: &[usize]) -> bool {
        cols.iter().all(|&c| self.ranks[x][c] == self.ranks[self.target][c])
    }

    /// Returns a utility per rank (strictly decreasing) and positive weights on `y`.
    fn build(&self, y: &[usize], tasks: &[Task]) -> Result<(Vec<Rational>, BTreeMap<usize, Rational>), WitnessError> {
        if y.is_empty() {
            return Ok((canonical_by_rank(self.max_rank), BTreeMap::new()));
        }
        let srank = |c: usize| self.ranks[self.target][c];
        let alpha = y.iter().map(|&c| srank(c)).max().expect("nonempty");
        let low: Vec<usize> = y.iter().copied().filter(|&c| srank(c) == alpha).collect();
        let high: Vec<usize> = y.iter().copied().filter(|&c| srank(c) != alpha).collect();
        let low_set: BTreeSet<usize> = low.iter().copied().collect();

        struct Split {
            keep: Vec<usize>,
            pushed: bool,
            hi: Vec<usize>,
            lo: Vec<usize>,
        }
        let mut splits = Vec::with_capacity(tasks.len());
        let mut sub = Vec::new();
        for t in tasks {
            let (lo, hi): (Vec<usize>, Vec<usize>) = t.ys.iter().partition(|c| low_set.contains(c));
            let mut keep = Vec::new();
            let mut pushed = false;
            for &x in &t.xs {
                if t.ys.iter().any(|&c| self.ranks[x][c] > alpha) {
                    pushed = true;
                } else {
                    keep.push(x);
                }
            }
            if hi.is_empty() {
                if let Some(&x) = keep.iter().find(|&&x| !self.same_on(x, &t.ys)) {
                    return Err(WitnessError::Internal(format!(
                        "row {x} weakly dominates the target at information set {}",
                        t.h
                    )));
                }
            } else {
                sub.push(Task {
                    h: t.h,
                    xs: keep.clone(),
                    ys: hi.clone(),
                });
            }
            splits.push(Split { keep, pushed, hi, lo });
        }
        let (ubar, wbar) = self.build(&high, &sub)?;

        let half = Rational::new(1.into(), 2.into());
        let mut eps = half.clone();
        for (t, sp) in tasks.iter().zip(&splits) {
            if sp.hi.is_empty() || sp.lo.is_empty() {
                continue;
            }
            let m: Rational = sp.hi.iter().map(|c| wbar[c].clone()).sum();
            let c_frac = Rational::new((sp.lo.len() as i64).into(), (low.len() as i64).into());
            for &x in &sp.keep {
                if self.same_on(x, &sp.hi) {
                    if !self.same_on(x, &sp.lo) {
                        return Err(WitnessError::Internal(format!(
                            "row {x} weakly dominates the target at information set {}",
                            t.h
                        )));
                    }
                    continue;
                }
                let gap: Rational = sp
                    .hi
                    .iter()
                    .map(|&c| &wbar[&c] * (&ubar[srank(c) as usize] - &ubar[self.ranks[x][c] as usize]))
                    .sum::<Rational>()
                    / &m;
                if !gap.is_positive() {
                    return Err(WitnessError::Internal(format!(
                        "inner level leaves no slack for row {x} at information set {}",
                        t.h
                    )));
                }
                let spread = sp
                    .lo
                    .iter()
                    .map(|&c| &ubar[self.ranks[x][c] as usize] - &ubar[alpha as usize])
                    .max()
                    .expect("nonempty");
                let gm = &gap * &m;
                let bound = &gm / (&gm + &c_frac * &spread);
                let cand = dyadic_at_most(&(bound * &half));
                if cand < eps {
                    eps = cand;
                }
            }
        }
        let mut w = BTreeMap::new();
        let low_w = if high.is_empty() {
            Rational::new(1.into(), (low.len() as i64).into())
        } else {
            &eps / Rational::from_integer((low.len() as i64).into())
        };
        for &c in &low {
            w.insert(c, low_w.clone());
        }
        let keep_w = Rational::one() - &eps;
        for (c, v) in wbar {
            w.insert(c, &keep_w * v);
        }
        let mut u = ubar;
        if splits.iter().any(|s| s.pushed) {
            let wr = &w;
            let p_min = tasks
                .iter()
                .flat_map(|t| {
                    let total: Rational = t.ys.iter().map(|c| wr[c].clone()).sum();
                    t.ys.iter().map(|c| &wr[c] / &total).collect::<Vec<_>>()
                })
                .min()
                .expect("some task is present");
            let spread = u.iter().max().expect("ranks") - u.iter().min().expect("ranks");
            // any integer above spread / p_min works; rounding up keeps `u` integral
            let delta = Rational::from_integer((spread / p_min).floor().to_integer() + 1);
            for (r, v) in u.iter_mut().enumerate() {
                if r as u32 > alpha {
                    *v -= &delta;
                }
            }
        }
        Ok((u, w))
    }
}

/// Shared setup: columns `R_{-i}`, rows `R_i`, rank table, relevant tasks.
struct Setup {
    cols: Vec<OppProfile>,
    rows: Vec<usize>,
    ctx: Ctx,
    tasks: Vec<Task>,
}

fn setup(space: &StrategySpace, i: PlayerId, s: usize, r: &Restriction) -> Result<Setup, WitnessError> {
    if !r.contains(i, s) {
        return Err(WitnessError::NotInRestriction(s));
    }
    let cols = space.opp_profiles(i, r);
    let rows = r.sets[i].clone();
    let m = RankMatrix::of_problem(space, i, &rows, &cols);
    let col_index: BTreeMap<&OppProfile, usize> = cols.iter().enumerate().map(|(k, y)| (y, k)).collect();
    let mut tasks = Vec::new();
    for h in space.allowed_info_sets(i, s) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        tasks.push(Task {
            h,
            xs: p
                .own
                .iter()
                .map(|x| rows.binary_search(x).expect("own side within R_i"))
                .collect(),
            ys: p.opp.iter().map(|y| col_index[y]).collect(),
        });
    }
    let target = rows.binary_search(&s).expect("member");
    Ok(Setup {
        cols,
        rows,
        ctx: Ctx {
            ranks: m.ranks,
            target,
            max_rank: space.game.max_rank(i),
        },
        tasks,
    })
}

fn utility_from_ranks(space: &StrategySpace, i: PlayerId, by_rank: &[Rational]) -> UtilityFunction {
    let g = space.game;
    UtilityFunction {
        owner: i,
        values: (0..g.outcome_labels().len())
            .map(|l| by_rank[g.label_rank(i, l) as usize].clone())
            .collect(),
    }
}

/// CPS from lexicographic levels with disjoint supports: each event takes the
/// first level it meets, conditioned on the event. Profiles not covered by
/// any level are appended as uniform levels (rest of the restriction first).
fn assemble_cps(space: &StrategySpace, i: PlayerId, r: &Restriction, mut levels: Vec<Measure>) -> Cps {
    let covered: BTreeSet<OppProfile> = levels.iter().flat_map(|l| l.keys().cloned()).collect();
    let inside: Vec<OppProfile> = space
        .opp_profiles(i, r)
        .into_iter()
        .filter(|y| !covered.contains(y))
        .collect();
    let inside_set: BTreeSet<&OppProfile> = inside.iter().collect();
    let outside: Vec<OppProfile> = space
        .opp_profiles(i, &Restriction::full(space))
        .into_iter()
        .filter(|y| !covered.contains(y) && !inside_set.contains(y))
        .collect();
    for rest in [inside, outside] {
        if !rest.is_empty() {
            let w = Rational::new(1.into(), (rest.len() as i64).into());
            levels.push(rest.into_iter().map(|y| (y, w.clone())).collect());
        }
    }
    let entries = conditioning_events(space, i)
        .into_iter()
        .map(|(info_sets, event)| {
            let ev: BTreeSet<&OppProfile> = event.iter().collect();
            let level = levels
                .iter()
                .find(|l| l.keys().any(|y| ev.contains(y)))
                .expect("levels cover every profile");
            let total = measure_mass(level, &ev);
            let measure = level
                .iter()
                .filter(|(y, w)| ev.contains(y) && w.is_positive())
                .map(|(y, w)| (y.clone(), w / &total))
                .collect();
            CpsEntry {
                info_sets,
                event,
                measure,
            }
        })
        .collect();
    Cps { owner: i, entries }
}

fn hypothesis_check(st: &Setup, space: &StrategySpace, i: PlayerId) -> Result<(), WitnessError> {
    for t in &st.tasks {
        for &x in &t.xs {
            if weakly_dom_on(&st.ctx.ranks[x], &st.ctx.ranks[st.ctx.target], &t.ys) {
                return Err(WitnessError::HypothesisViolated {
                    info_set: t.h,
                    detail: format!(
                        "{} weakly dominates the strategy on its conditional problem",
                        space.name(i, st.rows[x])
                    ),
                });
            }
        }
    }
    Ok(())
}

fn finish(
    space: &StrategySpace,
    i: PlayerId,
    s: usize,
    r: &Restriction,
    st: &Setup,
    y: &[usize],
    tasks: &[Task],
    level_cols: &[Vec<usize>],
    cautious: bool,
) -> Result<RationalityCertificate, WitnessError> {
    let (u, w) = st.ctx.build(y, tasks)?;
    let levels: Vec<Measure> = level_cols
        .iter()
        .map(|cols| {
            let total: Rational = cols.iter().map(|c| w[c].clone()).sum();
            cols.iter().map(|&c| (st.cols[c].clone(), &w[&c] / &total)).collect()
        })
        .collect();
    let cert = RationalityCertificate {
        player: i,
        strategy: s,
        restriction: r.clone(),
        utility: utility_from_ranks(space, i, &u),
        cps: assemble_cps(space, i, r, levels),
        cautious,
    };
    let v = verify_certificate(space, &cert);
    if !v.is_empty() {
        return Err(WitnessError::Internal(format!(
            "constructed certificate fails: {}",
            v.join("; ")
        )));
    }
    Ok(cert)
}

/// Cautious certificate (full-support beliefs on the restriction). Requires
/// that `s` is not weakly dominated on any nonempty conditional problem it
/// allows.
pub fn construct_witness(
    space: &StrategySpace,
    i: PlayerId,
    s: usize,
    r: &Restriction,
) -> Result<RationalityCertificate, WitnessError> {
    let st = setup(space, i, s, r)?;
    hypothesis_check(&st, space, i)?;
    let all: Vec<usize> = (0..st.cols.len()).collect();
    let tasks = st.tasks.clone();
    finish(space, i, s, r, &st, &all, &tasks, std::slice::from_ref(&all), true)
}

/// Certificate for a strategy that is not conditionally B-dominated.
///
/// Beliefs are organised in levels: the first level is the largest set of
/// opponent profiles on which the strategy is admissible at every relevant
/// information set it meets; information sets missed by it are served by
/// later levels built the same way from the remaining profiles.
pub fn construct_sequential_witness(
    space: &StrategySpace,
    i: PlayerId,
    s: usize,
    r: &Restriction,
) -> Result<RationalityCertificate, WitnessError> {
    let st = setup(space, i, s, r)?;
    let ranks = &st.ctx.ranks;
    let target = st.ctx.target;
    let mut remaining: BTreeSet<usize> = (0..st.cols.len()).collect();
    let mut untouched: Vec<Task> = st.tasks.clone();
    let mut served: Vec<Task> = Vec::new();
    let mut level_cols: Vec<Vec<usize>> = Vec::new();
    while !untouched.is_empty() {
        let mut p = remaining.clone();
        'shrink: loop {
            for t in &untouched {
                let on: Vec<usize> = t.ys.iter().copied().filter(|c| p.contains(c)).collect();
                if on.is_empty() {
                    continue;
                }
                if let Some(&x) = t.xs.iter().find(|&&x| weakly_dom_on(&ranks[x], &ranks[target], &on)) {
                    for c in on {
                        if ranks[x][c] < ranks[target][c] {
                            p.remove(&c);
                        }
                    }
                    continue 'shrink;
                }
            }
            break;
        }
        let (hit, miss): (Vec<Task>, Vec<Task>) =
            untouched.into_iter().partition(|t| t.ys.iter().any(|c| p.contains(c)));
        if hit.is_empty() {
            let t = &miss[0];
            return Err(WitnessError::HypothesisViolated {
                info_set: t.h,
                detail: "every belief consistent with the restriction is answered by a weak dominator".into(),
            });
        }
        for t in hit {
            served.push(Task {
                ys: t.ys.iter().copied().filter(|c| p.contains(c)).collect(),
                ..t
            });
        }
        for c in &p {
            remaining.remove(c);
        }
        level_cols.push(p.into_iter().collect());
        untouched = miss;
    }
    let y: Vec<usize> = level_cols
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    finish(space, i, s, r, &st, &y, &served, &level_cols, false)
}

/// Strategies of `i` sequentially rational given `R`, computed as the
/// strategies not conditionally B-dominated, each with a certificate.
#[derive(Debug, Clone)]
pub struct RationalitySet {
    pub members: Vec<usize>,
    pub certificates: BTreeMap<usize, RationalityCertificate>,
    /// Members for which the level construction got stuck (possible only
    /// for restrictions other than the full strategy space).
    pub failures: Vec<(usize, WitnessError)>,
}

pub fn not_conditionally_b_dominated(space: &StrategySpace, i: PlayerId, r: &Restriction) -> Vec<usize> {
    let g = space.game;
    let mut dead = BTreeSet::new();
    for &h in g.own_info_sets(i) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let m = RankMatrix::of_problem(space, i, &p.own, &p.opp);
        for row in 0..m.rows.len() {
            if bd_chain(&m, row).is_some() {
                dead.insert(m.rows[row]);
            }
        }
    }
    r.sets[i].iter().copied().filter(|s| !dead.contains(s)).collect()
}

pub fn rationality_set(space: &StrategySpace, i: PlayerId, r: &Restriction) -> RationalitySet {
    let members = not_conditionally_b_dominated(space, i, r);
    let mut certificates = BTreeMap::new();
    let mut failures = Vec::new();
    for &s in &members {
        match construct_sequential_witness(space, i, s, r) {
            Ok(c) => {
                certificates.insert(s, c);
            }
            Err(e) => failures.push((s, e)),
        }
    }
    RationalitySet {
        members,
        certificates,
        failures,
    }
}

/// Find `u_i` originating from the preference with `U_i(R) ⊆ M_i(R)[u_i]`.
///
/// Candidates, in order: the canonical utility, each survivor's certificate
/// utility, their sum, and the families `k^(max−rank)` and `−k^rank` for
/// `k = 2..=6`. Each candidate is checked by computing `M_i(R)[u]`.
pub fn utility_witness_for_operator(
    space: &StrategySpace,
    i: PlayerId,
    r: &Restriction,
) -> Result<UtilityFunction, WitnessError> {
    let g = space.game;
    let survivors = not_conditionally_b_dominated(space, i, r);
    let max = g.max_rank(i);
    let mut candidates = vec![canonical_utility(g, i)];
    let mut sum: Option<Vec<Rational>> = None;
    for &s in &survivors {
        if let Ok(c) = construct_sequential_witness(space, i, s, r) {
            sum = Some(match sum {
                None => c.utility.values.clone(),
                Some(acc) => acc.iter().zip(&c.utility.values).map(|(a, b)| a + b).collect(),
            });
            candidates.push(c.utility);
        }
    }
    if let Some(values) = sum {
        candidates.push(UtilityFunction { owner: i, values });
    }
    for k in 2..=6i64 {
        let pow = |e: u32| int(k.pow(e));
        let up: Vec<Rational> = (0..=max).map(|r| pow(max - r)).collect();
        let down: Vec<Rational> = (0..=max).map(|r| -pow(r)).collect();
        candidates.push(utility_from_ranks(space, i, &up));
        candidates.push(utility_from_ranks(space, i, &down));
    }
    for u in candidates {
        if !u.originates_from(g) {
            continue;
        }
        let (keep, _) = m_operator_player(space, i, r, &u)?;
        if survivors.iter().all(|s| keep.binary_search(s).is_ok()) {
            return Ok(u);
        }
    }
    Err(WitnessError::WitnessSearchExhausted(format!(
        "player {} at a restriction with {} survivors",
        g.players()[i],
        survivors.len()
    )))
}

/// Per information set: rank of each own strategy in `R_i(h)` (lower = preferred).
pub type ConditionalRanking = BTreeMap<InfoSetId, BTreeMap<usize, u32>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub weak_ok: bool,
    pub strong_ok: bool,
    pub violations: Vec<String>,
}

/// Check both monotonicity conditions at every nonempty conditional problem.
/// Pointwise comparisons range over `R_{-i}(h)`, or over `events[h]` when given.
pub fn check_conditional_monotonicity(
    space: &StrategySpace,
    i: PlayerId,
    r: &Restriction,
    rankings: &ConditionalRanking,
    events: Option<&BTreeMap<InfoSetId, Vec<OppProfile>>>,
) -> Result<MonotonicityReport, WitnessError> {
    let g = space.game;
    let mut rep = MonotonicityReport {
        weak_ok: true,
        strong_ok: true,
        violations: Vec::new(),
    };
    for &h in g.own_info_sets(i) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let name = &g.info_set(h).name;
        let rk = rankings
            .get(&h)
            .ok_or_else(|| WitnessError::DomainMismatch(format!("no ranking at `{name}`")))?;
        if rk.keys().copied().collect::<Vec<_>>() != p.own {
            return Err(WitnessError::DomainMismatch(format!(
                "ranking at `{name}` does not cover R_i(h) exactly"
            )));
        }
        let opp = events.and_then(|e| e.get(&h)).unwrap_or(&p.opp);
        let m = RankMatrix::of_problem(space, i, &p.own, opp);
        let all: Vec<usize> = (0..opp.len()).collect();
        for a in 0..p.own.len() {
            for b in 0..p.own.len() {
                if a == b {
                    continue;
                }
                let (sa, sb) = (p.own[a], p.own[b]);
                let pointwise = all.iter().all(|&c| m.ranks[a][c] <= m.ranks[b][c]);
                if pointwise && rk[&sa] > rk[&sb] {
                    rep.weak_ok = false;
                    rep.violations.push(format!(
                        "weak: at `{name}`, {} is pointwise as good as {} but ranked lower",
                        space.name(i, sa),
                        space.name(i, sb)
                    ));
                }
                if weakly_dom_on(&m.ranks[a], &m.ranks[b], &all) && rk[&sa] >= rk[&sb] {
                    rep.strong_ok = false;
                    rep.violations.push(format!(
                        "strong: at `{name}`, {} weakly dominates {} but is not ranked strictly higher",
                        space.name(i, sa),
                        space.name(i, sb)
                    ));
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    Cm,
    Cseu,
}

#[derive(Debug, Clone)]
pub struct PairResult {
    pub rationalized: bool,
    pub certificate: Option<RationalityCertificate>,
}

/// Expected-utility rankings induced by a certificate at every nonempty
/// conditional problem, with the belief supports used.
pub fn rankings_from_certificate(
    space: &StrategySpace,
    cert: &RationalityCertificate,
) -> (ConditionalRanking, BTreeMap<InfoSetId, Vec<OppProfile>>) {
    let g = space.game;
    let i = cert.player;
    let mut rankings = BTreeMap::new();
    let mut supports = BTreeMap::new();
    for &h in g.own_info_sets(i) {
        let p = space.reaching_sets(h, &cert.restriction);
        if !p.is_nonempty() {
            continue;
        }
        let m = cert.cps.measure(h).expect("certificate covers every event");
        let eu: Vec<(usize, Rational)> = p
            .own
            .iter()
            .map(|&x| {
                let v: Rational = m
                    .iter()
                    .map(|(y, w)| cert.utility.at(g, space.outcome_vs(i, x, y)) * w)
                    .sum();
                (x, v)
            })
            .collect();
        let mut levels: Vec<&Rational> = eu.iter().map(|(_, v)| v).collect();
        levels.sort_by(|a, b| b.cmp(a));
        levels.dedup();
        let rank: BTreeMap<usize, u32> = eu
            .iter()
            .map(|(x, v)| (*x, levels.iter().position(|l| *l == v).expect("present") as u32))
            .collect();
        rankings.insert(h, rank);
        supports.insert(
            h,
            m.iter()
                .filter(|(_, w)| w.is_positive())
                .map(|(y, _)| y.clone())
                .collect(),
        );
    }
    (rankings, supports)
}

/// Is `⟨s, R⟩` rationalized, either by conditionally monotone preferences
/// over own strategies or by conditional subjective expected utility?
pub fn rationalize_preference_pair(
    space: &StrategySpace,
    i: PlayerId,
    s: usize,
    r: &Restriction,
    mode: PairMode,
) -> Result<PairResult, WitnessError> {
    let cert = match construct_sequential_witness(space, i, s, r) {
        Ok(c) => c,
        Err(WitnessError::HypothesisViolated { .. }) => {
            return Ok(PairResult {
                rationalized: false,
                certificate: None,
            })
        }
        Err(e) => return Err(e),
    };
    match mode {
        PairMode::Cseu => Ok(PairResult {
            rationalized: verify_certificate(space, &cert).is_empty(),
            certificate: Some(cert),
        }),
        PairMode::Cm => {
            let (rankings, supports) = rankings_from_certificate(space, &cert);
            let rep = check_conditional_monotonicity(space, i, r, &rankings, Some(&supports))?;
            let top = space
                .allowed_info_sets(i, s)
                .iter()
                .filter_map(|h| rankings.get(h))
                .all(|rk| rk[&s] == 0);
            Ok(PairResult {
                rationalized: rep.weak_ok && rep.strong_ok && top,
                certificate: None,
            })
        }
    }
}
