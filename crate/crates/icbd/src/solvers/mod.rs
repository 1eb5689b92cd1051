//! Fixpoint algorithms over explicit reduced strategy spaces, plus
//! backward induction and the genericity conditions it relies on.

pub mod bi;
pub mod conditions;
pub mod perfect_info;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cardinal::{m_operator, CardinalError, MixedStrategy, UtilityFunction};
use crate::dominance::{
    admissible_rows, bd_chain, bd_rows, weakly_dom_on, BDominanceCertificate, DominanceError, DominanceKind,
    DominanceWitness, RankMatrix, Scope,
};
use crate::game::{HistoryId, InfoSetId, PlayerId};
use crate::rational::Rational;
use crate::strategies::{OppProfile, Restriction, StrategyError, StrategySpace};
use crate::witness::{construct_sequential_witness, RationalityCertificate, WitnessError};

pub use bi::{backward_induction, BiResult};
pub use conditions::{check_nrt, check_tdi, check_tdi_structural, NrtViolation, TdiViolation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("the game does not have perfect information")]
    NotPerfectInformation,
    #[error("restriction is invalid (some player has no strategy)")]
    InvalidRestriction,
    #[error("surviving strategies no longer factor across nodes: {0}")]
    NonRectangular(String),
    #[error("solver invariant broken: {0}")]
    Invariant(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Dominance(#[from] DominanceError),
    #[error(transparent)]
    Cardinal(#[from] CardinalError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Why a strategy was removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// Conditionally B-dominated at the certificate's information set.
    BDominance(BDominanceCertificate),
    /// Weakly (or strictly) dominated on the whole restriction.
    Pairwise(DominanceWitness),
    /// Strictly dominated by a mixture at an information set (cardinal utilities).
    Mixed {
        info_set: InfoSetId,
        dominator: MixedStrategy,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub player: PlayerId,
    pub strategy: usize,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    pub eliminated: Vec<Elimination>,
    pub surviving: Restriction,
}

/// Snapshots of every effective round, starting from `initial`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationTrace {
    pub initial: Restriction,
    pub iterations: Vec<Iteration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub fixpoint: Restriction,
    pub outcomes: BTreeSet<HistoryId>,
    pub trace: EliminationTrace,
    /// Number of rounds that removed something.
    pub iterations_to_fixpoint: usize,
}

impl EliminationTrace {
    /// Snapshot after `k` rounds (0 = initial).
    pub fn snapshot(&self, k: usize) -> &Restriction {
        if k == 0 {
            &self.initial
        } else {
            &self.iterations[k - 1].surviving
        }
    }

    /// Re-derive every elimination from the snapshot before it. Mixed
    /// reasons need the utility profile they were computed with.
    pub fn replay(&self, space: &StrategySpace, utilities: Option<&[UtilityFunction]>) -> Vec<String> {
        let mut errs = Vec::new();
        for (k, it) in self.iterations.iter().enumerate() {
            let prev = self.snapshot(k);
            if !it.surviving.is_subset(prev) || it.surviving == *prev {
                errs.push(format!("round {}: snapshot does not strictly shrink", k + 1));
            }
            let removed: BTreeSet<(usize, usize)> = it.eliminated.iter().map(|e| (e.player, e.strategy)).collect();
            for (i, set) in prev.sets.iter().enumerate() {
                for &s in set {
                    if removed.contains(&(i, s)) == it.surviving.contains(i, s) {
                        errs.push(format!("round {}: player {i} strategy {s} bookkeeping mismatch", k + 1));
                    }
                }
            }
            for e in &it.eliminated {
                if !replay_reason(space, prev, e, utilities) {
                    errs.push(format!(
                        "round {}: reason for removing {} does not replay",
                        k + 1,
                        space.name(e.player, e.strategy)
                    ));
                }
            }
        }
        errs
    }
}

fn replay_reason(
    space: &StrategySpace,
    prev: &Restriction,
    e: &Elimination,
    utilities: Option<&[UtilityFunction]>,
) -> bool {
    if !prev.contains(e.player, e.strategy) {
        return false;
    }
    match &e.reason {
        Reason::BDominance(cert) => {
            let Some(h) = cert.info_set else { return false };
            cert.player == e.player
                && cert.strategy == e.strategy
                && space.reaches(e.player, e.strategy, h)
                && space.opp_reaching(e.player, h, prev) == cert.opp_profiles
                && cert.chain.iter().all(|st| prev.contains(e.player, st.dominator))
                && cert.verify(space)
        }
        Reason::Pairwise(w) => {
            w.player == e.player
                && w.dominated == e.strategy
                && prev.contains(e.player, w.dominator)
                && w.opp_profiles == space.opp_profiles(e.player, prev)
                && w.verify(space)
        }
        Reason::Mixed { info_set, dominator } => {
            let Some(u) = utilities else { return false };
            let p = space.reaching_sets(*info_set, prev);
            if !p.is_nonempty() || !p.own.contains(&e.strategy) || !dominator.is_valid() {
                return false;
            }
            if dominator.weights.keys().any(|s| !p.own.contains(s)) {
                return false;
            }
            let g = space.game;
            p.opp.iter().all(|y| {
                let mix: Rational = dominator
                    .weights
                    .iter()
                    .map(|(s, w)| w * u[e.player].at(g, space.outcome_vs(e.player, *s, y)))
                    .sum();
                mix > *u[e.player].at(g, space.outcome_vs(e.player, e.strategy, y))
            })
        }
    }
}

/// Iterate a maximal operator (given as a function producing the round's
/// eliminations) until nothing is removed.
fn iterate(
    space: &StrategySpace,
    r0: &Restriction,
    mut round: impl FnMut(&Restriction) -> Result<Vec<Elimination>, SolverError>,
) -> Result<SolveResult, SolverError> {
    if !r0.is_valid() || r0.sets.len() != space.num_players() {
        return Err(SolverError::InvalidRestriction);
    }
    let mut cur = r0.clone();
    let mut iterations = Vec::new();
    loop {
        let eliminated = round(&cur)?;
        if eliminated.is_empty() {
            break;
        }
        let dead: BTreeSet<(usize, usize)> = eliminated.iter().map(|e| (e.player, e.strategy)).collect();
        let next = Restriction::new(
            cur.sets
                .iter()
                .enumerate()
                .map(|(i, set)| set.iter().copied().filter(|&s| !dead.contains(&(i, s))).collect())
                .collect(),
        );
        if !next.is_valid() {
            return Err(SolverError::Invariant(
                "a round removed every strategy of some player".into(),
            ));
        }
        iterations.push(Iteration {
            eliminated,
            surviving: next.clone(),
        });
        cur = next;
    }
    let k = iterations.len();
    Ok(SolveResult {
        outcomes: space.outcomes_of(&cur),
        fixpoint: cur,
        trace: EliminationTrace {
            initial: r0.clone(),
            iterations,
        },
        iterations_to_fixpoint: k,
    })
}

/// One round of the conditional B-dominance operator: every strategy
/// B-dominated at some allowed nonempty conditional problem, with the
/// certificate at the lowest such information set.
pub fn u_round(space: &StrategySpace, r: &Restriction) -> Vec<Elimination> {
    let g = space.game;
    let mut out = Vec::new();
    for i in 0..space.num_players() {
        let mut seen: BTreeMap<usize, Elimination> = BTreeMap::new();
        for &h in g.own_info_sets(i) {
            let p = space.reaching_sets(h, r);
            if !p.is_nonempty() {
                continue;
            }
            let m = RankMatrix::of_problem(space, i, &p.own, &p.opp);
            for (row, chain) in bd_rows(&m) {
                let s = m.rows[row];
                seen.entry(s).or_insert_with(|| Elimination {
                    player: i,
                    strategy: s,
                    reason: Reason::BDominance(certificate(i, s, h, &m, &p.opp, chain)),
                });
            }
        }
        out.extend(seen.into_values());
    }
    out
}

fn certificate(
    i: PlayerId,
    s: usize,
    h: InfoSetId,
    m: &RankMatrix,
    opp: &[OppProfile],
    chain: Vec<crate::dominance::ChainStep>,
) -> BDominanceCertificate {
    BDominanceCertificate {
        player: i,
        strategy: s,
        info_set: Some(h),
        opp_profiles: opp.to_vec(),
        chain: chain
            .into_iter()
            .map(|st| crate::dominance::ChainStep {
                cols: st.cols,
                dominator: m.rows[st.dominator],
            })
            .collect(),
    }
}

/// `U(R)` as a restriction.
pub fn u_operator(space: &StrategySpace, r: &Restriction) -> Restriction {
    let dead: BTreeSet<(usize, usize)> = u_round(space, r).iter().map(|e| (e.player, e.strategy)).collect();
    Restriction::new(
        r.sets
            .iter()
            .enumerate()
            .map(|(i, set)| set.iter().copied().filter(|&s| !dead.contains(&(i, s))).collect())
            .collect(),
    )
}

/// Iterated conditional B-dominance from `r0`.
pub fn icbd(space: &StrategySpace, r0: &Restriction) -> Result<SolveResult, SolverError> {
    iterate(space, r0, |r| Ok(u_round(space, r)))
}

/// Ordinal strong rationalizability: the ICBD path, with a sequential
/// rationality certificate for every survivor of every round (given the
/// snapshot it survived), and for the fixpoint given itself.
#[derive(Debug, Clone)]
pub struct OsrResult {
    pub solve: SolveResult,
    /// `certificates[k]`: survivors of round `k + 1` certified against snapshot `k`;
    /// the last entry certifies the fixpoint against itself.
    pub certificates: Vec<BTreeMap<(PlayerId, usize), RationalityCertificate>>,
}

pub fn osr(space: &StrategySpace, r0: &Restriction) -> Result<OsrResult, SolverError> {
    let solve = icbd(space, r0)?;
    let mut certificates = Vec::new();
    let k = solve.iterations_to_fixpoint;
    for step in 0..=k {
        let given = solve.trace.snapshot(step);
        let survivors = if step < k {
            solve.trace.snapshot(step + 1)
        } else {
            given
        };
        let mut level = BTreeMap::new();
        for (i, set) in survivors.sets.iter().enumerate() {
            for &s in set {
                level.insert((i, s), construct_sequential_witness(space, i, s, given)?);
            }
        }
        certificates.push(level);
    }
    Ok(OsrResult { solve, certificates })
}

/// Iterated conditional dominance by mixtures under cardinal utilities.
pub fn icd(space: &StrategySpace, u: &[UtilityFunction], r0: &Restriction) -> Result<SolveResult, SolverError> {
    let g = space.game;
    if u.len() != space.num_players() || u.iter().any(|ui| !ui.originates_from(g)) {
        return Err(SolverError::Cardinal(CardinalError::InvalidCps(
            "utilities must represent every player's preference".into(),
        )));
    }
    iterate(space, r0, |r| {
        let (_, why) = m_operator(space, r, u)?;
        Ok(why
            .into_iter()
            .map(|e| Elimination {
                player: e.player,
                strategy: e.strategy,
                reason: Reason::Mixed {
                    info_set: e.info_set,
                    dominator: e.dominator,
                },
            })
            .collect())
    })
}

/// Weakly dominated strategies on the whole restriction, each with its
/// lowest-index dominator.
fn weakly_dominated(space: &StrategySpace, r: &Restriction) -> Vec<Elimination> {
    let mut out = Vec::new();
    for i in 0..space.num_players() {
        let opp = space.opp_profiles(i, r);
        let m = RankMatrix::of_problem(space, i, &r.sets[i], &opp);
        let cols: Vec<usize> = (0..opp.len()).collect();
        let ok: BTreeSet<usize> = admissible_rows(&m, &cols).into_iter().collect();
        for row in 0..m.rows.len() {
            if ok.contains(&row) {
                continue;
            }
            let d = (0..m.rows.len())
                .find(|&d| weakly_dom_on(&m.ranks[d], &m.ranks[row], &cols))
                .expect("inadmissible row has a dominator");
            let strict = cols.iter().all(|&c| m.ranks[d][c] < m.ranks[row][c]);
            out.push(Elimination {
                player: i,
                strategy: m.rows[row],
                reason: Reason::Pairwise(DominanceWitness {
                    player: i,
                    dominated: m.rows[row],
                    dominator: m.rows[d],
                    kind: if strict {
                        DominanceKind::Strict
                    } else {
                        DominanceKind::Weak
                    },
                    scope: Scope::WholeGame,
                    opp_profiles: opp.clone(),
                }),
            });
        }
    }
    out
}

/// Iterated admissibility on the reduced strategic form (maximal removal).
pub fn iterated_admissibility(space: &StrategySpace) -> Result<SolveResult, SolverError> {
    iterate(space, &Restriction::full(space), |r| Ok(weakly_dominated(space, r)))
}

/// Which weakly dominated strategy a one-at-a-time reduction removes next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Lowest (player, strategy) first.
    Deterministic,
    /// Uniformly at random from a seeded stream.
    Seeded(u64),
}

/// A full reduction by weak dominance removing one strategy per step.
pub fn full_reduction_weak_dominance(space: &StrategySpace, policy: OrderPolicy) -> Result<SolveResult, SolverError> {
    let mut rng = match policy {
        OrderPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        OrderPolicy::Deterministic => None,
    };
    iterate(space, &Restriction::full(space), |r| {
        let mut cands = weakly_dominated(space, r);
        if cands.is_empty() {
            return Ok(cands);
        }
        let pick = match rng.as_mut() {
            Some(rng) => *(0..cands.len()).collect::<Vec<_>>().choose(rng).expect("nonempty"),
            None => 0,
        };
        Ok(vec![cands.swap_remove(pick)])
    })
}

/// Result of the information-set-local variant: first round removes a
/// strategy only from the conditional problems where it is dominated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalVariantResult {
    pub fixpoint: Restriction,
    pub outcomes: BTreeSet<HistoryId>,
    /// Strategies removed in the first round, per information set.
    pub local_removals: BTreeMap<InfoSetId, Vec<usize>>,
    /// Strategies removed globally in each later round.
    pub global_rounds: Vec<Vec<(PlayerId, usize)>>,
}

/// The variant operator that, in its first round, deletes each dominated
/// strategy only at the information set where it is dominated (and so keeps
/// it visible at other histories), then proceeds like the ICBD operator.
///
/// Player `j`'s view of player `k` at history `x` is `k`'s global survivors
/// minus the first-round removals at `k`'s own information set through `x`.
pub fn local_first_round_variant(space: &StrategySpace) -> Result<LocalVariantResult, SolverError> {
    let g = space.game;
    let n = space.num_players();
    let full = Restriction::full(space);
    let mut local: BTreeMap<InfoSetId, BTreeSet<usize>> = BTreeMap::new();
    for e in u_round_all(space, &full) {
        local.entry(e.0).or_default().insert(e.2);
    }
    let mut global: Vec<BTreeSet<usize>> = full.sets.iter().map(|s| s.iter().copied().collect()).collect();
    let view = |global: &Vec<BTreeSet<usize>>, k: PlayerId, x: HistoryId| -> Vec<usize> {
        let gone = g.mover_set(x, k).and_then(|h| local.get(&h));
        global[k]
            .iter()
            .copied()
            .filter(|s| gone.is_none_or(|d| !d.contains(s)))
            .filter(|&s| space.consistent(x, k, s))
            .collect()
    };
    let mut global_rounds = Vec::new();
    loop {
        let mut dead = Vec::new();
        for i in 0..n {
            let mut hit = BTreeSet::new();
            for &h in g.own_info_sets(i) {
                let x0 = g.info_set(h).members[0];
                let own = view(&global, i, x0);
                let mut opp: BTreeSet<OppProfile> = BTreeSet::new();
                for &x in &g.info_set(h).members {
                    let factors: Vec<Vec<usize>> = (0..n).filter(|&j| j != i).map(|j| view(&global, j, x)).collect();
                    opp.extend(crate::strategies::product(&factors));
                }
                if own.is_empty() || opp.is_empty() {
                    continue;
                }
                let opp: Vec<OppProfile> = opp.into_iter().collect();
                let m = RankMatrix::of_problem(space, i, &own, &opp);
                for row in 0..m.rows.len() {
                    if bd_chain(&m, row).is_some() {
                        hit.insert(m.rows[row]);
                    }
                }
            }
            dead.extend(hit.into_iter().map(|s| (i, s)));
        }
        if dead.is_empty() {
            break;
        }
        for &(i, s) in &dead {
            global[i].remove(&s);
        }
        global_rounds.push(dead);
    }
    let fixpoint = Restriction::new(
        (0..n)
            .map(|i| {
                global[i]
                    .iter()
                    .copied()
                    .filter(|s| {
                        g.own_info_sets(i)
                            .iter()
                            .all(|h| local.get(h).is_none_or(|d| !d.contains(s)))
                    })
                    .collect()
            })
            .collect(),
    );
    if !fixpoint.is_valid() {
        return Err(SolverError::Invariant(
            "local variant emptied a player's strategy set".into(),
        ));
    }
    Ok(LocalVariantResult {
        outcomes: space.outcomes_of(&fixpoint),
        fixpoint,
        local_removals: local.into_iter().map(|(h, s)| (h, s.into_iter().collect())).collect(),
        global_rounds,
    })
}

/// Every (information set, player, strategy) triple with the strategy
/// B-dominated on that conditional problem.
fn u_round_all(space: &StrategySpace, r: &Restriction) -> Vec<(InfoSetId, PlayerId, usize)> {
    let g = space.game;
    let mut out = Vec::new();
    for h in 0..g.info_sets().len() {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let m = RankMatrix::of_problem(space, p.owner, &p.own, &p.opp);
        for (row, _) in bd_rows(&m) {
            out.push((h, p.owner, m.rows[row]));
        }
    }
    out
}

/// Admissible strategies of every player relative to `r` (the weak-dominance
/// analogue of one operator round).
pub fn a_operator(space: &StrategySpace, r: &Restriction) -> Restriction {
    let dead: BTreeSet<(usize, usize)> = weakly_dominated(space, r)
        .iter()
        .map(|e| (e.player, e.strategy))
        .collect();
    Restriction::new(
        r.sets
            .iter()
            .enumerate()
            .map(|(i, set)| set.iter().copied().filter(|&s| !dead.contains(&(i, s))).collect())
            .collect(),
    )
}

/// Labels of a set of terminal histories.
pub fn outcome_labels(space: &StrategySpace, outcomes: &BTreeSet<HistoryId>) -> BTreeSet<String> {
    outcomes.iter().map(|&z| space.game.label(z).to_string()).collect()
}

/// Strategy names of a restriction, per player.
pub fn restriction_names(space: &StrategySpace, r: &Restriction) -> Vec<Vec<String>> {
    r.sets
        .iter()
        .enumerate()
        .map(|(i, set)| set.iter().map(|&s| space.name(i, s)).collect())
        .collect()
}

/// Is every weight of the mixture positive (used for trace hygiene)?
pub fn mixture_support(m: &MixedStrategy) -> Vec<usize> {
    m.weights
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(s, _)| *s)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::{canonical_profile, profile_from_values, r_operator};
    use crate::fixtures;
    use crate::witness::verify_certificate;

    fn names_of(space: &StrategySpace, r: &Restriction) -> Vec<Vec<String>> {
        restriction_names(space, r)
    }

    #[test]
    fn bos_trace() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
        assert_eq!(names_of(&sp, &res.fixpoint), vec![vec!["IT"], vec!["L"]]);
        assert_eq!(res.iterations_to_fixpoint, 3);
        let order: Vec<Vec<String>> = res
            .trace
            .iterations
            .iter()
            .map(|it| it.eliminated.iter().map(|e| sp.name(e.player, e.strategy)).collect())
            .collect();
        assert_eq!(order, vec![vec!["ID"], vec!["R"], vec!["O"]]);
        assert!(res.trace.replay(&sp, None).is_empty());
        assert_eq!(
            outcome_labels(&sp, &res.outcomes).into_iter().collect::<Vec<_>>(),
            vec!["z2"]
        );
    }

    #[test]
    fn centipede_and_order_dependence() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
        assert_eq!(names_of(&sp, &res.fixpoint), vec![vec!["A"], vec!["DG"]]);
        let g = fixtures::order_dependence();
        let sp = StrategySpace::new(&g);
        let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
        assert_eq!(names_of(&sp, &res.fixpoint), vec![vec!["O"], vec!["C"]]);
        let l = local_first_round_variant(&sp).unwrap();
        assert_eq!(names_of(&sp, &l.fixpoint), vec![vec!["O"], vec!["L"]]);
    }

    #[test]
    fn fixpoint_is_idempotent_and_nested() {
        for g in [
            fixtures::bos_outside(),
            fixtures::centipede(),
            fixtures::order_dependence(),
            fixtures::outside_tmd(),
        ] {
            let sp = StrategySpace::new(&g);
            let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
            assert_eq!(u_operator(&sp, &res.fixpoint), res.fixpoint);
            for k in 0..res.iterations_to_fixpoint {
                assert!(res.trace.snapshot(k + 1).is_subset(res.trace.snapshot(k)));
                assert!(res.trace.snapshot(k + 1).is_valid());
            }
        }
    }

    #[test]
    fn non_monotonicity_regression() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let o = sp.find(0, "O").unwrap();
        let full = Restriction::full(&sp);
        let q = Restriction::new(vec![
            full.sets[0].iter().copied().filter(|&s| s != o).collect(),
            full.sets[1].clone(),
        ]);
        let uq = u_operator(&sp, &q);
        let ur = u_operator(&sp, &full);
        assert_eq!(uq, q);
        assert!(!uq.is_subset(&ur));
    }

    #[test]
    fn osr_certificates_verify() {
        for g in [
            fixtures::bos_outside(),
            fixtures::centipede(),
            fixtures::order_dependence(),
        ] {
            let sp = StrategySpace::new(&g);
            let res = osr(&sp, &Restriction::full(&sp)).unwrap();
            for level in &res.certificates {
                for c in level.values() {
                    assert!(verify_certificate(&sp, c).is_empty());
                }
            }
        }
    }

    #[test]
    fn cardinal_refinement() {
        let g = fixtures::outside_tmd();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let u = profile_from_values(fixtures::outside_tmd_utilities(&g));
        let m = icd(&sp, &u, &full).unwrap();
        assert_eq!(names_of(&sp, &m.fixpoint), vec![vec!["IT"], vec!["L"]]);
        assert!(m.trace.replay(&sp, Some(&u)).is_empty());
        let b = icbd(&sp, &full).unwrap();
        let o = sp.find(0, "O").unwrap();
        assert_eq!(
            b.fixpoint.sets[0],
            full.sets[0].iter().copied().filter(|&s| s != o).collect::<Vec<_>>()
        );
        assert_eq!(b.fixpoint.sets[1], full.sets[1]);
        // per-round containment and the best-reply surrogate
        let mut r = full.clone();
        loop {
            let (mr, _) = m_operator(&sp, &r, &u).unwrap();
            assert!(mr.is_subset(&u_operator(&sp, &r)));
            assert_eq!(mr, r_operator(&sp, &r, &u).unwrap());
            if mr == r {
                break;
            }
            r = mr;
        }
    }

    #[test]
    fn iterated_admissibility_centipede() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let res = iterated_admissibility(&sp).unwrap();
        assert_eq!(names_of(&sp, &res.fixpoint), vec![vec!["A"], vec!["DG"]]);
        assert!(res.trace.replay(&sp, None).is_empty());
        for seed in 0..10 {
            let red = full_reduction_weak_dominance(&sp, OrderPolicy::Seeded(seed)).unwrap();
            assert_eq!(outcome_labels(&sp, &red.outcomes), outcome_labels(&sp, &res.outcomes));
            assert!(a_operator(&sp, &red.fixpoint) == red.fixpoint);
        }
    }

    #[test]
    fn single_strategy_game() {
        use crate::game::{tiers, validate_game, Tree};
        let raw = Tree::choice("p", "h", &["a"], vec![Tree::leaf("x")]).into_raw(&["p"], vec![tiers("x")]);
        let g = validate_game(&raw).unwrap();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        assert_eq!(icbd(&sp, &full).unwrap().fixpoint, full);
        assert_eq!(osr(&sp, &full).unwrap().solve.fixpoint, full);
        assert_eq!(iterated_admissibility(&sp).unwrap().fixpoint, full);
        let u = canonical_profile(&g);
        assert_eq!(icd(&sp, &u, &full).unwrap().fixpoint, full);
    }
}
