//! Genericity conditions: no relevant ties and transference of
//! decision-maker indifference.

use crate::game::{classify_game, last_common_predecessor, Game, HistoryId, PlayerId};
use crate::strategies::{full_profile, OppProfile, Restriction, StrategySpace};

use super::SolverError;

/// Two terminals the mover at their last common predecessor is indifferent between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrtViolation {
    pub z: HistoryId,
    pub z2: HistoryId,
    pub player: PlayerId,
}

/// A unilateral deviation by `deviator` that leaves them indifferent but
/// changes the outcome class of `other`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdiViolation {
    pub deviator: PlayerId,
    pub s: usize,
    pub s2: usize,
    pub opp: OppProfile,
    pub other: PlayerId,
}

/// Terminal-level form of a TDI violation in a perfect-information game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdiPairViolation {
    pub z: HistoryId,
    pub z2: HistoryId,
    pub deviator: PlayerId,
    pub other: PlayerId,
}

fn mover_at(g: &Game, x: HistoryId) -> PlayerId {
    g.info_set(g.history(x).movers[0]).owner
}

/// Pairs of distinct terminals with their last common predecessor's mover.
fn terminal_pairs(g: &Game) -> impl Iterator<Item = (HistoryId, HistoryId, PlayerId)> + '_ {
    let ts = g.terminals();
    ts.iter().enumerate().flat_map(move |(k, &z)| {
        ts[k + 1..].iter().map(move |&z2| {
            let x = last_common_predecessor(g, z, z2).expect("distinct terminals");
            (z, z2, mover_at(g, x))
        })
    })
}

/// First violation of the no-relevant-ties condition, if any.
pub fn check_nrt(g: &Game) -> Result<Option<NrtViolation>, SolverError> {
    if !classify_game(g).perfect_information {
        return Err(SolverError::NotPerfectInformation);
    }
    Ok(terminal_pairs(g)
        .find(|&(z, z2, i)| g.rank(i, z) == g.rank(i, z2))
        .map(|(z, z2, player)| NrtViolation { z, z2, player }))
}

/// TDI on the reduced strategic form, by exhaustive comparison.
pub fn check_tdi(space: &StrategySpace) -> Option<TdiViolation> {
    let g = space.game;
    let n = space.num_players();
    let full = Restriction::full(space);
    for i in 0..n {
        for opp in space.opp_profiles(i, &full) {
            let outs: Vec<HistoryId> = (0..space.strategies[i].len())
                .map(|s| space.outcome_vs(i, s, &opp))
                .collect();
            for s in 0..outs.len() {
                for s2 in s + 1..outs.len() {
                    let (z, z2) = (outs[s], outs[s2]);
                    if g.rank(i, z) != g.rank(i, z2) {
                        continue;
                    }
                    if let Some(j) = (0..n).find(|&j| g.rank(j, z) != g.rank(j, z2)) {
                        debug_assert_eq!(space.outcome(&full_profile(i, s, &opp)).ok(), Some(z));
                        return Some(TdiViolation {
                            deviator: i,
                            s,
                            s2,
                            opp,
                            other: j,
                        });
                    }
                }
            }
        }
    }
    None
}

/// TDI for perfect-information games without building the strategic form.
///
/// With one mover per node, two profiles differing only in `i`'s strategy
/// reach terminals whose last common predecessor is an `i` node, and every
/// such terminal pair is realized by some unilateral deviation. TDI thus
/// reduces to: at each pair split by `i`, indifference of `i` implies
/// indifference of all.
pub fn check_tdi_structural(g: &Game) -> Result<Option<TdiPairViolation>, SolverError> {
    if !classify_game(g).perfect_information {
        return Err(SolverError::NotPerfectInformation);
    }
    let n = g.num_players();
    for (z, z2, i) in terminal_pairs(g) {
        if g.rank(i, z) != g.rank(i, z2) {
            continue;
        }
        if let Some(other) = (0..n).find(|&j| g.rank(j, z) != g.rank(j, z2)) {
            return Ok(Some(TdiPairViolation {
                z,
                z2,
                deviator: i,
                other,
            }));
        }
    }
    Ok(None)
}
