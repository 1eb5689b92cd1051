//! Backward induction on perfect-information games, tie-aware.

use std::collections::BTreeSet;

use crate::game::{classify_game, Game, HistoryId, PlayerId};

use super::SolverError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiResult {
    /// Outcome of the canonical subgame-perfect profile (ties broken toward
    /// the lowest action index).
    pub outcome: HistoryId,
    /// Every outcome of some pure subgame-perfect profile.
    pub outcomes: BTreeSet<HistoryId>,
    /// `outcomes` is a singleton.
    pub unique: bool,
    /// Canonical profile: per player, one action per own information set
    /// (indexed like the player's information set list).
    pub spe_profile: Vec<Vec<usize>>,
}

impl BiResult {
    /// Outcome labels of all subgame-perfect outcomes.
    pub fn labels(&self, g: &Game) -> BTreeSet<String> {
        self.outcomes.iter().map(|&z| g.label(z).to_string()).collect()
    }
}

fn mover(g: &Game, x: HistoryId) -> PlayerId {
    g.info_set(g.history(x).movers[0]).owner
}

/// Backward induction. Without the no-relevant-ties condition several
/// outcomes may be subgame perfect; all of them are returned.
pub fn backward_induction(g: &Game) -> Result<BiResult, SolverError> {
    if !classify_game(g).perfect_information {
        return Err(SolverError::NotPerfectInformation);
    }
    let n = g.histories().len();
    let mut canon = vec![0usize; n];
    let mut sets: Vec<BTreeSet<HistoryId>> = vec![BTreeSet::new(); n];
    let mut profile: Vec<Vec<usize>> = (0..g.num_players())
        .map(|i| vec![0; g.own_info_sets(i).len()])
        .collect();
    // children always carry larger ids than their parent
    for x in (0..n).rev() {
        let node = g.history(x);
        if node.is_terminal() {
            canon[x] = x;
            sets[x].insert(x);
            continue;
        }
        let i = mover(g, x);
        let best = node
            .children
            .iter()
            .enumerate()
            .min_by_key(|(k, &c)| (g.rank(i, canon[c]), *k))
            .map(|(k, _)| k)
            .expect("nonterminal has children");
        canon[x] = canon[node.children[best]];
        let h = node.movers[0];
        profile[i][g.local_index(h)] = best;
        let worst: Vec<u32> = node
            .children
            .iter()
            .map(|&c| sets[c].iter().map(|&z| g.rank(i, z)).max().expect("nonempty"))
            .collect();
        let mut out = BTreeSet::new();
        for (b, &c) in node.children.iter().enumerate() {
            let bound = worst
                .iter()
                .enumerate()
                .filter(|&(a, _)| a != b)
                .map(|(_, &w)| w)
                .min()
                .unwrap_or(u32::MAX);
            out.extend(sets[c].iter().copied().filter(|&z| g.rank(i, z) <= bound));
        }
        sets[x] = out;
    }
    let root = g.root();
    Ok(BiResult {
        outcome: canon[root],
        unique: sets[root].len() == 1,
        outcomes: std::mem::take(&mut sets[root]),
        spe_profile: profile,
    })
}
