//! Reduced strategies, the outcome function, conditioning events and
//! conditional problems.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::{Game, HistoryId, InfoSetId, PlayerId};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("profile leaves information set {0} without a choice")]
    IncompleteProfile(InfoSetId),
    #[error("strategy space too large: {0}")]
    SizeCap(String),
}

/// A plan of action: choices at the owner's information sets that are not
/// precluded by the owner's own earlier choices. Indexed by the local
/// position of each information set in the owner's list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedStrategy {
    pub owner: PlayerId,
    pub choices: Vec<Option<usize>>,
}

/// Opponent profile: one strategy index per opponent, in player order.
pub type OppProfile = Vec<usize>;

/// Per-player subsets of strategy indices (sorted); a product set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction {
    pub sets: Vec<Vec<usize>>,
}

impl Restriction {
    pub fn new(mut sets: Vec<Vec<usize>>) -> Restriction {
        for s in sets.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        Restriction { sets }
    }
    pub fn full(space: &StrategySpace) -> Restriction {
        Restriction {
            sets: space.strategies.iter().map(|v| (0..v.len()).collect()).collect(),
        }
    }
    pub fn contains(&self, i: PlayerId, s: usize) -> bool {
        self.sets[i].binary_search(&s).is_ok()
    }
    pub fn is_subset(&self, other: &Restriction) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(a, b)| a.iter().all(|s| b.binary_search(s).is_ok()))
    }
    /// Every factor nonempty.
    pub fn is_valid(&self) -> bool {
        self.sets.iter().all(|s| !s.is_empty())
    }
    pub fn num_profiles(&self) -> u128 {
        self.sets.iter().map(|s| s.len() as u128).product()
    }
}

/// `R^i(h)`: the owner's strategies reaching `h` and the opponent profiles
/// reaching `h`, both within a restriction. The opponent side need not be a
/// product set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalProblem {
    pub owner: PlayerId,
    pub info_set: InfoSetId,
    pub own: Vec<usize>,
    pub opp: Vec<OppProfile>,
}

impl ConditionalProblem {
    pub fn is_nonempty(&self) -> bool {
        !self.own.is_empty() && !self.opp.is_empty()
    }
}

/// Upper bound on strategies per player for explicit enumeration.
pub const MAX_STRATEGIES: usize = 1 << 16;

/// Enumerated reduced strategies of every player plus reachability tables.
#[derive(Debug, Clone)]
pub struct StrategySpace<'g> {
    pub game: &'g Game,
    pub strategies: Vec<Vec<ReducedStrategy>>,
    /// `consistent[x][j][s]`: strategy `s` of `j` takes every own action on the path to `x`.
    consistent: Vec<Vec<Vec<bool>>>,
}

fn plan_consistent(g: &Game, s: &ReducedStrategy, x: HistoryId) -> bool {
    g.signature(x, s.owner)
        .iter()
        .all(|&(h, a)| s.choices[g.local_index(h)] == Some(a))
}

/// All reduced strategies of `i`, ordered lexicographically by
/// (information set id, action index).
pub fn enumerate_strategies(g: &Game, i: PlayerId) -> Vec<ReducedStrategy> {
    try_enumerate(g, i, usize::MAX).expect("no cap")
}

fn try_enumerate(g: &Game, i: PlayerId, cap: usize) -> Result<Vec<ReducedStrategy>, StrategyError> {
    let sets = g.own_info_sets(i);
    let mut out = Vec::new();
    let mut cur = ReducedStrategy {
        owner: i,
        choices: vec![None; sets.len()],
    };
    fn rec(
        g: &Game,
        sets: &[InfoSetId],
        k: usize,
        cur: &mut ReducedStrategy,
        out: &mut Vec<ReducedStrategy>,
        cap: usize,
    ) -> Result<(), StrategyError> {
        if k == sets.len() {
            if out.len() >= cap {
                return Err(StrategyError::SizeCap(format!(
                    "player {} has more than {cap} reduced strategies",
                    cur.owner
                )));
            }
            out.push(cur.clone());
            return Ok(());
        }
        let h = g.info_set(sets[k]);
        // info sets in the signature have smaller ids, so they are decided already
        let reachable = h.members.iter().any(|&x| plan_consistent(g, cur, x));
        if reachable {
            for a in 0..h.actions.len() {
                cur.choices[k] = Some(a);
                rec(g, sets, k + 1, cur, out, cap)?;
            }
            cur.choices[k] = None;
            Ok(())
        } else {
            rec(g, sets, k + 1, cur, out, cap)
        }
    }
    rec(g, sets, 0, &mut cur, &mut out, cap)?;
    Ok(out)
}

impl<'g> StrategySpace<'g> {
    pub fn new(game: &'g Game) -> StrategySpace<'g> {
        Self::with_cap(game, usize::MAX).expect("no cap")
    }

    pub fn with_cap(game: &'g Game, cap: usize) -> Result<StrategySpace<'g>, StrategyError> {
        let strategies = (0..game.num_players())
            .map(|i| try_enumerate(game, i, cap))
            .collect::<Result<Vec<_>, _>>()?;
        let consistent = game
            .histories()
            .iter()
            .map(|x| {
                strategies
                    .iter()
                    .map(|ss| ss.iter().map(|s| plan_consistent(game, s, x.id)).collect())
                    .collect()
            })
            .collect();
        Ok(StrategySpace {
            game,
            strategies,
            consistent,
        })
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy(&self, i: PlayerId, s: usize) -> &ReducedStrategy {
        &self.strategies[i][s]
    }

    /// Human-readable name: chosen action labels in information-set order.
    pub fn name(&self, i: PlayerId, s: usize) -> String {
        let g = self.game;
        let sets = g.own_info_sets(i);
        let compact = sets
            .iter()
            .all(|&h| g.info_set(h).actions.iter().all(|a| a.chars().count() == 1));
        let parts: Vec<&str> = self.strategies[i][s]
            .choices
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.map(|a| g.info_set(sets[k]).actions[a].as_str()))
            .collect();
        if parts.is_empty() {
            "-".to_string()
        } else if compact {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    pub fn find(&self, i: PlayerId, name: &str) -> Option<usize> {
        (0..self.strategies[i].len()).find(|&s| self.name(i, s) == name)
    }

    /// Does strategy `s` of `j` take all of `j`'s actions on the path to `x`?
    pub fn consistent(&self, x: HistoryId, j: PlayerId, s: usize) -> bool {
        self.consistent[x][j][s]
    }

    /// `s ∈ S_i(h)` for any information set `h` (owned by anyone).
    pub fn reaches(&self, i: PlayerId, s: usize, h: InfoSetId) -> bool {
        self.game.info_set(h).members.iter().any(|&x| self.consistent[x][i][s])
    }

    /// Outcome of a complete profile.
    pub fn outcome(&self, profile: &[usize]) -> Result<HistoryId, StrategyError> {
        let g = self.game;
        let mut x = g.root();
        while !g.history(x).is_terminal() {
            let mut missing = None;
            x = g.child(x, |h| {
                let owner = g.info_set(h).owner;
                match self.strategies[owner][profile[owner]].choices[g.local_index(h)] {
                    Some(a) => a,
                    None => {
                        missing = Some(h);
                        0
                    }
                }
            });
            if let Some(h) = missing {
                return Err(StrategyError::IncompleteProfile(h));
            }
        }
        Ok(x)
    }

    /// Outcome of `s` for player `i` against an opponent profile.
    pub fn outcome_vs(&self, i: PlayerId, s: usize, opp: &[usize]) -> HistoryId {
        let g = self.game;
        let mut x = g.root();
        while !g.history(x).is_terminal() {
            x = g.child(x, |h| {
                let owner = g.info_set(h).owner;
                let idx = if owner == i {
                    s
                } else if owner < i {
                    opp[owner]
                } else {
                    opp[owner - 1]
                };
                self.strategies[owner][idx].choices[g.local_index(h)]
                    .expect("reduced strategy defined on reached information sets")
            });
        }
        x
    }

    /// `H_i(s)`: own information sets allowed by `s`, in id order.
    pub fn allowed_info_sets(&self, i: PlayerId, s: usize) -> Vec<InfoSetId> {
        self.game
            .own_info_sets(i)
            .iter()
            .copied()
            .filter(|&h| self.reaches(i, s, h))
            .collect()
    }

    /// `H(s)`: every information set (any owner) that `s` does not preclude.
    pub fn allowed_all(&self, i: PlayerId, s: usize) -> Vec<InfoSetId> {
        (0..self.game.info_sets().len())
            .filter(|&h| self.reaches(i, s, h))
            .collect()
    }

    /// Opponent profiles of `R_{-i}` reaching `h`, deduplicated and sorted.
    pub fn opp_reaching(&self, i: PlayerId, h: InfoSetId, r: &Restriction) -> Vec<OppProfile> {
        let g = self.game;
        let mut set: BTreeSet<OppProfile> = BTreeSet::new();
        for &x in &g.info_set(h).members {
            let factors: Vec<Vec<usize>> = (0..self.num_players())
                .filter(|&j| j != i)
                .map(|j| {
                    r.sets[j]
                        .iter()
                        .copied()
                        .filter(|&s| self.consistent[x][j][s])
                        .collect()
                })
                .collect();
            for p in product(&factors) {
                set.insert(p);
            }
        }
        set.into_iter().collect()
    }

    /// All opponent profiles of `R_{-i}`.
    pub fn opp_profiles(&self, i: PlayerId, r: &Restriction) -> Vec<OppProfile> {
        let factors: Vec<Vec<usize>> = (0..self.num_players())
            .filter(|&j| j != i)
            .map(|j| r.sets[j].clone())
            .collect();
        product(&factors)
    }

    /// The conditional problem of the owner of `h`.
    pub fn reaching_sets(&self, h: InfoSetId, r: &Restriction) -> ConditionalProblem {
        let i = self.game.info_set(h).owner;
        ConditionalProblem {
            owner: i,
            info_set: h,
            own: r.sets[i].iter().copied().filter(|&s| self.reaches(i, s, h)).collect(),
            opp: self.opp_reaching(i, h, r),
        }
    }

    /// `Z(R)`.
    pub fn outcomes_of(&self, r: &Restriction) -> BTreeSet<HistoryId> {
        product(&r.sets)
            .iter()
            .map(|p| self.outcome(p).expect("complete profile"))
            .collect()
    }

    /// Outcome tensor over all profiles, row-major in player order.
    pub fn strategic_form(&self) -> StrategicForm {
        let dims: Vec<usize> = self.strategies.iter().map(|v| v.len()).collect();
        let all: Vec<Vec<usize>> = dims.iter().map(|&d| (0..d).collect()).collect();
        let outcomes = product(&all)
            .iter()
            .map(|p| self.outcome(p).expect("complete profile"))
            .collect();
        StrategicForm { dims, outcomes }
    }
}

/// Reduced strategic form as an outcome tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategicForm {
    pub dims: Vec<usize>,
    pub outcomes: Vec<HistoryId>,
}

impl StrategicForm {
    pub fn index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.dims).fold(0, |acc, (&s, &d)| acc * d + s)
    }
    pub fn outcome(&self, profile: &[usize]) -> HistoryId {
        self.outcomes[self.index(profile)]
    }
}

/// Cartesian product in lexicographic order.
pub fn product(factors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for p in &acc {
            for &s in f {
                let mut q = p.clone();
                q.push(s);
                next.push(q);
            }
        }
        acc = next;
    }
    acc
}

/// Insert `s` for player `i` into an opponent profile.
pub fn full_profile(i: PlayerId, s: usize, opp: &[usize]) -> Vec<usize> {
    let mut p = Vec::with_capacity(opp.len() + 1);
    p.extend_from_slice(&opp[..i]);
    p.push(s);
    p.extend_from_slice(&opp[i..]);
    p
}

/// Split a full profile into (own strategy, opponent profile).
pub fn split_profile(i: PlayerId, profile: &[usize]) -> (usize, OppProfile) {
    let mut opp = profile.to_vec();
    let s = opp.remove(i);
    (s, opp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{tiers, validate_game, Tree};

    fn names(sp: &StrategySpace, i: usize) -> Vec<String> {
        (0..sp.strategies[i].len()).map(|s| sp.name(i, s)).collect()
    }

    #[test]
    fn bos_strategies_and_outcomes() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        assert_eq!(names(&sp, 0), ["O", "IT", "ID"]);
        assert_eq!(names(&sp, 1), ["L", "R"]);
        let o = sp.find(0, "O").unwrap();
        let it = sp.find(0, "IT").unwrap();
        let l = sp.find(1, "L").unwrap();
        assert_eq!(g.label(sp.outcome(&[o, l]).unwrap()), "z1");
        assert_eq!(g.label(sp.outcome(&[it, l]).unwrap()), "z2");
        let r = Restriction::new(vec![vec![it], vec![l]]);
        let z: Vec<&str> = sp.outcomes_of(&r).iter().map(|&z| g.label(z)).collect();
        assert_eq!(z, ["z2"]);
        let sf = sp.strategic_form();
        assert_eq!(sf.dims, [3, 2]);
    }

    #[test]
    fn centipede_strategies() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        assert_eq!(names(&sp, 0), ["A", "BE", "BF"]);
        assert_eq!(names(&sp, 1), ["C", "DG", "DH"]);
        let a = sp.find(0, "A").unwrap();
        let dg = sp.find(1, "DG").unwrap();
        assert_eq!(g.label(sp.outcome(&[a, dg]).unwrap()), "z1");
        // row A of the strategic form is constant
        let sf = sp.strategic_form();
        for b in 0..3 {
            assert_eq!(g.label(sf.outcome(&[a, b])), "z1");
        }
        let full = Restriction::full(&sp);
        assert_eq!(sp.outcomes_of(&full).len(), 5);
        let only_a = Restriction::new(vec![vec![a], vec![0, 1, 2]]);
        let z: Vec<&str> = sp.outcomes_of(&only_a).iter().map(|&z| g.label(z)).collect();
        assert_eq!(z, ["z1"]);
    }

    #[test]
    fn centipede_reaching_sets() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let a = sp.find(0, "A").unwrap();
        let be = sp.find(0, "BE").unwrap();
        let bob_b = g.own_info_sets(1)[0];
        let r = Restriction::new(vec![vec![a], vec![0, 1, 2]]);
        let p = sp.reaching_sets(bob_b, &r);
        assert_eq!(p.own, vec![0, 1, 2]);
        assert!(p.opp.is_empty());
        let r = Restriction::new(vec![vec![a, be], vec![0, 1, 2]]);
        let p = sp.reaching_sets(bob_b, &r);
        assert_eq!(p.opp, vec![vec![be]]);
        let root = g.own_info_sets(0)[0];
        let p = sp.reaching_sets(root, &Restriction::full(&sp));
        assert_eq!(p.own.len(), 3);
        assert_eq!(p.opp.len(), 3);
    }

    #[test]
    fn allowed_sets() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let a = sp.find(0, "A").unwrap();
        let bf = sp.find(0, "BF").unwrap();
        assert_eq!(sp.allowed_info_sets(0, a), vec![g.own_info_sets(0)[0]]);
        assert_eq!(sp.allowed_info_sets(0, bf), g.own_info_sets(0).to_vec());
        let raw = Tree::choice(
            "p",
            "h",
            &["a", "b", "c"],
            vec![Tree::leaf("x"), Tree::leaf("y"), Tree::leaf("w")],
        )
        .into_raw(&["p"], vec![tiers("x > y > w")]);
        let g1 = validate_game(&raw).unwrap();
        let sp1 = StrategySpace::new(&g1);
        assert_eq!(sp1.strategies[0].len(), 3);
        assert_eq!(sp1.allowed_info_sets(0, 0), vec![0]);
        let r = Restriction::full(&sp1);
        assert_eq!(sp1.strategic_form().dims, [3]);
        assert_eq!(sp1.outcomes_of(&r).len(), 3);
    }
}
