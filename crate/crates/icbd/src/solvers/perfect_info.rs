//! Iterated conditional B-dominance for perfect-information games without
//! enumerating strategies.
//!
//! Restrictions are kept in node form: one set of still-allowed actions per
//! history, a strategy surviving iff every choice it makes is allowed. At a
//! node `x` of player `i`, conditional B-dominance only depends on `i`'s
//! behaviour inside the subtree of `x` (the rows) and on the distinct
//! rank vectors opponents can induce there (the columns), both of which
//! are built recursively. A round removes, node by node and bottom-up,
//! each action all of whose continuations are dominated. When a round would
//! remove only part of an action's continuations, the surviving set is not
//! of node form and the engine stops with `NonRectangular` rather than
//! approximate.

use std::collections::{BTreeSet, HashSet};

use crate::dominance::{bd_chain, RankMatrix};
use crate::game::{classify_game, Game, HistoryId, InfoSetId, PlayerId};
use crate::strategies::{Restriction, StrategySpace};

use super::SolverError;

/// Upper bound on rows × columns of a single conditional problem.
pub const CELL_CAP: usize = 1 << 24;

/// A player's behaviour inside a subtree: (history, action) choices.
type Behavior = Vec<(HistoryId, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRestriction {
    /// Allowed actions per history (empty at terminals).
    pub allowed: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiSolveResult {
    pub fixpoint: NodeRestriction,
    /// Terminals reachable under the fixpoint.
    pub outcomes: BTreeSet<HistoryId>,
    /// Number of rounds that removed something.
    pub iterations_to_fixpoint: usize,
    /// Actions removed per round, as (history, action).
    pub removed: Vec<Vec<(HistoryId, usize)>>,
}

impl NodeRestriction {
    pub fn full(g: &Game) -> NodeRestriction {
        NodeRestriction {
            allowed: g.histories().iter().map(|x| (0..x.children.len()).collect()).collect(),
        }
    }

    /// Terminals reachable when every mover picks an allowed action.
    pub fn reachable_terminals(&self, g: &Game) -> BTreeSet<HistoryId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![g.root()];
        while let Some(x) = stack.pop() {
            let node = g.history(x);
            if node.is_terminal() {
                out.insert(x);
            }
            stack.extend(self.allowed[x].iter().map(|&a| node.children[a]));
        }
        out
    }

    /// The explicit restriction with the same members.
    pub fn to_restriction(&self, space: &StrategySpace) -> Restriction {
        let g = space.game;
        let first = |h: InfoSetId| g.info_set(h).members[0];
        Restriction::new(
            (0..space.num_players())
                .map(|i| {
                    (0..space.strategies[i].len())
                        .filter(|&s| {
                            g.own_info_sets(i).iter().enumerate().all(|(k, &h)| {
                                space.strategy(i, s).choices[k].is_none_or(|a| self.allowed[first(h)].contains(&a))
                            })
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

struct Engine<'g> {
    g: &'g Game,
    mover: Vec<Option<PlayerId>>,
}

impl Engine<'_> {
    /// Behaviours of `i` in the subtree of `y`, restricted to branches
    /// opponents can reach. Product order: earlier actions more significant.
    fn rows(&self, i: PlayerId, y: HistoryId, acts: &[Vec<usize>]) -> Vec<Behavior> {
        let node = self.g.history(y);
        match self.mover[y] {
            None => vec![Vec::new()],
            Some(m) if m == i => {
                let mut out = Vec::new();
                for &a in &acts[y] {
                    for b in self.rows(i, node.children[a], acts) {
                        let mut v = Vec::with_capacity(b.len() + 1);
                        v.push((y, a));
                        v.extend(b);
                        out.push(v);
                    }
                }
                out
            }
            Some(_) => {
                let mut acc: Vec<Behavior> = vec![Vec::new()];
                for &a in &acts[y] {
                    let sub = self.rows(i, node.children[a], acts);
                    let mut next = Vec::with_capacity(acc.len() * sub.len());
                    for p in &acc {
                        for b in &sub {
                            let mut v = p.clone();
                            v.extend_from_slice(b);
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Distinct rank vectors (for `i`, over `rows(i, y)`) that opponents can induce.
    fn cols(&self, i: PlayerId, y: HistoryId, acts: &[Vec<usize>]) -> Result<(usize, Vec<Vec<u32>>), SolverError> {
        let node = self.g.history(y);
        match self.mover[y] {
            None => Ok((1, vec![vec![self.g.rank(i, y)]])),
            Some(m) if m == i => {
                let mut n = 0;
                let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
                for &a in &acts[y] {
                    let (k, sub) = self.cols(i, node.children[a], acts)?;
                    n += k;
                    check_cap(n, acc.len() * sub.len())?;
                    let mut next = Vec::with_capacity(acc.len() * sub.len());
                    for p in &acc {
                        for v in &sub {
                            let mut w = p.clone();
                            w.extend_from_slice(v);
                            next.push(w);
                        }
                    }
                    acc = next;
                }
                Ok((n, acc))
            }
            Some(_) => {
                let parts: Vec<(usize, Vec<Vec<u32>>)> = acts[y]
                    .iter()
                    .map(|&a| self.cols(i, node.children[a], acts))
                    .collect::<Result<_, _>>()?;
                let n: usize = parts.iter().map(|p| p.0).product();
                let mut seen: HashSet<Vec<u32>> = HashSet::new();
                let mut out = Vec::new();
                // stride of part k in the product row index
                let mut strides = vec![1usize; parts.len()];
                for k in (0..parts.len().saturating_sub(1)).rev() {
                    strides[k] = strides[k + 1] * parts[k + 1].0;
                }
                for (k, (nk, vs)) in parts.iter().enumerate() {
                    for v in vs {
                        let lifted: Vec<u32> = (0..n).map(|r| v[(r / strides[k]) % nk]).collect();
                        if seen.insert(lifted.clone()) {
                            check_cap(n, seen.len())?;
                            out.push(lifted);
                        }
                    }
                }
                Ok((n, out))
            }
        }
    }

    /// Histories whose path uses only allowed actions.
    fn reachable(&self, acts: &[Vec<usize>]) -> Vec<bool> {
        let n = self.g.histories().len();
        let mut reach = vec![false; n];
        reach[self.g.root()] = true;
        for x in 0..n {
            if !reach[x] {
                continue;
            }
            for &a in &acts[x] {
                reach[self.g.history(x).children[a]] = true;
            }
        }
        reach
    }

    /// One round for player `i`: the new allowed actions at `i`'s nodes.
    fn round_player(&self, i: PlayerId, acts: &[Vec<usize>], reach: &[bool]) -> Result<Vec<Vec<usize>>, SolverError> {
        let n = self.g.histories().len();
        let mut bad: Vec<Option<HashSet<Behavior>>> = vec![None; n];
        for x in 0..n {
            if self.mover[x] != Some(i) || !reach[x] {
                continue;
            }
            // count and cap before materialising the behaviours
            let (k, cols) = self.cols(i, x, acts)?;
            check_cap(k, cols.len().max(1))?;
            let rows = self.rows(i, x, acts);
            debug_assert_eq!(k, rows.len());
            let m = RankMatrix {
                rows: (0..rows.len()).collect(),
                ranks: (0..rows.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
            };
            let dominated: HashSet<Behavior> = (0..rows.len())
                .filter(|&r| bd_chain(&m, r).is_some())
                .map(|r| rows[r].clone())
                .collect();
            if !dominated.is_empty() {
                bad[x] = Some(dominated);
            }
        }
        let mut next = acts.to_vec();
        let mut nonempty = vec![true; n];
        for x in (0..n).rev() {
            let node = self.g.history(x);
            match self.mover[x] {
                None => {}
                Some(m) if m == i => {
                    let mut keep = Vec::new();
                    for &a in &acts[x] {
                        let child = node.children[a];
                        if !nonempty[child] {
                            continue;
                        }
                        if let Some(b) = &bad[x] {
                            let conts = self.rows(i, child, &next);
                            let hits = conts
                                .iter()
                                .filter(|t| {
                                    let mut v = Vec::with_capacity(t.len() + 1);
                                    v.push((x, a));
                                    v.extend_from_slice(t);
                                    b.contains(&v)
                                })
                                .count();
                            if hits == conts.len() {
                                continue;
                            }
                            if hits > 0 {
                                // keep the undominated continuations if they
                                // are exactly a narrowing of the subtree's actions
                                let survivors: Vec<&Behavior> = conts
                                    .iter()
                                    .filter(|t| {
                                        let mut v = Vec::with_capacity(t.len() + 1);
                                        v.push((x, a));
                                        v.extend_from_slice(t);
                                        !b.contains(&v)
                                    })
                                    .collect();
                                let mut narrowed = next.clone();
                                let used: BTreeSet<HistoryId> =
                                    survivors.iter().flat_map(|t| t.iter().map(|&(y, _)| y)).collect();
                                for &y in &used {
                                    narrowed[y] = next[y]
                                        .iter()
                                        .copied()
                                        .filter(|&c| survivors.iter().any(|t| t.contains(&(y, c))))
                                        .collect();
                                }
                                if self.rows(i, child, &narrowed).len() != survivors.len() {
                                    return Err(SolverError::NonRectangular(format!(
                                        "history `{}`, action {}",
                                        node.name,
                                        self.g.info_set(node.movers[0]).actions[a]
                                    )));
                                }
                                next = narrowed;
                            }
                        }
                        keep.push(a);
                    }
                    nonempty[x] = !keep.is_empty();
                    next[x] = keep;
                }
                Some(_) => {
                    nonempty[x] = acts[x].iter().all(|&a| nonempty[node.children[a]]);
                }
            }
        }
        if !nonempty[self.g.root()] {
            return Err(SolverError::Invariant(format!(
                "player {} lost every strategy",
                self.g.players()[i]
            )));
        }
        Ok(next)
    }
}

fn check_cap(rows: usize, cols: usize) -> Result<(), SolverError> {
    if rows.saturating_mul(cols) > CELL_CAP {
        return Err(SolverError::SizeCap(format!("{rows} x {cols} conditional problem")));
    }
    Ok(())
}

/// Iterated conditional B-dominance on a perfect-information game, in node form.
pub fn icbd_perfect_info(g: &Game) -> Result<PiSolveResult, SolverError> {
    if !classify_game(g).perfect_information {
        return Err(SolverError::NotPerfectInformation);
    }
    let eng = Engine {
        g,
        mover: g
            .histories()
            .iter()
            .map(|x| x.movers.first().map(|&h| g.info_set(h).owner))
            .collect(),
    };
    let mut acts = NodeRestriction::full(g).allowed;
    let mut removed = Vec::new();
    loop {
        let reach = eng.reachable(&acts);
        let mut next = acts.clone();
        for i in 0..g.num_players() {
            let mine = eng.round_player(i, &acts, &reach)?;
            for x in 0..acts.len() {
                if eng.mover[x] == Some(i) {
                    next[x] = mine[x].clone();
                }
            }
        }
        let gone: Vec<(HistoryId, usize)> = (0..acts.len())
            .flat_map(|x| {
                acts[x]
                    .iter()
                    .filter(|a| !next[x].contains(a))
                    .map(move |&a| (x, a))
                    .collect::<Vec<_>>()
            })
            .collect();
        if gone.is_empty() {
            break;
        }
        removed.push(gone);
        acts = next;
    }
    let fixpoint = NodeRestriction { allowed: acts };
    Ok(PiSolveResult {
        outcomes: fixpoint.reachable_terminals(g),
        iterations_to_fixpoint: removed.len(),
        removed,
        fixpoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solvers::icbd;

    #[test]
    fn centipede_matches_explicit_solver() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let res = icbd_perfect_info(&g).unwrap();
        let explicit = icbd(&sp, &Restriction::full(&sp)).unwrap();
        assert_eq!(res.fixpoint.to_restriction(&sp), explicit.fixpoint);
        assert_eq!(res.outcomes, explicit.outcomes);
        assert_eq!(res.iterations_to_fixpoint, explicit.iterations_to_fixpoint);
    }

    #[test]
    fn full_restriction_round_trips() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        assert_eq!(NodeRestriction::full(&g).to_restriction(&sp), Restriction::full(&sp));
        assert_eq!(
            NodeRestriction::full(&g).reachable_terminals(&g).len(),
            g.terminals().len()
        );
    }

    #[test]
    fn rejects_simultaneous_moves() {
        assert_eq!(
            icbd_perfect_info(&fixtures::bos_outside()),
            Err(SolverError::NotPerfectInformation)
        );
    }
}
