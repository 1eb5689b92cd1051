//! Ordinal dominance: strict and weak dominance, admissibility, Börgers
//! dominance, conditional B-dominance and strong replacements.
//!
//! Everything works on rank matrices (lower rank = better), so the same
//! kernel serves explicit strategy spaces and the structured engines.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{InfoSetId, PlayerId};
use crate::strategies::{ConditionalProblem, OppProfile, ReducedStrategy, Restriction, StrategySpace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DominanceError {
    #[error("strategy {0} of player {1} is not in the restriction")]
    StrategyNotInRestriction(usize, PlayerId),
    #[error("conditional problem is empty")]
    EmptyProblem,
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Largest opponent side for which exhaustive subset enumeration is allowed.
pub const EXHAUSTIVE_CAP: usize = 20;

/// Player `i`'s ranks on a two-sided problem: `ranks[r][c]` is the rank of
/// the outcome of own strategy `rows[r]` against column `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    pub rows: Vec<usize>,
    pub ranks: Vec<Vec<u32>>,
}

impl RankMatrix {
    pub fn num_cols(&self) -> usize {
        self.ranks.first().map_or(0, |r| r.len())
    }

    pub fn row_of(&self, s: usize) -> Option<usize> {
        self.rows.iter().position(|&x| x == s)
    }

    /// Rank matrix of a conditional problem (or any own/opponent pair).
    pub fn of_problem(space: &StrategySpace, i: PlayerId, own: &[usize], opp: &[OppProfile]) -> RankMatrix {
        let g = space.game;
        RankMatrix {
            rows: own.to_vec(),
            ranks: own
                .iter()
                .map(|&s| opp.iter().map(|y| g.rank(i, space.outcome_vs(i, s, y))).collect())
                .collect(),
        }
    }
}

/// `a` is at least as good as `b` on `cols` and strictly better on one.
pub fn weakly_dom_on(a: &[u32], b: &[u32], cols: &[usize]) -> bool {
    let mut strict = false;
    for &c in cols {
        if a[c] > b[c] {
            return false;
        }
        strict |= a[c] < b[c];
    }
    strict
}

/// `a` is strictly better than `b` on every column of a nonempty `cols`.
pub fn strictly_dom_on(a: &[u32], b: &[u32], cols: &[usize]) -> bool {
    !cols.is_empty() && cols.iter().all(|&c| a[c] < b[c])
}

/// One step of a B-dominance chain: `dominator` (a row position) weakly
/// dominates the strategy on the column set `cols`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub cols: Vec<usize>,
    pub dominator: usize,
}

/// Decide B-dominance of row `r` by greatest-fixpoint shrinking.
///
/// Starting from all columns, repeatedly pick the lowest-indexed row weakly
/// dominating `r` on the current set and drop the columns where it is
/// strictly better. The row is B-dominated iff the set runs empty; the
/// recorded chain then covers every nonempty column subset (see
/// [`BDominanceCertificate::dominator_for`]).
pub fn bd_chain(m: &RankMatrix, r: usize) -> Option<Vec<ChainStep>> {
    let mut q: Vec<usize> = (0..m.num_cols()).collect();
    if q.is_empty() {
        return None;
    }
    let target = &m.ranks[r];
    let mut chain = Vec::new();
    while !q.is_empty() {
        let d = (0..m.rows.len()).find(|&d| weakly_dom_on(&m.ranks[d], target, &q))?;
        let next: Vec<usize> = q.iter().copied().filter(|&c| m.ranks[d][c] == target[c]).collect();
        chain.push(ChainStep { cols: q, dominator: d });
        q = next;
    }
    Some(chain)
}

/// Admissible rows of the matrix restricted to `cols`.
pub fn admissible_rows(m: &RankMatrix, cols: &[usize]) -> Vec<usize> {
    (0..m.rows.len())
        .filter(|&r| !(0..m.rows.len()).any(|d| weakly_dom_on(&m.ranks[d], &m.ranks[r], cols)))
        .collect()
}

/// Definitional B-dominance by enumeration of every nonempty column subset.
/// Returns the dominator (lowest row position) per subset bitmask, or `None`
/// when the row is admissible on some subset.
///
/// With `product_of` set, only subsets that are products of per-opponent
/// strategy sets (and lie inside the opponent side) are considered; the
/// closure maps a column to its opponent profile.
pub fn bd_exhaustive(
    m: &RankMatrix,
    r: usize,
    product_of: Option<&[OppProfile]>,
) -> Result<Option<BTreeMap<u64, usize>>, DominanceError> {
    let n = m.num_cols();
    if n == 0 {
        return Ok(None);
    }
    if n > EXHAUSTIVE_CAP {
        return Err(DominanceError::SizeCap(format!(
            "{n} opponent profiles exceed the exhaustive cap of {EXHAUSTIVE_CAP}"
        )));
    }
    let subsets: Vec<u64> = match product_of {
        None => (1..(1u64 << n)).collect(),
        Some(profiles) => product_subsets(profiles),
    };
    let mut out = BTreeMap::new();
    for mask in subsets {
        let cols: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
        match (0..m.rows.len()).find(|&d| weakly_dom_on(&m.ranks[d], &m.ranks[r], &cols)) {
            Some(d) => {
                out.insert(mask, d);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Bitmasks of the nonempty product subsets contained in `profiles`.
fn product_subsets(profiles: &[OppProfile]) -> Vec<u64> {
    let k = profiles.first().map_or(0, |p| p.len());
    let proj: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            let s: BTreeSet<usize> = profiles.iter().map(|p| p[j]).collect();
            s.into_iter().collect()
        })
        .collect();
    let index: BTreeMap<&OppProfile, usize> = profiles.iter().enumerate().map(|(c, p)| (p, c)).collect();
    let mut out = BTreeSet::new();
    // every factor ranges over nonempty subsets of its projection
    let factor_masks: Vec<Vec<u64>> = proj.iter().map(|v| (1..(1u64 << v.len())).collect()).collect();
    let mut choice = vec![0usize; k];
    'outer: loop {
        let factors: Vec<Vec<usize>> = (0..k)
            .map(|j| {
                let m = factor_masks[j][choice[j]];
                (0..proj[j].len())
                    .filter(|&t| m >> t & 1 == 1)
                    .map(|t| proj[j][t])
                    .collect()
            })
            .collect();
        let mut mask = 0u64;
        let mut inside = true;
        for p in crate::strategies::product(&factors) {
            match index.get(&p) {
                Some(&c) => mask |= 1 << c,
                None => {
                    inside = false;
                    break;
                }
            }
        }
        if inside && mask != 0 {
            out.insert(mask);
        }
        let mut j = 0;
        loop {
            if j == k {
                break 'outer;
            }
            choice[j] += 1;
            if choice[j] < factor_masks[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceKind {
    Strict,
    Weak,
}

/// Where a dominance claim holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    WholeGame,
    InfoSet(InfoSetId),
}

/// A replayable pairwise dominance claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceWitness {
    pub player: PlayerId,
    pub dominated: usize,
    pub dominator: usize,
    pub kind: DominanceKind,
    pub scope: Scope,
    pub opp_profiles: Vec<OppProfile>,
}

impl DominanceWitness {
    pub fn verify(&self, space: &StrategySpace) -> bool {
        let m = RankMatrix::of_problem(
            space,
            self.player,
            &[self.dominator, self.dominated],
            &self.opp_profiles,
        );
        let cols: Vec<usize> = (0..self.opp_profiles.len()).collect();
        match self.kind {
            DominanceKind::Strict => strictly_dom_on(&m.ranks[0], &m.ranks[1], &cols),
            DominanceKind::Weak => weakly_dom_on(&m.ranks[0], &m.ranks[1], &cols),
        }
    }
}

/// Proof that a strategy is B-dominated on a conditional problem: a chain of
/// shrinking column sets with a weak dominator on each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BDominanceCertificate {
    pub player: PlayerId,
    pub strategy: usize,
    pub info_set: Option<InfoSetId>,
    /// Opponent side of the problem; chain columns index into it.
    pub opp_profiles: Vec<OppProfile>,
    /// Chain steps with dominators given as strategy indices.
    pub chain: Vec<ChainStep>,
}

impl BDominanceCertificate {
    fn from_chain(
        player: PlayerId,
        strategy: usize,
        info_set: Option<InfoSetId>,
        m: &RankMatrix,
        opp: &[OppProfile],
        chain: Vec<ChainStep>,
    ) -> Self {
        BDominanceCertificate {
            player,
            strategy,
            info_set,
            opp_profiles: opp.to_vec(),
            chain: chain
                .into_iter()
                .map(|st| ChainStep {
                    cols: st.cols,
                    dominator: m.rows[st.dominator],
                })
                .collect(),
        }
    }

    /// Weak dominator for a nonempty column subset `p`: the step with the
    /// largest index whose column set still contains `p`.
    pub fn dominator_for(&self, p: &[usize]) -> Option<usize> {
        if p.is_empty() {
            return None;
        }
        self.chain
            .iter()
            .rev()
            .find(|st| p.iter().all(|c| st.cols.binary_search(c).is_ok()))
            .map(|st| st.dominator)
    }

    /// Explicit dominator per nonempty subset (bitmask over columns).
    pub fn expand(&self) -> Result<BTreeMap<u64, usize>, DominanceError> {
        let n = self.opp_profiles.len();
        if n > 12 {
            return Err(DominanceError::SizeCap(format!("{n} columns is too many to expand")));
        }
        Ok((1..(1u64 << n))
            .map(|mask| {
                let p: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
                (mask, self.dominator_for(&p).expect("chain covers every subset"))
            })
            .collect())
    }

    /// Replay: the chain starts at the full opponent side, each dominator
    /// weakly dominates on its set, and the next set is exactly the set of
    /// ties; the last step leaves nothing.
    pub fn verify(&self, space: &StrategySpace) -> bool {
        let mut rows: Vec<usize> = self.chain.iter().map(|s| s.dominator).collect();
        rows.push(self.strategy);
        let m = RankMatrix::of_problem(space, self.player, &rows, &self.opp_profiles);
        let target = &m.ranks[rows.len() - 1];
        let mut q: Vec<usize> = (0..self.opp_profiles.len()).collect();
        if q.is_empty() {
            return false;
        }
        for (k, st) in self.chain.iter().enumerate() {
            if st.cols != q || !weakly_dom_on(&m.ranks[k], target, &q) {
                return false;
            }
            q.retain(|&c| m.ranks[k][c] == target[c]);
        }
        q.is_empty()
    }
}

fn check_member(r: &Restriction, i: PlayerId, s: usize) -> Result<(), DominanceError> {
    if r.contains(i, s) {
        Ok(())
    } else {
        Err(DominanceError::StrategyNotInRestriction(s, i))
    }
}

fn whole_game_matrix(space: &StrategySpace, i: PlayerId, r: &Restriction) -> (RankMatrix, Vec<OppProfile>) {
    let opp = space.opp_profiles(i, r);
    (RankMatrix::of_problem(space, i, &r.sets[i], &opp), opp)
}

/// `s_star` strictly dominates `s` relative to `r`.
pub fn strictly_dominates(
    space: &StrategySpace,
    i: PlayerId,
    s_star: usize,
    s: usize,
    r: &Restriction,
) -> Result<bool, DominanceError> {
    check_member(r, i, s_star)?;
    check_member(r, i, s)?;
    let opp = space.opp_profiles(i, r);
    let m = RankMatrix::of_problem(space, i, &[s_star, s], &opp);
    let cols: Vec<usize> = (0..opp.len()).collect();
    Ok(strictly_dom_on(&m.ranks[0], &m.ranks[1], &cols))
}

/// `s_star` weakly dominates `s` relative to `r`.
pub fn weakly_dominates(
    space: &StrategySpace,
    i: PlayerId,
    s_star: usize,
    s: usize,
    r: &Restriction,
) -> Result<bool, DominanceError> {
    check_member(r, i, s_star)?;
    check_member(r, i, s)?;
    let opp = space.opp_profiles(i, r);
    let m = RankMatrix::of_problem(space, i, &[s_star, s], &opp);
    let cols: Vec<usize> = (0..opp.len()).collect();
    Ok(weakly_dom_on(&m.ranks[0], &m.ranks[1], &cols))
}

/// `A_i(R)`: strategies of `R_i` not weakly dominated relative to `R` by a member of `R_i`.
pub fn admissible_set(space: &StrategySpace, i: PlayerId, r: &Restriction) -> Vec<usize> {
    let (m, opp) = whole_game_matrix(space, i, r);
    let cols: Vec<usize> = (0..opp.len()).collect();
    admissible_rows(&m, &cols).into_iter().map(|k| m.rows[k]).collect()
}

/// `bd_i` of a conditional problem, with a certificate per member.
pub fn b_dominated_set(
    space: &StrategySpace,
    problem: &ConditionalProblem,
) -> Result<BTreeMap<usize, BDominanceCertificate>, DominanceError> {
    if !problem.is_nonempty() {
        return Err(DominanceError::EmptyProblem);
    }
    let m = RankMatrix::of_problem(space, problem.owner, &problem.own, &problem.opp);
    Ok(bd_rows(&m)
        .into_iter()
        .map(|(r, chain)| {
            let cert = BDominanceCertificate::from_chain(
                problem.owner,
                m.rows[r],
                Some(problem.info_set),
                &m,
                &problem.opp,
                chain,
            );
            (m.rows[r], cert)
        })
        .collect())
}

/// B-dominated rows (positions) with their chains.
pub fn bd_rows(m: &RankMatrix) -> Vec<(usize, Vec<ChainStep>)> {
    (0..m.rows.len())
        .filter_map(|r| bd_chain(m, r).map(|c| (r, c)))
        .collect()
}

/// Definitional variant of [`b_dominated_set`] (subset enumeration). With
/// `product_mode`, only product subsets of opponent profiles count.
pub fn b_dominated_set_exhaustive(
    space: &StrategySpace,
    problem: &ConditionalProblem,
    product_mode: bool,
) -> Result<BTreeSet<usize>, DominanceError> {
    if !problem.is_nonempty() {
        return Err(DominanceError::EmptyProblem);
    }
    let m = RankMatrix::of_problem(space, problem.owner, &problem.own, &problem.opp);
    let mut out = BTreeSet::new();
    for r in 0..m.rows.len() {
        let shape = product_mode.then_some(problem.opp.as_slice());
        if bd_exhaustive(&m, r, shape)?.is_some() {
            out.insert(m.rows[r]);
        }
    }
    Ok(out)
}

/// First own information set (by id) allowed by `s` where `s` is B-dominated
/// on the nonempty conditional problem, with its certificate.
pub fn conditionally_b_dominated(
    space: &StrategySpace,
    i: PlayerId,
    s: usize,
    r: &Restriction,
) -> Result<Option<(InfoSetId, BDominanceCertificate)>, DominanceError> {
    check_member(r, i, s)?;
    for h in space.allowed_info_sets(i, s) {
        let p = space.reaching_sets(h, r);
        if !p.is_nonempty() {
            continue;
        }
        let m = RankMatrix::of_problem(space, i, &p.own, &p.opp);
        let row = m.row_of(s).expect("s reaches h");
        if let Some(chain) = bd_chain(&m, row) {
            return Ok(Some((
                h,
                BDominanceCertificate::from_chain(i, s, Some(h), &m, &p.opp, chain),
            )));
        }
    }
    Ok(None)
}

/// Is information set `h2` equal to or after `h` for its owner (perfect recall)?
fn follows(space: &StrategySpace, h: InfoSetId, h2: InfoSetId) -> bool {
    if h == h2 {
        return true;
    }
    let g = space.game;
    let owner = g.info_set(h2).owner;
    let x = g.info_set(h2).members[0];
    g.signature(x, owner).iter().any(|&(k, _)| k == h)
}

/// Reduce a full assignment to the plan of action it induces.
fn reduce(space: &StrategySpace, i: PlayerId, pick: impl Fn(usize) -> Option<usize>) -> Option<ReducedStrategy> {
    let g = space.game;
    let sets = g.own_info_sets(i);
    let mut cur = ReducedStrategy {
        owner: i,
        choices: vec![None; sets.len()],
    };
    for (k, &h) in sets.iter().enumerate() {
        let reachable = g.info_set(h).members.iter().any(|&x| {
            g.signature(x, i)
                .iter()
                .all(|&(h2, a)| cur.choices[g.local_index(h2)] == Some(a))
        });
        if reachable {
            cur.choices[k] = Some(pick(k)?);
        }
    }
    Some(cur)
}

/// Splice `s_prime` into `s` at `h` and every own information set after it.
///
/// The result plays like `s_prime` against every opponent profile reaching
/// `h` and like `s` against every other profile; both facts are checked.
/// Errors when the spliced plan is not a member of `R_i(h)`.
pub fn strong_replacement(
    space: &StrategySpace,
    i: PlayerId,
    h: InfoSetId,
    r: &Restriction,
    s: usize,
    s_prime: usize,
) -> Result<usize, DominanceError> {
    let g = space.game;
    if g.info_set(h).owner != i {
        return Err(DominanceError::PreconditionViolated(format!(
            "information set {h} is not owned by player {i}"
        )));
    }
    let p = space.reaching_sets(h, r);
    if !p.is_nonempty() {
        return Err(DominanceError::PreconditionViolated(
            "conditional problem is empty".into(),
        ));
    }
    for x in [s, s_prime] {
        if !p.own.contains(&x) {
            return Err(DominanceError::PreconditionViolated(format!(
                "strategy {x} is not in R_i(h)"
            )));
        }
    }
    let sets = g.own_info_sets(i);
    let a = space.strategy(i, s);
    let b = space.strategy(i, s_prime);
    let spliced = reduce(space, i, |k| {
        if follows(space, h, sets[k]) {
            b.choices[k]
        } else {
            a.choices[k]
        }
    })
    .ok_or_else(|| DominanceError::PreconditionViolated("splice leaves a reached information set undefined".into()))?;
    let idx = space.strategies[i]
        .iter()
        .position(|t| *t == spliced)
        .expect("reduced plans are enumerated");
    if !p.own.contains(&idx) {
        return Err(DominanceError::PreconditionViolated(format!(
            "spliced strategy {} lies outside R_i(h)",
            space.name(i, idx)
        )));
    }
    let reach: BTreeSet<&OppProfile> = p.opp.iter().collect();
    for y in space.opp_profiles(i, r) {
        let want = if reach.contains(&y) { s_prime } else { s };
        if space.outcome_vs(i, idx, &y) != space.outcome_vs(i, want, &y) {
            return Err(DominanceError::PreconditionViolated(
                "splice changed play off its scope".into(),
            ));
        }
    }
    Ok(idx)
}

/// Turn a weak dominance at `h` into a weak dominance relative to the whole
/// restriction, via [`strong_replacement`]. The result is re-verified.
pub fn lift_weak_dominance(
    space: &StrategySpace,
    i: PlayerId,
    h: InfoSetId,
    r: &Restriction,
    dominated: usize,
    dominator_at_h: usize,
) -> Result<DominanceWitness, DominanceError> {
    let p = space.reaching_sets(h, r);
    let local = DominanceWitness {
        player: i,
        dominated,
        dominator: dominator_at_h,
        kind: DominanceKind::Weak,
        scope: Scope::InfoSet(h),
        opp_profiles: p.opp.clone(),
    };
    if !p.is_nonempty() || !local.verify(space) {
        return Err(DominanceError::PreconditionViolated(
            "dominator does not weakly dominate on the conditional problem".into(),
        ));
    }
    let star = strong_replacement(space, i, h, r, dominated, dominator_at_h)?;
    let w = DominanceWitness {
        player: i,
        dominated,
        dominator: star,
        kind: DominanceKind::Weak,
        scope: Scope::WholeGame,
        opp_profiles: space.opp_profiles(i, r),
    };
    if !w.verify(space) {
        return Err(DominanceError::PreconditionViolated(
            "lifted dominance does not re-verify".into(),
        ));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn idx(sp: &StrategySpace, i: usize, n: &str) -> usize {
        sp.find(i, n).unwrap()
    }

    #[test]
    fn bos_strict_dominance() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let (o, id) = (idx(&sp, 0, "O"), idx(&sp, 0, "ID"));
        assert!(strictly_dominates(&sp, 0, o, id, &full).unwrap());
        assert!(!strictly_dominates(&sp, 0, o, o, &full).unwrap());
        let root = g.own_info_sets(0)[0];
        let p = sp.reaching_sets(root, &full);
        let bd = b_dominated_set(&sp, &p).unwrap();
        assert_eq!(bd.keys().copied().collect::<Vec<_>>(), vec![id]);
        let cert = &bd[&id];
        assert!(cert.verify(&sp));
        let map = cert.expand().unwrap();
        assert_eq!(map.len(), 3);
        assert!(map.values().all(|&d| d == o));
        let (h, c) = conditionally_b_dominated(&sp, 0, id, &full).unwrap().unwrap();
        assert_eq!(h, root);
        assert!(c.verify(&sp));
    }

    #[test]
    fn centipede_dominance() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let (a, be) = (idx(&sp, 0, "A"), idx(&sp, 0, "BE"));
        let (c, dg, dh) = (idx(&sp, 1, "C"), idx(&sp, 1, "DG"), idx(&sp, 1, "DH"));
        assert!(strictly_dominates(&sp, 0, a, be, &full).unwrap());
        // C is better than DG against BE, so weak dominance needs BE gone
        assert!(!weakly_dominates(&sp, 1, dg, c, &full).unwrap());
        assert_eq!(admissible_set(&sp, 1, &full), vec![c, dg]);
        let bf = idx(&sp, 0, "BF");
        let a1 = Restriction::new(vec![vec![a, bf], vec![c, dg, dh]]);
        assert!(weakly_dominates(&sp, 1, dg, c, &a1).unwrap());
        assert!(!strictly_dominates(&sp, 1, dg, c, &a1).unwrap());
        assert_eq!(admissible_set(&sp, 1, &a1), vec![dg]);
        let (h, _) = conditionally_b_dominated(&sp, 1, dh, &full).unwrap().unwrap();
        assert_eq!(h, g.own_info_sets(1)[0]);
        assert!(conditionally_b_dominated(&sp, 1, dg, &full).unwrap().is_none());
        assert!(matches!(
            strictly_dominates(&sp, 1, dg, c, &Restriction::new(vec![vec![a], vec![dg]])),
            Err(DominanceError::StrategyNotInRestriction(..))
        ));
    }

    #[test]
    fn weak_and_strict_coincide_on_singletons() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        for b in 0..3 {
            let r = Restriction::new(vec![vec![0, 1, 2], vec![b]]);
            for x in 0..3 {
                for y in 0..3 {
                    assert_eq!(
                        weakly_dominates(&sp, 0, x, y, &r).unwrap(),
                        strictly_dominates(&sp, 0, x, y, &r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn strong_replacement_and_lift() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let (it, id) = (idx(&sp, 0, "IT"), idx(&sp, 0, "ID"));
        let hi = g.own_info_sets(0)[1];
        assert_eq!(strong_replacement(&sp, 0, hi, &full, id, it).unwrap(), it);
        let root = g.own_info_sets(0)[0];
        assert_eq!(strong_replacement(&sp, 0, root, &full, id, id).unwrap(), id);

        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        let (dg, dh) = (idx(&sp, 1, "DG"), idx(&sp, 1, "DH"));
        let bob2 = g.own_info_sets(1)[1];
        assert_eq!(strong_replacement(&sp, 1, bob2, &full, dh, dg).unwrap(), dg);
        let w = lift_weak_dominance(&sp, 1, bob2, &full, dh, dg).unwrap();
        assert_eq!(w.dominator, dg);
        assert!(w.verify(&sp));
        assert!(lift_weak_dominance(&sp, 1, bob2, &full, dg, dh).is_err());
    }

    #[test]
    fn product_mode_on_two_player_problem_matches() {
        let g = fixtures::order_dependence();
        let sp = StrategySpace::new(&g);
        let full = Restriction::full(&sp);
        for h in 0..g.info_sets().len() {
            let p = sp.reaching_sets(h, &full);
            if !p.is_nonempty() {
                continue;
            }
            let a = b_dominated_set_exhaustive(&sp, &p, false).unwrap();
            let b = b_dominated_set_exhaustive(&sp, &p, true).unwrap();
            let c: BTreeSet<usize> = b_dominated_set(&sp, &p).unwrap().into_keys().collect();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    fn matrix() -> impl Strategy<Value = RankMatrix> {
        (1usize..5, 1usize..7).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(0u32..4, c), r).prop_map(move |ranks| RankMatrix {
                rows: (0..r).collect(),
                ranks,
            })
        })
    }

    proptest! {
        #[test]
        fn fixpoint_matches_subset_enumeration(m in matrix()) {
            for r in 0..m.rows.len() {
                let fast = bd_chain(&m, r);
                let slow = bd_exhaustive(&m, r, None).unwrap();
                prop_assert_eq!(fast.is_some(), slow.is_some());
                if let Some(chain) = fast {
                    let cert = BDominanceCertificate {
                        player: 0, strategy: r, info_set: None,
                        opp_profiles: (0..m.num_cols()).map(|c| vec![c]).collect(),
                        chain,
                    };
                    for (mask, _) in slow.unwrap() {
                        let p: Vec<usize> = (0..m.num_cols()).filter(|&c| mask >> c & 1 == 1).collect();
                        let d = cert.dominator_for(&p).unwrap();
                        prop_assert!(weakly_dom_on(&m.ranks[d], &m.ranks[r], &p));
                        // singleton subsets: weak means strict
                        if p.len() == 1 {
                            prop_assert!(strictly_dom_on(&m.ranks[d], &m.ranks[r], &p));
                        }
                    }
                }
            }
        }

        #[test]
        fn dominance_chain(m in matrix()) {
            let all: Vec<usize> = (0..m.num_cols()).collect();
            for r in 0..m.rows.len() {
                let strict = (0..m.rows.len()).any(|d| strictly_dom_on(&m.ranks[d], &m.ranks[r], &all));
                let bd = bd_chain(&m, r).is_some();
                let weak = (0..m.rows.len()).any(|d| weakly_dom_on(&m.ranks[d], &m.ranks[r], &all));
                prop_assert!(!strict || bd);
                prop_assert!(!bd || weak);
            }
        }

        #[test]
        fn weak_dominance_is_a_strict_partial_order(m in matrix()) {
            let all: Vec<usize> = (0..m.num_cols()).collect();
            let n = m.rows.len();
            for a in 0..n {
                prop_assert!(!weakly_dom_on(&m.ranks[a], &m.ranks[a], &all));
                for b in 0..n {
                    for c in 0..n {
                        if weakly_dom_on(&m.ranks[a], &m.ranks[b], &all) && weakly_dom_on(&m.ranks[b], &m.ranks[c], &all) {
                            prop_assert!(weakly_dom_on(&m.ranks[a], &m.ranks[c], &all));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn converses_fail() {
        // B-dominated but not strictly dominated
        let m = RankMatrix {
            rows: vec![0, 1, 2],
            ranks: vec![vec![0, 1], vec![1, 0], vec![1, 1]],
        };
        let all = [0, 1];
        assert!(bd_chain(&m, 2).is_some());
        assert!(!(0..3).any(|d| strictly_dom_on(&m.ranks[d], &m.ranks[2], &all)));
        // weakly dominated but not B-dominated
        let m = RankMatrix {
            rows: vec![0, 1],
            ranks: vec![vec![0, 0], vec![0, 1]],
        };
        assert!(weakly_dom_on(&m.ranks[0], &m.ranks[1], &all));
        assert!(bd_chain(&m, 1).is_none());
    }
}
