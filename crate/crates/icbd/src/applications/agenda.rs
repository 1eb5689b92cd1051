//! Binary agendas decided by sequential majority voting.
//!
//! Every split of the agenda is put to a public roll-call vote: voters vote in
//! their listed order, each seeing all earlier votes, for one of the two
//! sub-agendas. The branch backed by a strict majority continues. The induced
//! game has perfect information, and its terminal histories are labelled by
//! the alternative finally selected.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::game::{classify_game, validate_game, Game, GameError, Tree};
use crate::io::format::{AgendaDocument, AgendaNodeDoc};
use crate::solvers::conditions::TdiPairViolation;
use crate::solvers::perfect_info::icbd_perfect_info;
use crate::solvers::{backward_induction, check_tdi_structural, SolverError};

/// Games with more histories than this are refused.
pub const MAX_HISTORIES: u64 = 1 << 22;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AgendaError {
    #[error("invalid agenda: {0}")]
    InvalidAgenda(String),
    #[error("majority voting needs an odd number of voters, got {0}")]
    EvenVoterCount(usize),
    #[error("the ranking of voter {voter} is not a strict order of the alternatives")]
    IndifferenceFound { voter: String },
    #[error("the induced game would have more than {MAX_HISTORIES} histories")]
    TooLarge,
    #[error("solution concepts disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A node of the agenda tree: the alternatives still available and either no
/// children (a single alternative) or exactly two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgendaNode {
    pub alternatives: BTreeSet<String>,
    pub children: Vec<AgendaNode>,
}

impl AgendaNode {
    pub fn leaf(alternative: &str) -> AgendaNode {
        AgendaNode {
            alternatives: BTreeSet::from([alternative.to_string()]),
            children: Vec::new(),
        }
    }

    pub fn split(left: AgendaNode, right: AgendaNode) -> AgendaNode {
        AgendaNode {
            alternatives: left.alternatives.union(&right.alternatives).cloned().collect(),
            children: vec![left, right],
        }
    }

    fn validate(&self) -> Result<(), AgendaError> {
        let bad = |m: String| Err(AgendaError::InvalidAgenda(m));
        let show = || self.alternatives.iter().join(",");
        match self.children.as_slice() {
            [] if self.alternatives.len() == 1 => Ok(()),
            [] => bad(format!("node {{{}}} has no children but several alternatives", show())),
            [l, r] => {
                let union: BTreeSet<String> = l.alternatives.union(&r.alternatives).cloned().collect();
                if union != self.alternatives {
                    return bad(format!("children of {{{}}} do not cover it exactly", show()));
                }
                if l.alternatives == r.alternatives {
                    return bad(format!("both children of {{{}}} offer the same alternatives", show()));
                }
                l.validate()?;
                r.validate()
            }
            _ => bad(format!("node {{{}}} does not have exactly two children", show())),
        }
    }

    /// Action label for voting in favour of this sub-agenda.
    fn ballot(&self) -> String {
        if self.alternatives.iter().all(|a| a.chars().count() == 1) {
            self.alternatives.iter().join("")
        } else {
            self.alternatives.iter().join("+")
        }
    }

    fn from_doc(doc: &AgendaNodeDoc) -> Result<AgendaNode, AgendaError> {
        let alternatives: BTreeSet<String> = doc.alternatives.iter().cloned().collect();
        if alternatives.len() != doc.alternatives.len() {
            return Err(AgendaError::InvalidAgenda("repeated alternative in a node".into()));
        }
        Ok(AgendaNode {
            alternatives,
            children: doc
                .children
                .iter()
                .map(AgendaNode::from_doc)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn to_doc(&self) -> AgendaNodeDoc {
        AgendaNodeDoc {
            alternatives: self.alternatives.iter().cloned().collect(),
            children: self.children.iter().map(AgendaNode::to_doc).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryAgenda {
    /// All alternatives, sorted.
    pub alternatives: Vec<String>,
    /// Voters in voting order.
    pub voters: Vec<String>,
    /// Strict rankings, best first, one per voter.
    pub voter_prefs: Vec<Vec<String>>,
    pub tree: AgendaNode,
}

fn check_profile(alternatives: &[String], voters: &[String], prefs: &[Vec<String>]) -> Result<(), AgendaError> {
    if voters.len().is_multiple_of(2) {
        return Err(AgendaError::EvenVoterCount(voters.len()));
    }
    if prefs.len() != voters.len() {
        return Err(AgendaError::InvalidAgenda("one ranking per voter is required".into()));
    }
    let all: BTreeSet<&String> = alternatives.iter().collect();
    for (v, p) in voters.iter().zip(prefs) {
        let listed: BTreeSet<&String> = p.iter().collect();
        if listed.len() != p.len() || listed != all {
            return Err(AgendaError::IndifferenceFound { voter: v.clone() });
        }
    }
    Ok(())
}

impl BinaryAgenda {
    pub fn new(
        voters: Vec<String>,
        voter_prefs: Vec<Vec<String>>,
        tree: AgendaNode,
    ) -> Result<BinaryAgenda, AgendaError> {
        let alternatives: Vec<String> = tree.alternatives.iter().cloned().collect();
        tree.validate()?;
        if voters.iter().collect::<BTreeSet<_>>().len() != voters.len() {
            return Err(AgendaError::InvalidAgenda("duplicate voter names".into()));
        }
        check_profile(&alternatives, &voters, &voter_prefs)?;
        Ok(BinaryAgenda {
            alternatives,
            voters,
            voter_prefs,
            tree,
        })
    }

    pub fn from_document(doc: &AgendaDocument) -> Result<BinaryAgenda, AgendaError> {
        let tree = AgendaNode::from_doc(&doc.agenda)?;
        if let Some(extra) = doc.preferences.keys().find(|k| !doc.voters.contains(k)) {
            return Err(AgendaError::InvalidAgenda(format!(
                "ranking given for unknown voter `{extra}`"
            )));
        }
        let prefs = doc
            .voters
            .iter()
            .map(|v| {
                doc.preferences
                    .get(v)
                    .cloned()
                    .ok_or_else(|| AgendaError::InvalidAgenda(format!("voter `{v}` has no ranking")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        BinaryAgenda::new(doc.voters.clone(), prefs, tree)
    }

    pub fn to_document(&self) -> AgendaDocument {
        AgendaDocument {
            format_version: crate::io::format::FORMAT_VERSION,
            voters: self.voters.clone(),
            preferences: self
                .voters
                .iter()
                .cloned()
                .zip(self.voter_prefs.iter().cloned())
                .collect(),
            agenda: self.tree.to_doc(),
        }
    }

    fn position(&self, voter: usize, alternative: &str) -> usize {
        self.voter_prefs[voter]
            .iter()
            .position(|a| a == alternative)
            .expect("validated ranking")
    }
}

/// Pairwise majority relation over the alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityRelation {
    pub alternatives: Vec<String>,
    /// `beats[a][b]`: a strict majority ranks `a` above `b`.
    pub beats: Vec<Vec<bool>>,
}

impl MajorityRelation {
    pub fn prefers(&self, a: &str, b: &str) -> bool {
        let ix = |x: &str| self.alternatives.iter().position(|y| y == x);
        match (ix(a), ix(b)) {
            (Some(p), Some(q)) => self.beats[p][q],
            _ => false,
        }
    }

    /// The alternative beating every other one, if any.
    pub fn condorcet_winner(&self) -> Option<&str> {
        let n = self.alternatives.len();
        (0..n)
            .find(|&a| (0..n).all(|b| a == b || self.beats[a][b]))
            .map(|a| self.alternatives[a].as_str())
    }
}

pub fn majority_relation(agenda: &BinaryAgenda) -> Result<MajorityRelation, AgendaError> {
    check_profile(&agenda.alternatives, &agenda.voters, &agenda.voter_prefs)?;
    let n = agenda.alternatives.len();
    let mut beats = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (x, y) = (&agenda.alternatives[a], &agenda.alternatives[b]);
            let support = (0..agenda.voters.len())
                .filter(|&v| agenda.position(v, x) < agenda.position(v, y))
                .count();
            beats[a][b] = 2 * support > agenda.voters.len();
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if beats[a][b] == beats[b][a] {
                return Err(AgendaError::Inconsistent("majority relation is not total".into()));
            }
        }
    }
    Ok(MajorityRelation {
        alternatives: agenda.alternatives.clone(),
        beats,
    })
}

fn binomial_tail(voters: usize) -> (u64, u64) {
    // (vote leaves won by the first option, vote leaves won by the second)
    let total = 1u64 << voters;
    let first = (0..total).filter(|m| 2 * m.count_ones() as usize > voters).count() as u64;
    (first, total - first)
}

fn history_count(node: &AgendaNode, voters: usize) -> u64 {
    match node.children.as_slice() {
        [l, r] => {
            let (w0, w1) = binomial_tail(voters);
            let inner = (1u64 << voters) - 1;
            inner
                .saturating_add(w0.saturating_mul(history_count(l, voters)))
                .saturating_add(w1.saturating_mul(history_count(r, voters)))
        }
        _ => 1,
    }
}

struct Builder<'a> {
    agenda: &'a BinaryAgenda,
    info_sets: usize,
}

impl Builder<'_> {
    fn split(&mut self, node: &AgendaNode) -> Tree {
        match node.children.as_slice() {
            [l, r] => self.vote(l, r, 0, 0),
            _ => Tree::leaf(node.alternatives.iter().next().expect("validated leaf")),
        }
    }

    /// Voter `v` is about to vote; `for_left` votes have gone to `l` so far.
    fn vote(&mut self, l: &AgendaNode, r: &AgendaNode, v: usize, for_left: usize) -> Tree {
        let n = self.agenda.voters.len();
        if v == n {
            return self.split(if 2 * for_left > n { l } else { r });
        }
        self.info_sets += 1;
        let voter = &self.agenda.voters[v];
        let info_set = format!("{voter}@{}", self.info_sets);
        let (bl, br) = (l.ballot(), r.ballot());
        let children = vec![self.vote(l, r, v + 1, for_left + 1), self.vote(l, r, v + 1, for_left)];
        Tree::choice(voter, &info_set, &[bl.as_str(), br.as_str()], children)
    }
}

/// The perfect-information voting game induced by an agenda.
pub fn agenda_to_game(agenda: &BinaryAgenda) -> Result<Game, AgendaError> {
    agenda.tree.validate()?;
    check_profile(&agenda.alternatives, &agenda.voters, &agenda.voter_prefs)?;
    if history_count(&agenda.tree, agenda.voters.len()) > MAX_HISTORIES {
        return Err(AgendaError::TooLarge);
    }
    let mut b = Builder { agenda, info_sets: 0 };
    let tree = b.split(&agenda.tree);
    let names: Vec<&str> = agenda.voters.iter().map(String::as_str).collect();
    let prefs = agenda
        .voter_prefs
        .iter()
        .map(|p| p.iter().map(|a| vec![a.clone()]).collect())
        .collect();
    Ok(validate_game(&tree.into_raw(&names, prefs))?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgendaAnalysis {
    /// Alternatives reachable under the ICBD fixpoint.
    pub icbd_alternatives: BTreeSet<String>,
    /// Alternatives reachable under backward induction.
    pub bi_alternatives: BTreeSet<String>,
    /// First failure of transference of decision-maker indifference, if any.
    pub tdi_violation: Option<TdiPairViolation>,
    pub perfect_information: bool,
    pub observable_actions: bool,
    pub iterations_to_fixpoint: usize,
}

pub fn analyse_agenda(agenda: &BinaryAgenda) -> Result<AgendaAnalysis, AgendaError> {
    let g = agenda_to_game(agenda)?;
    let class = classify_game(&g);
    let solved = icbd_perfect_info(&g)?;
    let bi = backward_induction(&g)?;
    let labels = |zs: &BTreeSet<usize>| zs.iter().map(|&z| g.label(z).to_string()).collect();
    Ok(AgendaAnalysis {
        icbd_alternatives: labels(&solved.outcomes),
        bi_alternatives: labels(&bi.outcomes),
        tdi_violation: check_tdi_structural(&g)?,
        perfect_information: class.perfect_information,
        observable_actions: class.observable_actions,
        iterations_to_fixpoint: solved.iterations_to_fixpoint,
    })
}

/// The alternative selected by sophisticated voting. Fails unless ICBD and
/// backward induction both select that single alternative and the game
/// satisfies TDI.
pub fn sophisticated_outcome(agenda: &BinaryAgenda) -> Result<String, AgendaError> {
    let a = analyse_agenda(agenda)?;
    if let Some(v) = &a.tdi_violation {
        return Err(AgendaError::Inconsistent(format!("TDI fails: {v:?}")));
    }
    if a.bi_alternatives.len() != 1 || a.icbd_alternatives != a.bi_alternatives {
        return Err(AgendaError::Inconsistent(format!(
            "ICBD selects {:?}, backward induction {:?}",
            a.icbd_alternatives, a.bi_alternatives
        )));
    }
    Ok(a.bi_alternatives.into_iter().next().expect("singleton"))
}

/// Every agenda tree over `alternatives` whose splits use proper nonempty
/// subsets; children are ordered, so mirrored trees count separately.
pub fn all_agendas(alternatives: &[String]) -> Vec<AgendaNode> {
    let set: BTreeSet<String> = alternatives.iter().cloned().collect();
    let mut memo = BTreeMap::new();
    agendas_over(&set, &mut memo)
}

fn agendas_over(set: &BTreeSet<String>, memo: &mut BTreeMap<BTreeSet<String>, Vec<AgendaNode>>) -> Vec<AgendaNode> {
    if let Some(v) = memo.get(set) {
        return v.clone();
    }
    let items: Vec<&String> = set.iter().collect();
    let out = if items.len() == 1 {
        vec![AgendaNode::leaf(items[0])]
    } else {
        let subsets: Vec<BTreeSet<String>> = items
            .iter()
            .copied()
            .powerset()
            .filter(|s| !s.is_empty() && s.len() < items.len())
            .map(|s| s.into_iter().cloned().collect())
            .collect();
        let mut out = Vec::new();
        for a in &subsets {
            for b in &subsets {
                if a == b || a.union(b).count() != items.len() {
                    continue;
                }
                let (la, lb) = (agendas_over(a, memo), agendas_over(b, memo));
                for (x, y) in la.iter().cartesian_product(&lb) {
                    out.push(AgendaNode::split(x.clone(), y.clone()));
                }
            }
        }
        out
    };
    memo.insert(set.clone(), out.clone());
    out
}

/// All profiles of strict rankings for `voters` voters.
pub fn all_strict_profiles(alternatives: &[String], voters: usize) -> Vec<Vec<Vec<String>>> {
    let orders: Vec<Vec<String>> = alternatives.iter().cloned().permutations(alternatives.len()).collect();
    (0..voters)
        .map(|_| orders.iter().cloned())
        .multi_cartesian_product()
        .collect()
}
