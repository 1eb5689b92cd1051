//! Brute-force re-derivation of the dominance notions from their definitions.
//!
//! The oracle shares only the game model and the strategy enumeration with the
//! solvers. Reachability, outcomes and conditional problems are recomputed
//! here by walking the tree, and B-dominance is decided by enumerating every
//! nonempty set of opponent profiles. Nothing is pruned or cached. The
//! implementation under test is a [`Subject`], so that tests can inject
//! faults.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dominance::{admissible_set, b_dominated_set};
use crate::game::{HistoryId, InfoSetId, PlayerId};
use crate::solvers::u_operator;
use crate::strategies::{product, ConditionalProblem, OppProfile, Restriction, StrategySpace};
use crate::witness::{construct_sequential_witness, verify_certificate, RationalityCertificate, WitnessError};

/// Largest opponent side `|R_{-i}(h)|` the oracle will enumerate subsets of.
pub const ORACLE_CAP: usize = 12;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle size cap: {0}")]
    SizeCap(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleLevel {
    /// B-dominated sets at every conditional problem and admissible sets,
    /// along the oracle's own elimination path.
    Dominance,
    /// One application of the conditional B-dominance operator, along the
    /// oracle's own elimination path up to its fixpoint.
    IcbdStep,
    /// Survivors admit a verifying rationality certificate; non-survivors
    /// are refused by the certificate construction.
    Theorem31,
}

/// The implementation being checked.
#[derive(Clone, Copy)]
pub struct Subject {
    pub b_dominated: fn(&StrategySpace, &ConditionalProblem) -> BTreeSet<usize>,
    pub admissible: fn(&StrategySpace, PlayerId, &Restriction) -> Vec<usize>,
    pub u_operator: fn(&StrategySpace, &Restriction) -> Restriction,
    pub witness: fn(&StrategySpace, PlayerId, usize, &Restriction) -> Result<RationalityCertificate, WitnessError>,
}

fn production_b_dominated(space: &StrategySpace, p: &ConditionalProblem) -> BTreeSet<usize> {
    b_dominated_set(space, p)
        .map(|m| m.into_keys().collect())
        .unwrap_or_default()
}

impl Subject {
    pub fn production() -> Subject {
        Subject {
            b_dominated: production_b_dominated,
            admissible: admissible_set,
            u_operator,
            witness: construct_sequential_witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    /// Index of the restriction on the oracle's path (0 is the input).
    pub round: usize,
    pub player: PlayerId,
    pub info_set: Option<InfoSetId>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub level: OracleLevel,
    /// Restrictions examined.
    pub rounds: usize,
    /// Individual comparisons made.
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

struct Oracle<'a, 'g> {
    space: &'a StrategySpace<'g>,
}

impl Oracle<'_, '_> {
    /// Does strategy `s` of `j` take `j`'s actions on the path to `x`?
    fn on_path(&self, j: PlayerId, s: usize, x: HistoryId) -> bool {
        let g = self.space.game;
        let plan = &self.space.strategies[j][s].choices;
        let mut y = x;
        while let Some(parent) = g.history(y).parent {
            for &(p, a) in &g.history(y).incoming {
                if p == j {
                    let h = g.mover_set(parent, j).expect("mover on the edge");
                    if plan[g.local_index(h)] != Some(a) {
                        return false;
                    }
                }
            }
            y = parent;
        }
        true
    }

    fn outcome(&self, profile: &[usize]) -> HistoryId {
        let g = self.space.game;
        let mut x = g.root();
        while !g.history(x).is_terminal() {
            x = g.child(x, |h| {
                let j = g.info_set(h).owner;
                self.space.strategies[j][profile[j]].choices[g.local_index(h)].expect("plan covers reached sets")
            });
        }
        x
    }

    fn problem(&self, h: InfoSetId, r: &Restriction) -> ConditionalProblem {
        let g = self.space.game;
        let i = g.info_set(h).owner;
        let members = &g.info_set(h).members;
        let own = r.sets[i]
            .iter()
            .copied()
            .filter(|&s| members.iter().any(|&x| self.on_path(i, s, x)))
            .collect();
        let others: Vec<Vec<usize>> = (0..r.sets.len())
            .filter(|&j| j != i)
            .map(|j| r.sets[j].clone())
            .collect();
        let opp = product(&others)
            .into_iter()
            .filter(|y| {
                members.iter().any(|&x| {
                    (0..r.sets.len())
                        .filter(|&j| j != i)
                        .zip(y)
                        .all(|(j, &s)| self.on_path(j, s, x))
                })
            })
            .collect();
        ConditionalProblem {
            owner: i,
            info_set: h,
            own,
            opp,
        }
    }

    fn rank(&self, i: PlayerId, s: usize, y: &OppProfile) -> u32 {
        let mut full = y.clone();
        full.insert(i, s);
        self.space.game.rank(i, self.outcome(&full))
    }

    /// `d` is at least as good as `s` on every profile of `q` and better on one.
    fn weakly_dominates(&self, i: PlayerId, d: usize, s: usize, q: &[&OppProfile]) -> bool {
        let mut strict = false;
        for y in q {
            let (a, b) = (self.rank(i, d, y), self.rank(i, s, y));
            if a > b {
                return false;
            }
            strict |= a < b;
        }
        strict
    }

    /// `None` if `s` is B-dominated on the problem, else a smallest set of
    /// opponent profiles on which no own strategy weakly dominates it.
    fn b_undominated_on(&self, p: &ConditionalProblem, s: usize) -> Result<Option<Vec<OppProfile>>, OracleError> {
        let n = p.opp.len();
        if n > ORACLE_CAP {
            return Err(OracleError::SizeCap(format!(
                "{n} opponent profiles reach information set {} (cap {ORACLE_CAP})",
                self.space.game.info_set(p.info_set).name
            )));
        }
        let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in masks {
            let q: Vec<&OppProfile> = (0..n).filter(|&c| mask >> c & 1 == 1).map(|c| &p.opp[c]).collect();
            if !p.own.iter().any(|&d| self.weakly_dominates(p.owner, d, s, &q)) {
                return Ok(Some(q.into_iter().cloned().collect()));
            }
        }
        Ok(None)
    }

    fn nonempty(&self, h: InfoSetId, r: &Restriction) -> Option<ConditionalProblem> {
        let p = self.problem(h, r);
        (!p.own.is_empty() && !p.opp.is_empty()).then_some(p)
    }

    /// `U(R)` from the definition.
    fn u_step(&self, r: &Restriction) -> Result<Restriction, OracleError> {
        let g = self.space.game;
        let mut sets = r.sets.clone();
        for (i, set) in sets.iter_mut().enumerate() {
            let mut dead = BTreeSet::new();
            for &h in g.own_info_sets(i) {
                let Some(p) = self.nonempty(h, r) else { continue };
                for &s in &p.own {
                    if self.b_undominated_on(&p, s)?.is_none() {
                        dead.insert(s);
                    }
                }
            }
            set.retain(|s| !dead.contains(s));
        }
        Ok(Restriction::new(sets))
    }

    fn admissible(&self, i: PlayerId, r: &Restriction) -> Vec<usize> {
        let others: Vec<Vec<usize>> = (0..r.sets.len())
            .filter(|&j| j != i)
            .map(|j| r.sets[j].clone())
            .collect();
        let all = product(&others);
        let q: Vec<&OppProfile> = all.iter().collect();
        r.sets[i]
            .iter()
            .copied()
            .filter(|&s| !r.sets[i].iter().any(|&d| self.weakly_dominates(i, d, s, &q)))
            .collect()
    }

    fn names(&self, i: PlayerId, xs: &BTreeSet<usize>) -> String {
        let v: Vec<String> = xs.iter().map(|&s| self.space.name(i, s)).collect();
        format!("{{{}}}", v.join(", "))
    }

    fn profiles(&self, i: PlayerId, q: &[OppProfile]) -> String {
        let n = self.space.num_players();
        let v: Vec<String> = q
            .iter()
            .map(|y| {
                let parts: Vec<String> = (0..n)
                    .filter(|&j| j != i)
                    .zip(y)
                    .map(|(j, &s)| self.space.name(j, s))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        format!("{{{}}}", v.join(", "))
    }
}

pub fn oracle_check(space: &StrategySpace, r: &Restriction, level: OracleLevel) -> Result<OracleReport, OracleError> {
    oracle_check_with(space, r, level, &Subject::production())
}

pub fn oracle_check_with(
    space: &StrategySpace,
    r: &Restriction,
    level: OracleLevel,
    subject: &Subject,
) -> Result<OracleReport, OracleError> {
    let o = Oracle { space };
    let mut report = OracleReport {
        level,
        rounds: 0,
        checks: 0,
        mismatches: Vec::new(),
    };
    match level {
        OracleLevel::Dominance | OracleLevel::IcbdStep => {
            let mut cur = r.clone();
            loop {
                let round = report.rounds;
                report.rounds += 1;
                let next = o.u_step(&cur)?;
                if level == OracleLevel::Dominance {
                    check_dominance(&o, &cur, round, subject, &mut report)?;
                } else {
                    report.checks += 1;
                    let got = (subject.u_operator)(space, &cur);
                    for i in 0..space.num_players() {
                        let want: BTreeSet<usize> = next.sets[i].iter().copied().collect();
                        let have: BTreeSet<usize> = got.sets[i].iter().copied().collect();
                        if want != have {
                            report.mismatches.push(Mismatch {
                                round,
                                player: i,
                                info_set: None,
                                detail: format!(
                                    "operator keeps {}, definition keeps {}",
                                    o.names(i, &have),
                                    o.names(i, &want)
                                ),
                            });
                        }
                    }
                }
                if next == cur || !next.is_valid() {
                    break;
                }
                cur = next;
            }
        }
        OracleLevel::Theorem31 => check_theorem31(&o, r, subject, &mut report)?,
    }
    Ok(report)
}

fn check_dominance(
    o: &Oracle,
    r: &Restriction,
    round: usize,
    subject: &Subject,
    report: &mut OracleReport,
) -> Result<(), OracleError> {
    let space = o.space;
    let g = space.game;
    for i in 0..space.num_players() {
        report.checks += 1;
        let want: BTreeSet<usize> = o.admissible(i, r).into_iter().collect();
        let have: BTreeSet<usize> = (subject.admissible)(space, i, r).into_iter().collect();
        if want != have {
            report.mismatches.push(Mismatch {
                round,
                player: i,
                info_set: None,
                detail: format!("admissible set {} should be {}", o.names(i, &have), o.names(i, &want)),
            });
        }
        for &h in g.own_info_sets(i) {
            let Some(p) = o.nonempty(h, r) else { continue };
            report.checks += 1;
            let have = (subject.b_dominated)(space, &p);
            for &s in &p.own {
                let undominated = o.b_undominated_on(&p, s)?;
                let detail = match (&undominated, have.contains(&s)) {
                    (Some(q), true) => format!(
                        "{} reported B-dominated, but nothing weakly dominates it on {}",
                        space.name(i, s),
                        o.profiles(i, q)
                    ),
                    (None, false) => format!(
                        "{} reported not B-dominated, but every nonempty set of the {} reaching profiles has a weak dominator",
                        space.name(i, s),
                        p.opp.len()
                    ),
                    _ => continue,
                };
                report.mismatches.push(Mismatch {
                    round,
                    player: i,
                    info_set: Some(h),
                    detail,
                });
            }
        }
    }
    Ok(())
}

fn check_theorem31(
    o: &Oracle,
    r: &Restriction,
    subject: &Subject,
    report: &mut OracleReport,
) -> Result<(), OracleError> {
    let space = o.space;
    report.rounds = 1;
    let survivors = o.u_step(r)?;
    for i in 0..space.num_players() {
        for &s in &r.sets[i] {
            report.checks += 1;
            let survives = survivors.contains(i, s);
            let detail = match ((subject.witness)(space, i, s, r), survives) {
                (Ok(cert), true) => {
                    let problems = verify_certificate(space, &cert);
                    if problems.is_empty() {
                        continue;
                    }
                    format!(
                        "certificate for {} does not verify: {}",
                        space.name(i, s),
                        problems.join("; ")
                    )
                }
                (Err(e), true) => format!("{} survives but no certificate was built: {e}", space.name(i, s)),
                (Err(WitnessError::HypothesisViolated { .. }), false) => continue,
                (Err(e), false) => format!(
                    "{} is eliminated but was refused for another reason: {e}",
                    space.name(i, s)
                ),
                (Ok(_), false) => format!("{} is eliminated yet a certificate was produced", space.name(i, s)),
            };
            report.mismatches.push(Mismatch {
                round: 0,
                player: i,
                info_set: None,
                detail,
            });
        }
    }
    Ok(())
}
