//! JSON documents for elimination traces, restrictions and rationality
//! certificates. Strategies, information sets and outcomes appear by name and
//! rationals as `"p/q"` strings. Every document converts back, so that
//! a stored trace or certificate can be re-verified against its game.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cardinal::{Cps, CpsEntry, MixedStrategy, UtilityFunction};
use crate::dominance::{BDominanceCertificate, ChainStep, DominanceKind, DominanceWitness, Scope};
use crate::game::{InfoSetId, PlayerId};
use crate::io::format::{
    check_version, fmt_rational, parse_rational, schema, FormatError, RestrictionDocument, FORMAT_VERSION,
};
use crate::solvers::{Elimination, EliminationTrace, Iteration, Reason};
use crate::strategies::{OppProfile, Restriction, StrategySpace};
use crate::witness::RationalityCertificate;

/// Strategy names per player.
pub type NamedRestriction = BTreeMap<String, Vec<String>>;
/// Opponent profile: strategy names of the other players, in player order.
pub type NamedProfile = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainStepDoc {
    /// Positions in `opp_profiles`.
    pub cols: Vec<usize>,
    pub dominator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReasonDoc {
    BDominance {
        info_set: Option<String>,
        opp_profiles: Vec<NamedProfile>,
        chain: Vec<ChainStepDoc>,
    },
    Pairwise {
        strength: DominanceKind,
        /// Information set name, or absent for the whole game.
        info_set: Option<String>,
        dominator: String,
        opp_profiles: Vec<NamedProfile>,
    },
    Mixed {
        info_set: String,
        dominator: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EliminationDoc {
    pub player: String,
    pub strategy: String,
    pub reason: ReasonDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationDoc {
    pub eliminated: Vec<EliminationDoc>,
    pub surviving: NamedRestriction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub format_version: u32,
    pub method: String,
    pub initial: NamedRestriction,
    pub iterations: Vec<IterationDoc>,
    pub fixpoint: NamedRestriction,
    pub outcomes: Vec<String>,
    /// Utilities the trace was computed with (needed to replay mixed dominance).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<BTreeMap<String, BTreeMap<String, String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureEntryDoc {
    pub profile: NamedProfile,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpsEntryDoc {
    pub info_sets: Vec<String>,
    pub event: Vec<NamedProfile>,
    pub measure: Vec<MeasureEntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub format_version: u32,
    pub player: String,
    pub strategy: String,
    pub cautious: bool,
    pub restriction: NamedRestriction,
    /// Utility per outcome label.
    pub utility: BTreeMap<String, String>,
    pub cps: Vec<CpsEntryDoc>,
}

/// Translation between indices and names for one strategy space.
pub struct Names<'a, 'g> {
    space: &'a StrategySpace<'g>,
}

impl<'a, 'g> Names<'a, 'g> {
    /// Fails when two strategies of a player print the same name.
    pub fn new(space: &'a StrategySpace<'g>) -> Result<Names<'a, 'g>, FormatError> {
        for i in 0..space.num_players() {
            let mut seen = BTreeMap::new();
            for s in 0..space.strategies[i].len() {
                if let Some(t) = seen.insert(space.name(i, s), s) {
                    return Err(schema(
                        "$",
                        format!("strategies {t} and {s} of {} share a name", space.game.players()[i]),
                    ));
                }
            }
        }
        Ok(Names { space })
    }

    fn player(&self, i: PlayerId) -> String {
        self.space.game.players()[i].clone()
    }

    fn player_index(&self, name: &str, path: &str) -> Result<PlayerId, FormatError> {
        self.space
            .game
            .player_index(name)
            .ok_or_else(|| schema(path, format!("unknown player `{name}`")))
    }

    fn strategy(&self, i: PlayerId, s: usize) -> String {
        self.space.name(i, s)
    }

    fn strategy_index(&self, i: PlayerId, name: &str, path: &str) -> Result<usize, FormatError> {
        self.space
            .find(i, name)
            .ok_or_else(|| schema(path, format!("unknown strategy `{name}` of {}", self.player(i))))
    }

    fn info_set(&self, h: InfoSetId) -> String {
        self.space.game.info_set(h).name.clone()
    }

    fn info_set_index(&self, name: &str, path: &str) -> Result<InfoSetId, FormatError> {
        self.space
            .game
            .info_sets()
            .iter()
            .position(|h| h.name == name)
            .ok_or_else(|| schema(path, format!("unknown information set `{name}`")))
    }

    pub fn restriction(&self, r: &Restriction) -> NamedRestriction {
        r.sets
            .iter()
            .enumerate()
            .map(|(i, set)| (self.player(i), set.iter().map(|&s| self.strategy(i, s)).collect()))
            .collect()
    }

    pub fn parse_restriction(&self, r: &NamedRestriction, path: &str) -> Result<Restriction, FormatError> {
        if let Some(p) = r.keys().find(|p| self.space.game.player_index(p).is_none()) {
            return Err(schema(path, format!("unknown player `{p}`")));
        }
        let sets = (0..self.space.num_players())
            .map(|i| {
                let p = self.player(i);
                let names = r.get(&p).ok_or_else(|| schema(path, format!("missing player `{p}`")))?;
                names
                    .iter()
                    .map(|n| self.strategy_index(i, n, &format!("{path}.{p}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Restriction::new(sets))
    }

    fn others(&self, i: PlayerId) -> Vec<PlayerId> {
        (0..self.space.num_players()).filter(|&j| j != i).collect()
    }

    fn profile(&self, i: PlayerId, y: &OppProfile) -> NamedProfile {
        self.others(i)
            .into_iter()
            .zip(y)
            .map(|(j, &s)| self.strategy(j, s))
            .collect()
    }

    fn parse_profile(&self, i: PlayerId, y: &NamedProfile, path: &str) -> Result<OppProfile, FormatError> {
        let others = self.others(i);
        if y.len() != others.len() {
            return Err(schema(path, "profile has the wrong number of strategies"));
        }
        others
            .into_iter()
            .zip(y)
            .map(|(j, n)| self.strategy_index(j, n, path))
            .collect()
    }

    fn profiles(&self, i: PlayerId, ys: &[OppProfile]) -> Vec<NamedProfile> {
        ys.iter().map(|y| self.profile(i, y)).collect()
    }

    fn parse_profiles(&self, i: PlayerId, ys: &[NamedProfile], path: &str) -> Result<Vec<OppProfile>, FormatError> {
        ys.iter().map(|y| self.parse_profile(i, y, path)).collect()
    }

    fn reason(&self, i: PlayerId, r: &Reason) -> ReasonDoc {
        match r {
            Reason::BDominance(c) => ReasonDoc::BDominance {
                info_set: c.info_set.map(|h| self.info_set(h)),
                opp_profiles: self.profiles(i, &c.opp_profiles),
                chain: c
                    .chain
                    .iter()
                    .map(|st| ChainStepDoc {
                        cols: st.cols.clone(),
                        dominator: self.strategy(i, st.dominator),
                    })
                    .collect(),
            },
            Reason::Pairwise(w) => ReasonDoc::Pairwise {
                strength: w.kind,
                info_set: match w.scope {
                    Scope::WholeGame => None,
                    Scope::InfoSet(h) => Some(self.info_set(h)),
                },
                dominator: self.strategy(i, w.dominator),
                opp_profiles: self.profiles(i, &w.opp_profiles),
            },
            Reason::Mixed { info_set, dominator } => ReasonDoc::Mixed {
                info_set: self.info_set(*info_set),
                dominator: dominator
                    .weights
                    .iter()
                    .map(|(&s, w)| (self.strategy(i, s), fmt_rational(w)))
                    .collect(),
            },
        }
    }

    fn parse_reason(&self, i: PlayerId, s: usize, r: &ReasonDoc, path: &str) -> Result<Reason, FormatError> {
        Ok(match r {
            ReasonDoc::BDominance {
                info_set,
                opp_profiles,
                chain,
            } => Reason::BDominance(BDominanceCertificate {
                player: i,
                strategy: s,
                info_set: info_set.as_deref().map(|h| self.info_set_index(h, path)).transpose()?,
                opp_profiles: self.parse_profiles(i, opp_profiles, path)?,
                chain: chain
                    .iter()
                    .map(|st| {
                        Ok(ChainStep {
                            cols: st.cols.clone(),
                            dominator: self.strategy_index(i, &st.dominator, path)?,
                        })
                    })
                    .collect::<Result<_, FormatError>>()?,
            }),
            ReasonDoc::Pairwise {
                strength,
                info_set,
                dominator,
                opp_profiles,
            } => Reason::Pairwise(DominanceWitness {
                player: i,
                dominated: s,
                dominator: self.strategy_index(i, dominator, path)?,
                kind: *strength,
                scope: match info_set {
                    None => Scope::WholeGame,
                    Some(h) => Scope::InfoSet(self.info_set_index(h, path)?),
                },
                opp_profiles: self.parse_profiles(i, opp_profiles, path)?,
            }),
            ReasonDoc::Mixed { info_set, dominator } => Reason::Mixed {
                info_set: self.info_set_index(info_set, path)?,
                dominator: MixedStrategy {
                    owner: i,
                    weights: dominator
                        .iter()
                        .map(|(n, w)| Ok((self.strategy_index(i, n, path)?, parse_rational(w)?)))
                        .collect::<Result<_, FormatError>>()?,
                },
            },
        })
    }

    pub fn utilities(&self, u: &[UtilityFunction]) -> BTreeMap<String, BTreeMap<String, String>> {
        u.iter().map(|f| (self.player(f.owner), self.utility(f))).collect()
    }

    fn utility(&self, f: &UtilityFunction) -> BTreeMap<String, String> {
        self.space
            .game
            .outcome_labels()
            .iter()
            .zip(&f.values)
            .map(|(l, v)| (l.clone(), fmt_rational(v)))
            .collect()
    }

    fn parse_utility(
        &self,
        i: PlayerId,
        table: &BTreeMap<String, String>,
        path: &str,
    ) -> Result<UtilityFunction, FormatError> {
        let labels = self.space.game.outcome_labels();
        if let Some(extra) = table.keys().find(|k| !labels.contains(k)) {
            return Err(schema(path, format!("unknown outcome `{extra}`")));
        }
        let values = labels
            .iter()
            .map(|l| {
                let v = table
                    .get(l)
                    .ok_or_else(|| schema(path, format!("missing outcome `{l}`")))?;
                parse_rational(v)
            })
            .collect::<Result<_, _>>()?;
        Ok(UtilityFunction { owner: i, values })
    }

    pub fn parse_utilities(
        &self,
        t: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Vec<UtilityFunction>, FormatError> {
        (0..self.space.num_players())
            .map(|i| {
                let p = self.player(i);
                let table = t
                    .get(&p)
                    .ok_or_else(|| schema("$.utilities", format!("missing player `{p}`")))?;
                self.parse_utility(i, table, &format!("$.utilities.{p}"))
            })
            .collect()
    }

    pub fn trace(
        &self,
        method: &str,
        trace: &EliminationTrace,
        fixpoint: &Restriction,
        outcomes: &[String],
        utilities: Option<&[UtilityFunction]>,
    ) -> TraceDocument {
        TraceDocument {
            format_version: FORMAT_VERSION,
            method: method.to_string(),
            initial: self.restriction(&trace.initial),
            iterations: trace
                .iterations
                .iter()
                .map(|it| IterationDoc {
                    eliminated: it
                        .eliminated
                        .iter()
                        .map(|e| EliminationDoc {
                            player: self.player(e.player),
                            strategy: self.strategy(e.player, e.strategy),
                            reason: self.reason(e.player, &e.reason),
                        })
                        .collect(),
                    surviving: self.restriction(&it.surviving),
                })
                .collect(),
            fixpoint: self.restriction(fixpoint),
            outcomes: outcomes.to_vec(),
            utilities: utilities.map(|u| self.utilities(u)),
        }
    }

    pub fn parse_trace(&self, doc: &TraceDocument) -> Result<EliminationTrace, FormatError> {
        check_version(doc.format_version, "$.format_version")?;
        let iterations = doc
            .iterations
            .iter()
            .enumerate()
            .map(|(k, it)| {
                let path = format!("$.iterations[{k}]");
                let eliminated = it
                    .eliminated
                    .iter()
                    .map(|e| {
                        let i = self.player_index(&e.player, &path)?;
                        let s = self.strategy_index(i, &e.strategy, &path)?;
                        Ok(Elimination {
                            player: i,
                            strategy: s,
                            reason: self.parse_reason(i, s, &e.reason, &path)?,
                        })
                    })
                    .collect::<Result<_, FormatError>>()?;
                Ok(Iteration {
                    eliminated,
                    surviving: self.parse_restriction(&it.surviving, &format!("{path}.surviving"))?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(EliminationTrace {
            initial: self.parse_restriction(&doc.initial, "$.initial")?,
            iterations,
        })
    }

    pub fn certificate(&self, c: &RationalityCertificate) -> CertificateDocument {
        let i = c.player;
        CertificateDocument {
            format_version: FORMAT_VERSION,
            player: self.player(i),
            strategy: self.strategy(i, c.strategy),
            cautious: c.cautious,
            restriction: self.restriction(&c.restriction),
            utility: self.utility(&c.utility),
            cps: c
                .cps
                .entries
                .iter()
                .map(|e| CpsEntryDoc {
                    info_sets: e.info_sets.iter().map(|&h| self.info_set(h)).collect(),
                    event: self.profiles(i, &e.event),
                    measure: e
                        .measure
                        .iter()
                        .map(|(y, w)| MeasureEntryDoc {
                            profile: self.profile(i, y),
                            weight: fmt_rational(w),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn parse_certificate(&self, doc: &CertificateDocument) -> Result<RationalityCertificate, FormatError> {
        check_version(doc.format_version, "$.format_version")?;
        let i = self.player_index(&doc.player, "$.player")?;
        let entries = doc
            .cps
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let path = format!("$.cps[{k}]");
                Ok(CpsEntry {
                    info_sets: e
                        .info_sets
                        .iter()
                        .map(|h| self.info_set_index(h, &path))
                        .collect::<Result<_, _>>()?,
                    event: self.parse_profiles(i, &e.event, &path)?,
                    measure: e
                        .measure
                        .iter()
                        .map(|m| Ok((self.parse_profile(i, &m.profile, &path)?, parse_rational(&m.weight)?)))
                        .collect::<Result<_, FormatError>>()?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(RationalityCertificate {
            player: i,
            strategy: self.strategy_index(i, &doc.strategy, "$.strategy")?,
            restriction: self.parse_restriction(&doc.restriction, "$.restriction")?,
            utility: self.parse_utility(i, &doc.utility, "$.utility")?,
            cps: Cps { owner: i, entries },
            cautious: doc.cautious,
        })
    }

    pub fn restriction_document(&self, r: &Restriction) -> RestrictionDocument {
        RestrictionDocument {
            format_version: FORMAT_VERSION,
            strategies: self.restriction(r),
        }
    }

    pub fn parse_restriction_document(&self, doc: &RestrictionDocument) -> Result<Restriction, FormatError> {
        check_version(doc.format_version, "$.format_version")?;
        self.parse_restriction(&doc.strategies, "$.strategies")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::{canonical_profile, profile_from_values};
    use crate::fixtures;
    use crate::io::format::{parse_doc, to_canonical_json};
    use crate::solvers::{icbd, icd, iterated_admissibility, outcome_labels};
    use crate::witness::{construct_sequential_witness, verify_certificate};

    #[test]
    fn icbd_trace_round_trip_replays() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let names = Names::new(&sp).unwrap();
        let res = icbd(&sp, &Restriction::full(&sp)).unwrap();
        let labels: Vec<String> = outcome_labels(&sp, &res.outcomes).into_iter().collect();
        let doc = names.trace("icbd", &res.trace, &res.fixpoint, &labels, None);
        let text = to_canonical_json(&doc);
        let back: TraceDocument = parse_doc(&text).unwrap();
        assert_eq!(back, doc);
        let trace = names.parse_trace(&back).unwrap();
        assert_eq!(trace, res.trace);
        assert!(trace.replay(&sp, None).is_empty());
        assert_eq!(doc.fixpoint["Ann"], vec!["IT".to_string()]);
    }

    #[test]
    fn mixed_and_pairwise_reasons_round_trip() {
        let g = fixtures::outside_tmd();
        let sp = StrategySpace::new(&g);
        let names = Names::new(&sp).unwrap();
        let u = profile_from_values(fixtures::outside_tmd_utilities(&g));
        let res = icd(&sp, &u, &Restriction::full(&sp)).unwrap();
        let doc = names.trace("icd", &res.trace, &res.fixpoint, &[], Some(&u));
        let trace = names.parse_trace(&doc).unwrap();
        assert_eq!(trace, res.trace);
        let u2 = names.parse_utilities(doc.utilities.as_ref().unwrap()).unwrap();
        assert!(trace.replay(&sp, Some(&u2)).is_empty());

        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let names = Names::new(&sp).unwrap();
        let res = iterated_admissibility(&sp).unwrap();
        let doc = names.trace("ia", &res.trace, &res.fixpoint, &[], Some(&canonical_profile(&g)));
        assert_eq!(names.parse_trace(&doc).unwrap(), res.trace);
    }

    #[test]
    fn certificate_round_trip_verifies() {
        let g = fixtures::centipede();
        let sp = StrategySpace::new(&g);
        let names = Names::new(&sp).unwrap();
        let full = Restriction::full(&sp);
        let s = sp.find(1, "DG").unwrap();
        let cert = construct_sequential_witness(&sp, 1, s, &full).unwrap();
        let doc = names.certificate(&cert);
        let back: CertificateDocument = parse_doc(&to_canonical_json(&doc)).unwrap();
        let parsed = names.parse_certificate(&back).unwrap();
        assert_eq!(parsed, cert);
        assert!(verify_certificate(&sp, &parsed).is_empty());
    }

    #[test]
    fn bad_names_are_schema_errors() {
        let g = fixtures::bos_outside();
        let sp = StrategySpace::new(&g);
        let names = Names::new(&sp).unwrap();
        let mut r = names.restriction(&Restriction::full(&sp));
        r.get_mut("Ann").unwrap().push("XX".into());
        assert!(matches!(
            names.parse_restriction(&r, "$"),
            Err(FormatError::Schema { .. })
        ));
        let doc = RestrictionDocument {
            format_version: 9,
            strategies: names.restriction(&Restriction::full(&sp)),
        };
        assert!(names.parse_restriction_document(&doc).is_err());
    }
}
