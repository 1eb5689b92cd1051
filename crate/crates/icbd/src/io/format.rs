//! JSON documents: games, utilities, restrictions, agendas and base games.
//!
//! All documents carry `format_version`, reject unknown fields and are written
//! with sorted keys. Rationals are strings `"p/q"` (or plain integers).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{validate_game, Game, GameError, RawMove, Tree};
use crate::rational::Rational;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveDoc {
    pub player: String,
    pub info_set: String,
    pub actions: Vec<String>,
}

/// A history. Terminals set `outcome`; decision nodes list `moves` and one
/// child per joint action profile in lexicographic order (the first listed
/// player's action is most significant, players ordered as in `players`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<MoveDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub format_version: u32,
    pub players: Vec<String>,
    /// Per player: indifference classes of outcome labels, best first.
    pub preferences: BTreeMap<String, Vec<Vec<String>>>,
    pub tree: NodeDoc,
}

fn parse_err(e: serde_json::Error) -> FormatError {
    FormatError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    }
}

pub(crate) fn schema(path: &str, msg: impl Into<String>) -> FormatError {
    FormatError::Schema {
        path: path.to_string(),
        msg: msg.into(),
    }
}

pub(crate) fn check_version(v: u32, path: &str) -> Result<(), FormatError> {
    if v != FORMAT_VERSION {
        return Err(schema(path, format!("unsupported format_version {v}")));
    }
    Ok(())
}

fn node_to_tree(n: &NodeDoc, path: &str) -> Result<Tree, FormatError> {
    match (&n.outcome, n.moves.is_empty()) {
        (Some(o), true) => {
            if !n.children.is_empty() {
                return Err(schema(path, "terminal node with children"));
            }
            Ok(Tree::Leaf(o.clone()))
        }
        (None, false) => {
            let children = n
                .children
                .iter()
                .enumerate()
                .map(|(k, c)| node_to_tree(c, &format!("{path}.children[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Tree::Node {
                name: n.name.clone(),
                movers: n
                    .moves
                    .iter()
                    .map(|m| RawMove {
                        player: m.player.clone(),
                        info_set: m.info_set.clone(),
                        actions: m.actions.clone(),
                    })
                    .collect(),
                children,
            })
        }
        (Some(_), false) => Err(schema(path, "node has both an outcome and moves")),
        (None, true) => Err(schema(path, "node has neither an outcome nor moves")),
    }
}

impl GameDocument {
    pub fn to_game(&self) -> Result<Game, FormatError> {
        check_version(self.format_version, "$.format_version")?;
        if self.players.is_empty() {
            return Err(schema("$.players", "empty players list"));
        }
        let mut prefs = Vec::new();
        for p in &self.players {
            let tiers = self
                .preferences
                .get(p)
                .ok_or_else(|| schema("$.preferences", format!("missing player `{p}`")))?;
            prefs.push(tiers.clone());
        }
        if let Some(extra) = self.preferences.keys().find(|k| !self.players.contains(k)) {
            return Err(schema("$.preferences", format!("unknown player `{extra}`")));
        }
        let tree = node_to_tree(&self.tree, "$.tree")?;
        let players: Vec<&str> = self.players.iter().map(|s| s.as_str()).collect();
        Ok(validate_game(&tree.into_raw(&players, prefs))?)
    }

    pub fn from_game(g: &Game) -> GameDocument {
        fn node(g: &Game, x: usize) -> NodeDoc {
            let h = g.history(x);
            if h.is_terminal() {
                return NodeDoc {
                    name: None,
                    outcome: Some(g.label(x).to_string()),
                    moves: Vec::new(),
                    children: Vec::new(),
                };
            }
            NodeDoc {
                name: Some(h.name.clone()),
                outcome: None,
                moves: h
                    .movers
                    .iter()
                    .map(|&s| {
                        let is = g.info_set(s);
                        MoveDoc {
                            player: g.players()[is.owner].clone(),
                            info_set: is.name.clone(),
                            actions: is.actions.clone(),
                        }
                    })
                    .collect(),
                children: h.children.iter().map(|&c| node(g, c)).collect(),
            }
        }
        let raw = g.to_raw();
        GameDocument {
            format_version: FORMAT_VERSION,
            players: g.players().to_vec(),
            preferences: g.players().iter().cloned().zip(raw.preferences).collect(),
            tree: node(g, g.root()),
        }
    }
}

/// Parse and validate a game document.
pub fn parse_game(text: &str) -> Result<Game, FormatError> {
    let doc: GameDocument = serde_json::from_str(text).map_err(parse_err)?;
    doc.to_game()
}

/// Canonical JSON text: sorted keys, two-space indentation, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered, so a round trip through Value sorts keys
    let v = serde_json::to_value(value).expect("serialisable document");
    let mut s = serde_json::to_string_pretty(&v).expect("serialisable value");
    s.push('\n');
    s
}

pub fn serialize_game(g: &Game) -> String {
    to_canonical_json(&GameDocument::from_game(g))
}

pub fn parse_doc<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(parse_err)
}

/// Format a rational as `p/q` (`p` when the denominator is one).
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    let bad = || schema("rational", format!("`{s}` is not of the form p/q"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Per-player utilities over outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitiesDocument {
    pub format_version: u32,
    pub utilities: BTreeMap<String, BTreeMap<String, String>>,
}

impl UtilitiesDocument {
    /// Utilities per player indexed by outcome label id.
    pub fn resolve(&self, g: &Game) -> Result<Vec<Vec<Rational>>, FormatError> {
        check_version(self.format_version, "$.format_version")?;
        let mut out = Vec::new();
        for p in g.players() {
            let table = self
                .utilities
                .get(p)
                .ok_or_else(|| schema("$.utilities", format!("missing player `{p}`")))?;
            let mut row = Vec::new();
            for lab in g.outcome_labels() {
                let v = table
                    .get(lab)
                    .ok_or_else(|| schema(&format!("$.utilities.{p}"), format!("missing outcome `{lab}`")))?;
                row.push(parse_rational(v)?);
            }
            if let Some(extra) = table.keys().find(|k| !g.outcome_labels().contains(k)) {
                return Err(schema(
                    &format!("$.utilities.{p}"),
                    format!("unknown outcome `{extra}`"),
                ));
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// A restriction given by strategy names per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDocument {
    pub format_version: u32,
    pub strategies: BTreeMap<String, Vec<String>>,
}

/// A binary agenda: nested splits of alternative sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgendaNodeDoc {
    pub alternatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<AgendaNodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgendaDocument {
    pub format_version: u32,
    /// Voters in voting order.
    pub voters: Vec<String>,
    /// Strict rankings, best first.
    pub preferences: BTreeMap<String, Vec<String>>,
    pub agenda: AgendaNodeDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseGameDocument {
    pub format_version: u32,
    pub actions_a: Vec<String>,
    pub actions_b: Vec<String>,
    /// Row-major matrices (rows: Ann's actions) of rationals.
    pub v_a: Vec<Vec<String>>,
    pub v_b: Vec<Vec<String>>,
    pub star: [String; 2],
}
