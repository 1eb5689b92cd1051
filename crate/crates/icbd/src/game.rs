//! Finite dynamic games with ordinal preferences.
//!
//! A game is an arborescence of histories. At every non-terminal history one or
//! more players are active and choose simultaneously; edges are labelled by
//! joint action profiles. Terminal histories carry an outcome label and every
//! player ranks outcome labels (rank 0 is best, equal ranks are indifferent).

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

pub type PlayerId = usize;
pub type HistoryId = usize;
pub type InfoSetId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("the parent relation has a cycle through history `{0}`")]
    CycleInTree(String),
    #[error("information set `{info_set}` of {player}: {detail}")]
    InfoSetActionMismatch {
        player: String,
        info_set: String,
        detail: String,
    },
    #[error("information set `{info_set}` of {player} violates perfect recall")]
    PerfectRecallViolation { player: String, info_set: String },
    #[error("dangling history `{0}`")]
    DanglingHistory(String),
    #[error("preferences of {player}: {detail}")]
    PreferenceDomainMismatch { player: String, detail: String },
    #[error("malformed game: {0}")]
    Malformed(String),
    #[error("the two histories coincide")]
    SameHistory,
    #[error("history {0} is not terminal")]
    NotTerminal(HistoryId),
}

/// One move record of a raw (unvalidated) history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMove {
    pub player: String,
    pub info_set: String,
    pub actions: Vec<String>,
}

/// A history in flat form: `via` is the joint action profile on the edge from
/// the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawNode {
    pub id: String,
    pub parent: Option<String>,
    pub via: Vec<(String, String)>,
    pub movers: Vec<RawMove>,
    pub outcome: Option<String>,
}

/// Unvalidated game description. `preferences[i]` lists indifference classes
/// of outcome labels for player `i`, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGame {
    pub players: Vec<String>,
    pub nodes: Vec<RawNode>,
    pub preferences: Vec<Vec<Vec<String>>>,
}

/// Nested tree description, handy for building games in code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(String),
    /// Movers (player, info set, actions) and one child per joint profile,
    /// in lexicographic order with the lowest-indexed player most significant.
    Node {
        name: Option<String>,
        movers: Vec<RawMove>,
        children: Vec<Tree>,
    },
}

impl Tree {
    pub fn leaf(outcome: &str) -> Tree {
        Tree::Leaf(outcome.to_string())
    }

    /// A single-mover decision node.
    pub fn choice(player: &str, info_set: &str, actions: &[&str], children: Vec<Tree>) -> Tree {
        Tree::Node {
            name: None,
            movers: vec![mv(player, info_set, actions)],
            children,
        }
    }

    pub fn joint(movers: Vec<RawMove>, children: Vec<Tree>) -> Tree {
        Tree::Node {
            name: None,
            movers,
            children,
        }
    }

    pub fn into_raw(self, players: &[&str], preferences: Vec<Vec<Vec<String>>>) -> RawGame {
        let mut nodes = Vec::new();
        flatten(self, None, Vec::new(), "r".to_string(), &mut nodes);
        RawGame {
            players: players.iter().map(|p| p.to_string()).collect(),
            nodes,
            preferences,
        }
    }
}

pub fn mv(player: &str, info_set: &str, actions: &[&str]) -> RawMove {
    RawMove {
        player: player.to_string(),
        info_set: info_set.to_string(),
        actions: actions.iter().map(|a| a.to_string()).collect(),
    }
}

/// Preference tiers from a compact string such as `"z2 > z1 > z5 > z3 = z4"`.
pub fn tiers(spec: &str) -> Vec<Vec<String>> {
    spec.split('>')
        .map(|tier| tier.split('=').map(|s| s.trim().to_string()).collect())
        .collect()
}

fn flatten(tree: Tree, parent: Option<String>, via: Vec<(String, String)>, id: String, out: &mut Vec<RawNode>) {
    match tree {
        Tree::Leaf(outcome) => out.push(RawNode {
            id,
            parent,
            via,
            movers: Vec::new(),
            outcome: Some(outcome),
        }),
        Tree::Node { name, movers, children } => {
            let id = name.unwrap_or(id);
            let profiles = joint_profiles(&movers);
            out.push(RawNode {
                id: id.clone(),
                parent,
                via,
                movers: movers.clone(),
                outcome: None,
            });
            for (k, child) in children.into_iter().enumerate() {
                let via = profiles.get(k).cloned().unwrap_or_default();
                flatten(child, Some(id.clone()), via, format!("{id}.{k}"), out);
            }
        }
    }
}

fn joint_profiles(movers: &[RawMove]) -> Vec<Vec<(String, String)>> {
    let mut acc: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for m in movers {
        let mut next = Vec::new();
        for prefix in &acc {
            for a in &m.actions {
                let mut p = prefix.clone();
                p.push((m.player.clone(), a.clone()));
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub id: HistoryId,
    pub name: String,
    pub parent: Option<HistoryId>,
    /// (player, action index) pairs on the incoming edge.
    pub incoming: Vec<(PlayerId, usize)>,
    /// Information sets of the active players, sorted by owner.
    pub movers: Vec<InfoSetId>,
    pub children: Vec<HistoryId>,
    /// Index into the outcome-label table; `Some` exactly for terminals.
    pub outcome: Option<usize>,
    pub depth: usize,
}

impl History {
    pub fn is_terminal(&self) -> bool {
        self.outcome.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    pub id: InfoSetId,
    pub name: String,
    pub owner: PlayerId,
    pub members: Vec<HistoryId>,
    pub actions: Vec<String>,
}

/// A validated dynamic game. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    players: Vec<String>,
    histories: Vec<History>,
    info_sets: Vec<InfoSet>,
    labels: Vec<String>,
    ranks: Vec<Vec<u32>>,
    own_sets: Vec<Vec<InfoSetId>>,
    local: Vec<usize>,
    signature: Vec<Vec<Vec<(InfoSetId, usize)>>>,
    terminals: Vec<HistoryId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub observable_actions: bool,
    pub perfect_information: bool,
}

/// Validate a raw description and assign dense ids in depth-first order.
pub fn validate_game(raw: &RawGame) -> Result<Game, GameError> {
    let players = raw.players.clone();
    if players.is_empty() {
        return Err(GameError::Malformed("no players".into()));
    }
    let pindex: HashMap<&str, usize> = players.iter().enumerate().map(|(k, p)| (p.as_str(), k)).collect();
    if pindex.len() != players.len() {
        return Err(GameError::Malformed("duplicate player names".into()));
    }

    let mut by_id: HashMap<&str, usize> = HashMap::new();
    for (k, n) in raw.nodes.iter().enumerate() {
        if by_id.insert(n.id.as_str(), k).is_some() {
            return Err(GameError::Malformed(format!("duplicate history id `{}`", n.id)));
        }
    }
    let mut roots = Vec::new();
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); raw.nodes.len()];
    for (k, n) in raw.nodes.iter().enumerate() {
        match &n.parent {
            None => roots.push(k),
            Some(p) => match by_id.get(p.as_str()) {
                Some(&pk) => kids[pk].push(k),
                None => return Err(GameError::DanglingHistory(n.id.clone())),
            },
        }
    }
    if roots.len() != 1 {
        // no root at all means every node sits on a parent cycle
        if roots.is_empty() {
            let first = raw.nodes.first().map(|n| n.id.clone()).unwrap_or_default();
            return Err(GameError::CycleInTree(first));
        }
        return Err(GameError::Malformed(format!("{} roots", roots.len())));
    }
    // every node must be reachable from the root; the rest sit on cycles
    let mut seen = vec![false; raw.nodes.len()];
    let mut stack = vec![roots[0]];
    while let Some(k) = stack.pop() {
        seen[k] = true;
        stack.extend(kids[k].iter().copied());
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(GameError::CycleInTree(raw.nodes[k].id.clone()));
    }

    // (player, info set name) -> dense id
    let mut iset_ids: HashMap<(usize, &str), usize> = HashMap::new();
    let mut info_sets: Vec<InfoSet> = Vec::new();
    let mut histories: Vec<History> = Vec::new();
    let mut label_ids: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();

    // iterative DFS preserving canonical child order
    struct Frame {
        raw: usize,
        parent: Option<usize>,
        incoming: Vec<(usize, usize)>,
        depth: usize,
    }
    let mut stack = vec![Frame {
        raw: roots[0],
        parent: None,
        incoming: Vec::new(),
        depth: 0,
    }];
    while let Some(fr) = stack.pop() {
        let node = &raw.nodes[fr.raw];
        let id = histories.len();
        if let Some(p) = fr.parent {
            histories[p].children.push(id);
        }
        if let Some(label) = &node.outcome {
            if !node.movers.is_empty() || !kids[fr.raw].is_empty() {
                return Err(GameError::Malformed(format!(
                    "terminal history `{}` has moves or children",
                    node.id
                )));
            }
            let l = *label_ids.entry(label.as_str()).or_insert_with(|| {
                labels.push(label.clone());
                labels.len() - 1
            });
            histories.push(History {
                id,
                name: node.id.clone(),
                parent: fr.parent,
                incoming: fr.incoming,
                movers: Vec::new(),
                children: Vec::new(),
                outcome: Some(l),
                depth: fr.depth,
            });
            continue;
        }
        if node.movers.is_empty() {
            return Err(GameError::DanglingHistory(node.id.clone()));
        }
        let mut movers: Vec<(usize, &RawMove)> = Vec::new();
        for m in &node.movers {
            let p = *pindex
                .get(m.player.as_str())
                .ok_or_else(|| GameError::Malformed(format!("unknown player `{}`", m.player)))?;
            if movers.iter().any(|(q, _)| *q == p) {
                return Err(GameError::Malformed(format!(
                    "player `{}` moves twice at `{}`",
                    m.player, node.id
                )));
            }
            if m.actions.is_empty() {
                return Err(GameError::InfoSetActionMismatch {
                    player: m.player.clone(),
                    info_set: m.info_set.clone(),
                    detail: "empty action list".into(),
                });
            }
            let uniq: HashSet<&String> = m.actions.iter().collect();
            if uniq.len() != m.actions.len() {
                return Err(GameError::InfoSetActionMismatch {
                    player: m.player.clone(),
                    info_set: m.info_set.clone(),
                    detail: "duplicate action labels".into(),
                });
            }
            movers.push((p, m));
        }
        movers.sort_by_key(|(p, _)| *p);
        let mut mover_sets = Vec::new();
        for (p, m) in &movers {
            let key = (*p, m.info_set.as_str());
            let hid = match iset_ids.get(&key) {
                Some(&h) => {
                    if info_sets[h].actions != m.actions {
                        return Err(GameError::InfoSetActionMismatch {
                            player: m.player.clone(),
                            info_set: m.info_set.clone(),
                            detail: format!("history `{}` offers different actions", node.id),
                        });
                    }
                    h
                }
                None => {
                    let h = info_sets.len();
                    iset_ids.insert(key, h);
                    info_sets.push(InfoSet {
                        id: h,
                        name: m.info_set.clone(),
                        owner: *p,
                        members: Vec::new(),
                        actions: m.actions.clone(),
                    });
                    h
                }
            };
            info_sets[hid].members.push(id);
            mover_sets.push(hid);
        }
        // match raw children to joint profiles
        let counts: Vec<usize> = movers.iter().map(|(_, m)| m.actions.len()).collect();
        let total: usize = counts.iter().product();
        let mut slot: Vec<Option<usize>> = vec![None; total];
        for &c in &kids[fr.raw] {
            let child = &raw.nodes[c];
            if child.via.len() != movers.len() {
                return Err(GameError::Malformed(format!(
                    "edge into `{}` does not name one action per active player",
                    child.id
                )));
            }
            let mut idx = 0;
            for (p, m) in &movers {
                let a = child
                    .via
                    .iter()
                    .find(|(q, _)| pindex.get(q.as_str()) == Some(p))
                    .and_then(|(_, a)| m.actions.iter().position(|x| x == a))
                    .ok_or_else(|| GameError::InfoSetActionMismatch {
                        player: m.player.clone(),
                        info_set: m.info_set.clone(),
                        detail: format!("edge into `{}` uses an unknown action", child.id),
                    })?;
                idx = idx * m.actions.len() + a;
            }
            if slot[idx].replace(c).is_some() {
                return Err(GameError::Malformed(format!(
                    "two children of `{}` share a joint profile",
                    node.id
                )));
            }
        }
        if slot.iter().any(|s| s.is_none()) {
            return Err(GameError::DanglingHistory(node.id.clone()));
        }
        histories.push(History {
            id,
            name: node.id.clone(),
            parent: fr.parent,
            incoming: fr.incoming,
            movers: mover_sets,
            children: Vec::new(),
            outcome: None,
            depth: fr.depth,
        });
        for idx in (0..total).rev() {
            let mut rest = idx;
            let mut incoming = vec![(0, 0); movers.len()];
            for k in (0..movers.len()).rev() {
                incoming[k] = (movers[k].0, rest % counts[k]);
                rest /= counts[k];
            }
            stack.push(Frame {
                raw: slot[idx].unwrap(),
                parent: Some(id),
                incoming,
                depth: fr.depth + 1,
            });
        }
    }

    // preferences
    if raw.preferences.len() != players.len() {
        return Err(GameError::PreferenceDomainMismatch {
            player: String::new(),
            detail: format!(
                "{} preference lists for {} players",
                raw.preferences.len(),
                players.len()
            ),
        });
    }
    let mut ranks = vec![vec![0u32; labels.len()]; players.len()];
    for (p, tiers) in raw.preferences.iter().enumerate() {
        let mut assigned = vec![false; labels.len()];
        for (r, tier) in tiers.iter().enumerate() {
            for lab in tier {
                let l = *label_ids
                    .get(lab.as_str())
                    .ok_or_else(|| GameError::PreferenceDomainMismatch {
                        player: players[p].clone(),
                        detail: format!("unknown outcome `{lab}`"),
                    })?;
                if assigned[l] {
                    return Err(GameError::PreferenceDomainMismatch {
                        player: players[p].clone(),
                        detail: format!("outcome `{lab}` ranked twice"),
                    });
                }
                assigned[l] = true;
                ranks[p][l] = r as u32;
            }
        }
        if let Some(l) = assigned.iter().position(|a| !a) {
            return Err(GameError::PreferenceDomainMismatch {
                player: players[p].clone(),
                detail: format!("outcome `{}` not ranked", labels[l]),
            });
        }
    }
    // normalise ranks to 0..k without gaps (empty tiers are tolerated)
    for row in ranks.iter_mut() {
        let mut vals: Vec<u32> = row.clone();
        vals.sort_unstable();
        vals.dedup();
        for r in row.iter_mut() {
            *r = vals.binary_search(r).unwrap() as u32;
        }
    }

    let n = players.len();
    let mut own_sets = vec![Vec::new(); n];
    let mut local = vec![0; info_sets.len()];
    for h in &info_sets {
        local[h.id] = own_sets[h.owner].len();
        own_sets[h.owner].push(h.id);
    }

    // own (info set, action) path signatures
    let mut signature = vec![vec![Vec::new(); n]; histories.len()];
    for x in 1..histories.len() {
        let p = histories[x].parent.unwrap();
        let mut sig = signature[p].clone();
        for &(pl, a) in &histories[x].incoming {
            let h = *histories[p].movers.iter().find(|&&h| info_sets[h].owner == pl).unwrap();
            sig[pl].push((h, a));
        }
        signature[x] = sig;
    }
    for h in &info_sets {
        let first = &signature[h.members[0]][h.owner];
        if h.members.iter().any(|&x| &signature[x][h.owner] != first) {
            return Err(GameError::PerfectRecallViolation {
                player: players[h.owner].clone(),
                info_set: h.name.clone(),
            });
        }
    }

    let terminals = histories.iter().filter(|x| x.is_terminal()).map(|x| x.id).collect();
    Ok(Game {
        players,
        histories,
        info_sets,
        labels,
        ranks,
        own_sets,
        local,
        signature,
        terminals,
    })
}

impl Game {
    pub fn players(&self) -> &[String] {
        &self.players
    }
    pub fn num_players(&self) -> usize {
        self.players.len()
    }
    pub fn player_index(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|p| p == name)
    }
    pub fn histories(&self) -> &[History] {
        &self.histories
    }
    pub fn history(&self, x: HistoryId) -> &History {
        &self.histories[x]
    }
    pub fn root(&self) -> HistoryId {
        0
    }
    pub fn info_sets(&self) -> &[InfoSet] {
        &self.info_sets
    }
    pub fn info_set(&self, h: InfoSetId) -> &InfoSet {
        &self.info_sets[h]
    }
    /// Information sets owned by `i`, in id order.
    pub fn own_info_sets(&self, i: PlayerId) -> &[InfoSetId] {
        &self.own_sets[i]
    }
    /// Position of `h` inside its owner's list.
    pub fn local_index(&self, h: InfoSetId) -> usize {
        self.local[h]
    }
    pub fn terminals(&self) -> &[HistoryId] {
        &self.terminals
    }
    pub fn outcome_labels(&self) -> &[String] {
        &self.labels
    }
    /// Outcome label of terminal `z`.
    pub fn label(&self, z: HistoryId) -> &str {
        &self.labels[self.histories[z].outcome.expect("terminal history")]
    }
    /// Rank of terminal `z` for player `i`; lower is better.
    pub fn rank(&self, i: PlayerId, z: HistoryId) -> u32 {
        self.ranks[i][self.histories[z].outcome.expect("terminal history")]
    }
    pub fn label_rank(&self, i: PlayerId, label: usize) -> u32 {
        self.ranks[i][label]
    }
    pub fn max_rank(&self, i: PlayerId) -> u32 {
        self.ranks[i].iter().copied().max().unwrap_or(0)
    }
    /// `z ≿_i z'`.
    pub fn weakly_prefers(&self, i: PlayerId, z: HistoryId, z2: HistoryId) -> bool {
        self.rank(i, z) <= self.rank(i, z2)
    }
    /// Own (information set, action) pairs of `i` on the path to `x`.
    pub fn signature(&self, x: HistoryId, i: PlayerId) -> &[(InfoSetId, usize)] {
        &self.signature[x][i]
    }
    /// Information set of `i` active at `x`, if any.
    pub fn mover_set(&self, x: HistoryId, i: PlayerId) -> Option<InfoSetId> {
        self.histories[x]
            .movers
            .iter()
            .copied()
            .find(|&h| self.info_sets[h].owner == i)
    }

    /// Child of `x` reached when every active player picks `choose(h)`.
    pub fn child(&self, x: HistoryId, mut choose: impl FnMut(InfoSetId) -> usize) -> HistoryId {
        let node = &self.histories[x];
        let mut idx = 0;
        for &h in &node.movers {
            idx = idx * self.info_sets[h].actions.len() + choose(h);
        }
        node.children[idx]
    }

    /// Reconstruct the raw description (ids are the stored history names).
    pub fn to_raw(&self) -> RawGame {
        let nodes = self
            .histories
            .iter()
            .map(|x| RawNode {
                id: x.name.clone(),
                parent: x.parent.map(|p| self.histories[p].name.clone()),
                via: x
                    .incoming
                    .iter()
                    .map(|&(p, a)| {
                        let parent = x.parent.unwrap();
                        let h = self.mover_set(parent, p).unwrap();
                        (self.players[p].clone(), self.info_sets[h].actions[a].clone())
                    })
                    .collect(),
                movers: x
                    .movers
                    .iter()
                    .map(|&h| RawMove {
                        player: self.players[self.info_sets[h].owner].clone(),
                        info_set: self.info_sets[h].name.clone(),
                        actions: self.info_sets[h].actions.clone(),
                    })
                    .collect(),
                outcome: x.outcome.map(|l| self.labels[l].clone()),
            })
            .collect();
        let preferences = (0..self.players.len())
            .map(|i| {
                let mut tiers: BTreeMap<u32, Vec<String>> = BTreeMap::new();
                for (l, lab) in self.labels.iter().enumerate() {
                    tiers.entry(self.ranks[i][l]).or_default().push(lab.clone());
                }
                tiers.into_values().collect()
            })
            .collect();
        RawGame {
            players: self.players.clone(),
            nodes,
            preferences,
        }
    }
}

pub fn classify_game(g: &Game) -> Classification {
    let observable_actions = g.info_sets().iter().all(|h| h.members.len() == 1);
    let perfect_information =
        observable_actions && g.histories().iter().all(|x| x.is_terminal() || x.movers.len() == 1);
    Classification {
        observable_actions,
        perfect_information,
    }
}

/// Deepest common prefix of two distinct terminal histories.
pub fn last_common_predecessor(g: &Game, z: HistoryId, z2: HistoryId) -> Result<HistoryId, GameError> {
    if z == z2 {
        return Err(GameError::SameHistory);
    }
    for x in [z, z2] {
        if !g.history(x).is_terminal() {
            return Err(GameError::NotTerminal(x));
        }
    }
    let path = |mut x: HistoryId| {
        let mut p = vec![x];
        while let Some(q) = g.history(x).parent {
            p.push(q);
            x = q;
        }
        p.reverse();
        p
    };
    let (a, b) = (path(z), path(z2));
    let mut last = 0;
    for (u, v) in a.iter().zip(b.iter()) {
        if u != v {
            break;
        }
        last = *u;
    }
    Ok(last)
}
