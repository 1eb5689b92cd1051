//! Seeded random games.
//!
//! Trees are grown top-down; every terminal gets its own outcome label and
//! each player's ranking is a shuffle of the labels with adjacent labels
//! merged into ties at the requested rate. Flags are enforced by resampling.

use num_traits::{ToPrimitive, Zero};
use rand::distributions::{Bernoulli, Distribution};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{classify_game, mv, validate_game, Game, RawMove, Tree};
use crate::rational::{ratio, Rational};
use crate::solvers::check_nrt;

/// Resampling budget when a draw violates a flag or the size limit.
pub const MAX_RETRIES: usize = 100;
/// Draws with more terminals than this are resampled.
pub const MAX_TERMINALS: usize = 40;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("no acceptable game after {0} attempts")]
    GenerationFailed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub max_depth: usize,
    pub max_actions: usize,
    pub player_count: usize,
    /// Probability (as `p/q`) that a label ties with the one ranked just above it.
    pub tie_probability: String,
    pub force_nrt: bool,
    pub force_perfect_info: bool,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            seed: 0,
            max_depth: 3,
            max_actions: 2,
            player_count: 2,
            tie_probability: "1/5".into(),
            force_nrt: false,
            force_perfect_info: false,
        }
    }
}

fn bernoulli(p: &Rational) -> Result<Bernoulli, GeneratorError> {
    let bad = || GeneratorError::InvalidSpec(format!("tie probability {p} is not a small fraction in [0, 1]"));
    let n = p.numer().to_u32().ok_or_else(bad)?;
    let d = p.denom().to_u32().ok_or_else(bad)?;
    Bernoulli::from_ratio(n, d).map_err(|_| bad())
}

struct Draw<'a> {
    spec: &'a GeneratorSpec,
    rng: ChaCha8Rng,
    players: Vec<String>,
    info_sets: usize,
    leaves: usize,
}

impl Draw<'_> {
    fn actions(&mut self) -> Vec<&'static str> {
        const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
        let k = if self.spec.max_actions <= 2 {
            self.spec.max_actions
        } else {
            self.rng.gen_range(2..=self.spec.max_actions)
        };
        NAMES[..k.min(NAMES.len())].to_vec()
    }

    fn node(&mut self, depth: usize) -> Tree {
        let stop = depth >= self.spec.max_depth || (depth > 0 && self.rng.gen_bool(0.3));
        if stop {
            self.leaves += 1;
            return Tree::leaf(&format!("z{}", self.leaves));
        }
        let n = self.players.len();
        let joint = !self.spec.force_perfect_info && n > 1 && self.rng.gen_bool(0.35);
        let movers: Vec<usize> = if joint {
            let mut ps: Vec<usize> = (0..n).collect();
            ps.shuffle(&mut self.rng);
            let mut two = ps[..2].to_vec();
            two.sort_unstable();
            two
        } else {
            vec![self.rng.gen_range(0..n)]
        };
        let mut moves: Vec<RawMove> = Vec::new();
        let mut width = 1;
        for p in movers {
            self.info_sets += 1;
            let acts = self.actions();
            width *= acts.len();
            moves.push(mv(&self.players[p], &format!("h{}", self.info_sets), &acts));
        }
        let children = (0..width).map(|_| self.node(depth + 1)).collect();
        Tree::joint(moves, children)
    }

    fn preferences(&mut self, ties: &Bernoulli) -> Vec<Vec<Vec<String>>> {
        let labels: Vec<String> = (1..=self.leaves).map(|k| format!("z{k}")).collect();
        (0..self.players.len())
            .map(|_| {
                let mut order = labels.clone();
                order.shuffle(&mut self.rng);
                let mut tiers: Vec<Vec<String>> = Vec::new();
                for l in order {
                    match tiers.last_mut() {
                        Some(t) if ties.sample(&mut self.rng) => t.push(l),
                        _ => tiers.push(vec![l]),
                    }
                }
                tiers
            })
            .collect()
    }
}

/// Builds a game as a deterministic function of the generator settings (including the seed).
pub fn generate_game(spec: &GeneratorSpec) -> Result<Game, GeneratorError> {
    if spec.player_count == 0 || spec.max_depth == 0 || spec.max_actions == 0 {
        return Err(GeneratorError::InvalidSpec(
            "players, depth and actions must be positive".into(),
        ));
    }
    let p = crate::io::format::parse_rational(&spec.tie_probability)
        .map_err(|e| GeneratorError::InvalidSpec(e.to_string()))?;
    let p = if spec.force_nrt { Rational::zero() } else { p };
    if p > ratio(1, 1) || p < Rational::zero() {
        return Err(GeneratorError::InvalidSpec("tie probability outside [0, 1]".into()));
    }
    let ties = bernoulli(&p)?;
    let force_pi = spec.force_perfect_info || spec.force_nrt;
    let effective = GeneratorSpec {
        force_perfect_info: force_pi,
        ..spec.clone()
    };
    let mut draw = Draw {
        spec: &effective,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        players: (1..=spec.player_count).map(|k| format!("P{k}")).collect(),
        info_sets: 0,
        leaves: 0,
    };
    for _ in 0..MAX_RETRIES {
        draw.info_sets = 0;
        draw.leaves = 0;
        let tree = draw.node(0);
        if draw.leaves > MAX_TERMINALS {
            continue;
        }
        let prefs = draw.preferences(&ties);
        let names: Vec<&str> = draw.players.iter().map(String::as_str).collect();
        let g = validate_game(&tree.into_raw(&names, prefs)).expect("generated trees are well formed");
        if force_pi && !classify_game(&g).perfect_information {
            continue;
        }
        if spec.force_nrt && check_nrt(&g).ok().flatten().is_some() {
            continue;
        }
        return Ok(g);
    }
    Err(GeneratorError::GenerationFailed(MAX_RETRIES))
}
