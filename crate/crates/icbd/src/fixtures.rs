//! Bundled example games.

use crate::game::{Game, RawGame};
use crate::io::format::{parse_doc, parse_game, UtilitiesDocument};
use crate::rational::Rational;

pub const BOS_OUTSIDE_JSON: &str = include_str!("../fixtures/bos_outside.json");
pub const BOS_OUTSIDE_UTILITIES_JSON: &str = include_str!("../fixtures/bos_outside_utilities.json");
pub const CENTIPEDE_JSON: &str = include_str!("../fixtures/reny_centipede.json");
pub const ORDER_DEP_JSON: &str = include_str!("../fixtures/order_dep.json");
pub const OUTSIDE_TMD_JSON: &str = include_str!("../fixtures/outside_tmd.json");
pub const OUTSIDE_TMD_UTILITIES_JSON: &str = include_str!("../fixtures/outside_tmd_utilities.json");

/// Battle of the Sexes preceded by an outside option for Ann.
pub fn bos_outside() -> Game {
    parse_game(BOS_OUTSIDE_JSON).expect("bundled fixture")
}

/// Four-legged centipede.
pub fn centipede() -> Game {
    parse_game(CENTIPEDE_JSON).expect("bundled fixture")
}

pub fn centipede_raw() -> RawGame {
    centipede().to_raw()
}

/// Outside option followed by a 2x3 simultaneous game; ICBD is order dependent here.
pub fn order_dependence() -> Game {
    parse_game(ORDER_DEP_JSON).expect("bundled fixture")
}

/// Outside option followed by a 3x2 game where mixed dominance bites.
pub fn outside_tmd() -> Game {
    parse_game(OUTSIDE_TMD_JSON).expect("bundled fixture")
}

/// Cardinal payoffs of `outside_tmd`, per player and outcome label.
pub fn outside_tmd_utilities(g: &Game) -> Vec<Vec<Rational>> {
    parse_doc::<UtilitiesDocument>(OUTSIDE_TMD_UTILITIES_JSON)
        .and_then(|d| d.resolve(g))
        .expect("bundled fixture")
}

pub fn bos_outside_utilities(g: &Game) -> Vec<Vec<Rational>> {
    parse_doc::<UtilitiesDocument>(BOS_OUTSIDE_UTILITIES_JSON)
        .and_then(|d| d.resolve(g))
        .expect("bundled fixture")
}
