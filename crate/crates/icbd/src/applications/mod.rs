//! Structured families of games: voting over binary agendas and
//! money-burning extensions of two-player games.

pub mod agenda;
pub mod moneyburn;
