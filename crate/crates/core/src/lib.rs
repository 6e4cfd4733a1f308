pub mod aux_games;
pub mod board;
pub mod breaker;
pub mod danger;
pub mod dsu;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod maker;
pub mod record;
pub mod registry;
pub mod runner;
pub mod solver;
pub mod strategy;
pub mod win;
