//! Maker strategies.

mod baseline;
mod connectivity;
mod hamilton;
mod triangle;

pub use baseline::{GreedyMaker, RandomMaker};
pub use connectivity::{ConnectivityDanger, MinDegreeDanger, TreeGrowth};
pub use hamilton::{HamiltonConfig, HamiltonThreeStage};
pub use triangle::{TriangleVsClique, TriangleVsMatching, TriangleVsStar};
