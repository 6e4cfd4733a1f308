//! Stable strategy ids and their compatibility metadata.

use serde::Serialize;

use crate::board::{BiasFamily, BiasSpec, Player};
use crate::breaker::{
    CliqueConnectivity, CliqueTriangle, Factorization, GreedyBreaker, RandomBreaker, StarConnectivity,
};
use crate::error::RegistryError;
use crate::graph::DEFAULT_EXACT_CAP;
use crate::maker::{
    ConnectivityDanger, GreedyMaker, HamiltonConfig, HamiltonThreeStage, MinDegreeDanger, RandomMaker, TreeGrowth,
    TriangleVsClique, TriangleVsMatching, TriangleVsStar,
};
use crate::strategy::{BreakerStrategy, MakerStrategy};
use crate::win::WinCondition;

use BiasFamily::{Clique, Matching, Star};

const ISOLATION_GOALS: &[&str] = &["connectivity", "ham-path", "ham-cycle", "min-degree"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyInfo {
    pub id: &'static str,
    pub role: Player,
    /// Bias families the strategy is built for; empty means any.
    pub families: Vec<BiasFamily>,
    /// Goal kinds (`WinCondition::kind`) it plays for; empty means any.
    pub goals: Vec<&'static str>,
    /// The side that moves first in the setting the strategy was built for.
    pub first_mover: Player,
    pub summary: &'static str,
}

impl StrategyInfo {
    pub fn check(&self, bias: BiasSpec, win: WinCondition) -> Result<(), RegistryError> {
        let incompatible = |reason: String| RegistryError::Incompatible {
            id: self.id.to_string(),
            reason,
        };
        if !self.families.is_empty() && !self.families.contains(&bias.family) {
            return Err(incompatible(format!(
                "bias family {} is not supported",
                bias.family.name()
            )));
        }
        if !self.goals.is_empty() && !self.goals.contains(&win.kind()) {
            return Err(incompatible(format!("goal {win} is not supported")));
        }
        Ok(())
    }
}

/// Construction parameters shared by every builder.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyOptions {
    pub seed: u64,
    pub exact_cap: usize,
    pub hamilton: HamiltonConfig,
    /// Degree goal override for the min-degree Maker.
    pub degree_target: Option<usize>,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            seed: 0,
            exact_cap: DEFAULT_EXACT_CAP,
            hamilton: HamiltonConfig::default(),
            degree_target: None,
        }
    }
}

impl StrategyOptions {
    pub fn seeded(seed: u64) -> StrategyOptions {
        StrategyOptions {
            seed,
            ..StrategyOptions::default()
        }
    }
}

fn entry(
    id: &'static str,
    role: Player,
    families: &[BiasFamily],
    goals: &[&'static str],
    first_mover: Player,
    summary: &'static str,
) -> StrategyInfo {
    StrategyInfo {
        id,
        role,
        families: families.to_vec(),
        goals: goals.to_vec(),
        first_mover,
        summary,
    }
}

pub fn strategies() -> Vec<StrategyInfo> {
    use Player::{Breaker as B, Maker as M};
    vec![
        entry(
            "maker.triangle.clique",
            M,
            &[Clique],
            &["triangle"],
            B,
            "fan from a vertex outside Breaker's clique, then close",
        ),
        entry(
            "maker.triangle.matching",
            M,
            &[Matching],
            &["triangle"],
            B,
            "two cherries at one centre, closing in four moves",
        ),
        entry(
            "maker.triangle.star",
            M,
            &[Star],
            &["triangle"],
            B,
            "hub edge plus fan with an open leaf pair",
        ),
        entry(
            "maker.connectivity.tree",
            M,
            &[Matching],
            &["connectivity"],
            M,
            "grow one tree by the lowest crossing edge",
        ),
        entry(
            "maker.connectivity.danger",
            M,
            &[],
            &["connectivity"],
            B,
            "join the component of the most endangered active vertex",
        ),
        entry(
            "maker.mindegree.danger",
            M,
            &[],
            &["min-degree"],
            B,
            "random edge at the vertex of largest degree danger",
        ),
        entry(
            "maker.ham.threestage",
            M,
            &[Matching, Star],
            &["ham-cycle"],
            B,
            "minimum degree, then connectivity, then boosters",
        ),
        entry("maker.baseline.random", M, &[], &[], B, "uniform random unclaimed edge"),
        entry("maker.baseline.greedy", M, &[], &[], B, "one-ply greedy edge scoring"),
        entry(
            "breaker.clique.triangle",
            B,
            &[Clique],
            &["triangle"],
            M,
            "threat edges, then a double star inside one clique",
        ),
        entry(
            "breaker.clique.connectivity",
            B,
            &[Clique],
            ISOLATION_GOALS,
            B,
            "group cliques, then box-game isolation",
        ),
        entry(
            "breaker.matching.factorization",
            B,
            &[Matching],
            ISOLATION_GOALS,
            B,
            "one perfect matching of a 1-factorization per turn",
        ),
        entry(
            "breaker.star.connectivity",
            B,
            &[Star],
            ISOLATION_GOALS,
            B,
            "probe stars, then a chain of stars isolating a target",
        ),
        entry(
            "breaker.baseline.random",
            B,
            &[],
            &[],
            B,
            "random maximal legal structure",
        ),
        entry(
            "breaker.baseline.greedy",
            B,
            &[],
            &[],
            B,
            "legal structure of greedily blocked threats",
        ),
    ]
}

pub fn info(id: &str) -> Result<StrategyInfo, RegistryError> {
    strategies()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| RegistryError::UnknownStrategy(id.to_string()))
}

fn expect_role(id: &str, wanted: Player) -> Result<(), RegistryError> {
    let actual = info(id)?.role;
    if actual != wanted {
        return Err(RegistryError::WrongRole {
            id: id.to_string(),
            wanted,
            actual,
        });
    }
    Ok(())
}

pub fn build_maker(id: &str, opts: &StrategyOptions) -> Result<Box<dyn MakerStrategy>, RegistryError> {
    expect_role(id, Player::Maker)?;
    let seed = opts.seed;
    Ok(match id {
        "maker.triangle.clique" => Box::new(TriangleVsClique::new()),
        "maker.triangle.matching" => Box::new(TriangleVsMatching::new()),
        "maker.triangle.star" => Box::new(TriangleVsStar::new()),
        "maker.connectivity.tree" => Box::new(TreeGrowth::new()),
        "maker.connectivity.danger" => Box::new(ConnectivityDanger::new()),
        "maker.mindegree.danger" => Box::new(MinDegreeDanger::new(seed, opts.degree_target)),
        "maker.ham.threestage" => Box::new(HamiltonThreeStage::new(seed, opts.hamilton.clone(), opts.exact_cap)),
        "maker.baseline.random" => Box::new(RandomMaker::new(seed)),
        "maker.baseline.greedy" => Box::new(GreedyMaker::new(seed)),
        other => unreachable!("registered Maker `{other}` has no builder"),
    })
}

pub fn build_breaker(id: &str, opts: &StrategyOptions) -> Result<Box<dyn BreakerStrategy>, RegistryError> {
    expect_role(id, Player::Breaker)?;
    let seed = opts.seed;
    Ok(match id {
        "breaker.clique.triangle" => Box::new(CliqueTriangle::new()),
        "breaker.clique.connectivity" => Box::new(CliqueConnectivity::new()),
        "breaker.matching.factorization" => Box::new(Factorization::new()),
        "breaker.star.connectivity" => Box::new(StarConnectivity::new()),
        "breaker.baseline.random" => Box::new(RandomBreaker::new(seed)),
        "breaker.baseline.greedy" => Box::new(GreedyBreaker::new(seed)),
        other => unreachable!("registered Breaker `{other}` has no builder"),
    })
}
