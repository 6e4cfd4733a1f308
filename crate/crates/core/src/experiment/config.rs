use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{BiasFamily, BiasSpec, Player, MAX_ORDER};
use crate::experiment::expr::{ExprError, SizeRule};
use crate::graph::DEFAULT_EXACT_CAP;
use crate::maker::HamiltonConfig;
use crate::registry::{self, StrategyOptions};
use crate::win::WinCondition;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad config: {0}")]
    Parse(String),
    #[error(transparent)]
    Rule(#[from] ExprError),
    #[error(transparent)]
    Strategy(#[from] crate::error::RegistryError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// A single value or an inclusive `[lo, hi]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NRange {
    One(usize),
    Span([usize; 2]),
}

impl NRange {
    pub fn values(self) -> std::ops::RangeInclusive<usize> {
        match self {
            NRange::One(n) => n..=n,
            NRange::Span([lo, hi]) => lo..=hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    pub fn ids(&self) -> Vec<String> {
        match self {
            OneOrMany::One(id) => vec![id.clone()],
            OneOrMany::Many(ids) => ids.clone(),
        }
    }
}

/// Bias sizes swept by a threshold scan, both ends inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRange {
    pub from: SizeRule,
    pub to: SizeRule,
}

/// A declarative experiment, usually read from TOML:
///
/// ```toml
/// n = [8, 14]
/// family = "clique"
/// bias = "floor(sqrt(2n-4))"
/// win = "triangle"
/// maker = "maker.triangle.clique"
/// breaker = ["breaker.baseline.random", "breaker.baseline.greedy"]
/// seeds = 1000
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub n: NRange,
    pub family: BiasFamily,
    /// Bias size per `n`; required for matches.
    #[serde(default)]
    pub bias: Option<SizeRule>,
    /// Bias sizes per `n`; required for scans.
    #[serde(default)]
    pub scan: Option<ScanRange>,
    pub win: WinCondition,
    pub maker: OneOrMany,
    pub breaker: OneOrMany,
    /// Defaults to the first mover the non-baseline strategy was built for.
    #[serde(default)]
    pub first: Option<Player>,
    /// Games per cell.
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    /// Seed of the first game; game `i` of a cell uses `seed + i`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_exact_cap")]
    pub exact_cap: usize,
    #[serde(default = "default_true")]
    pub stop_on_block: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub hamilton: HamiltonConfig,
    #[serde(default)]
    pub degree_target: Option<usize>,
}

fn default_seeds() -> u64 {
    100
}

fn default_exact_cap() -> usize {
    DEFAULT_EXACT_CAP
}

fn default_true() -> bool {
    true
}

/// One (board, bias, strategies) combination of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub bias: BiasSpec,
    pub maker: String,
    pub breaker: String,
    pub first: Player,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn strategy_options(&self, seed: u64) -> StrategyOptions {
        StrategyOptions {
            seed,
            exact_cap: self.exact_cap,
            hamilton: self.hamilton.clone(),
            degree_target: self.degree_target,
        }
    }

    fn first_mover(&self, maker: &str, breaker: &str) -> Result<Player, ConfigError> {
        if let Some(first) = self.first {
            return Ok(first);
        }
        let maker_info = registry::info(maker)?;
        let breaker_info = registry::info(breaker)?;
        Ok(if maker_info.id.starts_with("maker.baseline.") {
            breaker_info.first_mover
        } else {
            maker_info.first_mover
        })
    }

    fn board_sizes(&self) -> Result<Vec<usize>, ConfigError> {
        let ns: Vec<usize> = self.n.values().collect();
        if ns.is_empty() {
            return Err(ConfigError::Invalid(format!("empty n range {:?}", self.n)));
        }
        if let Some(&bad) = ns.iter().find(|&&n| !(3..=MAX_ORDER).contains(&n)) {
            return Err(ConfigError::Invalid(format!("n = {bad} outside 3..={MAX_ORDER}")));
        }
        if self.seeds == 0 {
            return Err(ConfigError::Invalid("seeds must be at least 1".into()));
        }
        Ok(ns)
    }

    fn bias_at(&self, size: usize, n: usize, rule: &SizeRule) -> Result<BiasSpec, ConfigError> {
        BiasSpec::new(self.family, size).map_err(|e| ConfigError::Invalid(format!("`{rule}` at n = {n}: {e}")))
    }

    fn cells_for(&self, n: usize, bias: BiasSpec) -> Result<Vec<Cell>, ConfigError> {
        let mut out = Vec::new();
        for maker in self.maker.ids() {
            for breaker in self.breaker.ids() {
                for (id, role) in [(&maker, Player::Maker), (&breaker, Player::Breaker)] {
                    let info = registry::info(id)?;
                    if info.role != role {
                        return Err(crate::error::RegistryError::WrongRole {
                            id: id.clone(),
                            wanted: role,
                            actual: info.role,
                        }
                        .into());
                    }
                    info.check(bias, self.win)?;
                }
                let first = self.first_mover(&maker, &breaker)?;
                out.push(Cell {
                    n,
                    bias,
                    maker: maker.clone(),
                    breaker,
                    first,
                });
            }
        }
        if out.is_empty() {
            return Err(ConfigError::Invalid("no maker or no breaker listed".into()));
        }
        Ok(out)
    }

    /// Expands a match config into cells, checking every reference.
    pub fn match_cells(&self) -> Result<Vec<Cell>, ConfigError> {
        let rule = self
            .bias
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("a match needs a `bias` rule".into()))?;
        let mut cells = Vec::new();
        for n in self.board_sizes()? {
            let bias = self.bias_at(rule.eval(n)?, n, rule)?;
            cells.extend(self.cells_for(n, bias)?);
        }
        Ok(cells)
    }

    /// Expands a scan config into cells, one per bias size in the sweep.
    pub fn scan_cells(&self) -> Result<Vec<Cell>, ConfigError> {
        let scan = self
            .scan
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("a scan needs a `[scan]` table".into()))?;
        let mut cells = Vec::new();
        for n in self.board_sizes()? {
            let (lo, hi) = (scan.from.eval(n)?, scan.to.eval(n)?);
            if lo > hi {
                return Err(ConfigError::Invalid(format!("empty bias sweep {lo}..={hi} at n = {n}")));
            }
            for size in lo..=hi {
                let bias = self.bias_at(size, n, &scan.from)?;
                cells.extend(self.cells_for(n, bias)?);
            }
        }
        Ok(cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLIQUE: &str = r#"
        n = [8, 10]
        family = "clique"
        bias = "floor(sqrt(2n-4))"
        win = "triangle"
        maker = "maker.triangle.clique"
        breaker = ["breaker.baseline.random", "breaker.baseline.greedy"]
        seeds = 3
    "#;

    #[test]
    fn expands_cells_with_breaker_first_for_a_breaker_first_maker() {
        let cfg = ExperimentConfig::from_toml(CLIQUE).unwrap();
        let cells = cfg.match_cells().unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].bias, BiasSpec::clique(3));
        assert_eq!(cells[5].bias, BiasSpec::clique(4));
        assert!(cells.iter().all(|c| c.first == Player::Breaker));
    }

    #[test]
    fn tree_growth_defaults_to_maker_first() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            n = 8
            family = "matching"
            bias = "n/2"
            win = "connectivity"
            maker = "maker.connectivity.tree"
            breaker = "breaker.baseline.greedy"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.match_cells().unwrap()[0].first, Player::Maker);
    }

    #[test]
    fn invalid_configs() {
        let empty = CLIQUE.replace("[8, 10]", "[10, 8]");
        let cfg = ExperimentConfig::from_toml(&empty).unwrap();
        assert!(matches!(cfg.match_cells(), Err(ConfigError::Invalid(_))));

        let unknown = CLIQUE.replace("maker.triangle.clique", "maker.nope");
        let cfg = ExperimentConfig::from_toml(&unknown).unwrap();
        assert!(matches!(cfg.match_cells(), Err(ConfigError::Strategy(_))));

        let wrong_family = CLIQUE.replace("\"clique\"", "\"star\"");
        let cfg = ExperimentConfig::from_toml(&wrong_family).unwrap();
        assert!(matches!(cfg.match_cells(), Err(ConfigError::Strategy(_))));

        let tiny = CLIQUE.replace("floor(sqrt(2n-4))", "1");
        let cfg = ExperimentConfig::from_toml(&tiny).unwrap();
        assert!(matches!(cfg.match_cells(), Err(ConfigError::Invalid(_))));

        assert!(matches!(
            ExperimentConfig::from_toml("n = 8\nfamily = \"clique\"\nbogus = 1"),
            Err(ConfigError::Parse(_))
        ));
        let bad_rule = CLIQUE.replace("floor(sqrt(2n-4))", "floor(");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad_rule),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn scan_needs_a_sweep() {
        let cfg = ExperimentConfig::from_toml(CLIQUE).unwrap();
        assert!(matches!(cfg.scan_cells(), Err(ConfigError::Invalid(_))));
        let scan = CLIQUE.replace("bias = \"floor(sqrt(2n-4))\"", "scan = { from = \"2\", to = \"4\" }");
        let cfg = ExperimentConfig::from_toml(&scan).unwrap();
        assert_eq!(cfg.scan_cells().unwrap().len(), 3 * 3 * 2);
    }
}
