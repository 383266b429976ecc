//! The 36-case experiment matrix, crossed with the three mobility modes.

use std::fmt;

use serde::Serialize;

use crate::config::{MobilityMode, Network, SimulationConfig, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub case_id: u8,
    pub strategy: Strategy,
    pub population: usize,
    pub network: Network,
    pub beta: f64,
}

const POPULATIONS: [usize; 3] = [100, 250, 500];
const NETWORKS: [(Network, f64); 4] = [
    (Network::Mesh, 0.0),
    (Network::Regular, 0.0),
    (Network::SmallWorld, 0.1),
    (Network::SmallWorld, 0.2),
];
const STRATEGIES: [Strategy; 3] = [
    Strategy::Competitive,
    Strategy::Cooperative,
    Strategy::CooperativeRestricted,
];

pub const CASE_COUNT: u8 = 36;

/// All 36 cases in case-id order.
pub fn scenario_table() -> Vec<ScenarioRow> {
    let mut rows = Vec::with_capacity(CASE_COUNT as usize);
    for strategy in STRATEGIES {
        for population in POPULATIONS {
            for (network, beta) in NETWORKS {
                rows.push(ScenarioRow {
                    case_id: rows.len() as u8 + 1,
                    strategy,
                    population,
                    network,
                    beta,
                });
            }
        }
    }
    rows
}

pub fn scenario(case_id: u8) -> Option<ScenarioRow> {
    (1..=CASE_COUNT)
        .contains(&case_id)
        .then(|| scenario_table()[case_id as usize - 1])
}

impl ScenarioRow {
    /// `base` with this row's strategy, population and network applied.
    pub fn apply(&self, base: &SimulationConfig, mobility: MobilityMode) -> SimulationConfig {
        SimulationConfig {
            strategy: self.strategy,
            population: self.population,
            network: self.network,
            beta: if self.network == Network::SmallWorld {
                self.beta
            } else {
                base.beta
            },
            mobility,
            ..base.clone()
        }
    }

    pub fn network_label(&self) -> String {
        match self.network {
            Network::SmallWorld => format!("small world (beta = {})", self.beta),
            Network::Mesh => "Mesh".into(),
            Network::Regular => "Regular".into(),
        }
    }
}

impl fmt::Display for ScenarioRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strategy = match self.strategy {
            Strategy::Competitive => "Competitive",
            Strategy::Cooperative => "Cooperative",
            Strategy::CooperativeRestricted => "Cooperative-R",
        };
        write!(
            f,
            "Case {} & {} & {} & {}",
            self.case_id,
            strategy,
            self.population,
            self.network_label()
        )
    }
}

/// A runnable (case, mobility) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub row: ScenarioRow,
    pub mobility: MobilityMode,
}

impl Cell {
    pub fn label(&self) -> String {
        format!("case{:02}_{}", self.row.case_id, self.mobility)
    }
}

/// Cells for `cases` (all 36 when `None`), each crossed with every mobility mode.
pub fn cells(cases: Option<&[u8]>) -> Vec<Cell> {
    scenario_table()
        .into_iter()
        .filter(|r| cases.is_none_or(|c| c.contains(&r.case_id)))
        .flat_map(|row| {
            MobilityMode::ALL
                .into_iter()
                .map(move |mobility| Cell { row, mobility })
        })
        .collect()
}
