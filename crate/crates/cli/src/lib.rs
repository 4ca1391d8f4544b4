//! Scenario files, sweep commands and table output for the `hashrep` tool.

pub mod commands;
pub mod config;
pub mod table;

use serde::{Deserialize, Serialize};

pub use commands::{run, RunError};
pub use config::{ConfigError, Format, ScenarioConfig};
pub use table::{Cell, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fidelity bound and yield over n, F, N and δ schedules.
    BoundsSweep,
    /// Yield and per-station overhead over n and F.
    YieldSweep,
    /// n->1 output fidelity bound over n.
    Nto1,
    /// Smallest n for which n->1 hashing purifies over N links.
    Nmin,
    /// Concatenated n->1 hashing per block size and level.
    Concat,
    /// Rates, channel counts and memory needs of one scenario.
    Rates,
    /// Recurrence repeater against hashing, per link count.
    #[value(name = "compare-1998")]
    #[serde(rename = "compare-1998")]
    Compare1998,
    /// Monte-Carlo failure rate against the analytic bound.
    McValidate,
    /// Graph-state resources for a random hashing circuit.
    ResourceState,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::BoundsSweep,
        Command::YieldSweep,
        Command::Nto1,
        Command::Nmin,
        Command::Concat,
        Command::Rates,
        Command::Compare1998,
        Command::McValidate,
        Command::ResourceState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::BoundsSweep => "bounds-sweep",
            Command::YieldSweep => "yield-sweep",
            Command::Nto1 => "nto1",
            Command::Nmin => "nmin",
            Command::Concat => "concat",
            Command::Rates => "rates",
            Command::Compare1998 => "compare-1998",
            Command::McValidate => "mc-validate",
            Command::ResourceState => "resource-state",
        }
    }
}

/// Writes `table` in `format` to `out`.
pub fn emit<W: std::io::Write>(table: &ResultTable, format: Format, out: W) -> Result<(), table::EmitError> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::ValueEnum;

    #[test]
    fn names_match_clap_and_serde() {
        for c in Command::ALL {
            let v = c.to_possible_value().unwrap();
            assert_eq!(v.get_name(), c.name());
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
    }
}
