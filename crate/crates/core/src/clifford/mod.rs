//! Stabilizer simulation of measurement-based hashing.
//!
//! A Clifford map with Pauli measurements is turned into a resource state
//! by applying it to one half of a set of Bell pairs. Feeding inputs in by
//! Bell measurements then applies the map up to Pauli byproducts, which are
//! propagated through the circuit and corrected at the end.

mod graph;
mod local;
mod resource;
mod tableau;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use graph::{to_graph_state, GraphResource, IoLabel};
pub use local::{LocalClifford, SignedPauli};
pub use resource::{
    apply_resource, bell_measure, bell_pairs, jamiolkowski_resource, jamiolkowski_tableau,
    station_resource, station_tableau, HashRound, HashingCircuit, PauliFrame,
};
pub use tableau::{Measurement, PauliString, Tableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` bits; `Y` is `(1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

impl FromStr for Pauli {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(format!("unknown Pauli `{s}`")),
        }
    }
}
