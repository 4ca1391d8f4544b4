use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Bell-diagonal state {0:?}: components must be non-negative and sum to 1")]
    InvalidState([f64; 4]),

    #[error("parameter `{name}` = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("fidelity {0} is outside the domain (0.25, 1] of the concentration bound")]
    FidelityDomain(f64),

    #[error("n = {n} is too small for n->1 hashing at this fidelity (delta = {delta:.6} < 0)")]
    NTooSmall { n: u64, delta: f64 },

    #[error("no ensemble size up to {cap} reaches the requested fidelity")]
    Unreachable { cap: u64 },

    #[error("concatenated hashing stalled at level {level}: {from} -> {to}")]
    Stalled { level: usize, from: f64, to: f64 },

    #[error("exponential fit is poor (R^2 = {r_squared:.4})")]
    PoorFit { r_squared: f64 },

    #[error("hashing needs {rounds} parity rounds but only {max} bits are available")]
    TooManyRounds { rounds: u64, max: u64 },

    #[error("the scenario has zero yield (c = {0})")]
    ZeroYield(f64),

    #[error("working fidelity {0} cannot be reached")]
    WorkingFidelityUnreachable(f64),

    #[error("no working fidelity in the sweep is feasible")]
    Infeasible,

    #[error("purification step has zero success probability")]
    ZeroSuccess,

    #[error("output counts differ: {left} vs {right}")]
    MismatchedOutputs { left: usize, right: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("qubit {qubit} is not in a Z eigenstate and cannot be removed")]
    NotRemovable { qubit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
