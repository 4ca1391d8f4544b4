use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::{to_graph_state, GraphResource, IoLabel};
use super::tableau::{Measurement, PauliString, Tableau};
use super::Pauli;
use crate::error::{Error, Result};

/// Largest number of input pairs accepted for resource construction.
pub const MAX_RESOURCE_INPUTS: usize = 32;

/// One parity round: CNOTs from every other member of `subset` onto
/// `target`, then a `Z` measurement of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashRound {
    /// Bit `i` selects qubit `i`; the target bit may be set or not.
    pub subset: u64,
    pub target: usize,
}

/// One party's local part of a hashing protocol on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashingCircuit {
    n: usize,
    rounds: Vec<HashRound>,
}

impl HashingCircuit {
    pub fn new(n: usize, rounds: Vec<HashRound>) -> Result<Self> {
        if n == 0 || n > MAX_RESOURCE_INPUTS {
            return Err(Error::InvalidCircuit(format!(
                "n = {n} outside 1..={MAX_RESOURCE_INPUTS}"
            )));
        }
        let mut measured = 0u64;
        for (i, r) in rounds.iter().enumerate() {
            if r.target >= n || r.subset >> n != 0 {
                return Err(Error::InvalidCircuit(format!("round {i} addresses a qubit >= {n}")));
            }
            if (r.subset | (1 << r.target)) & measured != 0 {
                return Err(Error::InvalidCircuit(format!(
                    "round {i} uses an already measured qubit"
                )));
            }
            measured |= 1 << r.target;
        }
        Ok(Self { n, rounds })
    }

    /// Random circuit with `rounds` distinct targets and random subsets of the
    /// remaining qubits.
    pub fn random<R: Rng>(n: usize, rounds: usize, rng: &mut R) -> Result<Self> {
        if rounds > n {
            return Err(Error::InvalidCircuit("more rounds than qubits".into()));
        }
        let mut alive: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let target = alive.swap_remove(rng.random_range(0..alive.len()));
            let mut subset = 1u64 << target;
            for &q in &alive {
                if rng.random_bool(0.5) {
                    subset |= 1 << q;
                }
            }
            out.push(HashRound { subset, target });
        }
        Self::new(n, out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n - self.rounds.len()
    }

    pub fn rounds(&self) -> &[HashRound] {
        &self.rounds
    }

    /// Unmeasured qubits in increasing order.
    pub fn survivors(&self) -> Vec<usize> {
        let measured: u64 = self.rounds.iter().fold(0, |m, r| m | 1 << r.target);
        (0..self.n).filter(|q| measured >> q & 1 == 0).collect()
    }

    /// Runs the circuit on tableau qubits `qubits` without removing the
    /// measured ones. `forced[i]` is the branch for round `i` if it is random.
    pub fn apply(&self, t: &mut Tableau, qubits: &[usize], forced: &[bool]) -> Vec<Measurement> {
        assert_eq!(qubits.len(), self.n);
        self.rounds
            .iter()
            .zip(forced)
            .map(|(r, &f)| {
                for c in (0..self.n).filter(|&c| c != r.target && r.subset >> c & 1 == 1) {
                    t.cnot(qubits[c], qubits[r.target]);
                }
                t.measure_pauli(qubits[r.target], Pauli::Z, f)
            })
            .collect()
    }

    /// Tableau indices of the measured qubits.
    pub fn measured_qubits(&self, qubits: &[usize]) -> Vec<usize> {
        self.rounds.iter().map(|r| qubits[r.target]).collect()
    }

    /// Pushes a Pauli frame on the inputs through the circuit. Returns which
    /// measurement outcomes it flips and the frame left on the survivors.
    pub fn propagate(&self, frame: &PauliFrame) -> (Vec<bool>, PauliFrame) {
        let mut x = frame.x.clone();
        let mut z = frame.z.clone();
        let mut flips = Vec::with_capacity(self.rounds.len());
        for r in &self.rounds {
            for c in (0..self.n).filter(|&c| c != r.target && r.subset >> c & 1 == 1) {
                x[r.target] ^= x[c];
                z[c] ^= z[r.target];
            }
            flips.push(x[r.target]);
        }
        let s = self.survivors();
        let out = PauliFrame {
            x: s.iter().map(|&q| x[q]).collect(),
            z: s.iter().map(|&q| z[q]).collect(),
        };
        (flips, out)
    }
}

/// Pauli correction `∏ X^{x_i} Z^{z_i}`, up to global phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    /// Frame left on the inputs by Bell-measurement read-in outcomes
    /// `(m_data, m_resource)`: `X^{m_resource} Z^{m_data}`.
    pub fn from_bell_outcomes(outcomes: &[(bool, bool)]) -> Self {
        Self {
            x: outcomes.iter().map(|o| o.1).collect(),
            z: outcomes.iter().map(|o| o.0).collect(),
        }
    }

    /// The frame as an operator on `qubits` of an `n`-qubit register.
    pub fn to_pauli_string(&self, n: usize, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            p.set(q, Pauli::from_bits(self.x[i], self.z[i]));
        }
        p
    }
}

/// `n` Bell pairs `|φ+>` between qubit `i` and qubit `n + i`.
pub fn bell_pairs(n: usize) -> Tableau {
    let mut t = Tableau::zero_state(2 * n);
    for i in 0..n {
        t.h(i);
        t.cnot(i, n + i);
    }
    t
}

/// Bell measurement of `data` and `resource`; `forced` picks random branches.
/// Returns `(m_data, m_resource)`; both qubits end in `Z` eigenstates.
pub fn bell_measure(t: &mut Tableau, data: usize, resource: usize, forced: (bool, bool)) -> (bool, bool) {
    t.cnot(data, resource);
    t.h(data);
    let a = t.measure_pauli(data, Pauli::Z, forced.0).outcome;
    let b = t.measure_pauli(resource, Pauli::Z, forced.1).outcome;
    (a, b)
}

/// The state `(1 ⊗ H)|φ+>^n` with all measurement branches fixed to `+1`:
/// qubits `0..n` are inputs, `n..n+m` the surviving outputs in order.
pub fn jamiolkowski_tableau(circuit: &HashingCircuit) -> Result<Tableau> {
    let n = circuit.n();
    let mut t = bell_pairs(n);
    let b: Vec<usize> = (n..2 * n).collect();
    circuit.apply(&mut t, &b, &vec![false; circuit.rounds().len()]);
    t.remove_qubits(&circuit.measured_qubits(&b))?;
    Ok(t)
}

pub fn jamiolkowski_resource(circuit: &HashingCircuit) -> Result<GraphResource> {
    let t = jamiolkowski_tableau(circuit)?;
    let mut g = to_graph_state(&t);
    for l in g.io_labels.iter_mut().skip(circuit.n()) {
        *l = IoLabel::Output;
    }
    Ok(g)
}

/// Feeds `data` qubits of `state` into the first `data.len()` qubits of
/// `resource` by Bell measurements. The result holds the untouched qubits of
/// `state` in order, followed by the remaining resource qubits.
pub fn apply_resource(
    state: &Tableau,
    data: &[usize],
    resource: &Tableau,
    forced: &[(bool, bool)],
) -> Result<(Tableau, Vec<(bool, bool)>)> {
    if data.len() > resource.n_qubits() || forced.len() != data.len() {
        return Err(Error::MismatchedOutputs {
            left: data.len(),
            right: resource.n_qubits(),
        });
    }
    let off = state.n_qubits();
    let mut t = state.tensor(resource);
    let outcomes: Vec<(bool, bool)> = data
        .iter()
        .zip(forced)
        .enumerate()
        .map(|(i, (&d, &f))| bell_measure(&mut t, d, off + i, f))
        .collect();
    let mut gone: Vec<usize> = data.to_vec();
    gone.extend((0..data.len()).map(|i| off + i));
    t.remove_qubits(&gone)?;
    Ok((t, outcomes))
}

/// Joins two hashing resources by Bell-measuring their outputs pairwise.
/// The result holds the inputs of `left` followed by those of `right`.
pub fn station_tableau(left: &GraphResource, right: &GraphResource) -> Result<Tableau> {
    let outputs = |g: &GraphResource| -> Vec<usize> {
        (0..g.n_qubits)
            .filter(|&q| g.io_labels[q] == IoLabel::Output)
            .collect()
    };
    let (lo, ro) = (outputs(left), outputs(right));
    if lo.len() != ro.len() {
        return Err(Error::MismatchedOutputs {
            left: lo.len(),
            right: ro.len(),
        });
    }
    let off = left.n_qubits;
    let mut t = left.to_tableau().tensor(&right.to_tableau());
    let mut gone = Vec::new();
    for (&a, &b) in lo.iter().zip(&ro) {
        bell_measure(&mut t, a, off + b, (false, false));
        gone.push(a);
        gone.push(off + b);
    }
    t.remove_qubits(&gone)?;
    Ok(t)
}

pub fn station_resource(left: &GraphResource, right: &GraphResource) -> Result<GraphResource> {
    Ok(to_graph_state(&station_tableau(left, right)?))
}
