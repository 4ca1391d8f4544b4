use serde::{Deserialize, Serialize};

use super::local::LocalClifford;
use super::tableau::{PauliString, Tableau};
use super::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IoLabel {
    Input,
    Output,
}

/// Graph state `∏ CZ |+...+>` followed by one local Clifford per qubit.
///
/// Serialized as `{n_qubits, edges: [[i, j], ...], local_cliffords:
/// ["X->+Z,Z->+X", ...], io_labels: ["input" | "output", ...]}` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphResource {
    pub n_qubits: usize,
    pub edges: Vec<(usize, usize)>,
    pub local_cliffords: Vec<LocalClifford>,
    pub io_labels: Vec<IoLabel>,
}

impl GraphResource {
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n_qubits]; self.n_qubits];
        for &(i, j) in &self.edges {
            a[i][j] = true;
            a[j][i] = true;
        }
        a
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| match (i == q, j == q) {
                (true, _) => Some(j),
                (_, true) => Some(i),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn count(&self, label: IoLabel) -> usize {
        self.io_labels.iter().filter(|l| **l == label).count()
    }

    /// Stabilizer tableau of the state this resource describes.
    pub fn to_tableau(&self) -> Tableau {
        let n = self.n_qubits;
        let rows = (0..n)
            .map(|i| {
                let mut r = PauliString::single(n, i, Pauli::X);
                for j in self.neighbors(i) {
                    r.set(j, Pauli::Z);
                }
                r
            })
            .collect();
        let mut t = Tableau::from_generators(rows).expect("graph states are valid");
        for (q, u) in self.local_cliffords.iter().enumerate() {
            if !u.is_identity() {
                t.apply_local(q, u);
            }
        }
        t
    }
}

/// Local-Clifford-equivalent graph form of a stabilizer state.
///
/// Row reduction brings the `X` block to full rank (Hadamards on a
/// complementary pivot set), then to the identity; diagonal `Y`s and
/// negative signs are removed with `S†` and `Z`. The inverse of the applied
/// local operations is stored per qubit. All qubits are labeled as inputs.
pub fn to_graph_state(state: &Tableau) -> GraphResource {
    let n = state.n_qubits();
    let mut t = state.clone();
    let mut applied = vec![LocalClifford::IDENTITY; n];
    let mut apply = |t: &mut Tableau, q: usize, u: LocalClifford| {
        t.apply_local(q, &u);
        applied[q] = u.after(&applied[q]);
    };

    // X-block pivots, then Z-only rows reduced off those columns.
    let (rows, x_pivots) = reduce_rows(t.generators().to_vec(), |r, c| r.x.get(c), 0..n);
    let in_x = {
        let mut v = vec![false; n];
        for &p in &x_pivots {
            v[p] = true;
        }
        v
    };
    let z_only: Vec<PauliString> = rows[x_pivots.len()..].to_vec();
    let free: Vec<usize> = (0..n).filter(|&c| !in_x[c]).collect();
    let (_, z_pivots) = reduce_rows(z_only, |r, c| r.z.get(c), free.into_iter());
    assert_eq!(x_pivots.len() + z_pivots.len(), n, "stabilizer state rank");
    for &q in &z_pivots {
        apply(&mut t, q, LocalClifford::H);
    }

    let (rows, pivots) = reduce_rows(t.generators().to_vec(), |r, c| r.x.get(c), 0..n);
    assert_eq!(pivots, (0..n).collect::<Vec<_>>());
    for (i, r) in rows.iter().enumerate() {
        if r.z.get(i) {
            apply(&mut t, i, LocalClifford::S_DAG);
        }
    }
    let (rows, _) = reduce_rows(t.generators().to_vec(), |r, c| r.x.get(c), 0..n);
    for (i, r) in rows.iter().enumerate() {
        if r.negative {
            apply(&mut t, i, LocalClifford::Z);
        }
    }
    let (rows, _) = reduce_rows(t.generators().to_vec(), |r, c| r.x.get(c), 0..n);

    let mut edges = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        debug_assert!(!r.negative && !r.z.get(i));
        for j in r.z.iter_ones() {
            debug_assert!(rows[j].z.get(i), "adjacency must be symmetric");
            if i < j {
                edges.push((i, j));
            }
        }
    }
    GraphResource {
        n_qubits: n,
        edges,
        local_cliffords: applied.iter().map(|u| u.inverse()).collect(),
        io_labels: vec![IoLabel::Input; n],
    }
}

/// Gauss-Jordan on the given columns; returns rows (pivot rows first, in
/// column order) and pivot columns.
fn reduce_rows(
    mut rows: Vec<PauliString>,
    bit: impl Fn(&PauliString, usize) -> bool,
    columns: impl Iterator<Item = usize>,
) -> (Vec<PauliString>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in columns {
        let Some(found) = (next..rows.len()).find(|&i| bit(&rows[i], col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != next && bit(r, col) {
                r.mul_assign(&pivot);
            }
        }
        pivots.push(col);
        next += 1;
    }
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_pair_is_single_edge() {
        let mut t = Tableau::zero_state(2);
        t.h(0);
        t.cnot(0, 1);
        let g = to_graph_state(&t);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert!(g.to_tableau().equivalent(&t));
    }

    #[test]
    fn ghz_is_star() {
        let mut t = Tableau::zero_state(3);
        t.h(0);
        t.cnot(0, 1);
        t.cnot(0, 2);
        let g = to_graph_state(&t);
        assert_eq!(g.edges.len(), 2);
        let degrees: Vec<usize> = (0..3).map(|q| g.neighbors(q).len()).collect();
        assert_eq!(degrees.iter().filter(|d| **d == 2).count(), 1);
        assert!(g.to_tableau().equivalent(&t));
    }

    #[test]
    fn graph_state_maps_to_itself() {
        let edges = vec![(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)];
        let g = GraphResource {
            n_qubits: 4,
            edges: edges.clone(),
            local_cliffords: vec![LocalClifford::IDENTITY; 4],
            io_labels: vec![IoLabel::Input; 4],
        };
        let back = to_graph_state(&g.to_tableau());
        let mut want = edges;
        want.sort_unstable();
        assert_eq!(back.edges, want);
        assert!(back.local_cliffords.iter().all(|u| u.is_identity()));
    }

    #[test]
    fn zero_state_and_json_shape() {
        let t = Tableau::zero_state(3);
        let g = to_graph_state(&t);
        assert!(g.edges.is_empty());
        assert!(g.to_tableau().equivalent(&t));
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"local_cliffords\":[\"X->+Z,Z->+X\""), "{json}");
        let back: GraphResource = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
