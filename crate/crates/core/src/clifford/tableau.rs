use serde::{Deserialize, Serialize};

use super::local::{product_phase, LocalClifford};
use super::Pauli;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// `(-1)^negative ⊗_j σ(x_j, z_j)` with `σ(1, 1) = Y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub x: BitVec,
    pub z: BitVec,
    pub negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            negative: false,
        }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    pub fn from_paulis(ps: &[Pauli], negative: bool) -> Self {
        let mut s = Self::identity(ps.len());
        for (q, p) in ps.iter().enumerate() {
            s.set(q, *p);
        }
        s.negative = negative;
        s
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// `self ← self · other`; the two must commute so the product stays Hermitian.
    pub fn mul_assign(&mut self, other: &Self) {
        let mut phase = 2 * (self.negative as i32) + 2 * (other.negative as i32);
        let support_a = or(&self.x, &self.z);
        let support_b = or(&other.x, &other.z);
        for q in and(&support_a, &support_b).iter_ones() {
            phase += product_phase(self.get(q), other.get(q));
        }
        let phase = phase.rem_euclid(4);
        debug_assert!(phase % 2 == 0, "product of anticommuting Paulis");
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.negative = phase == 2;
    }

    /// Human-readable form such as `-XZIY`.
    pub fn label(&self) -> String {
        let mut s = String::with_capacity(self.len() + 1);
        s.push(if self.negative { '-' } else { '+' });
        for q in 0..self.len() {
            s.push_str(&self.get(q).to_string());
        }
        s
    }

    fn restrict_without(&self, q: usize) -> Self {
        let n = self.len();
        let mut out = Self::identity(n - 1);
        for j in 0..n {
            if j != q {
                out.set(if j < q { j } else { j - 1 }, self.get(j));
            }
        }
        out.negative = self.negative;
        out
    }
}

fn or(a: &BitVec, b: &BitVec) -> BitVec {
    let words = a.words().iter().zip(b.words()).map(|(x, y)| x | y).collect();
    BitVec::from_words(a.len(), words)
}

fn and(a: &BitVec, b: &BitVec) -> BitVec {
    let words = a.words().iter().zip(b.words()).map(|(x, y)| x & y).collect();
    BitVec::from_words(a.len(), words)
}

/// Result of a Pauli measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    /// `true` for eigenvalue `-1`.
    pub outcome: bool,
    pub deterministic: bool,
    /// For random outcomes, a Pauli mapping the `+1` branch onto the `-1` branch.
    pub byproduct: Option<PauliString>,
}

/// Stabilizer state of `n` qubits given by `n` commuting, independent generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl Tableau {
    /// `|0...0>`.
    pub fn zero_state(n: usize) -> Self {
        Self {
            n,
            rows: (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect(),
        }
    }

    pub fn from_generators(rows: Vec<PauliString>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCircuit(
                "generator count must equal qubit count".into(),
            ));
        }
        let t = Self { n, rows };
        if !t.is_valid() {
            return Err(Error::InvalidCircuit(
                "generators must commute and be independent".into(),
            ));
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.rows
    }

    /// Generators commute pairwise and have full rank.
    pub fn is_valid(&self) -> bool {
        let commute = self
            .rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| a.commutes_with(b)));
        commute && self.rank() == self.n
    }

    fn rank(&self) -> usize {
        let rows: Vec<BitVec> = self.rows.iter().map(symplectic).collect();
        let order: Vec<usize> = (0..2 * self.n).collect();
        crate::gf2::reduce(&rows, &vec![false; rows.len()], &order).rank()
    }

    /// `A ⊗ B`, with the qubits of `other` appended.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let lift = |r: &PauliString, offset: usize| {
            let mut out = PauliString::identity(n);
            for q in 0..r.len() {
                out.set(q + offset, r.get(q));
            }
            out.negative = r.negative;
            out
        };
        let rows = self
            .rows
            .iter()
            .map(|r| lift(r, 0))
            .chain(other.rows.iter().map(|r| lift(r, self.n)))
            .collect();
        Self { n, rows }
    }

    pub fn h(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.negative ^= x & z;
            r.x.set(q, z);
            r.z.set(q, x);
        }
    }

    pub fn s(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.negative ^= x & z;
            r.z.set(q, z ^ x);
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target);
        for r in &mut self.rows {
            let (xa, za) = (r.x.get(control), r.z.get(control));
            let (xb, zb) = (r.x.get(target), r.z.get(target));
            r.negative ^= xa & zb & !(xb ^ za);
            r.x.set(target, xb ^ xa);
            r.z.set(control, za ^ zb);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    /// Conjugates every generator by the single-qubit Clifford `u` on `q`.
    pub fn apply_local(&mut self, q: usize, u: &LocalClifford) {
        for r in &mut self.rows {
            let (p, neg) = u.conjugate(r.get(q));
            r.set(q, p);
            r.negative ^= neg;
        }
    }

    /// Applies a Pauli operator (signs of anticommuting generators flip).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        for r in &mut self.rows {
            if !r.commutes_with(p) {
                r.negative = !r.negative;
            }
        }
    }

    /// `Some(negative)` if `±p` is in the stabilizer group.
    pub fn sign_of(&self, p: &PauliString) -> Option<bool> {
        let ech = self.echelon();
        let mut residual = symplectic(p);
        let mut acc = PauliString::identity(self.n);
        for (row, &col) in ech.iter().map(|(r, c)| (r, c)) {
            if residual.get(col) {
                residual.xor_assign(&symplectic(row));
                acc.mul_assign(row);
            }
        }
        residual.is_zero().then_some(acc.negative ^ p.negative)
    }

    /// Measures the Hermitian Pauli `obs`; `forced` picks the branch when random.
    pub fn measure(&mut self, obs: &PauliString, forced: bool) -> Measurement {
        let anti: Vec<usize> = (0..self.n)
            .filter(|&i| !self.rows[i].commutes_with(obs))
            .collect();
        match anti.split_first() {
            None => Measurement {
                outcome: self.sign_of(obs).expect("commuting Pauli lies in a maximal group"),
                deterministic: true,
                byproduct: None,
            },
            Some((&p, rest)) => {
                let pivot = self.rows[p].clone();
                for &i in rest {
                    self.rows[i].mul_assign(&pivot);
                }
                let mut new_row = obs.clone();
                new_row.negative = obs.negative ^ forced;
                self.rows[p] = new_row;
                Measurement {
                    outcome: forced,
                    deterministic: false,
                    byproduct: Some(pivot),
                }
            }
        }
    }

    pub fn measure_pauli(&mut self, q: usize, basis: Pauli, forced: bool) -> Measurement {
        assert!(basis != Pauli::I, "measurement basis must be X, Y or Z");
        let obs = PauliString::single(self.n, q, basis);
        self.measure(&obs, forced)
    }

    /// Drops qubit `q`, which must be in a `Z` eigenstate.
    pub fn remove_qubit(&mut self, q: usize) -> Result<()> {
        if q >= self.n || self.rows.iter().any(|r| r.x.get(q)) {
            return Err(Error::NotRemovable { qubit: q });
        }
        let zq = PauliString::single(self.n, q, Pauli::Z);
        let neg = self.sign_of(&zq).ok_or(Error::NotRemovable { qubit: q })?;
        let mut zrow = zq;
        zrow.negative = neg;
        // Make `zrow` a generator; the replaced row must take part in its expansion.
        let ech = self.echelon_with_members();
        let mut residual = symplectic(&zrow);
        let mut members = vec![false; self.n];
        for (row_sym, col, combo) in &ech {
            if residual.get(*col) {
                residual.xor_assign(row_sym);
                for (m, c) in members.iter_mut().zip(combo) {
                    *m ^= *c;
                }
            }
        }
        let p = (0..self.n)
            .find(|&i| members[i] && self.rows[i].z.get(q))
            .ok_or(Error::NotRemovable { qubit: q })?;
        self.rows[p] = zrow.clone();
        for i in 0..self.n {
            if i != p && self.rows[i].z.get(q) {
                self.rows[i].mul_assign(&zrow);
            }
        }
        let rows: Vec<PauliString> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != p)
            .map(|(_, r)| r.restrict_without(q))
            .collect();
        self.n -= 1;
        self.rows = rows;
        debug_assert!(self.is_valid());
        Ok(())
    }

    /// Removes several `Z`-eigenstate qubits; indices refer to the current order.
    pub fn remove_qubits(&mut self, qubits: &[usize]) -> Result<()> {
        let mut qs = qubits.to_vec();
        qs.sort_unstable();
        qs.dedup();
        for &q in qs.iter().rev() {
            self.remove_qubit(q)?;
        }
        Ok(())
    }

    /// Reduced row-echelon generators over columns `x_0..x_{n-1}, z_0..z_{n-1}`.
    pub fn canonical(&self) -> Vec<PauliString> {
        self.echelon().into_iter().map(|(r, _)| r).collect()
    }

    /// Same stabilizer group (hence the same state).
    pub fn equivalent(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical() == other.canonical()
    }

    fn echelon(&self) -> Vec<(PauliString, usize)> {
        let mut rows = self.rows.clone();
        let mut out = Vec::new();
        let mut next = 0;
        for col in 0..2 * self.n {
            let bit = |r: &PauliString| {
                if col < self.n {
                    r.x.get(col)
                } else {
                    r.z.get(col - self.n)
                }
            };
            let Some(found) = (next..rows.len()).find(|&i| bit(&rows[i])) else {
                continue;
            };
            rows.swap(next, found);
            let pivot = rows[next].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && bit(r) {
                    r.mul_assign(&pivot);
                }
            }
            out.push(col);
            next += 1;
        }
        rows.into_iter().zip(out).collect()
    }

    /// Echelon rows (symplectic form, pivot column, membership in original rows).
    fn echelon_with_members(&self) -> Vec<(BitVec, usize, Vec<bool>)> {
        let mut rows: Vec<(BitVec, Vec<bool>)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut m = vec![false; self.n];
                m[i] = true;
                (symplectic(r), m)
            })
            .collect();
        let mut out = Vec::new();
        let mut next = 0;
        for col in 0..2 * self.n {
            let Some(found) = (next..rows.len()).find(|&i| rows[i].0.get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot = rows[next].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && r.0.get(col) {
                    r.0.xor_assign(&pivot.0);
                    for (a, b) in r.1.iter_mut().zip(&pivot.1) {
                        *a ^= *b;
                    }
                }
            }
            out.push(col);
            next += 1;
        }
        rows.into_iter()
            .zip(out)
            .map(|((s, m), c)| (s, c, m))
            .collect()
    }
}

/// `(x | z)` as one `2n`-bit vector.
fn symplectic(p: &PauliString) -> BitVec {
    let n = p.len();
    let mut v = BitVec::zeros(2 * n);
    for q in p.x.iter_ones() {
        v.set(q, true);
    }
    for q in p.z.iter_ones() {
        v.set(n + q, true);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Tableau {
        let mut t = Tableau::zero_state(2);
        t.h(0);
        t.cnot(0, 1);
        t
    }

    #[test]
    fn bell_pair_stabilizers() {
        let t = bell();
        let xx = PauliString::from_paulis(&[Pauli::X, Pauli::X], false);
        let zz = PauliString::from_paulis(&[Pauli::Z, Pauli::Z], false);
        let yy = PauliString::from_paulis(&[Pauli::Y, Pauli::Y], false);
        assert_eq!(t.sign_of(&xx), Some(false));
        assert_eq!(t.sign_of(&zz), Some(false));
        assert_eq!(t.sign_of(&yy), Some(true));
        assert_eq!(t.sign_of(&PauliString::single(2, 0, Pauli::Z)), None);
    }

    #[test]
    fn measurement_examples() {
        let mut t = Tableau::zero_state(1);
        let m = t.measure_pauli(0, Pauli::Z, true);
        assert!(m.deterministic && !m.outcome);

        for forced in [false, true] {
            let mut b = bell();
            let m = b.measure_pauli(0, Pauli::Z, forced);
            assert!(!m.deterministic);
            assert_eq!(m.outcome, forced);
            assert!(m.byproduct.is_some());
            let again = b.measure_pauli(0, Pauli::Z, !forced);
            assert!(again.deterministic);
            assert_eq!(again.outcome, forced);
            // partner is now correlated
            let other = b.measure_pauli(1, Pauli::Z, false);
            assert!(other.deterministic && other.outcome == forced);
        }
    }

    #[test]
    fn byproduct_maps_branches() {
        let mut plus = bell();
        let m = plus.measure_pauli(1, Pauli::X, false);
        let mut minus = bell();
        minus.measure_pauli(1, Pauli::X, true);
        plus.apply_pauli(&m.byproduct.unwrap());
        assert!(plus.equivalent(&minus));
    }

    #[test]
    fn y_measurement() {
        let mut t = Tableau::zero_state(1);
        t.h(0);
        t.s(0);
        let m = t.measure_pauli(0, Pauli::Y, true);
        assert!(m.deterministic && !m.outcome);
    }

    #[test]
    fn remove_requires_z_eigenstate() {
        let mut t = bell();
        assert!(t.remove_qubit(1).is_err());
        t.measure_pauli(1, Pauli::Z, true);
        t.remove_qubit(1).unwrap();
        assert_eq!(t.n_qubits(), 1);
        let mut one = Tableau::zero_state(1);
        one.apply_pauli(&PauliString::single(1, 0, Pauli::X));
        assert!(t.equivalent(&one));
    }

    #[test]
    fn canonical_ignores_generator_basis() {
        let a = bell();
        let rows = vec![
            PauliString::from_paulis(&[Pauli::Y, Pauli::Y], true),
            PauliString::from_paulis(&[Pauli::X, Pauli::X], false),
        ];
        let b = Tableau::from_generators(rows).unwrap();
        assert!(a.equivalent(&b));
        assert!(Tableau::from_generators(vec![
            PauliString::from_paulis(&[Pauli::X, Pauli::I], false),
            PauliString::from_paulis(&[Pauli::Z, Pauli::I], false),
        ])
        .is_err());
    }

    #[test]
    fn local_clifford_matches_gates() {
        for q in 0..3 {
            let mut a = Tableau::zero_state(3);
            a.h(0);
            a.cnot(0, 1);
            a.cnot(1, 2);
            let mut b = a.clone();
            a.h(q);
            a.s(q);
            b.apply_local(q, &LocalClifford::S.after(&LocalClifford::H));
            assert!(a.equivalent(&b));
        }
    }
}
