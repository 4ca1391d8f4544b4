//! Bell-diagonal two-qubit states.
//!
//! A state is stored as the four weights `p_kl` of the Bell basis
//! `|B_kl> = (1 ⊗ X^l Z^k)|φ+>`, in the order `(p00, p01, p10, p11)`. The
//! index of `p_kl` is `2k + l`, so combining two Pauli frames is an XOR of
//! indices. Every channel used by the repeater (local depolarizing noise,
//! twirling, swapping, bilateral CNOT bookkeeping) keeps states Bell-diagonal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of `sum(p)` from 1 for user-supplied states.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Drift after composed operations beyond which something is broken.
pub const DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal {
    p: [f64; 4],
}

#[inline]
pub const fn bell_index(k: u8, l: u8) -> usize {
    ((k as usize & 1) << 1) | (l as usize & 1)
}

impl BellDiagonal {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(p));
        }
        Ok(Self { p })
    }

    /// The ideal pair `|φ+>`.
    pub const fn perfect() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub const fn maximally_mixed() -> Self {
        Self { p: [0.25; 4] }
    }

    /// Internal constructor for results of channels: sums may drift by
    /// rounding, but never by more than [`DRIFT_TOL`].
    pub(crate) fn from_channel(p: [f64; 4]) -> Self {
        let sum: f64 = p.iter().sum();
        assert!(
            (sum - 1.0).abs() <= DRIFT_TOL && p.iter().all(|x| *x >= -DRIFT_TOL),
            "Bell-diagonal normalization drifted: {p:?}"
        );
        Self {
            p: p.map(|x| x.max(0.0)),
        }
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    pub fn prob(&self, k: u8, l: u8) -> f64 {
        self.p[bell_index(k, l)]
    }

    /// Overlap with `|φ+>`.
    pub fn fidelity(&self) -> f64 {
        self.p[0]
    }

    pub fn is_werner(&self, tol: f64) -> bool {
        let e = (1.0 - self.p[0]) / 3.0;
        self.p[1..].iter().all(|x| (x - e).abs() <= tol)
    }

    /// Shannon entropy of the Bell weights in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        shannon_bits(&self.p)
    }

    /// Depolarizing noise of reliability `noise.p_ldn` on one of the two qubits.
    pub fn apply_ldn_one_qubit(&self, noise: NoiseParams) -> Self {
        let p = noise.p_ldn();
        let mix = (1.0 - p) / 4.0;
        Self::from_channel(self.p.map(|x| p * x + mix))
    }

    /// Projects onto the Werner state with the same fidelity.
    pub fn twirl_to_werner(&self) -> WernerParams {
        WernerParams {
            fidelity: self.fidelity(),
        }
    }

    /// Bell-measurement connection of two pairs, Pauli byproducts corrected.
    ///
    /// The output weights are the convolution of the inputs over `Z2 x Z2`.
    pub fn swap(&self, other: &Self) -> Self {
        let mut out = [0.0; 4];
        for (i, a) in self.p.iter().enumerate() {
            for (j, b) in other.p.iter().enumerate() {
                out[i ^ j] += a * b;
            }
        }
        Self::from_channel(out)
    }

    /// The pair a perfect protocol sees when every resource input qubit
    /// carries depolarizing noise: one noise layer per end of the pair.
    pub fn effective_input(&self, resource_noise: NoiseParams) -> Self {
        self.apply_ldn_one_qubit(resource_noise)
            .apply_ldn_one_qubit(resource_noise)
    }
}

impl Default for BellDiagonal {
    fn default() -> Self {
        Self::perfect()
    }
}

pub(crate) fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|x| **x > 0.0)
        .map(|x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Werner state `F|φ+><φ+| + (1-F)/3 (rest)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    fidelity: f64,
}

impl WernerParams {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::OutOfRange {
                name: "fidelity",
                value: fidelity,
                expected: "[0, 1]",
            });
        }
        Ok(Self { fidelity })
    }

    pub fn from_weight(q: f64) -> Result<Self> {
        Self::new((1.0 + 3.0 * q) / 4.0)
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    /// Werner weight `q = (4F - 1)/3`, in `[-1/3, 1]`.
    pub fn weight(&self) -> f64 {
        (4.0 * self.fidelity - 1.0) / 3.0
    }

    pub fn as_bell_diagonal(&self) -> BellDiagonal {
        let e = (1.0 - self.fidelity) / 3.0;
        BellDiagonal::from_channel([self.fidelity, e, e, e])
    }

    /// Closed-form entropy `-F log F - (1-F) log((1-F)/3)`.
    pub fn entropy(&self) -> f64 {
        werner_entropy(self.fidelity)
    }
}

pub fn werner_entropy(fidelity: f64) -> f64 {
    let f = fidelity;
    let e = (1.0 - f) / 3.0;
    let mut s = 0.0;
    if f > 0.0 {
        s -= f * f.log2();
    }
    if e > 0.0 {
        s -= (1.0 - f) * e.log2();
    }
    s.max(0.0)
}

/// Local depolarizing noise `D(p)ρ = pρ + (1-p)/4 Σ_σ σρσ`; `p = 1` is noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    p_ldn: f64,
}

impl NoiseParams {
    pub fn new(p_ldn: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_ldn) {
            return Err(Error::OutOfRange {
                name: "p_ldn",
                value: p_ldn,
                expected: "[0, 1]",
            });
        }
        Ok(Self { p_ldn })
    }

    pub const fn noiseless() -> Self {
        Self { p_ldn: 1.0 }
    }

    pub fn p_ldn(&self) -> f64 {
        self.p_ldn
    }

    /// Noise of two layers applied in sequence on the same qubit.
    pub fn compose(self, other: Self) -> Self {
        Self {
            p_ldn: self.p_ldn * other.p_ldn,
        }
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::noiseless()
    }
}

/// Fidelity of a perfect pair after one noise layer on each of its qubits.
pub fn output_noise_fidelity(noise: NoiseParams) -> f64 {
    BellDiagonal::perfect()
        .effective_input(noise)
        .fidelity()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn werner(f: f64) -> BellDiagonal {
        WernerParams::new(f).unwrap().as_bell_diagonal()
    }

    #[test]
    fn entropy_limits() {
        assert_eq!(werner(1.0).entropy(), 0.0);
        assert!((BellDiagonal::maximally_mixed().entropy() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_werner_golden() {
        // 50-digit evaluation of the closed form.
        let s = werner(0.95).entropy();
        assert!((s - 0.365_645_082_152_014).abs() < 1e-12, "{s}");
        assert!((werner_entropy(0.95) - s).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(BellDiagonal::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(BellDiagonal::new([1.1, -0.1, 0.0, 0.0]).is_err());
        assert!(WernerParams::new(1.01).is_err());
        assert!(NoiseParams::new(-0.1).is_err());
    }

    #[test]
    fn ldn_identity_and_werner_weight() {
        let s = BellDiagonal::new([0.9, 0.05, 0.03, 0.02]).unwrap();
        assert_eq!(s.apply_ldn_one_qubit(NoiseParams::noiseless()), s);

        let p = NoiseParams::new(0.9).unwrap();
        let out = BellDiagonal::perfect().apply_ldn_one_qubit(p);
        assert!((out.fidelity() - (1.0 + 3.0 * 0.9) / 4.0).abs() < 1e-15);
        assert!(out.is_werner(1e-15));
    }

    #[test]
    fn output_noise_on_both_qubits() {
        let f = output_noise_fidelity(NoiseParams::new(0.99).unwrap());
        assert!((f - 0.985075).abs() < 1e-12);
    }

    #[test]
    fn twirl_keeps_fidelity() {
        let s = BellDiagonal::new([0.9, 0.05, 0.03, 0.02]).unwrap();
        assert_eq!(s.twirl_to_werner().fidelity(), 0.9);
        let w = WernerParams::new(0.8).unwrap();
        assert_eq!(w.as_bell_diagonal().twirl_to_werner(), w);
        assert_eq!(
            BellDiagonal::maximally_mixed().twirl_to_werner().fidelity(),
            0.25
        );
    }

    #[test]
    fn swap_with_perfect_is_identity() {
        let s = BellDiagonal::new([0.7, 0.1, 0.15, 0.05]).unwrap();
        assert_eq!(BellDiagonal::perfect().swap(&s), s);
        let mut chain = BellDiagonal::perfect();
        for _ in 0..10 {
            chain = chain.swap(&BellDiagonal::perfect());
        }
        assert_eq!(chain, BellDiagonal::perfect());
    }

    #[test]
    fn swap_multiplies_werner_weights() {
        let a = WernerParams::new(0.9).unwrap();
        let b = WernerParams::new(0.8).unwrap();
        let out = a.as_bell_diagonal().swap(&b.as_bell_diagonal());
        assert!(out.is_werner(1e-15));
        let q = out.twirl_to_werner().weight();
        assert!((q - a.weight() * b.weight()).abs() < 1e-14);
    }

    #[test]
    fn effective_input_values() {
        let p = NoiseParams::new(0.99).unwrap();
        let out = werner(0.95).effective_input(p);
        let q = out.twirl_to_werner().weight();
        assert!((q - 0.933_333_333_333_333_3 * 0.9801).abs() < 1e-14);
        assert!((out.fidelity() - 0.93607).abs() < 1e-14);
        assert_eq!(
            werner(0.95).effective_input(NoiseParams::noiseless()),
            werner(0.95)
        );
    }
}
