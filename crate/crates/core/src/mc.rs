//! Monte-Carlo hashing on classical error strings.
//!
//! Each of the `n` Bell-diagonal pairs carries a Pauli frame `(k, l)`; the
//! ensemble is the `2n`-bit string `k_0 l_0 k_1 l_1 ...`. A hashing round
//! reveals the parity of the string on a random subset, so the protocol is
//! simulated exactly by linear algebra over GF(2) plus a typical-set check.
//!
//! Small ensembles (`2n <= 26`) are decoded by enumerating every string
//! consistent with the parities. Larger ones check that the true string is
//! typical and then search for a typical collision by information-set
//! sampling; that search can miss collisions, so those reports are flagged
//! approximate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{output_noise_fidelity, BellDiagonal, NoiseParams, WernerParams};
use crate::bounds::{self, DeltaSchedule};
use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};

/// Largest string length decoded by full enumeration.
pub const EXHAUSTIVE_MAX_BITS: usize = 26;

/// Information sets tried per trial in approximate mode.
pub const COLLISION_SEARCH_ITERS: usize = 2;

const WILSON_Z: f64 = 1.959_963_984_540_054;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEnsemble {
    n: usize,
    bits: BitVec,
    source: BellDiagonal,
}

impl ErrorEnsemble {
    pub fn from_bits(source: BellDiagonal, bits: BitVec) -> Result<Self> {
        if !bits.len().is_multiple_of(2) || bits.is_empty() {
            return Err(Error::OutOfRange {
                name: "bits",
                value: bits.len() as f64,
                expected: "even length >= 2",
            });
        }
        Ok(Self {
            n: bits.len() / 2,
            bits,
            source,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn source(&self) -> &BellDiagonal {
        &self.source
    }

    /// Frame `(k, l)` of pair `i`.
    pub fn pair(&self, i: usize) -> (u8, u8) {
        (self.bits.get(2 * i) as u8, self.bits.get(2 * i + 1) as u8)
    }
}

/// Draws `n` i.i.d. frames from `source`.
pub fn sample_ensemble(source: BellDiagonal, n: usize, seed: u64) -> Result<ErrorEnsemble> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            expected: "[1, inf)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_with(&source, n, &mut rng))
}

fn sample_with<R: Rng>(source: &BellDiagonal, n: usize, rng: &mut R) -> ErrorEnsemble {
    let p = source.probs();
    let cum = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
    let mut bits = BitVec::zeros(2 * n);
    for i in 0..n {
        let u: f64 = rng.random();
        let idx = cum.iter().filter(|c| u >= **c).count();
        // idx = 2k + l; zero-probability symbols are skipped by the strict bounds
        let idx = if p[idx] == 0.0 {
            (0..4).rev().find(|&j| p[j] > 0.0 && j <= idx).unwrap_or(0)
        } else {
            idx
        };
        bits.set(2 * i, idx & 2 != 0);
        bits.set(2 * i + 1, idx & 1 != 0);
    }
    ErrorEnsemble {
        n,
        bits,
        source: *source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRound {
    pub mask: BitVec,
    pub outcome: bool,
}

impl ParityRound {
    pub fn holds_for(&self, bits: &BitVec) -> bool {
        self.mask.dot(bits) == self.outcome
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashingOutcome {
    pub success: bool,
    /// Unique likely string consistent with all parities, if there is one.
    pub decoded: Option<BitVec>,
    pub rounds: usize,
    pub parities: Vec<ParityRound>,
    pub truth_typical: bool,
    pub approximate: bool,
}

/// Per-symbol surprisal and the typicality window.
struct Typicality {
    surprisal: [f64; 4],
    center: f64,
    width: f64,
}

impl Typicality {
    fn new(source: &BellDiagonal, n: usize, delta: f64) -> Self {
        let surprisal = source
            .probs()
            .map(|p| if p > 0.0 { -p.log2() } else { f64::INFINITY });
        let nf = n as f64;
        Self {
            surprisal,
            center: nf * source.entropy(),
            // inclusive boundary, with room for summation rounding
            width: nf * delta + 1e-9 * nf.max(1.0),
        }
    }

    fn accepts_total(&self, total: f64) -> bool {
        (total - self.center).abs() <= self.width
    }

    fn accepts(&self, bits: &BitVec, n: usize) -> bool {
        let total: f64 = (0..n)
            .map(|i| {
                let idx = ((bits.get(2 * i) as usize) << 1) | bits.get(2 * i + 1) as usize;
                self.surprisal[idx]
            })
            .sum();
        self.accepts_total(total)
    }

    fn accepts_word(&self, x: u64, n: usize) -> bool {
        let total: f64 = (0..n)
            .map(|i| {
                let sym = (x >> (2 * i)) & 3;
                // bit 2i is k, bit 2i+1 is l; index is 2k + l
                let idx = (((sym & 1) << 1) | (sym >> 1)) as usize;
                self.surprisal[idx]
            })
            .sum();
        self.accepts_total(total)
    }
}

/// Parity rounds needed at slack `delta`: `ceil(n (S + 2δ))`, at least one.
pub fn rounds_for(source: &BellDiagonal, n: usize, delta: f64) -> Result<usize> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            expected: "[0, inf)",
        });
    }
    let r = (n as f64 * (source.entropy() + 2.0 * delta) - 1e-9).ceil().max(1.0) as u64;
    if r > 2 * n as u64 {
        return Err(Error::TooManyRounds {
            rounds: r,
            max: 2 * n as u64,
        });
    }
    Ok(r as usize)
}

fn random_mask<R: Rng>(len: usize, rng: &mut R) -> BitVec {
    loop {
        let words = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let m = BitVec::from_words(len, words);
        if !m.is_zero() {
            return m;
        }
    }
}

/// Runs the hashing protocol on a known error string and decodes it.
pub fn run_hashing(ensemble: &ErrorEnsemble, delta: f64, seed: u64) -> Result<HashingOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    hashing_with(ensemble, delta, &mut rng)
}

fn hashing_with<R: Rng>(ens: &ErrorEnsemble, delta: f64, rng: &mut R) -> Result<HashingOutcome> {
    let n = ens.n;
    let width = 2 * n;
    let rounds = rounds_for(&ens.source, n, delta)?;
    let parities: Vec<ParityRound> = (0..rounds)
        .map(|_| {
            let mask = random_mask(width, rng);
            let outcome = mask.dot(&ens.bits);
            ParityRound { mask, outcome }
        })
        .collect();
    let typ = Typicality::new(&ens.source, n, delta);
    let truth_typical = typ.accepts(&ens.bits, n);
    let masks: Vec<BitVec> = parities.iter().map(|p| p.mask.clone()).collect();
    let rhs: Vec<bool> = parities.iter().map(|p| p.outcome).collect();

    if width <= EXHAUSTIVE_MAX_BITS {
        let order: Vec<usize> = (0..width).collect();
        let ech = gf2::reduce(&masks, &rhs, &order);
        debug_assert!(ech.consistent);
        let free = ech.free_columns(width);
        let base = ech.solution(width, &free, &BitVec::zeros(free.len())).words()[0];
        let kernel: Vec<u64> = free
            .iter()
            .map(|&c| ech.kernel_vector(width, c).words()[0])
            .collect();
        let mut x = base;
        let mut found = None;
        let mut count = 0usize;
        for i in 0u64..(1u64 << free.len()) {
            if i > 0 {
                x ^= kernel[i.trailing_zeros() as usize];
            }
            if typ.accepts_word(x, n) {
                count += 1;
                found = Some(x);
                if count > 1 {
                    break;
                }
            }
        }
        let truth = ens.bits.words()[0];
        let decoded = (count == 1).then(|| BitVec::from_words(width, vec![found.unwrap()]));
        let success = count == 1 && found == Some(truth);
        assert!(
            !success || decoded.as_ref() == Some(&ens.bits),
            "decoder reported success on a wrong string"
        );
        return Ok(HashingOutcome {
            success,
            decoded,
            rounds,
            parities,
            truth_typical,
            approximate: false,
        });
    }

    if !truth_typical {
        return Ok(HashingOutcome {
            success: false,
            decoded: None,
            rounds,
            parities,
            truth_typical,
            approximate: true,
        });
    }
    let mut collision = false;
    let mut order: Vec<usize> = (0..width).collect();
    'search: for _ in 0..COLLISION_SEARCH_ITERS {
        for i in (1..width).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let zeros = vec![false; masks.len()];
        let ech = gf2::reduce(&masks, &zeros, &order);
        for c in ech.free_columns(width) {
            let mut cand = ech.kernel_vector(width, c);
            cand.xor_assign(&ens.bits);
            if typ.accepts(&cand, n) {
                collision = true;
                break 'search;
            }
        }
    }
    Ok(HashingOutcome {
        success: !collision,
        decoded: (!collision).then(|| ens.bits.clone()),
        rounds,
        parities,
        truth_typical,
        approximate: true,
    })
}

/// Two-sided 95% Wilson score interval for `k` successes in `t` trials.
pub fn wilson_interval(k: u64, t: u64) -> (f64, f64) {
    if t == 0 {
        return (0.0, 1.0);
    }
    let (k, t) = (k as f64, t as f64);
    let z2 = WILSON_Z * WILSON_Z;
    let p = k / t;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    let lo = if k == 0.0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == t { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub fidelity: f64,
    pub n: usize,
    pub delta: f64,
    pub rounds: usize,
    pub trials: u64,
    pub failures: u64,
    pub empirical_p_fail: f64,
    /// `p1 + p2` from the closed-form bound.
    pub analytic_bound: f64,
    pub wilson_ci: (f64, f64),
    pub approximate: bool,
}

impl McReport {
    /// The data do not reject `p_fail <= bound` at 95% (vacuous bounds pass).
    pub fn dominated(&self) -> bool {
        self.analytic_bound >= 1.0 || self.wilson_ci.0 <= self.analytic_bound
    }

    /// Stricter reading: even the upper confidence limit lies below the bound.
    pub fn strictly_dominated(&self) -> bool {
        self.analytic_bound >= 1.0 || self.wilson_ci.1 <= self.analytic_bound
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < 100 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: trials as f64,
            expected: "[100, inf)",
        });
    }
    Ok(())
}

/// Failure statistics for i.i.d. runs on one source; trial `t` uses stream `t` of `seed`.
pub fn failure_statistics(
    source: BellDiagonal,
    n: usize,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<(u64, bool)> {
    rounds_for(&source, n, delta)?;
    let results: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let ens = sample_with(&source, n, &mut rng);
            let out = hashing_with(&ens, delta, &mut rng).expect("rounds checked above");
            (out.success, out.approximate)
        })
        .collect();
    let failures = results.iter().filter(|r| !r.0).count() as u64;
    let approximate = results.iter().any(|r| r.1);
    Ok((failures, approximate))
}

/// One report per `n`, for Werner inputs of fidelity `fidelity`.
pub fn validate_bound(
    fidelity: f64,
    n_grid: &[usize],
    schedule: DeltaSchedule,
    trials: u64,
    seed: u64,
) -> Result<Vec<McReport>> {
    check_trials(trials)?;
    let source = WernerParams::new(fidelity)?.as_bell_diagonal();
    let entropy = source.entropy();
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let delta = schedule.resolve(n as u64, entropy)?;
            let rounds = rounds_for(&source, n, delta)?;
            let analytic_bound = if fidelity >= 1.0 {
                bounds::p2_bound(n as u64, delta)?
            } else {
                bounds::p1_bound(fidelity, n as u64, delta)? + bounds::p2_bound(n as u64, delta)?
            };
            let (failures, approximate) =
                failure_statistics(source, n, delta, trials, seed.wrapping_add(i as u64))?;
            Ok(McReport {
                fidelity,
                n,
                delta,
                rounds,
                trials,
                failures,
                empirical_p_fail: failures as f64 / trials as f64,
                analytic_bound,
                wilson_ci: wilson_interval(failures, trials),
                approximate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub links: u64,
    pub n: usize,
    pub delta: f64,
    pub trials: u64,
    /// Trials in which every link decoded correctly.
    pub successes: u64,
    /// `f_out · successes / trials`, counting failed chains as fidelity 0.
    pub fidelity_estimate: f64,
    pub fidelity_ci: (f64, f64),
    /// `F_gp · f_out` from the closed-form bound.
    pub analytic_lower_bound: f64,
    pub approximate: bool,
}

impl ChainReport {
    pub fn dominates_bound(&self) -> bool {
        self.fidelity_ci.1 >= self.analytic_lower_bound
    }
}

/// End-to-end simulation of `links` independently hashed segments.
///
/// Inputs carry `resource_noise` on both qubits; a chain where every segment
/// succeeds delivers a perfect pair, which then receives the output noise.
pub fn simulate_chain(
    fidelity: f64,
    links: u64,
    n: usize,
    schedule: DeltaSchedule,
    resource_noise: NoiseParams,
    trials: u64,
    seed: u64,
) -> Result<ChainReport> {
    check_trials(trials)?;
    let source = WernerParams::new(fidelity)?
        .as_bell_diagonal()
        .effective_input(resource_noise);
    let delta = schedule.resolve(n as u64, source.entropy())?;
    rounds_for(&source, n, delta)?;
    let analytic = bounds::global_private_fidelity(source.fidelity(), n as u64, schedule, links)?;
    let f_out = output_noise_fidelity(resource_noise);
    let results: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let mut ok = true;
            let mut approximate = false;
            for _ in 0..links {
                let ens = sample_with(&source, n, &mut rng);
                let out = hashing_with(&ens, delta, &mut rng).expect("rounds checked above");
                approximate |= out.approximate;
                ok &= out.success;
            }
            (ok, approximate)
        })
        .collect();
    let successes = results.iter().filter(|r| r.0).count() as u64;
    let (lo, hi) = wilson_interval(successes, trials);
    Ok(ChainReport {
        links,
        n,
        delta,
        trials,
        successes,
        fidelity_estimate: f_out * successes as f64 / trials as f64,
        fidelity_ci: (f_out * lo, f_out * hi),
        analytic_lower_bound: analytic.f_gp * f_out,
        approximate: results.iter().any(|r| r.1),
    })
}
