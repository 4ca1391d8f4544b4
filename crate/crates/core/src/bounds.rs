//! Closed-form finite-size analytics of the hashing protocol.
//!
//! Failure of hashing on `n` i.i.d. Werner pairs is bounded by `p1 + p2`:
//!
//! * `p1` is a Bennett-inequality tail bound on the error string falling
//!   outside the likely set, `2 exp{-(n/a)[(g+δ) ln(1+δ/g) - δ]}`;
//! * `p2 = 2^{-nδ}` bounds two likely strings agreeing on all
//!   `n(S + 2δ)` random parities.
//!
//! Entropies are in bits. The logarithm inside the Bennett bracket is the
//! natural one. All quantities are evaluated from the infidelity `1 - F` so
//! that bounds very close to 1 keep their precision.

use serde::{Deserialize, Serialize};

use crate::bell::{NoiseParams, WernerParams};
use crate::error::{Error, Result};

/// Largest ensemble size searched by [`n_min_search`].
pub const N_MIN_CAP: u64 = 10_000_000;

/// Minimum coefficient of determination accepted by [`fit_alpha_beta`].
pub const MIN_R_SQUARED: f64 = 0.99;

/// Entropy, range, variance and their ratio for the per-pair surprisal
/// `X = -log2 p_kl - S` of a Werner ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BennettTerms {
    pub entropy: f64,
    /// `a(F) = |log2((1-F)/3)| + S(F)`; infinite for a pure ensemble.
    pub scale: f64,
    pub variance: f64,
    /// `g(F) = V(F) / a(F)`.
    pub ratio: f64,
}

impl BennettTerms {
    /// True for `F = 1`, where the surprisal is deterministic.
    pub fn is_pure(&self) -> bool {
        self.variance == 0.0 && self.entropy == 0.0
    }
}

/// Bennett terms for Werner fidelity `F ∈ (0.25, 1]`.
pub fn bennett_terms(fidelity: f64) -> Result<BennettTerms> {
    if !(fidelity > 0.25 && fidelity <= 1.0) {
        return Err(Error::FidelityDomain(fidelity));
    }
    Ok(terms_from_infidelity(1.0 - fidelity))
}

fn terms_from_infidelity(e: f64) -> BennettTerms {
    if e <= 0.0 {
        return BennettTerms {
            entropy: 0.0,
            scale: f64::INFINITY,
            variance: 0.0,
            ratio: 0.0,
        };
    }
    let ln2 = std::f64::consts::LN_2;
    let log_f = (-e).ln_1p() / ln2;
    let log_err = (e / 3.0).log2();
    let f = 1.0 - e;
    let entropy = -f * log_f - e * log_err;
    let second = f * log_f * log_f + e * log_err * log_err;
    let variance = (second - entropy * entropy).max(0.0);
    let scale = log_err.abs() + entropy;
    BennettTerms {
        entropy,
        scale,
        variance,
        ratio: variance / scale,
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            expected: "[0, inf)",
        });
    }
    Ok(())
}

fn p1_from_terms(t: &BennettTerms, n: u64, delta: f64) -> f64 {
    if delta == 0.0 {
        return 2.0;
    }
    if t.is_pure() || t.ratio == 0.0 {
        // The surprisal is constant; it never deviates by more than nδ > 0.
        return 0.0;
    }
    let g = t.ratio;
    let bracket = (g + delta) * (delta / g).ln_1p() - delta;
    2.0 * (-(n as f64) / t.scale * bracket).exp()
}

/// Raw Bennett bound on the probability of an atypical error string.
pub fn p1_bound(fidelity: f64, n: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let t = bennett_terms(fidelity)?;
    Ok(p1_from_terms(&t, n.max(1), delta))
}

/// Bound `2^{-nδ}` on a surviving collision after `n(S+2δ)` parity rounds.
pub fn p2_bound(n: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((-(n as f64) * delta).exp2())
}

/// Rule that fixes the slack `δ` for a given ensemble size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaSchedule {
    /// `δ = n^{-exponent}` with `exponent ∈ (0, 1)`.
    Power { exponent: f64 },
    Fixed { value: f64 },
    /// The `δ` that leaves exactly one output pair.
    NToOne,
}

impl DeltaSchedule {
    pub fn power(exponent: f64) -> Result<Self> {
        let s = Self::Power { exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Power { exponent } if !(exponent > 0.0 && exponent < 1.0) => {
                Err(Error::OutOfRange {
                    name: "exponent",
                    value: exponent,
                    expected: "(0, 1)",
                })
            }
            Self::Fixed { value } => check_delta(value),
            _ => Ok(()),
        }
    }

    /// Concrete `δ` for an ensemble of `n` pairs with entropy `entropy`.
    pub fn resolve(&self, n: u64, entropy: f64) -> Result<f64> {
        self.validate()?;
        let nf = n.max(1) as f64;
        match *self {
            Self::Power { exponent } => Ok(nf.powf(-exponent)),
            Self::Fixed { value } => Ok(value),
            Self::NToOne => {
                let delta = 0.5 * ((nf - 1.0) / nf - entropy);
                if delta < 0.0 {
                    Err(Error::NTooSmall { n, delta })
                } else {
                    Ok(delta)
                }
            }
        }
    }
}

/// Every derived quantity for one `(F, n, δ, N)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashingBound {
    pub fidelity_in: f64,
    pub n: u64,
    pub delta: f64,
    pub links: u64,
    pub terms: BennettTerms,
    pub p1: f64,
    pub p2: f64,
    /// `(1 - p1 - p2)^N`, clamped to `[0, 1]`.
    pub f_gp: f64,
    /// First-order form `1 - N (p1 + p2)`, clamped to `[0, 1]`.
    pub f_gp_linear: f64,
    /// `1 - S - 2δ`; may be non-positive.
    pub yield_c: f64,
    /// Output pairs `floor(n c)`, zero when the yield vanishes.
    pub m: u64,
}

impl HashingBound {
    pub fn has_output(&self) -> bool {
        self.m > 0
    }

    pub fn p_fail(&self) -> f64 {
        self.p1 + self.p2
    }
}

fn product_fidelity(p_fail: f64, links: u64) -> f64 {
    if p_fail >= 1.0 {
        0.0
    } else {
        (links as f64 * (-p_fail).ln_1p()).exp().clamp(0.0, 1.0)
    }
}

fn output_pairs(n: u64, yield_c: f64) -> u64 {
    if yield_c <= 0.0 {
        0
    } else {
        // n·c = 1 exactly for the n->1 schedule; keep that from rounding to 0.
        (n as f64 * yield_c + 1e-9).floor() as u64
    }
}

/// Global private fidelity bound over `links` independently hashed segments.
///
/// A vanishing yield is reported through `m = 0`, not as an error.
pub fn global_private_fidelity(
    fidelity_in: f64,
    n: u64,
    schedule: DeltaSchedule,
    links: u64,
) -> Result<HashingBound> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            expected: "[1, inf)",
        });
    }
    if links == 0 {
        return Err(Error::OutOfRange {
            name: "links",
            value: 0.0,
            expected: "[1, inf)",
        });
    }
    let terms = bennett_terms(fidelity_in)?;
    let delta = schedule.resolve(n, terms.entropy)?;
    let p1 = p1_from_terms(&terms, n, delta);
    let p2 = (-(n as f64) * delta).exp2();
    let p_fail = p1 + p2;
    let yield_c = 1.0 - terms.entropy - 2.0 * delta;
    Ok(HashingBound {
        fidelity_in,
        n,
        delta,
        links,
        terms,
        p1,
        p2,
        f_gp: product_fidelity(p_fail, links),
        f_gp_linear: (1.0 - links as f64 * p_fail).clamp(0.0, 1.0),
        yield_c,
        m: output_pairs(n, yield_c),
    })
}

/// How many parallel channels feed a repeater station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// `~n/η` channels; the station stores `2n` resource and `2n` pair qubits.
    Many,
    /// One channel; a single extra pair qubit is stored.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YieldOverhead {
    /// `max(0, 1 - S - 2δ)`.
    pub yield_c: f64,
    /// Qubits per output pair per station; `None` when the yield vanishes.
    pub overhead: Option<f64>,
}

/// Yield `c` and per-station overhead `O` (`4/c`, or `2/c + 1/n` with a single channel).
pub fn yield_and_overhead(
    fidelity_in: f64,
    delta: f64,
    mode: ChannelMode,
    n: u64,
) -> Result<YieldOverhead> {
    check_delta(delta)?;
    let entropy = bennett_terms(fidelity_in)?.entropy;
    let c = 1.0 - entropy - 2.0 * delta;
    if c <= 0.0 {
        return Ok(YieldOverhead {
            yield_c: 0.0,
            overhead: None,
        });
    }
    let overhead = match mode {
        ChannelMode::Many => 4.0 / c,
        ChannelMode::Single => 2.0 / c + 1.0 / n.max(1) as f64,
    };
    Ok(YieldOverhead {
        yield_c: c,
        overhead: Some(overhead),
    })
}

/// Werner fidelity at which the entropy reaches one bit (zero asymptotic yield).
pub fn hashing_threshold() -> f64 {
    let (mut lo, mut hi) = (0.75_f64, 1.0_f64);
    // S is decreasing on (0.75, 1): S(lo) > 1 > S(hi).
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if WernerParams::new(mid).map(|w| w.entropy()).unwrap_or(0.0) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper bound on the infidelity of the single pair left by n->1 hashing.
pub fn n_to_1_infidelity(infidelity_in: f64, n: u64) -> Result<f64> {
    if !(0.0..0.75).contains(&infidelity_in) {
        return Err(Error::FidelityDomain(1.0 - infidelity_in));
    }
    let terms = terms_from_infidelity(infidelity_in);
    let delta = DeltaSchedule::NToOne.resolve(n, terms.entropy)?;
    let p1 = p1_from_terms(&terms, n, delta);
    let p2 = (-(n as f64) * delta).exp2();
    Ok((p1 + p2).clamp(0.0, 1.0))
}

/// Lower bound on the fidelity of the single output pair of n->1 hashing.
pub fn n_to_1_fidelity(fidelity_in: f64, n: u64) -> Result<f64> {
    if !(fidelity_in > 0.25 && fidelity_in <= 1.0) {
        return Err(Error::FidelityDomain(fidelity_in));
    }
    Ok(1.0 - n_to_1_infidelity(1.0 - fidelity_in, n)?)
}

/// Smallest feasible `n` for n->1 hashing, i.e. with `δ >= 0`.
fn n_to_1_first_feasible(entropy: f64) -> u64 {
    if entropy >= 1.0 {
        return u64::MAX;
    }
    let mut n = (1.0 / (1.0 - entropy)).floor().max(1.0) as u64;
    while DeltaSchedule::NToOne.resolve(n, entropy).is_err() {
        n += 1;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NMin {
    pub n: u64,
    /// `β^{-1} ln(α N / (1 - F_target))` from an exponential fit around `n`.
    pub fit_estimate: Option<f64>,
}

fn n_min_satisfied(e_in: f64, n: u64, links: u64, target: f64) -> bool {
    match n_to_1_infidelity(e_in, n) {
        Ok(e_out) => 1.0 - links as f64 * e_out >= target,
        Err(_) => false,
    }
}

/// Smallest `n` with `1 - N (1 - F'(n)) >= F_target` for n->1 hashing.
pub fn n_min_search(fidelity_in: f64, links: u64, target: f64) -> Result<NMin> {
    let terms = bennett_terms(fidelity_in)?;
    let e_in = 1.0 - fidelity_in;
    let links = links.max(1);
    let start = n_to_1_first_feasible(terms.entropy);
    if start > N_MIN_CAP {
        return Err(Error::Unreachable { cap: N_MIN_CAP });
    }
    if n_min_satisfied(e_in, start, links, target) {
        return Ok(NMin {
            n: start,
            fit_estimate: None,
        });
    }
    // Exponential phase: `lo` fails, `hi` succeeds.
    let mut lo = start;
    let mut step = 1u64;
    let hi = loop {
        let probe = (lo + step).min(N_MIN_CAP);
        if n_min_satisfied(e_in, probe, links, target) {
            break probe;
        }
        if probe == N_MIN_CAP {
            return Err(Error::Unreachable { cap: N_MIN_CAP });
        }
        lo = probe;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if n_min_satisfied(e_in, mid, links, target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let fit_range: Vec<u64> = {
        let a = (hi / 2).max(start);
        let b = hi.saturating_mul(2).max(a + 8);
        let stride = ((b - a) / 64).max(1);
        (a..=b).step_by(stride as usize).collect()
    };
    let fit_estimate = fit_alpha_beta(fidelity_in, &fit_range)
        .ok()
        .map(|fit| fit.n_estimate(links, 1.0 - target));
    Ok(NMin {
        n: hi,
        fit_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concatenation {
    pub block_size: u64,
    /// Fidelity bound after each level, starting with level 1.
    pub fidelities: Vec<f64>,
    /// Same as `fidelities`, as infidelities (exact near 1).
    pub infidelities: Vec<f64>,
}

impl Concatenation {
    /// Elementary pairs consumed after `level` levels: `block^level`.
    pub fn total_pairs(&self, level: usize) -> f64 {
        (self.block_size as f64).powi(level as i32)
    }

    pub fn levels(&self) -> usize {
        self.fidelities.len()
    }
}

/// Repeated n->1 hashing of Werner blocks, re-twirled between levels.
///
/// Fails with [`Error::Stalled`] if any level does not improve the bound.
pub fn concatenated_n_to_1(fidelity_in: f64, block_size: u64, levels: usize) -> Result<Concatenation> {
    let out = concatenation_until_stall(fidelity_in, block_size, levels)?;
    if out.levels() < levels {
        let k = out.levels();
        let from = if k == 0 {
            fidelity_in
        } else {
            out.fidelities[k - 1]
        };
        let e_from = 1.0 - from;
        let to = 1.0 - n_to_1_infidelity(e_from, block_size)?;
        return Err(Error::Stalled {
            level: k + 1,
            from,
            to,
        });
    }
    Ok(out)
}

/// Like [`concatenated_n_to_1`] but stops quietly at the first level that
/// does not improve, returning the levels computed so far.
pub fn concatenation_until_stall(
    fidelity_in: f64,
    block_size: u64,
    max_levels: usize,
) -> Result<Concatenation> {
    bennett_terms(fidelity_in)?;
    let mut e = 1.0 - fidelity_in;
    let mut out = Concatenation {
        block_size,
        fidelities: Vec::new(),
        infidelities: Vec::new(),
    };
    for _ in 0..max_levels {
        let next = n_to_1_infidelity(e, block_size)?;
        if next >= e {
            break;
        }
        e = next;
        out.infidelities.push(e);
        out.fidelities.push(1.0 - e);
    }
    Ok(out)
}

/// Parameters of `F' >= 1 - α exp(-β n)` fitted to the explicit n->1 bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    /// Factor applied to the least-squares `α` so the fit lower-bounds every point.
    pub correction: f64,
}

impl FitParams {
    pub fn infidelity(&self, n: f64) -> f64 {
        self.alpha * (-self.beta * n).exp()
    }

    /// `n ≈ β^{-1} ln(α N / ε)` for `N` links and target infidelity `ε`.
    pub fn n_estimate(&self, links: u64, target_infidelity: f64) -> f64 {
        (self.alpha * links as f64 / target_infidelity).ln() / self.beta
    }
}

/// Least-squares fit of `ln(1 - F'(n)) = ln α - β n` over `ns`.
pub fn fit_alpha_beta(fidelity_in: f64, ns: &[u64]) -> Result<FitParams> {
    let e_in = 1.0 - fidelity_in;
    bennett_terms(fidelity_in)?;
    let points: Vec<(f64, f64)> = ns
        .iter()
        .filter_map(|&n| {
            let e = n_to_1_infidelity(e_in, n).ok()?;
            (e > 0.0 && e < 1.0).then(|| (n as f64, e.ln()))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::PoorFit { r_squared: 0.0 });
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 0.0 };
    if !(r_squared >= MIN_R_SQUARED) || slope >= 0.0 {
        return Err(Error::PoorFit { r_squared });
    }
    let max_resid = points
        .iter()
        .map(|p| p.1 - intercept - slope * p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let correction = max_resid.max(0.0).exp();
    Ok(FitParams {
        alpha: intercept.exp() * correction,
        beta: -slope,
        r_squared,
        correction,
    })
}

/// One point of an `n -> m` sweep including noise folded into the inputs and
/// applied to the outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyHashingPoint {
    pub fidelity_raw: f64,
    pub fidelity_effective: f64,
    pub bound: HashingBound,
    /// Lower bound on a single output pair after the final-station noise.
    pub f_pair_out: f64,
}

/// Folds resource noise into Werner inputs, bounds the ensemble, and applies
/// the output-qubit noise to a single final pair.
pub fn noisy_hashing_point(
    fidelity_raw: f64,
    n: u64,
    schedule: DeltaSchedule,
    links: u64,
    noise: NoiseParams,
) -> Result<NoisyHashingPoint> {
    let eff = WernerParams::new(fidelity_raw)?
        .as_bell_diagonal()
        .effective_input(noise)
        .fidelity();
    let bound = global_private_fidelity(eff, n, schedule, links)?;
    let f_out = crate::bell::output_noise_fidelity(noise);
    Ok(NoisyHashingPoint {
        fidelity_raw,
        fidelity_effective: eff,
        bound,
        f_pair_out: bound.f_gp * f_out,
    })
}
