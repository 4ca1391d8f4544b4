//! Nested entanglement purification and swapping, the recurrence-based
//! repeater used as a baseline.
//!
//! Pairs are tracked in the Bell-diagonal representation. Each purification
//! step is the two-pair recurrence protocol with a local rotation that swaps
//! the `(1,0)` and `(1,1)` weights; each of the four input qubits first
//! passes through local depolarizing noise. Costs are counted as elementary
//! pairs `M`, either expected or with a whole number of attempts per round,
//! and elapsed time `T` in units of the one-segment communication time.

use serde::{Deserialize, Serialize};

use crate::bell::{BellDiagonal, NoiseParams, WernerParams};
use crate::bounds::DeltaSchedule;
use crate::error::{Error, Result};
use crate::rates;

/// Purification rounds per level before the step is declared stalled.
pub const MAX_ROUNDS: usize = 200;

/// Default sweep range and step for the working fidelity.
pub const SWEEP_START: f64 = 0.85;
pub const SWEEP_END: f64 = 0.995;
pub const SWEEP_STEP: f64 = 0.0005;

/// Minimum gain per purification round.
const MIN_GAIN: f64 = 1e-12;

/// Noiseless recurrence step on two Bell-diagonal pairs.
///
/// Returns the post-selected output and the success probability. Success
/// requires equal bit-flip labels; the output carries the XOR of the
/// phase labels and the common bit-flip label.
pub fn dejmps_map(a: &BellDiagonal, b: &BellDiagonal) -> Result<(BellDiagonal, f64)> {
    let rotate = |p: [f64; 4]| [p[0], p[1], p[3], p[2]];
    let (ra, rb) = (rotate(a.probs()), rotate(b.probs()));
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i & 1 == j & 1 {
                out[(i ^ j) & 2 | (i & 1)] += ra[i] * rb[j];
            }
        }
    }
    let ps: f64 = out.iter().sum();
    if ps <= 0.0 {
        return Err(Error::ZeroSuccess);
    }
    Ok((BellDiagonal::from_channel(out.map(|x| x / ps)), ps))
}

/// Recurrence step with depolarizing noise on each of the four input qubits.
pub fn dejmps_step(
    a: &BellDiagonal,
    b: &BellDiagonal,
    noise: NoiseParams,
) -> Result<(BellDiagonal, f64)> {
    dejmps_map(&a.effective_input(noise), &b.effective_input(noise))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceState {
    pub state: BellDiagonal,
    /// Nesting level: the pair spans `2^level` segments.
    pub level: usize,
    /// Expected elementary pairs consumed per pair of this state.
    pub pairs_consumed: f64,
    /// Elapsed time in units of the one-segment communication time.
    pub time_elapsed: f64,
}

impl RecurrenceState {
    pub fn elementary(fidelity_in: f64) -> Result<Self> {
        Ok(Self {
            state: WernerParams::new(fidelity_in)?.as_bell_diagonal(),
            level: 0,
            pairs_consumed: 1.0,
            time_elapsed: 0.0,
        })
    }

    pub fn fidelity(&self) -> f64 {
        self.state.fidelity()
    }

    /// Pairs per unit time.
    pub fn rate(&self) -> f64 {
        1.0 / (self.pairs_consumed * self.time_elapsed)
    }

    /// Fidelity after the output qubits pass through the noise channel.
    pub fn output_fidelity(&self, noise: NoiseParams) -> f64 {
        self.state.effective_input(noise).fidelity()
    }
}

/// How the pairs spent on a probabilistic purification round are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairAccounting {
    /// `2/ps` inputs per output.
    Expected,
    /// `2·ceil(1/ps)` inputs per output: a fixed attempt budget per round.
    WorstCase,
}

impl PairAccounting {
    pub const ALL: [PairAccounting; 2] = [PairAccounting::Expected, PairAccounting::WorstCase];

    pub fn label(self) -> &'static str {
        match self {
            PairAccounting::Expected => "expected",
            PairAccounting::WorstCase => "worst_case",
        }
    }

    fn inputs_per_output(self, ps: f64) -> f64 {
        match self {
            PairAccounting::Expected => 2.0 / ps,
            // guard against 1/ps landing a rounding error above an integer
            PairAccounting::WorstCase => 2.0 * (1.0 / ps - 1e-12).ceil(),
        }
    }
}

/// Purifies two copies of `from` into one, once.
fn purify_round(
    from: &RecurrenceState,
    noise: NoiseParams,
    accounting: PairAccounting,
) -> Result<RecurrenceState> {
    let (state, ps) = dejmps_step(&from.state, &from.state, noise)?;
    let span = (1u64 << from.level) as f64;
    Ok(RecurrenceState {
        state,
        level: from.level,
        pairs_consumed: from.pairs_consumed * accounting.inputs_per_output(ps),
        // two-way classical communication across the pair
        time_elapsed: from.time_elapsed + 2.0 * span,
    })
}

/// Repeats purification rounds until the fidelity reaches `f_work`, counting
/// expected pairs.
///
/// Fails with [`Error::WorkingFidelityUnreachable`] once a round no longer
/// improves the fidelity.
pub fn purify_to(
    start: &RecurrenceState,
    f_work: f64,
    noise: NoiseParams,
) -> Result<RecurrenceState> {
    purify_to_with(start, f_work, noise, PairAccounting::Expected)
}

/// [`purify_to`] with a chosen pair accounting.
pub fn purify_to_with(
    start: &RecurrenceState,
    f_work: f64,
    noise: NoiseParams,
    accounting: PairAccounting,
) -> Result<RecurrenceState> {
    let mut s = *start;
    let mut rounds = 0;
    while s.fidelity() < f_work {
        let next = purify_round(&s, noise, accounting)?;
        if next.fidelity() <= s.fidelity() + MIN_GAIN || rounds >= MAX_ROUNDS {
            return Err(Error::WorkingFidelityUnreachable(f_work));
        }
        s = next;
        rounds += 1;
    }
    Ok(s)
}

/// Connects two equal pairs at the next level; one qubit of each pair is noisy.
pub fn swap_up(s: &RecurrenceState, noise: NoiseParams) -> RecurrenceState {
    let a = s.state.apply_ldn_one_qubit(noise);
    RecurrenceState {
        state: a.swap(&a),
        level: s.level + 1,
        pairs_consumed: s.pairs_consumed * 2.0,
        time_elapsed: s.time_elapsed + (1u64 << s.level) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingSchedule {
    /// Purify at every level, the final one included.
    PurifyEveryLevel,
    /// Purify below the top level only; the final swap is not followed by purification.
    SwapLast,
}

impl PairingSchedule {
    pub const ALL: [PairingSchedule; 2] = [PairingSchedule::SwapLast, PairingSchedule::PurifyEveryLevel];

    pub fn label(self) -> &'static str {
        match self {
            PairingSchedule::PurifyEveryLevel => "purify_every_level",
            PairingSchedule::SwapLast => "swap_last",
        }
    }
}

/// A nested repeater over `2^levels` segments purifying to `f_work`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkingFidelityPlan {
    pub f_work: f64,
    pub levels: usize,
    pub schedule: PairingSchedule,
    pub accounting: PairAccounting,
}

/// Runs the nested protocol from Werner pairs of fidelity `fidelity_in`.
pub fn bdcz_chain(
    fidelity_in: f64,
    plan: WorkingFidelityPlan,
    noise: NoiseParams,
) -> Result<RecurrenceState> {
    let mut s = RecurrenceState::elementary(fidelity_in)?;
    for lev in 0..=plan.levels {
        if lev == plan.levels && plan.schedule == PairingSchedule::SwapLast {
            break;
        }
        s = purify_to_with(&s, plan.f_work, noise, plan.accounting)?;
        if lev < plan.levels {
            s = swap_up(&s, noise);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub f_work: f64,
    /// `None` when the working fidelity cannot be held.
    pub result: Option<ChainSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub pairs_consumed: f64,
    pub time_elapsed: f64,
    pub rate: f64,
    pub fidelity_final: f64,
    pub fidelity_out: f64,
}

impl ChainSummary {
    fn from_state(s: &RecurrenceState, noise: NoiseParams) -> Self {
        Self {
            pairs_consumed: s.pairs_consumed,
            time_elapsed: s.time_elapsed,
            rate: s.rate(),
            fidelity_final: s.fidelity(),
            fidelity_out: s.output_fidelity(noise),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedChain {
    pub plan: WorkingFidelityPlan,
    pub best: ChainSummary,
    pub sweep: Vec<SweepPoint>,
}

fn evaluate(fidelity_in: f64, plan: WorkingFidelityPlan, noise: NoiseParams) -> Result<Option<ChainSummary>> {
    match bdcz_chain(fidelity_in, plan, noise) {
        Ok(s) => Ok(Some(ChainSummary::from_state(&s, noise))),
        Err(Error::WorkingFidelityUnreachable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Maximises the rate over the working fidelity: a grid sweep followed by
/// golden-section refinement around the best grid point.
pub fn optimize_working_fidelity(
    fidelity_in: f64,
    levels: usize,
    noise: NoiseParams,
    schedule: PairingSchedule,
    accounting: PairAccounting,
) -> Result<OptimizedChain> {
    WernerParams::new(fidelity_in)?;
    let plan = |f_work| WorkingFidelityPlan {
        f_work,
        levels,
        schedule,
        accounting,
    };
    let steps = ((SWEEP_END - SWEEP_START) / SWEEP_STEP).round() as usize;
    let mut sweep = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let f_work = SWEEP_START + i as f64 * SWEEP_STEP;
        sweep.push(SweepPoint {
            f_work,
            result: evaluate(fidelity_in, plan(f_work), noise)?,
        });
    }
    let (best_i, mut best) = sweep
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.result.map(|r| (i, r)))
        .max_by(|a, b| a.1.rate.total_cmp(&b.1.rate))
        .ok_or(Error::Infeasible)?;
    let mut best_f = sweep[best_i].f_work;

    let score = |f: f64| -> Result<Option<ChainSummary>> { evaluate(fidelity_in, plan(f), noise) };
    let rate_of = |r: &Option<ChainSummary>| r.map_or(0.0, |r| r.rate);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_f - SWEEP_STEP, best_f + SWEEP_STEP);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut rc, mut rd) = (score(c)?, score(d)?);
    for _ in 0..40 {
        if rate_of(&rc) >= rate_of(&rd) {
            b = d;
            d = c;
            rd = rc;
            c = b - inv_phi * (b - a);
            rc = score(c)?;
        } else {
            a = c;
            c = d;
            rc = rd;
            d = a + inv_phi * (b - a);
            rd = score(d)?;
        }
        for (f, r) in [(c, rc), (d, rd)] {
            if let Some(r) = r {
                if r.rate > best.rate {
                    best = r;
                    best_f = f;
                }
            }
        }
    }
    Ok(OptimizedChain {
        plan: plan(best_f),
        best,
        sweep,
    })
}

/// One column of the recurrence-versus-hashing comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub fidelity_in: f64,
    pub links: u64,
    pub schedule: PairingSchedule,
    pub accounting: PairAccounting,
    pub f_work: f64,
    pub rate_recurrence: f64,
    pub fidelity_out_recurrence: f64,
    pub pairs_recurrence: f64,
    pub n_hashing: u64,
    pub rate_hashing: f64,
    pub fidelity_out_hashing: f64,
}

impl ComparisonRow {
    pub fn rate_ratio(&self) -> f64 {
        self.rate_hashing / self.rate_recurrence
    }
}

/// Rates in units of the inverse one-segment communication time for
/// `2^levels` segments, both protocols under the same noise.
pub fn compare(
    fidelity_in: f64,
    levels: usize,
    noise: NoiseParams,
    schedule: PairingSchedule,
    accounting: PairAccounting,
    target_infidelity: f64,
) -> Result<ComparisonRow> {
    let links = 1u64 << levels;
    let rec = optimize_working_fidelity(fidelity_in, levels, noise, schedule, accounting)?;
    let hash = rates::segment_rate(
        fidelity_in,
        links,
        noise,
        DeltaSchedule::power(0.25)?,
        target_infidelity,
    )?;
    Ok(ComparisonRow {
        fidelity_in,
        links,
        schedule,
        accounting,
        f_work: rec.plan.f_work,
        rate_recurrence: rec.best.rate,
        fidelity_out_recurrence: rec.best.fidelity_out,
        pairs_recurrence: rec.best.pairs_consumed,
        n_hashing: hash.n,
        rate_hashing: hash.rate,
        fidelity_out_hashing: hash.f_out,
    })
}
