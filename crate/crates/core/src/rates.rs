//! Timing and rate model of the hashing repeater.
//!
//! Lengths enter in kilometres and are converted to metres once; all times
//! are in seconds and rates in Hz unless stated otherwise.

use serde::{Deserialize, Serialize};

use crate::bell::{output_noise_fidelity, NoiseParams, WernerParams};
use crate::bounds::{self, ChannelMode, DeltaSchedule};
use crate::error::{Error, Result};

/// Earth-scale bound on classical communication time, in seconds.
pub const EARTH_CLASSICAL_BOUND: f64 = 0.1;

/// Default signal speed in fibre (m/s).
pub const C_FIBER: f64 = 2e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepeaterScenario {
    pub total_length_km: f64,
    pub links: u64,
    /// Heralded elementary-pair success probability.
    pub eta: f64,
    /// Elementary-pair time; `None` means one segment light time `l0 / c_fiber`.
    pub t0: Option<f64>,
    pub tp: f64,
    pub c_fiber: f64,
    pub n: u64,
    pub schedule: DeltaSchedule,
    /// Multiplexing slack; `None` means `n^{-1/4}`.
    pub epsilon: Option<f64>,
    pub resource_noise: NoiseParams,
    pub fidelity_in: f64,
}

impl RepeaterScenario {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name: &'static str, value: f64, expected: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange {
                    name,
                    value,
                    expected,
                })
            }
        };
        check(self.eta > 0.0 && self.eta <= 1.0, "eta", self.eta, "(0, 1]")?;
        check(self.total_length_km > 0.0, "total_length_km", self.total_length_km, "(0, inf)")?;
        check(self.links >= 1, "links", self.links as f64, "[1, inf)")?;
        check(self.tp > 0.0, "tp", self.tp, "(0, inf)")?;
        check(self.c_fiber > 0.0, "c_fiber", self.c_fiber, "(0, inf)")?;
        check(self.n >= 1, "n", self.n as f64, "[1, inf)")?;
        if let Some(t0) = self.t0 {
            check(t0 > 0.0, "t0", t0, "(0, inf)")?;
        }
        if let Some(e) = self.epsilon {
            check(e >= 0.0, "epsilon", e, "[0, inf)")?;
        }
        self.schedule.validate()?;
        WernerParams::new(self.fidelity_in)?;
        Ok(())
    }

    pub fn segment_length_m(&self) -> f64 {
        self.total_length_km * 1e3 / self.links as f64
    }

    pub fn t0(&self) -> f64 {
        self.t0
            .unwrap_or_else(|| self.segment_length_m() / self.c_fiber)
    }

    /// Classical communication time across the whole channel.
    pub fn t_c(&self) -> f64 {
        self.total_length_km * 1e3 / self.c_fiber
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
            .unwrap_or_else(|| (self.n as f64).powf(-0.25))
    }

    /// Input fidelity after folding resource noise onto both qubits.
    pub fn effective_fidelity(&self) -> Result<f64> {
        Ok(WernerParams::new(self.fidelity_in)?
            .as_bell_diagonal()
            .effective_input(self.resource_noise)
            .fidelity())
    }

    /// Bound on the noise-folded ensemble.
    pub fn hashing_bound(&self) -> Result<bounds::HashingBound> {
        bounds::global_private_fidelity(self.effective_fidelity()?, self.n, self.schedule, self.links)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCount {
    /// `ceil(n (1/η + ε))`.
    pub n_channels: u64,
    /// Per-link bound `exp(-ε² n)` on fewer than `n` heralded pairs.
    pub shortfall_bound: f64,
    /// `(1 - exp(-ε² n))^N`.
    pub all_links_success: f64,
}

pub fn channel_count(n: u64, eta: f64, epsilon: f64, links: u64) -> Result<ChannelCount> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            expected: "(0, 1]",
        });
    }
    if !(epsilon >= 0.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "[0, inf)",
        });
    }
    let nf = n as f64;
    let n_channels = (nf * (1.0 / eta + epsilon) - 1e-9).ceil() as u64;
    let shortfall_bound = (-epsilon * epsilon * nf).exp();
    let all_links_success = (links as f64 * (-shortfall_bound).ln_1p()).exp();
    Ok(ChannelCount {
        n_channels,
        shortfall_bound,
        all_links_success,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    SingleShot,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub mode: RateMode,
    pub channels: ChannelMode,
    pub rate_per_channel: f64,
    pub rate_absolute: f64,
    pub n_channels: u64,
    pub t_c: f64,
    pub overhead: Option<f64>,
    pub success_prob_all_links: f64,
    pub yield_c: f64,
    pub fidelity_effective: f64,
    pub f_gp: f64,
}

fn rate_report(s: &RepeaterScenario, mode: RateMode, channels: ChannelMode) -> Result<RateReport> {
    s.validate()?;
    let bound = s.hashing_bound()?;
    let c = bound.yield_c;
    if c <= 0.0 {
        return Err(Error::ZeroYield(c));
    }
    let eps = s.epsilon();
    let cc = channel_count(s.n, s.eta, eps, s.links)?;
    let extra = match mode {
        RateMode::Continuous => 0.0,
        RateMode::SingleShot => s.t_c(),
    };
    let (t0, tp, nf) = (s.t0(), s.tp, s.n as f64);
    let (per_channel, n_channels) = match channels {
        ChannelMode::Many => (c * s.eta / (t0 + tp + extra), cc.n_channels),
        ChannelMode::Single => (c * nf / (nf * (1.0 / s.eta + eps) * t0 + tp + extra), 1),
    };
    let overhead = bounds::yield_and_overhead(bound.fidelity_in, bound.delta, channels, s.n)?.overhead;
    Ok(RateReport {
        mode,
        channels,
        rate_per_channel: per_channel,
        rate_absolute: per_channel * n_channels as f64,
        n_channels,
        t_c: s.t_c(),
        overhead,
        success_prob_all_links: cc.all_links_success,
        yield_c: c,
        fidelity_effective: bound.fidelity_in,
        f_gp: bound.f_gp,
    })
}

/// Steady-state rate: `cη/(t0 + tp)` with many channels, or
/// `cn / (n(1/η + ε) t0 + tp)` with one. `t_c` is reported but not charged.
pub fn rate_continuous(s: &RepeaterScenario, channels: ChannelMode) -> Result<RateReport> {
    rate_report(s, RateMode::Continuous, channels)
}

/// One-off distribution: as [`rate_continuous`] with `t_c` added to the time.
pub fn rate_single_shot(s: &RepeaterScenario, channels: ChannelMode) -> Result<RateReport> {
    rate_report(s, RateMode::SingleShot, channels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationRole {
    Intermediate,
    EndStation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryRequirement {
    pub storage_time: f64,
    pub qubits: u64,
    pub exceeds_earth_bound: bool,
}

/// Storage time and qubit count at a station.
///
/// Intermediate stations keep `2n` resource qubits plus the incoming pairs
/// (`2n` with many channels, one with a single channel) for `t0`. End
/// stations also keep their outputs until `t_c` has elapsed.
pub fn memory_requirement(
    s: &RepeaterScenario,
    role: StationRole,
    channels: ChannelMode,
) -> Result<MemoryRequirement> {
    s.validate()?;
    let pair_qubits = match channels {
        ChannelMode::Many => 2 * s.n,
        ChannelMode::Single => 1,
    };
    let base = 2 * s.n + pair_qubits;
    Ok(match role {
        StationRole::Intermediate => MemoryRequirement {
            storage_time: s.t0(),
            qubits: base,
            exceeds_earth_bound: s.t0() > EARTH_CLASSICAL_BOUND,
        },
        StationRole::EndStation => {
            let m = s.hashing_bound()?.m;
            MemoryRequirement {
                storage_time: s.t_c(),
                qubits: base + m,
                exceeds_earth_bound: s.t_c() > EARTH_CLASSICAL_BOUND,
            }
        }
    })
}

/// Single-shot rate in units of the one-segment communication time, with
/// creation and processing times neglected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentRate {
    pub links: u64,
    pub n: u64,
    pub yield_c: f64,
    /// `c / N` output pairs per input pair per `t_segment`.
    pub rate: f64,
    pub f_gp: f64,
    pub f_out: f64,
}

/// Chooses the smallest `n` whose noise-folded bound over `links` segments
/// reaches `1 - target_infidelity` with positive yield, and returns the rate.
pub fn segment_rate(
    fidelity_in: f64,
    links: u64,
    noise: NoiseParams,
    schedule: DeltaSchedule,
    target_infidelity: f64,
) -> Result<SegmentRate> {
    let eff = WernerParams::new(fidelity_in)?
        .as_bell_diagonal()
        .effective_input(noise)
        .fidelity();
    let ok = |n: u64| -> Result<Option<bounds::HashingBound>> {
        let b = bounds::global_private_fidelity(eff, n, schedule, links)?;
        Ok((b.yield_c > 0.0 && b.f_gp >= 1.0 - target_infidelity).then_some(b))
    };
    let mut lo = 1u64;
    let mut hi = 2u64;
    while ok(hi)?.is_none() {
        lo = hi;
        hi *= 2;
        if hi > bounds::N_MIN_CAP {
            return Err(Error::Unreachable {
                cap: bounds::N_MIN_CAP,
            });
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let b = ok(hi)?.expect("found above");
    Ok(SegmentRate {
        links,
        n: hi,
        yield_c: b.yield_c,
        rate: b.yield_c / links as f64,
        f_gp: b.f_gp,
        f_out: output_noise_fidelity(noise),
    })
}
