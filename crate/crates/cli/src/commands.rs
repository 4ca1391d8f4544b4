use hashrep_core::bounds::{
    self, concatenation_until_stall, n_min_search, n_to_1_fidelity, n_to_1_infidelity,
    noisy_hashing_point, ChannelMode, DeltaSchedule,
};
use hashrep_core::clifford::{jamiolkowski_resource, station_resource, GraphResource, HashingCircuit, IoLabel};
use hashrep_core::mc::validate_bound;
use hashrep_core::rates::{self, RateMode, StationRole};
use hashrep_core::recurrence::{compare, optimize_working_fidelity, ComparisonRow, PairAccounting, PairingSchedule};
use hashrep_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ScenarioConfig};
use crate::table::{Cell, Metadata, ResultTable};
use crate::Command;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{command}: {source}")]
    Compute {
        command: &'static str,
        source: CoreError,
    },
}

type Result<T> = std::result::Result<T, RunError>;

fn delta_label(d: &DeltaSchedule) -> String {
    match d {
        DeltaSchedule::Power { exponent } => format!("n^-{}", crate::table::format_float(*exponent)),
        DeltaSchedule::Fixed { value } => format!("fixed:{}", crate::table::format_float(*value)),
        DeltaSchedule::NToOne => "n_to_one".into(),
    }
}

/// Runs `command` on a validated config and returns its table.
pub fn run(command: Command, config: &ScenarioConfig) -> Result<ResultTable> {
    if let Some(c) = config.command {
        if c != command {
            return Err(ConfigError::Field {
                field: "command",
                message: format!("config is for `{}`, not `{}`", c.name(), command.name()),
            }
            .into());
        }
    }
    config.validate()?;
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        seed: config.seed,
        config_hash: config.hash(),
    };
    let ctx = |source| RunError::Compute {
        command: command.name(),
        source,
    };
    let table = match command {
        Command::BoundsSweep => bounds_sweep(meta, config),
        Command::YieldSweep => yield_sweep(meta, config),
        Command::Nto1 => nto1(meta, config),
        Command::Nmin => nmin(meta, config),
        Command::Concat => concat(meta, config),
        Command::Rates => rates_table(meta, config),
        Command::Compare1998 if config.sweep.working_fidelity_sweep => working_fidelity(meta, config),
        Command::Compare1998 => compare_1998(meta, config),
        Command::McValidate => mc_validate(meta, config),
        Command::ResourceState => resource_state(meta, config),
    };
    table.map_err(ctx)
}

type CoreResult<T> = std::result::Result<T, CoreError>;

fn bounds_sweep(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "delta_schedule", "fidelity_in", "fidelity_effective", "links", "n", "delta", "p1", "p2",
            "f_gp", "f_gp_linear", "yield_c", "m", "f_pair_out",
        ],
    );
    let noise = c.scenario.noise();
    for d in c.deltas() {
        for f in c.fidelities() {
            for links in c.links() {
                for n in c.ns() {
                    let pt = noisy_hashing_point(f, n, d, links, noise)?;
                    let b = pt.bound;
                    t.push(vec![
                        delta_label(&d).into(),
                        f.into(),
                        pt.fidelity_effective.into(),
                        links.into(),
                        n.into(),
                        b.delta.into(),
                        b.p1.into(),
                        b.p2.into(),
                        b.f_gp.into(),
                        b.f_gp_linear.into(),
                        b.yield_c.into(),
                        b.m.into(),
                        pt.f_pair_out.into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn yield_sweep(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "delta_schedule", "fidelity_in", "fidelity_effective", "n", "delta", "yield_c", "m",
            "overhead_many", "overhead_single",
        ],
    );
    let noise = c.scenario.noise();
    for d in c.deltas() {
        for f in c.fidelities() {
            for n in c.ns() {
                let b = noisy_hashing_point(f, n, d, 1, noise)?;
                let eff = b.fidelity_effective;
                let many = bounds::yield_and_overhead(eff, b.bound.delta, ChannelMode::Many, n)?;
                let single = bounds::yield_and_overhead(eff, b.bound.delta, ChannelMode::Single, n)?;
                t.push(vec![
                    delta_label(&d).into(),
                    f.into(),
                    eff.into(),
                    n.into(),
                    b.bound.delta.into(),
                    b.bound.yield_c.into(),
                    b.bound.m.into(),
                    many.overhead.into(),
                    single.overhead.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn nto1(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &["fidelity_in", "n", "delta", "fidelity_out", "infidelity_out", "purifies"],
    );
    for f in c.fidelities() {
        let entropy = bounds::bennett_terms(f)?.entropy;
        for n in c.ns() {
            let delta = match DeltaSchedule::NToOne.resolve(n, entropy) {
                Ok(d) => d,
                Err(CoreError::NTooSmall { .. }) => continue,
                Err(e) => return Err(e),
            };
            let e = n_to_1_infidelity(1.0 - f, n)?;
            let fo = n_to_1_fidelity(f, n)?;
            t.push(vec![
                f.into(),
                n.into(),
                delta.into(),
                fo.into(),
                e.into(),
                (fo >= f).into(),
            ]);
        }
    }
    Ok(t)
}

fn nmin(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &["fidelity_in", "links", "target_fidelity", "n_min", "fit_estimate"],
    );
    for f in c.fidelities() {
        for links in c.links() {
            let target = c.sweep.target_fidelity.unwrap_or(f);
            let r = n_min_search(f, links, target)?;
            t.push(vec![
                f.into(),
                links.into(),
                target.into(),
                r.n.into(),
                r.fit_estimate.into(),
            ]);
        }
    }
    Ok(t)
}

fn concat(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "fidelity_in", "block_size", "level", "total_pairs", "fidelity", "infidelity",
            "direct_infidelity",
        ],
    );
    for f in c.fidelities() {
        for &b in &c.sweep.block_sizes {
            let chain = concatenation_until_stall(f, b, c.sweep.levels)?;
            for (i, e) in chain.infidelities.iter().enumerate() {
                let total = chain.total_pairs(i + 1);
                // same number of pairs spent on one n->1 block
                let direct = if total < u64::MAX as f64 {
                    n_to_1_infidelity(1.0 - f, total as u64).ok()
                } else {
                    None
                };
                t.push(vec![
                    f.into(),
                    b.into(),
                    (i + 1).into(),
                    total.into(),
                    chain.fidelities[i].into(),
                    (*e).into(),
                    direct.into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn rates_table(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "mode", "channels", "fidelity_effective", "n", "epsilon", "yield_c", "f_gp", "n_channels",
            "t0", "t_c", "rate_per_channel", "rate_absolute", "overhead", "success_prob_all_links",
            "memory_intermediate_qubits", "memory_intermediate_time", "memory_end_qubits",
            "memory_end_time", "exceeds_earth_bound",
        ],
    );
    let s = c.scenario.repeater();
    for mode in [RateMode::Continuous, RateMode::SingleShot] {
        for channels in [ChannelMode::Many, ChannelMode::Single] {
            let r = match mode {
                RateMode::Continuous => rates::rate_continuous(&s, channels)?,
                RateMode::SingleShot => rates::rate_single_shot(&s, channels)?,
            };
            let mid = rates::memory_requirement(&s, StationRole::Intermediate, channels)?;
            let end = rates::memory_requirement(&s, StationRole::EndStation, channels)?;
            t.push(vec![
                match mode {
                    RateMode::Continuous => "continuous",
                    RateMode::SingleShot => "single_shot",
                }
                .into(),
                match channels {
                    ChannelMode::Many => "many",
                    ChannelMode::Single => "single",
                }
                .into(),
                r.fidelity_effective.into(),
                s.n.into(),
                s.epsilon().into(),
                r.yield_c.into(),
                r.f_gp.into(),
                r.n_channels.into(),
                s.t0().into(),
                r.t_c.into(),
                r.rate_per_channel.into(),
                r.rate_absolute.into(),
                r.overhead.into(),
                r.success_prob_all_links.into(),
                mid.qubits.into(),
                mid.storage_time.into(),
                end.qubits.into(),
                end.storage_time.into(),
                (mid.exceeds_earth_bound || end.exceeds_earth_bound).into(),
            ]);
        }
    }
    Ok(t)
}

fn link_columns(c: &ScenarioConfig) -> Vec<String> {
    c.sweep.link_exponents.iter().map(|k| format!("2^{k}")).collect()
}

/// A row label and how to read it from a comparison column.
type Quantity = (&'static str, fn(&ComparisonRow) -> Cell);

fn variants(c: &ScenarioConfig) -> Vec<(PairingSchedule, PairAccounting)> {
    let s = &c.sweep;
    s.schedules
        .iter()
        .flat_map(|&sch| s.accountings.iter().map(move |&acc| (sch, acc)))
        .collect()
}

fn compare_1998(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut columns = vec!["fidelity_in".to_string(), "protocol".into(), "quantity".into()];
    columns.extend(link_columns(c));
    let mut t = ResultTable {
        metadata: meta,
        columns,
        rows: Vec::new(),
    };
    let noise = c.scenario.noise();
    for f in c.fidelities() {
        let mut hashing: Option<Vec<ComparisonRow>> = None;
        for (schedule, accounting) in variants(c) {
            let rows = c
                .sweep
                .link_exponents
                .iter()
                .map(|&k| compare(f, k as usize, noise, schedule, accounting, c.sweep.target_infidelity))
                .collect::<CoreResult<Vec<_>>>()?;
            let variant = format!("{}:{}", schedule.label(), accounting.label());
            let protocol = format!("recurrence:{variant}");
            let quantities: [Quantity; 4] = [
                ("rate", |r| r.rate_recurrence.into()),
                ("f_out", |r| r.fidelity_out_recurrence.into()),
                ("f_work", |r| r.f_work.into()),
                ("pairs", |r| r.pairs_recurrence.into()),
            ];
            for (name, get) in quantities {
                let mut row: Vec<Cell> = vec![f.into(), protocol.clone().into(), name.into()];
                row.extend(rows.iter().map(get));
                t.push(row);
            }
            let mut ratio: Vec<Cell> = vec![
                f.into(),
                format!("ratio:{variant}").into(),
                "rate_ratio".into(),
            ];
            ratio.extend(rows.iter().map(|r| r.rate_ratio().into()));
            t.push(ratio);
            hashing.get_or_insert(rows);
        }
        if let Some(rows) = hashing {
            let quantities: [Quantity; 3] = [
                ("rate", |r| r.rate_hashing.into()),
                ("f_out", |r| r.fidelity_out_hashing.into()),
                ("n", |r| r.n_hashing.into()),
            ];
            for (name, get) in quantities {
                let mut row: Vec<Cell> = vec![f.into(), "hashing".into(), name.into()];
                row.extend(rows.iter().map(get));
                t.push(row);
            }
        }
    }
    Ok(t)
}

fn working_fidelity(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "fidelity_in", "links", "schedule", "accounting", "f_work", "feasible", "pairs", "time", "rate",
            "fidelity_final", "fidelity_out", "optimal",
        ],
    );
    let noise = c.scenario.noise();
    for f in c.fidelities() {
        for &k in &c.sweep.link_exponents {
            for (schedule, accounting) in variants(c) {
                let opt = optimize_working_fidelity(f, k as usize, noise, schedule, accounting)?;
                for p in &opt.sweep {
                    let r = p.result;
                    t.push(vec![
                        f.into(),
                        (1u64 << k).into(),
                        schedule.label().into(),
                        accounting.label().into(),
                        p.f_work.into(),
                        r.is_some().into(),
                        r.map(|r| r.pairs_consumed).into(),
                        r.map(|r| r.time_elapsed).into(),
                        r.map(|r| r.rate).into(),
                        r.map(|r| r.fidelity_final).into(),
                        r.map(|r| r.fidelity_out).into(),
                        (r.map(|r| r.rate) == Some(opt.best.rate)).into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

fn mc_validate(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "delta_schedule", "fidelity_in", "n", "delta", "rounds", "trials", "failures", "p_fail",
            "ci_low", "ci_high", "analytic_bound", "approximate", "dominated",
        ],
    );
    let ns: Vec<usize> = c.ns().iter().map(|&n| n as usize).collect();
    for d in c.deltas() {
        for f in c.fidelities() {
            for r in validate_bound(f, &ns, d, c.trials, c.seed)? {
                t.push(vec![
                    delta_label(&d).into(),
                    f.into(),
                    r.n.into(),
                    r.delta.into(),
                    r.rounds.into(),
                    r.trials.into(),
                    r.failures.into(),
                    r.empirical_p_fail.into(),
                    r.wilson_ci.0.into(),
                    r.wilson_ci.1.into(),
                    r.analytic_bound.into(),
                    r.approximate.into(),
                    r.dominated().into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn resource_state(meta: Metadata, c: &ScenarioConfig) -> CoreResult<ResultTable> {
    let mut t = ResultTable::new(
        meta,
        &[
            "resource", "n", "m", "n_qubits", "qubit", "io_label", "local_clifford", "neighbors",
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    for n in c.ns() {
        let circuit = HashingCircuit::random(n as usize, c.sweep.circuit_rounds, &mut rng)?;
        let hashing = jamiolkowski_resource(&circuit)?;
        let station = station_resource(&hashing, &hashing)?;
        for (name, g) in [("hashing", &hashing), ("station", &station)] {
            push_graph(&mut t, name, n, circuit.m(), g);
        }
    }
    Ok(t)
}

fn push_graph(t: &mut ResultTable, name: &str, n: u64, m: usize, g: &GraphResource) {
    for q in 0..g.n_qubits {
        let neighbors: Vec<String> = g.neighbors(q).iter().map(|j| j.to_string()).collect();
        t.push(vec![
            name.into(),
            n.into(),
            m.into(),
            g.n_qubits.into(),
            q.into(),
            match g.io_labels[q] {
                IoLabel::Input => "input",
                IoLabel::Output => "output",
            }
            .into(),
            g.local_cliffords[q].to_string().into(),
            neighbors.join(" ").into(),
        ]);
    }
}
