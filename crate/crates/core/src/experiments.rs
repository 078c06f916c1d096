//! Seeded parameter sweeps that replicate the published figures.
//!
//! Every experiment is a grid of (series, x) points evaluated for a number of
//! independent trials. Trial `t` draws all of its randomness from
//! `derive_seed(master, t)`, so trials can run in any order or in parallel and
//! the output is still bit-identical. Rows are emitted sorted by trial, then
//! series, then x.
//!
//! Default grids are desk-scale: they follow the published protocol where it
//! is cheap and shrink it where a full sweep would take hours. The
//! `paper_scale` switch restores the published grid.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde_json::{json, Value};

use crate::encoders::{fsa_encode, fsa_step, FsaDescriptor};
use crate::error::{HdError, Result};
use crate::exec::Exec;
use crate::hv::{Accumulator, Hypervector, TieBreak};
use crate::memory::ItemMemory;
use crate::resonator::{factorize, ResonatorProblem};
use crate::rng::{derive_seed, Rng};
use crate::search::{build_string_automaton, calibrate_threshold, naive_match_ends, random_absent_query, Variant};
use crate::stats::pearson;
use crate::universal::{
    ca_build, ca_decode_grid, ca_encode_grid, ca_step, tm_dimension_search, CaOracle, CaRule, DimensionSearch, TmTable,
};

pub const EXPERIMENTS: [&str; 8] = [
    "histogram",
    "fsa-recall",
    "substring-original",
    "substring-cleanup",
    "tm-noise",
    "ca110",
    "ca110-noise",
    "resonator",
];

pub const CSV_HEADER: [&str; 7] = ["experiment", "param_json", "trial", "x_name", "x_value", "metric", "value"];

/// One measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub trial: usize,
    /// Compact JSON object naming the series, e.g. `{"size":16}`.
    pub series: String,
    pub x_name: &'static str,
    pub x_value: f64,
    pub metric: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub experiment: String,
    pub seed: u64,
    /// The grid actually used, including every default.
    pub params: Value,
    pub rows: Vec<Row>,
}

/// Mean of one metric at one grid point, over all trials.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub series: String,
    pub x_value: f64,
    pub metric: &'static str,
    pub mean: f64,
    pub count: usize,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                self.experiment.as_str(),
                r.series.as_str(),
                &r.trial.to_string(),
                r.x_name,
                &r.x_value.to_string(),
                r.metric,
                &r.value.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn params_json(&self) -> String {
        let doc = json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "rng": Rng::ALGORITHM,
            "params": self.params,
        });
        serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
    }

    /// Per (series, x, metric) means, in first-appearance order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        for r in &self.rows {
            match out
                .iter_mut()
                .find(|s| s.series == r.series && s.x_value == r.x_value && s.metric == r.metric)
            {
                Some(s) => {
                    s.mean += r.value;
                    s.count += 1;
                }
                None => out.push(SummaryRow {
                    series: r.series.clone(),
                    x_value: r.x_value,
                    metric: r.metric,
                    mean: r.value,
                    count: 1,
                }),
            }
        }
        for s in &mut out {
            s.mean /= s.count as f64;
        }
        out
    }

    /// Mean curve `(x, mean)` of `metric` for one series.
    pub fn curve(&self, series: &str, metric: &str) -> Vec<(f64, f64)> {
        self.summary()
            .into_iter()
            .filter(|s| s.series == series && s.metric == metric)
            .map(|s| (s.x_value, s.mean))
            .collect()
    }

    pub fn series(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.series) {
                out.push(r.series.clone());
            }
        }
        out
    }
}

/// Caller-supplied replacements for the default grid. `None` keeps the default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    /// Bit-error rates or flip probabilities, depending on the experiment.
    pub noise: Option<Vec<f64>>,
    /// Histogram sizes, base-string lengths or grid lengths.
    pub lengths: Option<Vec<usize>>,
    /// Step budget (tm-noise target, CA steps).
    pub steps: Option<u64>,
    pub paper_scale: bool,
}

pub fn run_experiment(name: &str, ov: &Overrides, seed: u64, exec: Exec) -> Result<ExperimentResult> {
    let (params, rows) = match name {
        "histogram" => histogram(ov, seed, exec)?,
        "fsa-recall" => fsa_recall(ov, seed, exec)?,
        "substring-original" => substring(Variant::Original, ov, seed, exec)?,
        "substring-cleanup" => substring(Variant::Cleanup, ov, seed, exec)?,
        "tm-noise" => tm_noise(ov, seed, exec)?,
        "ca110" => ca110(false, ov, seed, exec)?,
        "ca110-noise" => ca110(true, ov, seed, exec)?,
        "resonator" => resonator(ov, seed, exec)?,
        other => return Err(HdError::UnknownExperiment(other.to_string())),
    };
    Ok(ExperimentResult {
        experiment: name.to_string(),
        seed,
        params,
        rows,
    })
}

/// Path of the parameter sidecar written next to `out`.
pub fn params_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".params.json");
    PathBuf::from(s)
}

/// Writes the CSV to `out` and the parameter grid to `<out>.params.json`.
pub fn write_outputs(result: &ExperimentResult, out: &Path) -> Result<()> {
    let file = std::fs::File::create(out)?;
    result.write_csv(std::io::BufWriter::new(file))?;
    std::fs::write(params_path(out), result.params_json() + "\n")?;
    Ok(())
}

/// `start:end:step` (inclusive, additive) or `start:end:xK` (multiplicative).
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let bad = || HdError::InvalidArgument(format!("grid `{spec}` is not start:end:step or start:end:xK"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(bad());
    };
    let start: usize = start.parse().map_err(|_| bad())?;
    let end: usize = end.parse().map_err(|_| bad())?;
    let mut out = Vec::new();
    if let Some(factor) = step.strip_prefix('x') {
        let factor: usize = factor.parse().map_err(|_| bad())?;
        if factor < 2 || start == 0 {
            return Err(bad());
        }
        let mut v = start;
        while v <= end {
            out.push(v);
            v *= factor;
        }
    } else {
        let step: usize = step.parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        out.extend((start..=end).step_by(step));
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

fn trial_rng(seed: u64, trial: usize) -> Rng {
    Rng::new(derive_seed(seed, trial as u64))
}

/// Evaluates `point(trial, series_index, x_index)` over the whole grid, one
/// task per trial, and flattens in (trial, series, x) order.
fn sweep<F>(exec: Exec, trials: usize, n_series: usize, n_x: usize, point: F) -> Result<Vec<Row>>
where
    F: Fn(usize, usize, usize) -> Result<Vec<Row>> + Sync,
{
    let per_trial = exec.try_map(trials, |t| {
        let mut rows = Vec::new();
        for s in 0..n_series {
            for x in 0..n_x {
                rows.extend(point(t, s, x)?);
            }
        }
        Ok::<_, HdError>(rows)
    })?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn series_key(v: Value) -> String {
    v.to_string()
}

fn histogram(ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    const MAX_COUNT: u32 = 1023;
    let sizes = ov.lengths.clone().unwrap_or_else(|| vec![16, 32, 64, 128, 256, 512]);
    let dims = ov.dims.clone().unwrap_or_else(|| {
        if ov.paper_scale {
            (200..=10_000).step_by(200).collect()
        } else {
            vec![200, 1000, 2000, 4000, 6000, 8000, 10_000]
        }
    });
    let sims = ov.trials.unwrap_or(100);
    let params = json!({"sizes": sizes, "dims": dims, "simulations": sims, "count_range": [0, MAX_COUNT],
        "compound": "normalized sum of count-weighted seeds"});
    let rows = sweep(exec, sims, sizes.len(), dims.len(), |t, si, xi| {
        let (size, dim) = (sizes[si], dims[xi]);
        let mut rng = trial_rng(seed, t).derive(si as u64).derive(xi as u64);
        let names: Vec<String> = (0..size).map(|i| format!("e{i}")).collect();
        let cb = ItemMemory::random(&names, dim, &mut rng)?;
        let counts: Vec<u32> = (0..size).map(|_| rng.gen_range(0..=MAX_COUNT)).collect();
        let mut acc = Accumulator::zeros(dim)?;
        for (v, &c) in cb.vectors().iter().zip(&counts) {
            acc.add_scaled(v, c as i32)?;
        }
        let compound = acc.normalize(cb.tie_break())?;
        let est: Vec<f64> = cb.scores(&compound)?.into_iter().map(|d| d as f64).collect();
        let truth: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Ok(vec![Row {
            trial: t,
            series: series_key(json!({"size": size})),
            x_name: "dim",
            x_value: dim as f64,
            metric: "correlation",
            value: pearson(&est, &truth),
        }])
    })?;
    Ok((params, rows))
}

/// A random deterministic automaton in which every symbol labels exactly
/// one transition between uniformly chosen states.
pub fn random_fsa(states: usize, symbols: usize, rng: &mut Rng) -> FsaDescriptor {
    let state_names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let symbol_names: Vec<String> = (0..symbols).map(|i| format!("x{i}")).collect();
    let transitions = symbol_names
        .iter()
        .map(|x| {
            let from = state_names[rng.gen_range(0..states)].clone();
            let to = state_names[rng.gen_range(0..states)].clone();
            (from, x.clone(), to)
        })
        .collect();
    FsaDescriptor {
        start: state_names[0].clone(),
        states: state_names,
        symbols: symbol_names,
        transitions,
        accepting: Default::default(),
    }
}

fn fsa_recall(ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    const STATES: usize = 22;
    const SYMBOLS: usize = 29;
    let dims = ov.dims.clone().unwrap_or_else(|| (100..=4000).step_by(100).collect());
    let bers = ov.noise.clone().unwrap_or_else(|| vec![0.03125, 0.0625, 0.125, 0.25]);
    let inits = ov.trials.unwrap_or(50);
    let queries = ov.steps.unwrap_or(1000) as usize;
    let params = json!({"states": STATES, "symbols": SYMBOLS, "transitions": SYMBOLS, "dims": dims,
        "ber": bers, "initializations": inits, "transitions_per_init": queries,
        "noise": "exact-count flips of the normalized automaton vector, fresh per transition"});
    let rows = sweep(exec, inits, bers.len(), dims.len(), |t, si, xi| {
        let base = trial_rng(seed, t);
        let desc = random_fsa(STATES, SYMBOLS, &mut base.derive(0));
        let mut rng = base.derive(1 + xi as u64);
        let states = ItemMemory::random(&desc.states, dims[xi], &mut rng)?;
        let symbols = ItemMemory::random(&desc.symbols, dims[xi], &mut rng)?;
        let a = fsa_encode(&desc, &states, &symbols)?.normalize(&TieBreak::new(dims[xi], rng.next_seed())?)?;
        let mut noise = rng.derive(si as u64);
        let mut correct = 0usize;
        for _ in 0..queries {
            let (from, sym, to) = desc.transitions.choose(&mut noise).expect("automaton has transitions");
            let noisy = a.flip_noise(bers[si], &mut noise)?;
            let (got, _) = fsa_step(&noisy, states.get(from)?, symbols.get(sym)?, &states)?;
            correct += usize::from(&got == to);
        }
        Ok(vec![Row {
            trial: t,
            series: series_key(json!({"ber": bers[si]})),
            x_name: "dim",
            x_value: dims[xi] as f64,
            metric: "accuracy",
            value: correct as f64 / queries as f64,
        }])
    })?;
    Ok((params, rows))
}

fn alphabet() -> Vec<String> {
    ('a'..='z').map(|c| c.to_string()).collect()
}

fn random_string(alpha: &[String], len: usize, rng: &mut Rng) -> Vec<String> {
    (0..len).map(|_| alpha[rng.gen_range(0..alpha.len())].clone()).collect()
}

/// Outcome of one labelled substring query.
pub struct QueryCheck {
    pub expected: bool,
    pub present: bool,
    /// Reported positions equal the oracle's end positions (clean-up only).
    pub positions_exact: bool,
}

/// Builds an automaton for a random base string and asks either a query cut
/// from the base (`positive`) or a random query absent from it.
pub fn labelled_query(
    variant: Variant,
    sym_cb: &ItemMemory,
    base_len: usize,
    query_len: usize,
    positive: bool,
    threshold: Option<i64>,
    rng: &mut Rng,
) -> Result<QueryCheck> {
    let alpha = sym_cb.names().to_vec();
    let base = random_string(&alpha, base_len, rng);
    let sa = build_string_automaton(&base, sym_cb, rng)?;
    let query = if positive {
        let start = rng.gen_range(0..=base_len - query_len);
        base[start..start + query_len].to_vec()
    } else {
        random_absent_query(&sa, query_len, rng)?
    };
    let th = threshold.unwrap_or_else(|| sa.default_threshold());
    let out = sa.query(&query, th, variant)?;
    let ends = naive_match_ends(&base, &query);
    Ok(QueryCheck {
        expected: !ends.is_empty(),
        present: out.present,
        positions_exact: out.positions == ends,
    })
}

fn substring(variant: Variant, ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    const BASES_PER_RUN: usize = 100;
    const CALIBRATION_TRIALS: usize = 200;
    let (query_len, lens, dims, runs) = match (variant, ov.paper_scale) {
        (Variant::Original, false) => (5, vec![8, 16, 32], powers_of_two(6, 16), 10),
        (Variant::Original, true) => (5, vec![8, 16, 32], powers_of_two(6, 22), 30),
        (Variant::Cleanup, false) => (30, vec![32, 64], powers_of_two(6, 13), 5),
        (Variant::Cleanup, true) => (30, vec![32, 64, 128, 256], powers_of_two(6, 16), 30),
    };
    let query_len = ov.steps.map_or(query_len, |s| s as usize);
    let lens = ov.lengths.clone().unwrap_or(lens);
    let dims = ov.dims.clone().unwrap_or(dims);
    let runs = ov.trials.unwrap_or(runs);
    if let Some(&short) = lens.iter().find(|&&n| n < query_len) {
        return Err(HdError::InvalidArgument(format!("base length {short} is shorter than the query")));
    }
    let variant_name = match variant {
        Variant::Original => "original",
        Variant::Cleanup => "cleanup",
    };
    let params = json!({"variant": variant_name, "query_len": query_len, "base_lens": lens, "dims": dims,
        "runs": runs, "bases_per_run": BASES_PER_RUN, "alphabet": 26,
        "threshold": {"rule": "midpoint of 99.9th percentile of absent-query scores and N",
                      "calibration_trials": CALIBRATION_TRIALS, "per": "base length and dim"}});
    let alpha = alphabet();
    // One calibration per (base length, dim), on automata independent of the trials.
    let calib_root = Rng::new(seed).derive(u64::MAX);
    let mut thresholds = vec![vec![0i64; dims.len()]; lens.len()];
    for (si, &n) in lens.iter().enumerate() {
        for (xi, &dim) in dims.iter().enumerate() {
            let mut rng = calib_root.derive(si as u64).derive(xi as u64);
            let cb = ItemMemory::random(&alpha, dim, &mut rng)?;
            let base = random_string(&alpha, n, &mut rng);
            let sa = build_string_automaton(&base, &cb, &mut rng)?;
            thresholds[si][xi] = calibrate_threshold(&sa, query_len, variant, CALIBRATION_TRIALS, &mut rng)?;
        }
    }
    let rows = sweep(exec, runs, lens.len(), dims.len(), |t, si, xi| {
        let mut rng = trial_rng(seed, t).derive(si as u64).derive(xi as u64);
        let cb = ItemMemory::random(&alpha, dims[xi], &mut rng)?;
        let (mut correct, mut agreed, mut exact) = (0usize, 0usize, 0usize);
        for b in 0..BASES_PER_RUN {
            let check = labelled_query(
                variant,
                &cb,
                lens[si],
                query_len,
                b % 2 == 0,
                Some(thresholds[si][xi]),
                &mut rng,
            )?;
            if check.present == check.expected {
                correct += 1;
                agreed += 1;
                exact += usize::from(check.positions_exact);
            }
        }
        let series = series_key(json!({"base_len": lens[si], "query_len": query_len}));
        let mut rows = vec![Row {
            trial: t,
            series: series.clone(),
            x_name: "dim",
            x_value: dims[xi] as f64,
            metric: "accuracy",
            value: correct as f64 / BASES_PER_RUN as f64,
        }];
        if variant == Variant::Cleanup {
            rows.push(Row {
                trial: t,
                series,
                x_name: "dim",
                x_value: dims[xi] as f64,
                metric: "positions_exact",
                value: if agreed == 0 { 0.0 } else { exact as f64 / agreed as f64 },
            });
        }
        Ok(rows)
    })?;
    Ok((params, rows))
}

fn tm_noise(ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    let bers = ov.noise.clone().unwrap_or_else(|| vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30]);
    let target = ov.steps.unwrap_or(if ov.paper_scale { 10_000_000 } else { 10_000 });
    let runs = ov.trials.unwrap_or(100);
    let settings = DimensionSearch::default();
    let params = json!({"ber": bers, "target_steps": target, "runs": runs, "start_dim": settings.start_dim,
        "growth": settings.growth, "max_dim": settings.max_dim, "tape_len": settings.tape_len,
        "machine": "(2,4)", "noise": "exact-count flips of the read cell, every update"});
    let table = TmTable::two_four();
    let rows = sweep(exec, runs, 1, bers.len(), |t, _, xi| {
        // The same per-trial generator for every BER pairs the runs.
        let out = tm_dimension_search(&table, bers[xi], target, 1, &trial_rng(seed, t), &settings)?;
        Ok(vec![Row {
            trial: t,
            series: series_key(json!({"target_steps": target})),
            x_name: "ber",
            x_value: bers[xi],
            metric: "dim",
            value: out.dim as f64,
        }])
    })?;
    Ok((params, rows))
}

/// Error rate of a noisy rule-110 emulation after `steps` updates, against
/// the oracle started from the same random grid.
pub fn ca_error_rate(len: usize, dim: usize, noise_p: f64, steps: usize, rng: &mut Rng) -> Result<f64> {
    let m = ca_build(CaRule::RULE_110, dim, rng)?;
    let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
    let mut grid = ca_encode_grid(&bits, &m)?;
    let mut oracle = CaOracle::new(CaRule::RULE_110, &bits);
    for _ in 0..steps {
        grid = ca_step(&grid, &m, noise_p, rng)?;
        oracle.step();
    }
    let decoded = ca_decode_grid(&grid, &m)?;
    let wrong = decoded.iter().zip(&oracle.cells).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / len as f64)
}

fn ca110(noisy: bool, ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    let dims = ov.dims.clone().unwrap_or_else(|| powers_of_two(10, 17));
    let steps = ov.steps.unwrap_or(100) as usize;
    let runs = ov.trials.unwrap_or(if noisy || ov.paper_scale { 100 } else { 20 });
    let lens = ov.lengths.clone().unwrap_or_else(|| match (noisy, ov.paper_scale) {
        (true, _) => vec![32],
        (false, false) => vec![32, 64, 128],
        (false, true) => powers_of_two(5, 10),
    });
    let noise = if noisy {
        ov.noise.clone().unwrap_or_else(|| vec![0.03125, 0.0625, 0.125, 0.25])
    } else {
        vec![0.0]
    };
    let params = json!({"rule": 110, "grid_lengths": lens, "dims": dims, "noise": noise, "steps": steps,
        "runs": runs, "boundary": "periodic", "noise_model": "exact-count flips of the grid vector, every step",
        "neighbourhood_query": "integer sum of the three bound terms"});
    let series: Vec<(usize, f64)> = lens.iter().flat_map(|&l| noise.iter().map(move |&p| (l, p))).collect();
    let rows = sweep(exec, runs, series.len(), dims.len(), |t, si, xi| {
        let (l, p) = series[si];
        // Keyed by (length, dim) only, so noise levels share machines and grids.
        let len_index = lens.iter().position(|&x| x == l).unwrap_or(0) as u64;
        let mut rng = trial_rng(seed, t).derive(len_index).derive(xi as u64);
        let rate = ca_error_rate(l, dims[xi], p, steps, &mut rng)?;
        let key = if noisy { json!({"grid_len": l, "noise": p}) } else { json!({"grid_len": l}) };
        Ok(vec![Row {
            trial: t,
            series: series_key(key),
            x_name: "dim",
            x_value: dims[xi] as f64,
            metric: "error_rate",
            value: rate,
        }])
    })?;
    Ok((params, rows))
}

/// Solves one random `factors`-way problem with codebooks of `size` entries.
/// Returns `(success, converged, iterations)`; success means converged to the
/// generating factors.
pub fn resonator_trial(factors: usize, size: usize, dim: usize, rng: &mut Rng) -> Result<(bool, bool, usize)> {
    let codebooks = (0..factors)
        .map(|f| {
            let names: Vec<String> = (0..size).map(|i| format!("f{f}_{i}")).collect();
            ItemMemory::random(&names, dim, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let truth: Vec<usize> = (0..factors).map(|_| rng.gen_range(0..size)).collect();
    let s = Hypervector::bind_all(truth.iter().zip(&codebooks).map(|(&i, cb)| cb.vector(i)))?;
    let r = factorize(&ResonatorProblem::new(s, codebooks.clone())?)?;
    let hit = r.converged
        && r
            .factors
            .iter()
            .zip(&codebooks)
            .zip(&truth)
            .all(|((name, cb), &i)| cb.name(i) == name);
    Ok((hit, r.converged, r.iterations))
}

fn resonator(ov: &Overrides, seed: u64, exec: Exec) -> Result<(Value, Vec<Row>)> {
    const FACTORS: usize = 3;
    const SIZE: usize = 8;
    let dims = ov.dims.clone().unwrap_or_else(|| vec![256, 512, 1024, 2048]);
    let runs = ov.trials.unwrap_or(1000);
    let params = json!({"factors": FACTORS, "codebook_size": SIZE, "dims": dims, "runs": runs,
        "max_iters": crate::resonator::DEFAULT_MAX_ITERS, "update": "synchronous", "stop": "exact fixed point"});
    let rows = sweep(exec, runs, 1, dims.len(), |t, _, xi| {
        let mut rng = trial_rng(seed, t).derive(xi as u64);
        let (hit, converged, iters) = resonator_trial(FACTORS, SIZE, dims[xi], &mut rng)?;
        let series = series_key(json!({"factors": FACTORS, "codebook_size": SIZE}));
        let row = |metric, value| Row {
            trial: t,
            series: series.clone(),
            x_name: "dim",
            x_value: dims[xi] as f64,
            metric,
            value,
        };
        Ok(vec![
            row("success", f64::from(u8::from(hit))),
            row("converged", f64::from(u8::from(converged))),
            row("iterations", iters as f64),
        ])
    })?;
    Ok((params, rows))
}
