use std::fs;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mapvsa::codec::{read_codebook, write_codebook};
use mapvsa::encoders::{encode_sequence_sum, encode_set};
use mapvsa::experiments::{parse_grid, params_path, run_experiment, write_outputs, Overrides, EXPERIMENTS};
use mapvsa::resonator::{factorize, ResonatorProblem};
use mapvsa::search::{build_string_automaton, calibrate_threshold, naive_match_ends, Variant};
use mapvsa::universal::{
    ca_build, ca_decode_grid, ca_encode_grid, ca_step, tm_build, tm_step, CaOracle, CaRule, HoodQuery, TmOracle, TmTable, TmTape,
};
use mapvsa::{Exec, Hypervector, ItemMemory, Rng};

#[derive(Parser)]
#[command(name = "mapvsa", version, about = "Hypervector toolkit and figure-replication harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write it as CSV.
    Experiment(ExperimentArgs),
    /// Encode symbols as a set or a sequence; writes the codebook and the compound vector.
    Encode(EncodeArgs),
    /// Score a stored compound vector against a codebook.
    Probe(ProbeArgs),
    /// Factorize a random bind-product with a resonator network.
    Factorize(FactorizeArgs),
    /// Search a substring with a string automaton in superposition.
    Search(SearchArgs),
    /// Emulate a Turing machine or an elementary cellular automaton.
    Emulate(EmulateArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: histogram, fsa-recall, substring-original, substring-cleanup, tm-noise, ca110, ca110-noise, resonator.
    name: String,
    /// Dimension grid as start:end:step or start:end:xK.
    #[arg(long)]
    dims: Option<String>,
    /// Single dimension; shorthand for a one-point grid.
    #[arg(long, conflicts_with = "dims")]
    dim: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated noise levels.
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    /// Comma-separated sizes or lengths (histogram sizes, base lengths, grid lengths).
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Step budget or query length, depending on the experiment.
    #[arg(long)]
    steps: Option<u64>,
    /// CSV output path; the parameter grid goes to `<out>.params.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the published grid instead of the desk-scale defaults.
    #[arg(long)]
    paper_scale: bool,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeKind {
    Set,
    Sequence,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(value_enum)]
    kind: EncodeKind,
    /// Symbols to encode, in order.
    #[arg(required = true)]
    items: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Where to write the symbol codebook.
    #[arg(long)]
    codebook: PathBuf,
    /// Where to write the normalized compound vector.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long)]
    vector: PathBuf,
    /// Rotate the vector by -shift first (reads position `shift` of a sequence).
    #[arg(long, default_value_t = 0)]
    shift: i64,
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Args)]
struct FactorizeArgs {
    #[arg(long, default_value_t = 3)]
    factors: usize,
    #[arg(long, default_value_t = 8)]
    size: usize,
    #[arg(long, default_value_t = 2048)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = mapvsa::resonator::DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Original,
    Cleanup,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, required_unless_present = "batch")]
    base: Option<String>,
    #[arg(long, required_unless_present = "batch")]
    query: Option<String>,
    /// File of `base,query[,expected]` rows; expected is 1/0 or true/false and
    /// defaults to a direct substring check.
    #[arg(long, conflicts_with_all = ["base", "query"])]
    batch: Option<PathBuf>,
    #[arg(long, default_value_t = 8192)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Cleanup)]
    variant: VariantArg,
    /// Accept threshold; defaults to dim / 2.
    #[arg(long, conflicts_with = "calibrate")]
    threshold: Option<i64>,
    /// Calibrate the threshold on this many random absent queries.
    #[arg(long)]
    calibrate: Option<usize>,
}

#[derive(Args)]
struct EmulateArgs {
    #[command(subcommand)]
    machine: Machine,
}

#[derive(Subcommand)]
enum Machine {
    /// The (2,4) Turing machine, or a table loaded with --table.
    Tm(TmArgs),
    /// An elementary cellular automaton on a ring (rule 110 by default).
    Ca(CaArgs),
}

#[derive(Args)]
struct TmArgs {
    #[arg(long, default_value_t = 100)]
    steps: u64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial tape as a symbol string; random 32 cells when omitted.
    #[arg(long)]
    tape: Option<String>,
    /// Behaviour table with rows `state symbol write move next`.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct CaArgs {
    #[arg(long, default_value_t = 100)]
    steps: u64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 16384)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial grid as a bit string; random 32 cells when omitted.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 110)]
    rule: u8,
    /// Rule file (a rule number or eight `xyz next` rows); overrides --rule.
    #[arg(long)]
    rule_file: Option<PathBuf>,
    /// Bipolarize the recovered neighbourhood before the rule lookup
    /// instead of scoring the exact sum of its three terms.
    #[arg(long)]
    majority_query: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = io::stdout();
    let mut out = out.lock();
    let result = match cli.command {
        Command::Experiment(a) => experiment(a, &mut out),
        Command::Encode(a) => encode(a, &mut out),
        Command::Probe(a) => probe(a, &mut out),
        Command::Factorize(a) => factorize_cmd(a, &mut out),
        Command::Search(a) => search(a, &mut out),
        Command::Emulate(a) => match a.machine {
            Machine::Tm(a) => emulate_tm(a, &mut out),
            Machine::Ca(a) => emulate_ca(a, &mut out),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn experiment(a: ExperimentArgs, out: &mut impl Write) -> Result<()> {
    if !EXPERIMENTS.contains(&a.name.as_str()) {
        bail!("unknown experiment `{}`; expected one of {}", a.name, EXPERIMENTS.join(", "));
    }
    let dims = match (a.dims, a.dim) {
        (Some(spec), _) => Some(parse_grid(&spec)?),
        (None, Some(d)) => Some(vec![d]),
        (None, None) => None,
    };
    let ov = Overrides {
        dims,
        trials: a.trials,
        noise: a.noise,
        lengths: a.lengths,
        steps: a.steps,
        paper_scale: a.paper_scale,
    };
    let exec = if a.sequential { Exec::Sequential } else { Exec::default() };
    let result = run_experiment(&a.name, &ov, a.seed, exec)?;
    match &a.out {
        Some(path) => {
            write_outputs(&result, path).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {} rows to {}", result.rows.len(), path.display())?;
            writeln!(out, "parameters in {}", params_path(path).display())?;
        }
        None => result.write_csv(&mut *out)?,
    }
    if a.out.is_some() {
        writeln!(out, "series\tx\tmetric\tmean\tn")?;
        for s in result.summary() {
            writeln!(out, "{}\t{}\t{}\t{:.4}\t{}", s.series, s.x_value, s.metric, s.mean, s.count)?;
        }
    }
    Ok(())
}

fn encode(a: EncodeArgs, out: &mut impl Write) -> Result<()> {
    let mut unique: Vec<String> = Vec::new();
    for s in &a.items {
        if !unique.contains(s) {
            unique.push(s.clone());
        }
    }
    let mut rng = Rng::new(a.seed);
    let cb = ItemMemory::random(&unique, a.dim, &mut rng)?;
    let acc = match a.kind {
        EncodeKind::Set => encode_set(&cb, &unique)?,
        EncodeKind::Sequence => encode_sequence_sum(&cb, &a.items)?,
    };
    let v = acc.normalize(cb.tie_break())?;
    write_codebook(&cb, fs::File::create(&a.codebook).with_context(|| a.codebook.display().to_string())?)?;
    let single = ItemMemory::from_entries(a.dim, cb.tie_break().seed(), vec![("compound".to_string(), v)])?;
    write_codebook(&single, fs::File::create(&a.out).with_context(|| a.out.display().to_string())?)?;
    writeln!(out, "encoded {} symbols at dim {}", a.items.len(), a.dim)?;
    Ok(())
}

fn load_codebook(path: &PathBuf) -> Result<ItemMemory> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_codebook(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn probe(a: ProbeArgs, out: &mut impl Write) -> Result<()> {
    let cb = load_codebook(&a.codebook)?;
    let vec_mem = load_codebook(&a.vector)?;
    if vec_mem.is_empty() {
        bail!("{} holds no vector", a.vector.display());
    }
    let v = vec_mem.vector(0).permute(-a.shift);
    for (i, score) in cb.top_k(&v, a.top)? {
        writeln!(out, "{}\t{}", cb.name(i), score)?;
    }
    Ok(())
}

fn factorize_cmd(a: FactorizeArgs, out: &mut impl Write) -> Result<()> {
    let mut rng = Rng::new(a.seed);
    let codebooks = (0..a.factors)
        .map(|f| {
            let names: Vec<String> = (0..a.size).map(|i| format!("f{f}_{i}")).collect();
            ItemMemory::random(&names, a.dim, &mut rng)
        })
        .collect::<mapvsa::Result<Vec<_>>>()?;
    let truth: Vec<usize> = (0..a.factors).map(|_| (rng.next_seed() % a.size.max(1) as u64) as usize).collect();
    let s = Hypervector::bind_all(truth.iter().zip(&codebooks).map(|(&i, cb)| cb.vector(i)))?;
    let problem = ResonatorProblem::new(s, codebooks.clone())?.with_max_iters(a.max_iters);
    let r = factorize(&problem)?;
    let names: Vec<&str> = truth.iter().zip(&codebooks).map(|(&i, cb)| cb.name(i)).collect();
    writeln!(out, "generated: {}", names.join(" "))?;
    writeln!(out, "factors: {}", r.factors.join(" "))?;
    writeln!(out, "converged: {} after {} iterations", r.converged, r.iterations)?;
    Ok(())
}

fn chars(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

fn search(a: SearchArgs, out: &mut impl Write) -> Result<()> {
    let variant = match a.variant {
        VariantArg::Original => Variant::Original,
        VariantArg::Cleanup => Variant::Cleanup,
    };
    let rows: Vec<(String, String, Option<bool>)> = match &a.batch {
        Some(path) => parse_batch(&fs::read_to_string(path).with_context(|| path.display().to_string())?)?,
        None => vec![(a.base.clone().unwrap_or_default(), a.query.clone().unwrap_or_default(), None)],
    };
    let mut rng = Rng::new(a.seed);
    let mut alphabet: Vec<String> = rows.iter().flat_map(|(b, q, _)| chars(b).into_iter().chain(chars(q))).collect();
    alphabet.sort();
    alphabet.dedup();
    let cb = ItemMemory::random(&alphabet, a.dim, &mut rng)?;
    let (mut labelled, mut agree) = (0usize, 0usize);
    for (base, query, expected) in &rows {
        let sa = build_string_automaton(&chars(base), &cb, &mut rng)?;
        let q = chars(query);
        let threshold = match (a.threshold, a.calibrate) {
            (Some(t), _) => t,
            (None, Some(trials)) => calibrate_threshold(&sa, q.len(), variant, trials, &mut rng)?,
            (None, None) => sa.default_threshold(),
        };
        let r = sa.query(&q, threshold, variant)?;
        let verdict = if r.present { "present" } else { "absent" };
        let positions = if r.positions.is_empty() {
            String::new()
        } else {
            let p: Vec<String> = r.positions.iter().map(usize::to_string).collect();
            format!(" end positions: {}", p.join(","))
        };
        if a.batch.is_some() {
            writeln!(out, "{base}\t{query}\t{verdict}\tscore {}{positions}", r.score)?;
        } else {
            writeln!(out, "{verdict} (score {}, threshold {threshold}){positions}", r.score)?;
        }
        if a.batch.is_some() {
            let truth = expected.unwrap_or_else(|| !naive_match_ends(&chars(base), &q).is_empty());
            labelled += 1;
            agree += usize::from(truth == r.present);
        }
    }
    if labelled > 0 {
        writeln!(out, "accuracy {}/{} = {:.4}", agree, labelled, agree as f64 / labelled as f64)?;
    }
    Ok(())
}

fn parse_batch(text: &str) -> Result<Vec<(String, String, Option<bool>)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let expected = match fields.get(2) {
            None => None,
            Some(&"1") | Some(&"true") => Some(true),
            Some(&"0") | Some(&"false") => Some(false),
            Some(other) => bail!("line {}: expected must be 1/0 or true/false, got `{other}`", i + 1),
        };
        match fields.as_slice() {
            [b, q] | [b, q, _] if !b.is_empty() && !q.is_empty() => rows.push((b.to_string(), q.to_string(), expected)),
            _ => bail!("line {}: expected `base,query[,expected]`", i + 1),
        }
    }
    if rows.is_empty() {
        bail!("batch file has no rows");
    }
    Ok(rows)
}

fn emulate_tm(a: TmArgs, out: &mut impl Write) -> Result<()> {
    let table = match &a.table {
        Some(p) => TmTable::parse(&fs::read_to_string(p).with_context(|| p.display().to_string())?)?,
        None => TmTable::two_four(),
    };
    let mut rng = Rng::new(a.seed);
    let m = tm_build(&table, a.dim, &mut rng)?;
    let init: Vec<String> = match &a.tape {
        Some(t) => chars(t),
        None => table.random_tape(32, &mut rng),
    };
    let head = init.len() / 2;
    let mut tape = TmTape::new(&m, &init, head, table.start())?;
    let mut oracle = TmOracle::new(&init, head, table.start());
    let mut mismatched_steps = 0u64;
    for _ in 0..a.steps {
        let got = tm_step(&m, &mut tape, a.noise, &mut rng)?.clone();
        if &got != oracle.step(&table)? {
            mismatched_steps += 1;
        }
    }
    let emulated = tape.decode(&m)?.concat();
    let expected: String = oracle.cells.iter().map(String::as_str).collect();
    writeln!(out, "emulated: {emulated} head {} state {}", tape.head, tape.state_name)?;
    writeln!(out, "oracle:   {expected} head {} state {}", oracle.head, oracle.state)?;
    writeln!(out, "steps with a different rule: {mismatched_steps}")?;
    writeln!(out, "{}", if emulated == expected { "match" } else { "differ" })?;
    Ok(())
}

fn emulate_ca(a: CaArgs, out: &mut impl Write) -> Result<()> {
    let rule = match &a.rule_file {
        Some(p) => CaRule::parse(&fs::read_to_string(p).with_context(|| p.display().to_string())?)?,
        None => CaRule(a.rule),
    };
    let mut rng = Rng::new(a.seed);
    let query = if a.majority_query { HoodQuery::Majority } else { HoodQuery::Sum };
    let m = ca_build(rule, a.dim, &mut rng)?.with_query(query);
    let bits: Vec<u8> = match &a.grid {
        Some(g) => g
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => bail!("grid must be a bit string, found `{c}`"),
            })
            .collect::<Result<_>>()?,
        None => (0..32).map(|_| (rng.next_seed() & 1) as u8).collect(),
    };
    let mut grid = ca_encode_grid(&bits, &m)?;
    let mut oracle = CaOracle::new(rule, &bits);
    for _ in 0..a.steps {
        grid = ca_step(&grid, &m, a.noise, &mut rng)?;
        oracle.step();
    }
    let decoded = ca_decode_grid(&grid, &m)?;
    let show = |b: &[u8]| b.iter().map(|x| char::from(b'0' + x)).collect::<String>();
    let wrong = decoded.iter().zip(&oracle.cells).filter(|(x, y)| x != y).count();
    writeln!(out, "emulated: {}", show(&decoded))?;
    writeln!(out, "oracle:   {}", show(&oracle.cells))?;
    writeln!(out, "error rate: {:.4}", wrong as f64 / bits.len() as f64)?;
    Ok(())
}
