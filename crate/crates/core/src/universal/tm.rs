//! Turing machine with a heteroassociative rule memory.
//!
//! The rule memory is addressed by `state ⊙ symbol` and returns the symbol to
//! write, the head move and the next state. The tape is a growable row of
//! clean symbol seeds. Noise, when requested, is applied to the cell being
//! read just before the lookup, so it never accumulates across steps.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use super::{expect_fields, parse_error, table_rows};
use crate::error::{HdError, Result};
use crate::hv::Hypervector;
use crate::memory::{HeteroMemory, ItemMemory, Payload};
use crate::rng::Rng;

/// Codebook regeneration attempts before `tm_build` gives up.
const MAX_REGENERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

impl FromStr for Move {
    type Err = HdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Move::Left),
            "R" | "r" => Ok(Move::Right),
            _ => Err(HdError::InvalidArgument(format!("head move must be L or R, got `{s}`"))),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Left => "L",
            Move::Right => "R",
        })
    }
}

/// Content of one rule row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TmRule {
    pub write: String,
    pub mv: Move,
    pub next: String,
}

impl TmRule {
    pub fn new(write: &str, mv: Move, next: &str) -> Self {
        TmRule {
            write: write.to_string(),
            mv,
            next: next.to_string(),
        }
    }
}

impl Payload for TmRule {
    fn to_fields(&self) -> Vec<String> {
        vec![self.write.clone(), self.mv.to_string(), self.next.clone()]
    }

    fn from_fields(fields: &[&str]) -> Result<Self> {
        match fields {
            [write, mv, next] => Ok(TmRule::new(write, mv.parse()?, next)),
            _ => Err(HdError::InvalidArgument(format!(
                "expected 3 rule fields, got {}",
                fields.len()
            ))),
        }
    }
}

/// A behaviour table that is total over `states × symbols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmTable {
    states: Vec<String>,
    symbols: Vec<String>,
    rules: BTreeMap<(String, String), TmRule>,
    start: String,
    blank: String,
}

impl TmTable {
    /// States and symbols are listed in order of first appearance in `rows`.
    pub fn new(rows: Vec<(String, String, TmRule)>, start: &str, blank: &str) -> Result<Self> {
        let mut states: Vec<String> = Vec::new();
        let mut symbols: Vec<String> = Vec::new();
        let mut rules = BTreeMap::new();
        for (state, symbol, rule) in rows {
            if !states.contains(&state) {
                states.push(state.clone());
            }
            if !symbols.contains(&symbol) {
                symbols.push(symbol.clone());
            }
            if rules.insert((state.clone(), symbol.clone()), rule).is_some() {
                return Err(HdError::InvalidArgument(format!("two rules for ({state}, {symbol})")));
            }
        }
        let table = TmTable {
            states,
            symbols,
            rules,
            start: start.to_string(),
            blank: blank.to_string(),
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for s in &self.states {
            for a in &self.symbols {
                if !self.rules.contains_key(&(s.clone(), a.clone())) {
                    return Err(HdError::InvalidArgument(format!("no rule for ({s}, {a})")));
                }
            }
        }
        for r in self.rules.values() {
            if !self.symbols.contains(&r.write) {
                return Err(HdError::UnknownSymbol(r.write.clone()));
            }
            if !self.states.contains(&r.next) {
                return Err(HdError::UnknownSymbol(r.next.clone()));
            }
        }
        if !self.states.contains(&self.start) {
            return Err(HdError::UnknownSymbol(self.start.clone()));
        }
        if !self.symbols.contains(&self.blank) {
            return Err(HdError::UnknownSymbol(self.blank.clone()));
        }
        Ok(())
    }

    /// The two-state, four-symbol machine used in the universality
    /// demonstration. It has no halting state.
    pub fn two_four() -> Self {
        let rows = [
            ("A", "0", "2", Move::Left, "A"),
            ("A", "1", "3", Move::Left, "B"),
            ("A", "2", "3", Move::Left, "A"),
            ("A", "3", "3", Move::Left, "A"),
            ("B", "0", "3", Move::Right, "A"),
            ("B", "1", "2", Move::Left, "B"),
            ("B", "2", "0", Move::Right, "B"),
            ("B", "3", "1", Move::Right, "B"),
        ];
        let rows = rows
            .iter()
            .map(|&(s, a, w, m, n)| (s.to_string(), a.to_string(), TmRule::new(w, m, n)))
            .collect();
        TmTable::new(rows, "A", "0").expect("built-in table is total")
    }

    /// Parses rows of `state symbol write move next`. Optional directives
    /// `start <state>` and `blank <symbol>` override the defaults, which are
    /// the first state and the first symbol seen.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let (mut start, mut blank) = (None, None);
        for (line, fields) in table_rows(text) {
            match fields.as_slice() {
                ["start", s] => start = Some(s.to_string()),
                ["blank", b] => blank = Some(b.to_string()),
                _ => {
                    expect_fields(line, &fields, 5)?;
                    let mv = fields[3].parse().map_err(|e: HdError| parse_error(line, e.to_string()))?;
                    rows.push((
                        fields[0].to_string(),
                        fields[1].to_string(),
                        TmRule::new(fields[2], mv, fields[4]),
                    ));
                }
            }
        }
        let start = start.or_else(|| rows.first().map(|r| r.0.clone()));
        let blank = blank.or_else(|| rows.first().map(|r| r.1.clone()));
        match (start, blank) {
            (Some(s), Some(b)) => TmTable::new(rows, &s, &b),
            _ => Err(parse_error(0, "table has no rules")),
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn blank(&self) -> &str {
        &self.blank
    }

    pub fn rule(&self, state: &str, symbol: &str) -> Result<&TmRule> {
        self.rules
            .get(&(state.to_string(), symbol.to_string()))
            .ok_or_else(|| HdError::UnknownSymbol(format!("({state}, {symbol})")))
    }

    /// `len` symbols drawn uniformly from the alphabet.
    pub fn random_tape(&self, len: usize, rng: &mut Rng) -> Vec<String> {
        (0..len)
            .map(|_| self.symbols[rng.gen_range(0..self.symbols.len())].clone())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct TmMachine {
    pub table: TmTable,
    pub state_cb: ItemMemory,
    pub sym_cb: ItemMemory,
    pub rules: HeteroMemory<TmRule>,
}

fn all_distinct(mem: &ItemMemory) -> bool {
    let mut seen = HashSet::new();
    mem.vectors().iter().all(|v| seen.insert(v.words().to_vec()))
}

/// Draws the state and symbol codebooks and stores one rule row per
/// `(state, symbol)`. Codebooks are redrawn while any two states, any two
/// symbols or any two rule addresses coincide.
pub fn tm_build(table: &TmTable, dim: usize, rng: &mut Rng) -> Result<TmMachine> {
    for _ in 0..MAX_REGENERATIONS {
        let state_cb = ItemMemory::random(&table.states, dim, rng)?;
        let sym_cb = ItemMemory::random(&table.symbols, dim, rng)?;
        if !all_distinct(&state_cb) || !all_distinct(&sym_cb) {
            continue;
        }
        let mut rows = Vec::with_capacity(table.rules.len());
        for s in &table.states {
            for a in &table.symbols {
                let address = state_cb.get(s)?.bind(sym_cb.get(a)?)?;
                rows.push((address, table.rule(s, a)?.clone()));
            }
        }
        match HeteroMemory::build(dim, rows) {
            Ok(rules) => {
                return Ok(TmMachine {
                    table: table.clone(),
                    state_cb,
                    sym_cb,
                    rules,
                })
            }
            Err(HdError::DuplicateAddress(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(HdError::InvalidArgument(format!(
        "no collision-free codebooks at dimension {dim} after {MAX_REGENERATIONS} draws"
    )))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TmTape {
    pub cells: VecDeque<Hypervector>,
    pub head: usize,
    pub current_state: Hypervector,
    /// Name of the state last written by the rule memory.
    pub state_name: String,
    pub blank: String,
}

impl TmTape {
    pub fn new<S: AsRef<str>>(m: &TmMachine, symbols: &[S], head: usize, state: &str) -> Result<Self> {
        let mut cells = symbols
            .iter()
            .map(|s| m.sym_cb.get(s.as_ref()).cloned())
            .collect::<Result<VecDeque<_>>>()?;
        if cells.is_empty() {
            cells.push_back(m.sym_cb.get(m.table.blank())?.clone());
        }
        if head >= cells.len() {
            return Err(HdError::InvalidArgument(format!(
                "head {head} outside a tape of {} cells",
                cells.len()
            )));
        }
        Ok(TmTape {
            cells,
            head,
            current_state: m.state_cb.get(state)?.clone(),
            state_name: state.to_string(),
            blank: m.table.blank().to_string(),
        })
    }

    /// Symbol names of every cell, by clean-up.
    pub fn decode(&self, m: &TmMachine) -> Result<Vec<String>> {
        self.cells
            .iter()
            .map(|c| Ok(m.sym_cb.cleanup(c)?.name.to_string()))
            .collect()
    }
}

/// One update. Returns the rule row the memory selected.
pub fn tm_step<'m>(m: &'m TmMachine, tape: &mut TmTape, noise_p: f64, rng: &mut Rng) -> Result<&'m TmRule> {
    let cell = &tape.cells[tape.head];
    let read = if noise_p > 0.0 {
        cell.flip_noise(noise_p, rng)?
    } else {
        cell.clone()
    };
    let rule = m.rules.lookup(&tape.current_state.bind(&read)?)?;
    tape.cells[tape.head] = m.sym_cb.get(&rule.write)?.clone();
    tape.current_state = m.state_cb.get(&rule.next)?.clone();
    tape.state_name.clone_from(&rule.next);
    match rule.mv {
        Move::Left if tape.head == 0 => tape.cells.push_front(m.sym_cb.get(&tape.blank)?.clone()),
        Move::Left => tape.head -= 1,
        Move::Right => {
            tape.head += 1;
            if tape.head == tape.cells.len() {
                tape.cells.push_back(m.sym_cb.get(&tape.blank)?.clone());
            }
        }
    }
    Ok(rule)
}

/// Direct interpreter of a behaviour table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmOracle {
    pub cells: VecDeque<String>,
    pub head: usize,
    pub state: String,
}

impl TmOracle {
    pub fn new<S: AsRef<str>>(symbols: &[S], head: usize, state: &str) -> Self {
        TmOracle {
            cells: symbols.iter().map(|s| s.as_ref().to_string()).collect(),
            head,
            state: state.to_string(),
        }
    }

    pub fn step<'t>(&mut self, table: &'t TmTable) -> Result<&'t TmRule> {
        if self.cells.is_empty() {
            self.cells.push_back(table.blank().to_string());
        }
        let rule = table.rule(&self.state, &self.cells[self.head])?;
        self.cells[self.head].clone_from(&rule.write);
        self.state.clone_from(&rule.next);
        match rule.mv {
            Move::Left if self.head == 0 => self.cells.push_front(table.blank().to_string()),
            Move::Left => self.head -= 1,
            Move::Right => {
                self.head += 1;
                if self.head == self.cells.len() {
                    self.cells.push_back(table.blank().to_string());
                }
            }
        }
        Ok(rule)
    }
}

/// Settings of the dimension search loop.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionSearch {
    pub start_dim: usize,
    /// Multiplicative increase after a failed run.
    pub growth: f64,
    pub max_dim: usize,
    /// Cells on the random initial tape; the head starts in the middle.
    pub tape_len: usize,
}

impl Default for DimensionSearch {
    fn default() -> Self {
        DimensionSearch {
            start_dim: 16,
            growth: 1.1,
            max_dim: 1 << 16,
            tape_len: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub dim: usize,
    /// Dimensions tried, in order, including the accepted one.
    pub attempts: Vec<usize>,
}

/// Runs `target_steps` updates against the oracle, comparing the selected
/// rule at every step. Returns whether the run was error-free.
fn error_free_run(table: &TmTable, dim: usize, noise_p: f64, target_steps: u64, tape_len: usize, rng: &mut Rng) -> Result<bool> {
    let m = tm_build(table, dim, rng)?;
    let init = table.random_tape(tape_len.max(1), rng);
    let head = init.len() / 2;
    let mut tape = TmTape::new(&m, &init, head, table.start())?;
    let mut oracle = TmOracle::new(&init, head, table.start());
    for _ in 0..target_steps {
        let got = tm_step(&m, &mut tape, noise_p, rng)?;
        if got != oracle.step(table)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest dimension on the growth schedule at which `trials` independent
/// runs of `target_steps` noisy updates are all error-free.
///
/// The randomness of every run depends only on `(rng seed, dimension, trial)`,
/// so two searches with the same seed see the same codebooks and noise at
/// each dimension they both visit.
pub fn tm_dimension_search(
    table: &TmTable,
    noise_p: f64,
    target_steps: u64,
    trials: usize,
    rng: &Rng,
    settings: &DimensionSearch,
) -> Result<SearchOutcome> {
    if target_steps == 0 || trials == 0 {
        return Err(HdError::InvalidArgument("target_steps and trials must be positive".into()));
    }
    if !(0.0..=1.0).contains(&noise_p) {
        return Err(HdError::InvalidProbability(noise_p));
    }
    if settings.growth <= 1.0 {
        return Err(HdError::InvalidArgument("growth must exceed 1".into()));
    }
    let mut dim = settings.start_dim.max(1);
    let mut attempts = Vec::new();
    while dim <= settings.max_dim {
        attempts.push(dim);
        let at_dim = rng.derive(dim as u64);
        let mut ok = true;
        for t in 0..trials {
            if !error_free_run(table, dim, noise_p, target_steps, settings.tape_len, &mut at_dim.derive(t as u64))? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SearchOutcome { dim, attempts });
        }
        dim = ((dim as f64 * settings.growth).ceil() as usize).max(dim + 1);
    }
    Err(HdError::InvalidArgument(format!(
        "no dimension up to {} reached {target_steps} error-free steps at noise {noise_p}",
        settings.max_dim
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_four_table() {
        let t = TmTable::two_four();
        assert_eq!(t.states(), ["A", "B"]);
        assert_eq!(t.symbols(), ["0", "1", "2", "3"]);
        assert_eq!(t.rule("B", "0").unwrap(), &TmRule::new("3", Move::Right, "A"));
        assert_eq!(t.rule("A", "1").unwrap(), &TmRule::new("3", Move::Left, "B"));
    }

    #[test]
    fn build_and_lookup() {
        let t = TmTable::two_four();
        let m = tm_build(&t, 64, &mut Rng::new(1)).unwrap();
        assert_eq!(m.rules.len(), 8);
        let key = m.state_cb.get("B").unwrap().bind(m.sym_cb.get("0").unwrap()).unwrap();
        assert_eq!(m.rules.lookup(&key).unwrap(), &TmRule::new("3", Move::Right, "A"));
    }

    #[test]
    fn tiny_dimension_still_deterministic() {
        let t = TmTable::two_four();
        let m = tm_build(&t, 3, &mut Rng::new(4)).unwrap();
        let init = ["1", "0", "2"];
        let mut tape = TmTape::new(&m, &init, 1, "A").unwrap();
        let mut oracle = TmOracle::new(&init, 1, "A");
        let mut rng = Rng::new(0);
        for _ in 0..200 {
            assert_eq!(tm_step(&m, &mut tape, 0.0, &mut rng).unwrap(), oracle.step(&t).unwrap());
        }
        assert_eq!(tape.decode(&m).unwrap(), Vec::from(oracle.cells));
    }

    #[test]
    fn b_over_zero_moves_right() {
        let t = TmTable::two_four();
        let m = tm_build(&t, 256, &mut Rng::new(2)).unwrap();
        let mut tape = TmTape::new(&m, &["1", "0", "2"], 1, "B").unwrap();
        let rule = tm_step(&m, &mut tape, 0.0, &mut Rng::new(0)).unwrap();
        assert_eq!(rule, &TmRule::new("3", Move::Right, "A"));
        assert_eq!(tape.head, 2);
        assert_eq!(tape.state_name, "A");
        assert_eq!(tape.decode(&m).unwrap(), ["1", "3", "2"]);
    }

    #[test]
    fn tape_extends_on_both_ends() {
        let t = TmTable::two_four();
        let m = tm_build(&t, 128, &mut Rng::new(3)).unwrap();
        // (A, 0) moves left off the tape
        let mut tape = TmTape::new(&m, &["0"], 0, "A").unwrap();
        tm_step(&m, &mut tape, 0.0, &mut Rng::new(0)).unwrap();
        assert_eq!((tape.head, tape.cells.len()), (0, 2));
        // (B, 2) moves right off the tape
        let mut tape = TmTape::new(&m, &["2"], 0, "B").unwrap();
        tm_step(&m, &mut tape, 0.0, &mut Rng::new(0)).unwrap();
        assert_eq!((tape.head, tape.cells.len()), (1, 2));
        assert_eq!(tape.decode(&m).unwrap(), ["0", "0"]);
    }

    #[test]
    fn parse_round_trip() {
        let text = "# two-state machine\nstart A\nblank 0\n\
            A,0,2,L,A\nA,1,3,L,B\nA,2,3,L,A\nA,3,3,L,A\n\
            B 0 3 R A\nB 1 2 L B\nB 2 0 R B\nB 3 1 R B\n";
        assert_eq!(TmTable::parse(text).unwrap(), TmTable::two_four());
        assert!(matches!(TmTable::parse("A 0 2 L"), Err(HdError::Parse { line: 1, .. })));
        assert!(TmTable::parse("A 0 2 L A\nA 1 1 R A\nB 0 0 R A").is_err());
    }

    #[test]
    fn payload_fields() {
        let r = TmRule::new("3", Move::Right, "A");
        let f = r.to_fields();
        let refs: Vec<&str> = f.iter().map(String::as_str).collect();
        assert_eq!(TmRule::from_fields(&refs).unwrap(), r);
    }

    #[test]
    fn noiseless_search_returns_start() {
        let t = TmTable::two_four();
        let out = tm_dimension_search(&t, 0.0, 500, 2, &Rng::new(5), &DimensionSearch::default()).unwrap();
        assert_eq!(out.dim, 16);
        assert_eq!(out.attempts, vec![16]);
    }

    #[test]
    fn longer_target_never_needs_less() {
        let t = TmTable::two_four();
        let s = DimensionSearch::default();
        for seed in 0..5 {
            let short = tm_dimension_search(&t, 0.15, 200, 1, &Rng::new(seed), &s).unwrap();
            let long = tm_dimension_search(&t, 0.15, 400, 1, &Rng::new(seed), &s).unwrap();
            assert!(long.dim >= short.dim, "seed {seed}: {} < {}", long.dim, short.dim);
        }
    }
}
