//! Timed automata and symbolic forward reachability over mixed polyhedra.
//!
//! Regions are mixed systems over the clocks. Strict clock constraints use
//! `Under` coefficients, so sets such as `1 < max(x1, x2)` are represented
//! exactly.
//!
//! Automaton format:
//!
//! ```text
//! clocks x1 x2
//! location l0
//! location l1 invariant x1 <= 5
//! initial l0
//! final l1
//! edge l0 -> l1 when x2 > 1, x1 < 3 + x2 reset x1:=0
//! ```

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::fm::{eliminate, embed_scaled, hull_union};
use crate::germ::{Germ, MaxPlus};
use crate::mpg::{implies, is_empty};
use crate::reduce::{reduce_system, ReduceMode};
use crate::system::{MixedInequality, MixedSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimedError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("clock index {index} out of range for {clocks} clocks")]
    ClockOutOfRange { index: usize, clocks: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        })
    }
}

/// `x_clock ⋈ k` or `x_clock ⋈ k + x_other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClockAtom {
    pub clock: usize,
    pub cmp: Cmp,
    pub k: i64,
    pub other: Option<usize>,
}

/// Conjunction of atoms; empty means `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClockConstraint(pub Vec<ClockAtom>);

impl ClockConstraint {
    /// Parses comma-separated atoms such as `x1 <= 1, x2 > 1, x1 < 3 + x2`.
    pub fn parse(text: &str, clocks: &[String]) -> Result<Self, TimedError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(ClockConstraint::default());
        }
        text.split(',').map(|atom| parse_atom(atom, clocks)).collect::<Result<_, _>>().map(ClockConstraint)
    }
}

fn clock_index(name: &str, clocks: &[String]) -> Result<usize, TimedError> {
    clocks.iter().position(|c| c == name).ok_or_else(|| TimedError::UnknownClock(name.to_string()))
}

fn bad(message: impl Into<String>) -> TimedError {
    TimedError::Parse { line: 0, message: message.into() }
}

fn parse_atom(text: &str, clocks: &[String]) -> Result<ClockAtom, TimedError> {
    let at = text.find(['<', '>', '=']).ok_or_else(|| bad(format!("missing comparison in `{}`", text.trim())))?;
    let rest = &text[at..];
    let (cmp, len) = if rest.starts_with("<=") {
        (Cmp::Le, 2)
    } else if rest.starts_with(">=") {
        (Cmp::Ge, 2)
    } else if rest.starts_with('<') {
        (Cmp::Lt, 1)
    } else if rest.starts_with('>') {
        (Cmp::Gt, 1)
    } else {
        (Cmp::Eq, 1)
    };
    let clock = clock_index(text[..at].trim(), clocks)?;
    let rhs = rest[len..].trim();
    let parse_k = |s: &str| s.trim().parse::<i64>().map_err(|_| bad(format!("expected an integer, got `{}`", s.trim())));
    let (k, other) = match rhs.rsplit_once('+') {
        Some((k, name)) => (parse_k(k)?, Some(clock_index(name.trim(), clocks)?)),
        None => match rhs.parse::<i64>() {
            Ok(k) => (k, None),
            Err(_) => (0, Some(clock_index(rhs, clocks)?)),
        },
    };
    if other == Some(clock) {
        return Err(bad(format!("atom `{}` compares a clock with itself", text.trim())));
    }
    Ok(ClockAtom { clock, cmp, k, other })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: ClockConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub guard: ClockConstraint,
    /// `(clock, value)` pairs.
    pub resets: Vec<(usize, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub clocks: Vec<String>,
    pub locations: Vec<Location>,
    pub initial: usize,
    pub final_location: usize,
    pub edges: Vec<Edge>,
}

impl TimedAutomaton {
    pub fn parse(text: &str) -> Result<Self, TimedError> {
        let mut clocks: Option<Vec<String>> = None;
        let mut locations: Vec<Location> = Vec::new();
        let mut initial: Option<(usize, String)> = None;
        let mut final_location: Option<(usize, String)> = None;
        let mut edges: Vec<(usize, String, String, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let at_line = |e: TimedError| match e {
                TimedError::Parse { message, .. } => TimedError::Parse { line: line_no, message },
                other => TimedError::Parse { line: line_no, message: other.to_string() },
            };
            let line = raw.split_once('#').map_or(raw, |(code, _)| code).trim();
            let Some((keyword, rest)) = line.split_once(char::is_whitespace).or((!line.is_empty()).then_some((line, "")))
            else {
                continue;
            };
            let rest = rest.trim();
            match keyword {
                "clocks" => {
                    let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() || clocks.is_some() {
                        return Err(at_line(bad("`clocks` must appear once with at least one name")));
                    }
                    if names.iter().enumerate().any(|(i, n)| names[..i].contains(n)) {
                        return Err(at_line(bad("duplicate clock name")));
                    }
                    clocks = Some(names);
                }
                "location" => {
                    let names = clocks.as_deref().ok_or_else(|| at_line(bad("`clocks` must come first")))?;
                    let (name, tail) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    if name.is_empty() || locations.iter().any(|l| l.name == name) {
                        return Err(at_line(bad(format!("missing or duplicate location name `{name}`"))));
                    }
                    let tail = tail.trim();
                    let invariant = match tail.strip_prefix("invariant") {
                        Some(atoms) => ClockConstraint::parse(atoms, names).map_err(at_line)?,
                        None if tail.is_empty() => ClockConstraint::default(),
                        None => return Err(at_line(bad(format!("unexpected `{tail}`")))),
                    };
                    locations.push(Location { name: name.to_string(), invariant });
                }
                "initial" => initial = Some((line_no, rest.to_string())),
                "final" => final_location = Some((line_no, rest.to_string())),
                "edge" => {
                    let mut words = rest.split_whitespace();
                    let (Some(src), Some("->"), Some(dst)) = (words.next(), words.next(), words.next()) else {
                        return Err(at_line(bad("expected `edge <src> -> <dst>`")));
                    };
                    let tail: Vec<&str> = words.collect();
                    let reset_at = tail.iter().position(|&w| w == "reset").unwrap_or(tail.len());
                    let guard = match tail.first() {
                        Some(&"when") => tail[1..reset_at].join(" "),
                        Some(&"reset") | None => String::new(),
                        Some(other) => return Err(at_line(bad(format!("unexpected `{other}`")))),
                    };
                    let resets = tail.get(reset_at + 1..).map(|w| w.join(" ")).unwrap_or_default();
                    edges.push((line_no, src.to_string(), dst.to_string(), guard, resets));
                }
                other => return Err(at_line(bad(format!("unknown keyword `{other}`")))),
            }
        }
        let clocks = clocks.ok_or_else(|| bad("missing `clocks` line"))?;
        let find = |line: usize, name: &str| {
            locations
                .iter()
                .position(|l| l.name == name)
                .ok_or(TimedError::Parse { line, message: format!("unknown location `{name}`") })
        };
        let (line, name) = initial.ok_or_else(|| bad("missing `initial` line"))?;
        let initial = find(line, &name)?;
        let (line, name) = final_location.ok_or_else(|| bad("missing `final` line"))?;
        let final_location = find(line, &name)?;
        let mut parsed = Vec::with_capacity(edges.len());
        for (line, src, dst, guard, resets) in edges {
            let at_line = |e: TimedError| TimedError::Parse {
                line,
                message: match e {
                    TimedError::Parse { message, .. } => message,
                    other => other.to_string(),
                },
            };
            let guard = ClockConstraint::parse(&guard, &clocks).map_err(at_line)?;
            let mut pairs = Vec::new();
            for item in resets.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (clock, value) = item.split_once(":=").ok_or_else(|| at_line(bad(format!("expected `x:=k`, got `{item}`"))))?;
                let clock = clock_index(clock.trim(), &clocks).map_err(at_line)?;
                let value = value.trim().parse::<u32>().map_err(|_| at_line(bad(format!("reset value must be a natural in `{item}`"))))?;
                pairs.push((clock, value));
            }
            parsed.push(Edge { src: find(line, &src)?, dst: find(line, &dst)?, guard, resets: pairs });
        }
        Ok(TimedAutomaton { clocks, locations, initial, final_location, edges: parsed })
    }

    pub fn dim(&self) -> usize {
        self.clocks.len()
    }
}

fn row(n: usize, lhs: &[(usize, i64)], lhs_const: Option<i64>, rhs: &[(usize, Germ)], rhs_const: Germ) -> MixedInequality {
    let mut l = vec![MaxPlus::NegInf; n];
    let mut r = vec![Germ::NegInf; n];
    for &(i, a) in lhs {
        l[i] = MaxPlus::int(a);
    }
    for &(j, b) in rhs {
        r[j] = b;
    }
    MixedInequality::new(l, lhs_const.map_or(MaxPlus::NegInf, MaxPlus::int), r, rhs_const)
}

/// Mixed rows equivalent to one atom.
pub fn atom_rows(atom: &ClockAtom, n: usize) -> Vec<MixedInequality> {
    let (i, k) = (atom.clock, atom.k);
    let le = |strict: bool| if strict { Germ::under(k) } else { Germ::plain(k) };
    let zero = |strict: bool| if strict { Germ::under(0) } else { Germ::plain(0) };
    match atom.other {
        None => {
            let upper = |s| row(n, &[(i, 0)], None, &[], le(s));
            let lower = |s| row(n, &[], Some(k), &[(i, zero(s))], Germ::NegInf);
            match atom.cmp {
                Cmp::Lt => vec![upper(true)],
                Cmp::Le => vec![upper(false)],
                Cmp::Eq => vec![upper(false), lower(false)],
                Cmp::Ge => vec![lower(false)],
                Cmp::Gt => vec![lower(true)],
            }
        }
        Some(j) => {
            // x_i ◁ k + x_j, and x_j ◁ −k + x_i for the reversed comparisons.
            let finite = |v: usize| row(n, &[], Some(0), &[(v, Germ::PosInf)], Germ::NegInf);
            let upper = |s: bool| {
                let mut rows = vec![row(n, &[(i, 0)], None, &[(j, le(s))], Germ::NegInf)];
                if s {
                    rows.push(finite(j));
                }
                rows
            };
            let lower = |s: bool| {
                let back = if s { Germ::under(-k) } else { Germ::plain(-k) };
                let mut rows = vec![row(n, &[(j, 0)], None, &[(i, back)], Germ::NegInf)];
                if s {
                    rows.push(finite(i));
                }
                rows
            };
            match atom.cmp {
                Cmp::Lt => upper(true),
                Cmp::Le => upper(false),
                Cmp::Eq => [upper(false), lower(false)].concat(),
                Cmp::Ge => lower(false),
                Cmp::Gt => lower(true),
            }
        }
    }
}

/// Region restricted by a clock constraint.
pub fn intersect(region: &MixedSystem, c: &ClockConstraint) -> Result<MixedSystem, TimedError> {
    let n = region.dim();
    let mut out = region.clone();
    for atom in &c.0 {
        for &v in std::iter::once(&atom.clock).chain(atom.other.iter()) {
            if v >= n {
                return Err(TimedError::ClockOutOfRange { index: v, clocks: n });
            }
        }
        for r in atom_rows(atom, n) {
            out.push(r).expect("rows built with the region dimension");
        }
    }
    Ok(out)
}

/// Region with `clock` set to `value`.
pub fn reset(region: &MixedSystem, clock: usize, value: u32) -> Result<MixedSystem, TimedError> {
    let n = region.dim();
    if clock >= n {
        return Err(TimedError::ClockOutOfRange { index: clock, clocks: n });
    }
    let projected = eliminate(region, clock).expect("clock index checked").system;
    let mut rows: Vec<MixedInequality> = projected.rows().iter().map(|r| r.insert_var(clock)).collect();
    let k = i64::from(value);
    rows.push(row(n, &[(clock, 0)], None, &[], Germ::plain(k)));
    rows.push(row(n, &[], Some(k), &[(clock, Germ::plain(0))], Germ::NegInf));
    Ok(MixedSystem::from_rows(n, rows).expect("rows built with the region dimension"))
}

/// Every point reachable by letting time elapse: `{ t·x | x ∈ region, t ≥ 0 }`.
pub fn delay(region: &MixedSystem) -> MixedSystem {
    let n = region.dim();
    let mut rows: Vec<MixedInequality> = region.rows().iter().map(|r| embed_scaled(r, n + 1, 0, n)).collect();
    rows.push(row(n + 1, &[], Some(0), &[(n, Germ::plain(0))], Germ::NegInf));
    let lifted = MixedSystem::from_rows(n + 1, rows).expect("rows built with the lifted dimension");
    eliminate(&lifted, n).expect("scale variable exists").system
}

/// Whether every point of `v1` lies in `v2`.
pub fn is_included(v1: &MixedSystem, v2: &MixedSystem) -> Result<bool, TimedError> {
    if v1.dim() != v2.dim() {
        return Err(TimedError::DimensionMismatch { expected: v1.dim(), got: v2.dim() });
    }
    Ok(v2.rows().iter().all(|r| implies(v1, r).expect("dimensions checked")))
}

/// Tropical convex hull of the two regions, reduced with `mode`.
pub fn over_approx(v1: &MixedSystem, v2: &MixedSystem, mode: ReduceMode) -> Result<MixedSystem, TimedError> {
    if v1.dim() != v2.dim() {
        return Err(TimedError::DimensionMismatch { expected: v1.dim(), got: v2.dim() });
    }
    Ok(hull_union(v1, v2, mode).expect("dimensions checked"))
}

/// The region `x = 0`, including the clock nonnegativity rows.
pub fn initial_region(n: usize) -> MixedSystem {
    let mut rows = Vec::new();
    for i in 0..n {
        rows.push(row(n, &[(i, 0)], None, &[], Germ::plain(0)));
        rows.push(row(n, &[], Some(0), &[(i, Germ::plain(0))], Germ::NegInf));
    }
    MixedSystem::from_rows(n, rows).expect("rows built with the clock count")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicState {
    pub location: usize,
    pub region: MixedSystem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Reachable,
    Unreachable,
    /// The step bound was hit first.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Reachable => "REACHABLE",
            Verdict::Unreachable => "UNREACHABLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReachOptions {
    /// Merge states into a same-location passed state by convex hull.
    pub approx_union: bool,
    /// Bound on the number of states taken from the waiting list.
    pub max_steps: Option<usize>,
    /// Reduction applied after each reset and delay.
    pub reduce: ReduceMode,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions { approx_union: false, max_steps: None, reduce: ReduceMode::Weak }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachOutcome {
    pub verdict: Verdict,
    /// States taken from the waiting list, in order.
    pub visited: Vec<SymbolicState>,
    pub passed: Vec<SymbolicState>,
}

/// Successor region along `edge`, before the emptiness filter.
pub fn successor(ta: &TimedAutomaton, region: &MixedSystem, edge: &Edge, mode: ReduceMode) -> MixedSystem {
    let mut v = intersect(region, &edge.guard).expect("parsed automaton");
    for &(clock, value) in &edge.resets {
        v = reduce_system(&reset(&v, clock, value).expect("parsed automaton"), mode);
    }
    let v = reduce_system(&delay(&v), mode);
    intersect(&v, &ta.locations[edge.dst].invariant).expect("parsed automaton")
}

/// Symbolic forward exploration with a FIFO waiting list.
pub fn forward_reach(ta: &TimedAutomaton, opts: &ReachOptions) -> ReachOutcome {
    let start = reduce_system(&delay(&initial_region(ta.dim())), opts.reduce);
    let start = intersect(&start, &ta.locations[ta.initial].invariant).expect("parsed automaton");
    let mut waiting: VecDeque<SymbolicState> = VecDeque::from([SymbolicState { location: ta.initial, region: start }]);
    let mut passed: Vec<SymbolicState> = Vec::new();
    let mut visited = Vec::new();
    let outcome = |verdict, visited, passed| ReachOutcome { verdict, visited, passed };
    while let Some(state) = waiting.pop_front() {
        if opts.max_steps.is_some_and(|cap| visited.len() >= cap) {
            return outcome(Verdict::Inconclusive, visited, passed);
        }
        visited.push(state.clone());
        if state.location == ta.final_location {
            return outcome(Verdict::Reachable, visited, passed);
        }
        let same_place = |p: &SymbolicState| p.location == state.location;
        let covered = passed
            .iter()
            .filter(|p| same_place(p))
            .any(|p| is_included(&state.region, &p.region).expect("same clocks"));
        if covered {
            continue;
        }
        let merged_at = passed.iter().position(same_place).filter(|_| opts.approx_union);
        let current = match merged_at {
            Some(at) => {
                let hull = over_approx(&passed[at].region, &state.region, opts.reduce).expect("same clocks");
                passed[at].region = hull.clone();
                SymbolicState { location: state.location, region: hull }
            }
            None => {
                passed.push(state.clone());
                state
            }
        };
        for edge in ta.edges.iter().filter(|e| e.src == current.location) {
            let next = successor(ta, &current.region, edge, opts.reduce);
            if !is_empty(&next) {
                waiting.push_back(SymbolicState { location: edge.dst, region: next });
            }
        }
    }
    outcome(Verdict::Unreachable, visited, passed)
}
