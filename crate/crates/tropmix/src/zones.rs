//! Zones over `ℝmax^n` and their conversions to and from mixed systems.
//!
//! A zone is a conjunction of `m_i ◁ x_i`, `x_i ◁ M_i` and `x_i ◁ k_ij + x_j`
//! with `◁ ∈ {≤, <}`. Comparisons follow `ℝmax`, so `−∞ < −∞` is false.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::germ::{Germ, MaxPlus};
use crate::mpg;
use crate::system::{MixedInequality, MixedSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound {
    pub value: MaxPlus,
    pub strict: bool,
}

impl Bound {
    pub fn weak(value: MaxPlus) -> Self {
        Bound { value, strict: false }
    }

    pub fn strict(value: MaxPlus) -> Self {
        Bound { value, strict: true }
    }

    /// Whether `x ◁ self`.
    fn admits_below(self, x: MaxPlus) -> bool {
        if self.strict {
            x < self.value
        } else {
            x <= self.value
        }
    }

    fn below_tighter(self, other: Bound) -> bool {
        self.value < other.value || (self.value == other.value && self.strict && !other.strict)
    }

    fn above_tighter(self, other: Bound) -> bool {
        self.value > other.value || (self.value == other.value && self.strict && !other.strict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZoneError {
    #[error("zone decomposition exceeds the cap of {cap} zones")]
    TooManyZones { cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Zone {
    lower: Vec<Bound>,
    upper: Vec<Option<Bound>>,
    diff: BTreeMap<(usize, usize), Bound>,
}

impl Zone {
    /// The whole space.
    pub fn universe(dim: usize) -> Self {
        Zone { lower: vec![Bound::weak(MaxPlus::NegInf); dim], upper: vec![None; dim], diff: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, i: usize) -> Bound {
        self.lower[i]
    }

    pub fn upper(&self, i: usize) -> Option<Bound> {
        self.upper[i]
    }

    /// Bound on `x_i − x_j`, if any.
    pub fn diff(&self, i: usize, j: usize) -> Option<Bound> {
        self.diff.get(&(i, j)).copied()
    }

    /// Adds `bound ◁ x_i`, keeping the tighter of the old and new bounds.
    pub fn add_lower(&mut self, i: usize, bound: Bound) -> &mut Self {
        if bound.above_tighter(self.lower[i]) {
            self.lower[i] = bound;
        }
        self
    }

    /// Adds `x_i ◁ bound`.
    pub fn add_upper(&mut self, i: usize, bound: Bound) -> &mut Self {
        if self.upper[i].map_or(true, |old| bound.below_tighter(old)) {
            self.upper[i] = Some(bound);
        }
        self
    }

    /// Adds `x_i ◁ bound + x_j` for `i ≠ j`.
    pub fn add_diff(&mut self, i: usize, j: usize, bound: Bound) -> &mut Self {
        assert_ne!(i, j, "difference bound needs two distinct variables");
        let slot = self.diff.entry((i, j)).or_insert(bound);
        if bound.below_tighter(*slot) {
            *slot = bound;
        }
        self
    }

    pub fn contains(&self, p: &[MaxPlus]) -> bool {
        let lower_ok = self.lower.iter().zip(p).all(|(b, &x)| if b.strict { b.value < x } else { b.value <= x });
        let upper_ok = self.upper.iter().zip(p).all(|(b, &x)| b.map_or(true, |b| b.admits_below(x)));
        let diff_ok = self.diff.iter().all(|(&(i, j), b)| Bound { value: b.value.times(p[j]), strict: b.strict }.admits_below(p[i]));
        lower_ok && upper_ok && diff_ok
    }

    /// Emptiness through the mixed-system encoding.
    pub fn is_empty(&self) -> bool {
        mpg::is_empty(&zone_to_mixed(self))
    }
}

fn var_row(n: usize, lhs: &[(usize, MaxPlus)], lhs_const: MaxPlus, rhs: &[(usize, Germ)], rhs_const: Germ) -> MixedInequality {
    let mut l = vec![MaxPlus::NegInf; n];
    let mut r = vec![Germ::NegInf; n];
    for &(i, a) in lhs {
        l[i] = a;
    }
    for &(j, b) in rhs {
        r[j] = b;
    }
    MixedInequality::new(l, lhs_const, r, rhs_const)
}

fn contradiction(n: usize) -> MixedInequality {
    var_row(n, &[], MaxPlus::one(), &[], Germ::NegInf)
}

/// Mixed encoding of a zone, with the same solution set.
pub fn zone_to_mixed(z: &Zone) -> MixedSystem {
    let n = z.dim();
    let zero = MaxPlus::one();
    let mut rows = Vec::new();
    for (i, b) in z.lower.iter().enumerate() {
        match (b.value, b.strict) {
            (MaxPlus::NegInf, false) => {}
            (MaxPlus::NegInf, true) => rows.push(var_row(n, &[], zero, &[(i, Germ::PosInf)], Germ::NegInf)),
            (MaxPlus::Fin(_), false) => rows.push(var_row(n, &[], b.value, &[(i, Germ::plain(0))], Germ::NegInf)),
            (MaxPlus::Fin(_), true) => rows.push(var_row(n, &[], b.value, &[(i, Germ::under(0))], Germ::NegInf)),
        }
    }
    for (i, b) in z.upper.iter().enumerate() {
        let Some(b) = b else { continue };
        match (b.value, b.strict) {
            (MaxPlus::NegInf, true) => rows.push(contradiction(n)),
            (v, false) => rows.push(var_row(n, &[(i, zero)], MaxPlus::NegInf, &[], Germ::from(v))),
            (MaxPlus::Fin(m), true) => rows.push(var_row(n, &[(i, zero)], MaxPlus::NegInf, &[], Germ::Under(m))),
        }
    }
    for (&(i, j), b) in &z.diff {
        match (b.value, b.strict) {
            (MaxPlus::NegInf, true) => rows.push(contradiction(n)),
            (v, false) => rows.push(var_row(n, &[(i, zero)], MaxPlus::NegInf, &[(j, Germ::from(v))], Germ::NegInf)),
            (MaxPlus::Fin(k), true) => {
                rows.push(var_row(n, &[(i, zero)], MaxPlus::NegInf, &[(j, Germ::Under(k))], Germ::NegInf));
                rows.push(var_row(n, &[], zero, &[(j, Germ::PosInf)], Germ::NegInf));
            }
        }
    }
    MixedSystem::from_rows(n, rows).expect("rows built with the zone dimension")
}

/// One way for a row to hold, as a conjunction of zone constraints; `None`
/// when the choice is contradictory.
type Alternative = Option<Vec<Atom>>;

#[derive(Clone, Copy, Debug)]
enum Atom {
    Lower(usize, Bound),
    Upper(usize, Bound),
    Diff(usize, usize, Bound),
}

fn apply(z: &Zone, atoms: &[Atom]) -> Zone {
    let mut z = z.clone();
    for atom in atoms {
        match *atom {
            Atom::Lower(i, b) => z.add_lower(i, b),
            Atom::Upper(i, b) => z.add_upper(i, b),
            Atom::Diff(i, j, b) => z.add_diff(i, j, b),
        };
    }
    z
}

/// Zone alternatives whose union is the solution set of `row`.
fn row_alternatives(row: &MixedInequality) -> Vec<Alternative> {
    let finite_lhs: Vec<(usize, crate::germ::Rat)> =
        row.lhs().iter().enumerate().filter_map(|(i, a)| a.finite().map(|v| (i, v))).collect();
    let lhs_const = row.lhs_const().finite();
    let all_bottom = |atoms: &mut Vec<Atom>| {
        for &(i, _) in &finite_lhs {
            atoms.push(Atom::Upper(i, Bound::weak(MaxPlus::NegInf)));
        }
    };
    let mut out = Vec::new();
    // Constant term as the maximizing one.
    match row.rhs_const() {
        Germ::NegInf => {}
        Germ::PosInf => return vec![Some(Vec::new())],
        b @ (Germ::Plain(v) | Germ::Under(v)) => {
            let strict = matches!(b, Germ::Under(_));
            if lhs_const.map_or(true, |a| Germ::Plain(a) <= b) {
                out.push(Some(
                    finite_lhs.iter().map(|&(i, a)| Atom::Upper(i, Bound { value: MaxPlus::Fin(v - a), strict })).collect(),
                ));
            } else {
                out.push(None);
            }
        }
    }
    for (j, &b) in row.rhs().iter().enumerate() {
        match b {
            Germ::NegInf => {}
            Germ::Plain(v) => {
                let mut atoms: Vec<Atom> =
                    finite_lhs.iter().map(|&(i, a)| Atom::Diff(i, j, Bound::weak(MaxPlus::Fin(v - a)))).collect();
                if let Some(a0) = lhs_const {
                    atoms.push(Atom::Lower(j, Bound::weak(MaxPlus::Fin(a0 - v))));
                }
                out.push(Some(atoms));
            }
            Germ::Under(_) | Germ::PosInf => {
                let mut finite = vec![Atom::Lower(j, Bound::strict(MaxPlus::NegInf))];
                if let Germ::Under(v) = b {
                    finite.extend(finite_lhs.iter().map(|&(i, a)| Atom::Diff(i, j, Bound::strict(MaxPlus::Fin(v - a)))));
                    if let Some(a0) = lhs_const {
                        finite.push(Atom::Lower(j, Bound::strict(MaxPlus::Fin(a0 - v))));
                    }
                }
                out.push(Some(finite));
                if lhs_const.is_none() {
                    let mut vanished = vec![Atom::Upper(j, Bound::weak(MaxPlus::NegInf))];
                    all_bottom(&mut vanished);
                    out.push(Some(vanished));
                }
            }
        }
    }
    if out.is_empty() {
        // Bottom right-hand side: every left-side variable must vanish.
        if lhs_const.is_some() {
            return vec![None];
        }
        let mut atoms = Vec::new();
        all_bottom(&mut atoms);
        out.push(Some(atoms));
    }
    out
}

/// Splits the solution set of `sys` into nonempty zones, choosing a
/// maximizing right-hand term per row. Fails once the working set of zones
/// exceeds `cap`.
pub fn mixed_to_zones(sys: &MixedSystem, cap: usize) -> Result<Vec<Zone>, ZoneError> {
    let mut zones = vec![Zone::universe(sys.dim())];
    for row in sys.rows().iter().filter(|r| !r.is_trivial()) {
        let alternatives = row_alternatives(row);
        let mut next: Vec<Zone> = Vec::new();
        for z in &zones {
            for atoms in alternatives.iter().flatten() {
                let candidate = apply(z, atoms);
                if !next.contains(&candidate) && !candidate.is_empty() {
                    next.push(candidate);
                    if next.len() > cap {
                        return Err(ZoneError::TooManyZones { cap });
                    }
                }
            }
        }
        zones = next;
    }
    zones.sort();
    Ok(zones)
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut atoms: Vec<String> = Vec::new();
        for (i, b) in self.lower.iter().enumerate() {
            if *b != Bound::weak(MaxPlus::NegInf) {
                let op = if b.strict { ">" } else { ">=" };
                atoms.push(format!("x{} {op} {}", i + 1, b.value));
            }
        }
        for (i, b) in self.upper.iter().enumerate() {
            if let Some(b) = b {
                let op = if b.strict { "<" } else { "<=" };
                atoms.push(format!("x{} {op} {}", i + 1, b.value));
            }
        }
        for (&(i, j), b) in &self.diff {
            let op = if b.strict { "<" } else { "<=" };
            atoms.push(format!("x{} {op} {} + x{}", i + 1, b.value, j + 1));
        }
        if atoms.is_empty() {
            write!(f, "true")
        } else {
            write!(f, "{}", atoms.join(", "))
        }
    }
}
