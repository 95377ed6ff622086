//! Mixed inequalities `a·x ⊕ a0 ≤ b·x ⊕ b0` and systems of them.
//!
//! Left coefficients are max-plus scalars, right coefficients are germs.
//! Rows are normalized on construction so that, at every position, at most
//! one side carries a non-bottom coefficient. Variables are 0-based in the
//! API and printed as `x1 .. xn`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::germ::{Germ, MaxPlus};

/// A point of `ℝmax^n`.
pub type Point = Vec<MaxPlus>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixedInequality {
    lhs: Vec<MaxPlus>,
    lhs_const: MaxPlus,
    rhs: Vec<Germ>,
    rhs_const: Germ,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("variable index {0} listed twice")]
    DuplicateVariable(usize),
}

impl MixedInequality {
    /// Builds a normalized row. Panics if the two sides have different lengths.
    pub fn new(lhs: Vec<MaxPlus>, lhs_const: MaxPlus, rhs: Vec<Germ>, rhs_const: Germ) -> Self {
        assert_eq!(lhs.len(), rhs.len(), "row sides must have equal length");
        let mut row = MixedInequality { lhs, lhs_const, rhs, rhs_const };
        for j in 0..row.lhs.len() {
            let (a, b) = normalize_pair(row.lhs[j], row.rhs[j]);
            row.lhs[j] = a;
            row.rhs[j] = b;
        }
        let (a, b) = normalize_pair(row.lhs_const, row.rhs_const);
        row.lhs_const = a;
        row.rhs_const = b;
        row
    }

    /// The row `−∞ ≤ −∞` over `dim` variables, used as a starting point for builders.
    pub fn bottom(dim: usize) -> Self {
        MixedInequality {
            lhs: vec![MaxPlus::NegInf; dim],
            lhs_const: MaxPlus::NegInf,
            rhs: vec![Germ::NegInf; dim],
            rhs_const: Germ::NegInf,
        }
    }

    pub fn dim(&self) -> usize {
        self.lhs.len()
    }

    pub fn lhs(&self) -> &[MaxPlus] {
        &self.lhs
    }

    pub fn lhs_const(&self) -> MaxPlus {
        self.lhs_const
    }

    pub fn rhs(&self) -> &[Germ] {
        &self.rhs
    }

    pub fn rhs_const(&self) -> Germ {
        self.rhs_const
    }

    /// Left value `a0 ⊕ ⨁ a_j p_j`.
    pub fn left_value(&self, p: &[MaxPlus]) -> MaxPlus {
        self.lhs
            .iter()
            .zip(p)
            .fold(self.lhs_const, |acc, (&a, &x)| acc.join(a.times(x)))
    }

    /// Right value `b0 ⊕ ⨁ b_j p_j`, computed in the germ semiring.
    pub fn right_value(&self, p: &[MaxPlus]) -> Germ {
        self.rhs
            .iter()
            .zip(p)
            .fold(self.rhs_const, |acc, (&b, &x)| acc + b * x)
    }

    /// Panics on a dimension mismatch; see [`MixedSystem::satisfies`] for the checked form.
    pub fn satisfied_by(&self, p: &[MaxPlus]) -> bool {
        assert_eq!(p.len(), self.dim());
        Germ::from(self.left_value(p)) <= self.right_value(p)
    }

    /// True when every point satisfies the row for purely syntactic reasons.
    pub fn is_trivial(&self) -> bool {
        self.rhs_const == Germ::PosInf
            || (self.lhs_const.is_bottom() && self.lhs.iter().all(|a| a.is_bottom()))
    }

    /// True when the right-hand side has no `Under` and no `+oo` coefficient.
    pub fn is_closed(&self) -> bool {
        self.rhs
            .iter()
            .chain(std::iter::once(&self.rhs_const))
            .all(|b| matches!(b, Germ::NegInf | Germ::Plain(_)))
    }

    pub fn has_pos_inf(&self) -> bool {
        self.rhs_const == Germ::PosInf || self.rhs.contains(&Germ::PosInf)
    }

    /// Inserts a fresh variable with bottom coefficients at position `at`.
    pub fn insert_var(&self, at: usize) -> Self {
        let mut row = self.clone();
        row.lhs.insert(at, MaxPlus::NegInf);
        row.rhs.insert(at, Germ::NegInf);
        row
    }

    /// Removes variable `at`, which must have bottom coefficients on both sides
    /// for the result to mean the same thing.
    pub fn remove_var(&self, at: usize) -> Self {
        let mut row = self.clone();
        row.lhs.remove(at);
        row.rhs.remove(at);
        row
    }

    /// Writes the row in the system text format.
    pub fn display(&self) -> impl fmt::Display + '_ {
        RowDisplay(self)
    }
}

/// Keeps the dominant side at one position (a left entry is dropped when it is
/// below the right entry in the germ order).
fn normalize_pair(a: MaxPlus, b: Germ) -> (MaxPlus, Germ) {
    if a.is_bottom() || b.is_bottom() {
        (a, b)
    } else if Germ::from(a) <= b {
        (MaxPlus::NegInf, b)
    } else {
        (a, Germ::NegInf)
    }
}

/// Normalizes a row given by its raw coefficients.
pub fn normalize(ineq: &MixedInequality) -> MixedInequality {
    MixedInequality::new(
        ineq.lhs.clone(),
        ineq.lhs_const,
        ineq.rhs.clone(),
        ineq.rhs_const,
    )
}

/// Indices of the finite coordinates of `p`.
pub fn support_pattern(p: &[MaxPlus]) -> BTreeSet<usize> {
    p.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_bottom())
        .map(|(j, _)| j)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedSystem {
    dim: usize,
    rows: Vec<MixedInequality>,
}

impl MixedSystem {
    pub fn new(dim: usize) -> Self {
        MixedSystem { dim, rows: Vec::new() }
    }

    pub fn from_rows(dim: usize, rows: Vec<MixedInequality>) -> Result<Self, SystemError> {
        let mut sys = MixedSystem::new(dim);
        for row in rows {
            sys.push(row)?;
        }
        Ok(sys)
    }

    pub fn push(&mut self, row: MixedInequality) -> Result<(), SystemError> {
        if row.dim() != self.dim {
            return Err(SystemError::DimensionMismatch { expected: self.dim, got: row.dim() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[MixedInequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty_syntax(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn into_rows(self) -> Vec<MixedInequality> {
        self.rows
    }

    pub fn satisfies(&self, p: &[MaxPlus]) -> Result<bool, SystemError> {
        if p.len() != self.dim {
            return Err(SystemError::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        Ok(self.rows.iter().all(|r| r.satisfied_by(p)))
    }

    /// Concatenation of the rows of two systems of equal dimension.
    pub fn intersect(&self, other: &MixedSystem) -> Result<MixedSystem, SystemError> {
        if other.dim != self.dim {
            return Err(SystemError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(MixedSystem { dim: self.dim, rows })
    }

    pub fn has_pos_inf(&self) -> bool {
        self.rows.iter().any(MixedInequality::has_pos_inf)
    }
}

/// Tropical scaling `λ·x ⊕ μ·y` of two points.
pub fn combine(lambda: MaxPlus, x: &[MaxPlus], mu: MaxPlus, y: &[MaxPlus]) -> Point {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| lambda.times(a).join(mu.times(b)))
        .collect()
}

pub fn satisfies(sys: &MixedSystem, p: &[MaxPlus]) -> Result<bool, SystemError> {
    sys.satisfies(p)
}

struct RowDisplay<'a>(&'a MixedInequality);

fn write_side<T: Copy + fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    constant: T,
    coeffs: &[T],
    is_bottom: impl Fn(T) -> bool,
    is_one: impl Fn(T) -> bool,
) -> fmt::Result {
    let mut first = true;
    let mut sep = |f: &mut fmt::Formatter<'_>| {
        let s = if first { "" } else { " + " };
        first = false;
        f.write_str(s)
    };
    if !is_bottom(constant) {
        sep(f)?;
        write!(f, "{constant}")?;
    }
    for (j, &c) in coeffs.iter().enumerate() {
        if is_bottom(c) {
            continue;
        }
        sep(f)?;
        if is_one(c) {
            write!(f, "x{}", j + 1)?;
        } else {
            write!(f, "{c}*x{}", j + 1)?;
        }
    }
    if first {
        f.write_str("-oo")?;
    }
    Ok(())
}

impl fmt::Display for RowDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = self.0;
        write_side(f, row.lhs_const, &row.lhs, MaxPlus::is_bottom, |c| c == MaxPlus::one())?;
        f.write_str(" <= ")?;
        write_side(f, row.rhs_const, &row.rhs, Germ::is_bottom, |c| c == Germ::one())
    }
}

impl fmt::Display for MixedInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        RowDisplay(self).fmt(f)
    }
}

impl fmt::Display for MixedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

pub fn print_system(sys: &MixedSystem) -> String {
    sys.to_string()
}

pub use crate::parse::{parse_inequality, parse_system, ParseError};
