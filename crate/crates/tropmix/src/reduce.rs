//! Redundancy elimination.
//!
//! The weak test asks whether a row is a tropical linear combination of the
//! others, using residuation to get the greatest candidate multipliers. It is
//! sound but incomplete; the exact test decides implication with a game.

use thiserror::Error;

use crate::germ::{Germ, MaxPlus};
use crate::mpg::implies;
use crate::system::{MixedInequality, MixedSystem};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ReduceMode {
    #[default]
    None,
    Weak,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("row {0} is identically bottom")]
    BottomRow(usize),
    #[error("row length {got} differs from {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// A row `e·x ⊕ g ≤ f·x ⊕ h` flattened to `(e, g, f, h)`, not normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowVector(pub Vec<Germ>);

impl RowVector {
    pub fn from_parts(e: &[MaxPlus], g: MaxPlus, f: &[Germ], h: Germ) -> Self {
        let left = e.iter().copied().chain([g]).map(Germ::from);
        RowVector(left.chain(f.iter().copied()).chain([h]).collect())
    }

    pub fn from_row(row: &MixedInequality) -> Self {
        Self::from_parts(row.lhs(), row.lhs_const(), row.rhs(), row.rhs_const())
    }

    fn is_bottom(&self) -> bool {
        self.0.iter().all(|g| g.is_bottom())
    }
}

/// Greatest `w` with `w·R ≤ v`, entrywise `min_j v_j / R_ij`.
pub fn greatest_multipliers(r: &[RowVector], v: &RowVector) -> Result<Vec<Germ>, ReduceError> {
    r.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.0.len() != v.0.len() {
                return Err(ReduceError::LengthMismatch { expected: v.0.len(), got: row.0.len() });
            }
            if row.is_bottom() {
                return Err(ReduceError::BottomRow(i));
            }
            Ok(row.0.iter().zip(&v.0).map(|(&rij, &vj)| vj.residual(rij)).min().unwrap_or(Germ::PosInf))
        })
        .collect()
}

/// Whether `v` is a tropical linear combination of the rows of `r`.
pub fn weak_redundant(r: &[RowVector], v: &RowVector) -> Result<bool, ReduceError> {
    let w = greatest_multipliers(r, v)?;
    let combined = (0..v.0.len()).map(|j| r.iter().zip(&w).fold(Germ::NegInf, |acc, (row, &wi)| acc + wi * row.0[j]));
    Ok(combined.eq(v.0.iter().copied()))
}

/// Drops trivially true rows, then removes, in input order, each row implied
/// by the rows still present.
pub fn reduce_system(sys: &MixedSystem, mode: ReduceMode) -> MixedSystem {
    if mode == ReduceMode::None {
        return sys.clone();
    }
    let mut rows: Vec<MixedInequality> = sys.rows().iter().filter(|r| !r.is_trivial()).cloned().collect();
    let mut t = 0;
    while t < rows.len() {
        let others: Vec<MixedInequality> = rows.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, r)| r.clone()).collect();
        let vectors: Vec<RowVector> = others.iter().map(RowVector::from_row).collect();
        let weak = weak_redundant(&vectors, &RowVector::from_row(&rows[t])).expect("trivial rows were dropped");
        let redundant = weak
            || (mode == ReduceMode::Exact && {
                let rest = MixedSystem::from_rows(sys.dim(), others).expect("same dimension");
                implies(&rest, &rows[t]).expect("same dimension")
            });
        if redundant {
            rows.remove(t);
        } else {
            t += 1;
        }
    }
    MixedSystem::from_rows(sys.dim(), rows).expect("same dimension")
}
