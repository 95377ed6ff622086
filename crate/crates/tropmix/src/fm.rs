//! Fourier-Motzkin elimination for mixed systems, witness lifting, and the
//! tropical convex hull of a union.

use thiserror::Error;

use crate::germ::{int, Germ, MaxPlus};
use crate::reduce::{reduce_system, ReduceMode};
use crate::system::{MixedInequality, MixedSystem, SystemError};

/// Which input rows produced an output row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowOrigin {
    /// Row without the variable on its right side, with the left term dropped.
    Kept(usize),
    /// `rhs_row` has the variable on its right side, `lhs_row` on its left side.
    Combined { rhs_row: usize, lhs_row: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationResult {
    pub system: MixedSystem,
    /// Parallel to `system.rows()`.
    pub origins: Vec<RowOrigin>,
    /// `var_map[j]` is the input index of output variable `j`.
    pub var_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("point does not satisfy the projected system")]
    NotAProjection,
}

fn check_var(sys: &MixedSystem, var: usize) -> Result<(), SystemError> {
    if var >= sys.dim() {
        return Err(SystemError::IndexOutOfRange { index: var, dim: sys.dim() });
    }
    Ok(())
}

/// The row obtained by substituting the upper bound on `var` given by
/// `lhs_row` into the right side of `rhs_row`, with `var` removed.
pub fn combine_rows(sys: &MixedSystem, var: usize, rhs_row: usize, lhs_row: usize) -> MixedInequality {
    let ri = &sys.rows()[rhs_row];
    let rk = &sys.rows()[lhs_row];
    let inv = rk.lhs()[var].inverse().expect("lhs_row must bound var from above");
    let factor = ri.rhs()[var] * inv;
    let rhs: Vec<Germ> = (0..sys.dim())
        .filter(|&j| j != var)
        .map(|j| ri.rhs()[j] + factor * rk.rhs()[j])
        .collect();
    let lhs: Vec<MaxPlus> = (0..sys.dim()).filter(|&j| j != var).map(|j| ri.lhs()[j]).collect();
    MixedInequality::new(lhs, ri.lhs_const(), rhs, ri.rhs_const() + factor * rk.rhs_const())
}

/// Projects out variable `var`. Output rows are sorted canonically.
pub fn eliminate(sys: &MixedSystem, var: usize) -> Result<EliminationResult, SystemError> {
    check_var(sys, var)?;
    let rows = sys.rows();
    let mut out: Vec<(MixedInequality, RowOrigin)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.rhs()[var].is_bottom() {
            let mut lhs = row.lhs().to_vec();
            lhs[var] = MaxPlus::NegInf;
            let kept = MixedInequality::new(lhs, row.lhs_const(), row.rhs().to_vec(), row.rhs_const());
            out.push((kept.remove_var(var), RowOrigin::Kept(i)));
        }
    }
    for (i, ri) in rows.iter().enumerate() {
        if ri.rhs()[var].is_bottom() {
            continue;
        }
        for (k, rk) in rows.iter().enumerate() {
            if rk.lhs()[var].is_bottom() {
                continue;
            }
            let row = combine_rows(sys, var, i, k);
            out.push((row, RowOrigin::Combined { rhs_row: i, lhs_row: k }));
        }
    }
    out.sort();
    let (rows, origins): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    let system = MixedSystem::from_rows(sys.dim() - 1, rows).expect("rows have dimension n-1");
    let var_map = (0..sys.dim()).filter(|&j| j != var).collect();
    Ok(EliminationResult { system, origins, var_map })
}

/// Given `p` satisfying the projection of `sys` along `var`, returns a value
/// for `var` that extends `p` to a solution of `sys`.
pub fn lift(sys: &MixedSystem, var: usize, p: &[MaxPlus]) -> Result<MaxPlus, LiftError> {
    check_var(sys, var)?;
    if p.len() + 1 != sys.dim() {
        return Err(SystemError::DimensionMismatch { expected: sys.dim() - 1, got: p.len() }.into());
    }
    let mut full: Vec<MaxPlus> = p.to_vec();
    full.insert(var, MaxPlus::NegInf);
    let rows = sys.rows();

    // Rows with a finite or `Under` coefficient on var on the right, with the
    // left value and the right value when var is absent.
    let bounded: Vec<(Germ, MaxPlus, Germ)> = rows
        .iter()
        .filter(|r| matches!(r.rhs()[var], Germ::Plain(_) | Germ::Under(_)))
        .map(|r| (r.rhs()[var], r.left_value(&full), r.right_value(&full)))
        .collect();

    let upper: Vec<Germ> = rows
        .iter()
        .filter_map(|r| {
            let inv = r.lhs()[var].inverse()?;
            Some(r.right_value(&full) * inv)
        })
        .collect();

    let value = match upper.iter().copied().min() {
        None => no_upper_bound(sys, var, &full),
        Some(Germ::NegInf) => MaxPlus::NegInf,
        Some(Germ::Plain(v)) => MaxPlus::Fin(v),
        Some(Germ::Under(m)) => {
            let lambda = Germ::Under(m);
            let kappa = bounded
                .iter()
                .filter(|(b, _, rest)| *b * lambda > *rest)
                .filter_map(|(b, nu, _)| {
                    let target = (*b * lambda).finite_modulus()?;
                    Some((nu.finite()? - target) / int(2))
                })
                .max()
                .unwrap_or(int(-1));
            MaxPlus::Fin(kappa + m)
        }
        Some(Germ::PosInf) => {
            let delta = bounded
                .iter()
                .filter_map(|(b, nu, _)| Some(nu.finite()? - b.finite_modulus()?))
                .max()
                .unwrap_or(int(0));
            MaxPlus::Fin(delta + int(1))
        }
    };
    full[var] = value;
    if sys.satisfies(&full)? {
        Ok(value)
    } else {
        Err(LiftError::NotAProjection)
    }
}

// No row bounds var from above: take the join of per-row lower demands, each
// realized with one unit of slack when the row's coefficient is strict.
fn no_upper_bound(sys: &MixedSystem, var: usize, full: &[MaxPlus]) -> MaxPlus {
    sys.rows()
        .iter()
        .filter_map(|r| {
            let nu = r.left_value(full).finite()?;
            match r.rhs()[var] {
                Germ::NegInf => None,
                Germ::PosInf => Some(MaxPlus::one()),
                Germ::Plain(b) => Some(MaxPlus::Fin(nu - b)),
                Germ::Under(b) => Some(MaxPlus::Fin(nu - b + int(1))),
            }
        })
        .fold(MaxPlus::NegInf, MaxPlus::join)
}

/// Eliminates `vars` (input indices, distinct) one by one, reducing after each step.
pub fn eliminate_many(sys: &MixedSystem, vars: &[usize], mode: ReduceMode) -> Result<MixedSystem, SystemError> {
    for (idx, &v) in vars.iter().enumerate() {
        check_var(sys, v)?;
        if vars[..idx].contains(&v) {
            return Err(SystemError::DuplicateVariable(v));
        }
    }
    let mut current = sys.clone();
    let mut remaining: Vec<usize> = (0..sys.dim()).collect();
    for &v in vars {
        let pos = remaining.iter().position(|&r| r == v).expect("checked above");
        current = eliminate(&current, pos)?.system;
        remaining.remove(pos);
        current = reduce_system(&current, mode);
    }
    Ok(current)
}

/// Embeds `row` (over n variables) into a system over `dim` variables, placing
/// variable j at `offset + j` and the constant column at variable `scale`.
pub(crate) fn embed_scaled(row: &MixedInequality, dim: usize, offset: usize, scale: usize) -> MixedInequality {
    let n = row.dim();
    let mut lhs = vec![MaxPlus::NegInf; dim];
    let mut rhs = vec![Germ::NegInf; dim];
    lhs[offset..offset + n].copy_from_slice(row.lhs());
    rhs[offset..offset + n].copy_from_slice(row.rhs());
    lhs[scale] = row.lhs_const();
    rhs[scale] = row.rhs_const();
    MixedInequality::new(lhs, MaxPlus::NegInf, rhs, Germ::NegInf)
}

fn unit_row(dim: usize, lhs_vars: &[usize], lhs_const: MaxPlus, rhs_vars: &[(usize, Germ)], rhs_const: Germ) -> MixedInequality {
    let mut lhs = vec![MaxPlus::NegInf; dim];
    let mut rhs = vec![Germ::NegInf; dim];
    for &j in lhs_vars {
        lhs[j] = MaxPlus::one();
    }
    for &(j, g) in rhs_vars {
        rhs[j] = rhs[j] + g;
    }
    MixedInequality::new(lhs, lhs_const, rhs, rhs_const)
}

/// System over `(x, y, y', λ, μ)` whose projection on `x` is the tropical
/// convex hull of the union of the two inputs.
pub fn hull_lifted_system(left: &MixedSystem, right: &MixedSystem) -> Result<MixedSystem, SystemError> {
    let n = left.dim();
    if right.dim() != n {
        return Err(SystemError::DimensionMismatch { expected: n, got: right.dim() });
    }
    let dim = 3 * n + 2;
    let (y, yp, lam, mu) = (n, 2 * n, 3 * n, 3 * n + 1);
    let one = Germ::one();
    let mut rows = Vec::new();
    for i in 0..n {
        rows.push(unit_row(dim, &[i], MaxPlus::NegInf, &[(y + i, one), (yp + i, one)], Germ::NegInf));
        rows.push(unit_row(dim, &[y + i, yp + i], MaxPlus::NegInf, &[(i, one)], Germ::NegInf));
    }
    rows.push(unit_row(dim, &[lam, mu], MaxPlus::NegInf, &[], one));
    rows.push(unit_row(dim, &[], MaxPlus::one(), &[(lam, one), (mu, one)], Germ::NegInf));
    rows.extend(left.rows().iter().map(|r| embed_scaled(r, dim, y, lam)));
    rows.extend(right.rows().iter().map(|r| embed_scaled(r, dim, yp, mu)));
    let ys: Vec<usize> = (y..y + n).collect();
    let yps: Vec<usize> = (yp..yp + n).collect();
    rows.push(unit_row(dim, &ys, MaxPlus::NegInf, &[(lam, Germ::PosInf)], Germ::NegInf));
    rows.push(unit_row(dim, &yps, MaxPlus::NegInf, &[(mu, Germ::PosInf)], Germ::NegInf));
    MixedSystem::from_rows(dim, rows)
}

/// Tropical convex hull of the union of two mixed polyhedra of equal dimension.
pub fn hull_union(left: &MixedSystem, right: &MixedSystem, mode: ReduceMode) -> Result<MixedSystem, SystemError> {
    let n = left.dim();
    let lifted = hull_lifted_system(left, right)?;
    let vars: Vec<usize> = (n..3 * n + 2).collect();
    eliminate_many(&lifted, &vars, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    pub(crate) fn running() -> MixedSystem {
        parse_system(
            "dim 2\n\
             -2*x2 <= 0~ + 0~*x1\n\
             -3 <= x1\n\
             0 <= 1*x1 + 0~*x2\n\
             -2 <= x2\n\
             x1 <= 3~*x2\n\
             -2*x1 <= 0~ + -1*x2\n",
        )
        .unwrap()
    }

    #[test]
    fn running_example_projection_has_nine_rows() {
        let res = eliminate(&running(), 0).unwrap();
        assert_eq!(res.system.len(), 9);
        assert_eq!(res.var_map, vec![1]);
        let kept = res.origins.iter().filter(|o| matches!(o, RowOrigin::Kept(_))).count();
        assert_eq!(kept, 3);
    }

    #[test]
    fn provenance_replays() {
        let sys = running();
        let res = eliminate(&sys, 0).unwrap();
        for (row, origin) in res.system.rows().iter().zip(&res.origins) {
            if let RowOrigin::Combined { rhs_row, lhs_row } = *origin {
                assert_eq!(&combine_rows(&sys, 0, rhs_row, lhs_row), row);
            }
        }
    }

    #[test]
    fn absent_variable_keeps_rows() {
        let sys = parse_system("dim 2\nx1 <= 3\n1 <= x1\n").unwrap();
        let res = eliminate(&sys, 1).unwrap();
        let mut expected: Vec<_> = sys.rows().iter().map(|r| r.remove_var(1)).collect();
        expected.sort();
        assert_eq!(res.system.rows(), expected.as_slice());
    }

    #[test]
    fn equality_pair_projects_to_trivial_constant_row() {
        let sys = parse_system("dim 1\nx1 <= 0\n0 <= x1\n").unwrap();
        let res = eliminate(&sys, 0).unwrap();
        assert_eq!(res.system.dim(), 0);
        assert!(res.system.rows().iter().any(|r| r.to_string() == "-oo <= 0"));
        assert!(res.system.satisfies(&[]).unwrap());
    }

    #[test]
    fn lift_examples() {
        let sys = running();
        let l = lift(&sys, 0, &[MaxPlus::int(1)]).unwrap();
        assert!(sys.satisfies(&[l, MaxPlus::int(1)]).unwrap());

        let sys = parse_system("dim 1\n0 <= +oo*x1\n").unwrap();
        let l = lift(&sys, 0, &[]).unwrap();
        assert!(l.finite().is_some());

        let sys = parse_system("dim 1\nx1 <= 0\n").unwrap();
        assert!(sys.satisfies(&[lift(&sys, 0, &[]).unwrap()]).unwrap());

        let sys = parse_system("dim 2\nx1 <= 0\n0 <= x2\n").unwrap();
        assert_eq!(lift(&sys, 1, &[MaxPlus::int(5)]), Err(LiftError::NotAProjection));
    }

    #[test]
    fn lift_realizes_under_bound() {
        // x1 < x2 and x1 >= x2 - 1: the germ bound on x1 is `x2~`.
        let sys = parse_system("dim 2\nx1 <= 0~*x2\n-1*x2 <= x1\n").unwrap();
        let l = lift(&sys, 0, &[MaxPlus::int(3)]).unwrap();
        assert!(sys.satisfies(&[l, MaxPlus::int(3)]).unwrap());
        assert!(l < MaxPlus::int(3) && l >= MaxPlus::int(2));
    }

    #[test]
    fn eliminate_many_without_vars_is_identity() {
        let sys = running();
        assert_eq!(eliminate_many(&sys, &[], ReduceMode::None).unwrap(), sys);
        assert!(eliminate_many(&sys, &[0, 0], ReduceMode::None).is_err());
        assert!(eliminate(&sys, 2).is_err());
    }

    #[test]
    fn hull_of_two_points() {
        let p = parse_system("dim 2\nx1 <= 0\n0 <= x1\nx2 <= 0\n0 <= x2\n").unwrap();
        let q = parse_system("dim 2\nx1 <= 2\n2 <= x1\nx2 <= 2\n2 <= x2\n").unwrap();
        let h = hull_union(&p, &q, ReduceMode::Weak).unwrap();
        let pt = |a: i64, b: i64| [MaxPlus::int(a), MaxPlus::int(b)];
        assert!(h.satisfies(&pt(1, 1)).unwrap());
        assert!(h.satisfies(&pt(2, 2)).unwrap());
        assert!(h.satisfies(&pt(0, 0)).unwrap());
        assert!(!h.satisfies(&pt(1, 0)).unwrap());
        assert!(!h.satisfies(&pt(3, 3)).unwrap());
    }
}
