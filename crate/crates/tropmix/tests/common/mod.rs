//! Random instances and brute-force oracles shared by the integration tests.
//!
//! The oracles work on integers: every coordinate and coefficient is scaled
//! by a common factor so that grid points and comparisons are exact without
//! going through the library's own arithmetic.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tropmix::germ::int;
use tropmix::mpg::{GameGraph, ParametricWeight};
use tropmix::{Germ, MaxPlus, MixedInequality, MixedSystem, Rat};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn coefficient(rng: &mut TestRng) -> Option<i64> {
    rng.gen_bool(0.5).then(|| rng.gen_range(-3..=3))
}

/// Random row with integer moduli in `[-3, 3]`, about half of them `-oo`.
/// `strict` allows `Under` entries; `pos_inf` puts `+oo` on one right-hand variable.
pub fn random_row(rng: &mut TestRng, n: usize, strict: bool, pos_inf: bool) -> MixedInequality {
    let mp = |c: Option<i64>| c.map_or(MaxPlus::NegInf, MaxPlus::int);
    let germ = |rng: &mut TestRng| match coefficient(rng) {
        None => Germ::NegInf,
        Some(v) if strict && rng.gen_bool(0.5) => Germ::under(v),
        Some(v) => Germ::plain(v),
    };
    let lhs: Vec<MaxPlus> = (0..n).map(|_| mp(coefficient(rng))).collect();
    let lhs_const = mp(coefficient(rng));
    let mut rhs: Vec<Germ> = (0..n).map(|_| germ(rng)).collect();
    let rhs_const = germ(rng);
    if pos_inf && n > 0 {
        let j = rng.gen_range(0..n);
        rhs[j] = Germ::PosInf;
    }
    MixedInequality::new(lhs, lhs_const, rhs, rhs_const)
}

pub fn random_system(rng: &mut TestRng, n: usize, rows: usize, strict: bool, pos_inf_rate: f64) -> MixedSystem {
    let rows = (0..rows).map(|_| {
        let pos_inf = rng.gen_bool(pos_inf_rate);
        random_row(rng, n, strict, pos_inf)
    });
    MixedSystem::from_rows(n, rows.collect()).unwrap()
}

/// Right-hand term after scaling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    Bottom,
    Fin { value: i64, strict: bool },
    Top,
}

/// Row with coefficients scaled by `scale`; the constant sits at index `n`.
#[derive(Clone, Debug)]
pub struct IntRow {
    lhs: Vec<Option<i64>>,
    rhs: Vec<Term>,
}

fn scaled_rat(v: Rat, scale: i64) -> i64 {
    let s = v * int(scale);
    assert!(s.is_integer(), "value {v} is not on the scaled grid");
    s.to_integer()
}

pub fn int_rows(sys: &MixedSystem, scale: i64) -> Vec<IntRow> {
    let mp = |m: MaxPlus| match m {
        MaxPlus::NegInf => None,
        MaxPlus::Fin(v) => Some(scaled_rat(v, scale)),
    };
    let term = |g: Germ| match g {
        Germ::NegInf => Term::Bottom,
        Germ::Plain(v) => Term::Fin { value: scaled_rat(v, scale), strict: false },
        Germ::Under(v) => Term::Fin { value: scaled_rat(v, scale), strict: true },
        Germ::PosInf => Term::Top,
    };
    sys.rows()
        .iter()
        .map(|r| IntRow {
            lhs: r.lhs().iter().copied().chain([r.lhs_const()]).map(mp).collect(),
            rhs: r.rhs().iter().copied().chain([r.rhs_const()]).map(term).collect(),
        })
        .collect()
}

/// Whether the scaled point (with an implicit constant coordinate 0) satisfies the row.
pub fn int_holds(row: &IntRow, point: &[Option<i64>]) -> bool {
    let coord = |j: usize| if j < point.len() { point[j] } else { Some(0) };
    let left = row.lhs.iter().enumerate().filter_map(|(j, &a)| Some(a? + coord(j)?)).max();
    let Some(left) = left else { return true };
    let mut best: Option<(i64, bool)> = None;
    for (j, &b) in row.rhs.iter().enumerate() {
        let Some(x) = coord(j) else { continue };
        match b {
            Term::Bottom => {}
            Term::Top => return true,
            Term::Fin { value, strict } => {
                let cand = (value + x, strict);
                // Larger modulus wins; at a tie the non-strict term wins.
                best = Some(match best {
                    Some(cur) if (cur.0, !cur.1) >= (cand.0, !cand.1) => cur,
                    _ => cand,
                });
            }
        }
    }
    match best {
        None => false,
        Some((v, true)) => left < v,
        Some((v, false)) => left <= v,
    }
}

pub fn int_satisfies(rows: &[IntRow], point: &[Option<i64>]) -> bool {
    rows.iter().all(|r| int_holds(r, point))
}

pub fn unscale(point: &[Option<i64>], scale: i64) -> Vec<MaxPlus> {
    point.iter().map(|c| c.map_or(MaxPlus::NegInf, |v| MaxPlus::Fin(Rat::new(v, scale)))).collect()
}

/// `{-oo} ∪ {-bound..=bound}`, ascending.
pub fn grid(bound: i64) -> Vec<Option<i64>> {
    std::iter::once(None).chain((-bound..=bound).map(Some)).collect()
}

/// Calls `f` on every point of `axis^n` until it returns `true`.
pub fn for_each_point(n: usize, axis: &[Option<i64>], mut f: impl FnMut(&[Option<i64>]) -> bool) -> bool {
    let mut idx = vec![0usize; n];
    let mut point: Vec<Option<i64>> = vec![axis[0]; n];
    loop {
        if f(&point) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            idx[k] += 1;
            if idx[k] < axis.len() {
                point[k] = axis[idx[k]];
                break;
            }
            idx[k] = 0;
            point[k] = axis[0];
            k += 1;
        }
    }
}

/// A point of `grid(bound)^n` satisfying `rows`, if any.
///
/// The first `n - 1` coordinates are enumerated. For the last one, each row
/// is constant on the open intervals between the values where a term in that
/// coordinate meets another term, so only grid values next to those
/// breakpoints and the two ends of the grid are tried.
pub fn grid_solution(rows: &[IntRow], n: usize, bound: i64) -> Option<Vec<Option<i64>>> {
    if n == 0 {
        return int_satisfies(rows, &[]).then(Vec::new);
    }
    let axis = grid(bound);
    let last = n - 1;
    let mut found = None;
    for_each_point(last, &axis, |prefix| {
        let coord = |j: usize| if j < last { prefix[j] } else { Some(0) };
        let mut cands: BTreeSet<Option<i64>> = [None, Some(-bound), Some(bound)].into();
        for row in rows {
            let fixed: Vec<i64> = (0..=n)
                .filter(|&j| j != last)
                .flat_map(|j| {
                    let l = row.lhs[j].zip(coord(j)).map(|(a, x)| a + x);
                    let r = match row.rhs[j] {
                        Term::Fin { value, .. } => coord(j).map(|x| value + x),
                        _ => None,
                    };
                    l.into_iter().chain(r)
                })
                .collect();
            let var_coeffs = row.lhs[last].into_iter().chain(match row.rhs[last] {
                Term::Fin { value, .. } => Some(value),
                _ => None,
            });
            for c in var_coeffs {
                for &v in &fixed {
                    let b = v - c;
                    for t in [b - 1, b, b + 1] {
                        if (-bound..=bound).contains(&t) {
                            cands.insert(Some(t));
                        }
                    }
                }
            }
        }
        let mut point = prefix.to_vec();
        point.push(None);
        for t in cands {
            point[last] = t;
            if int_satisfies(rows, &point) {
                found = Some(point.clone());
                return true;
            }
        }
        false
    });
    found
}

/// Random game graph with out-degrees in `1..=3`.
pub fn random_game(rng: &mut TestRng, max_nodes: usize) -> GameGraph {
    let cols = rng.gen_range(1..=max_nodes);
    let rows = rng.gen_range(1..=max_nodes);
    let targets = |rng: &mut TestRng, count: usize| {
        let mut all: Vec<usize> = (0..count).collect();
        all.shuffle(rng);
        let k = rng.gen_range(1..=3.min(count));
        all.truncate(k);
        all.sort_unstable();
        all
    };
    let col_arcs = (0..cols)
        .map(|_| targets(rng, rows).into_iter().map(|i| (i, int(rng.gen_range(-3..=3)))).collect())
        .collect();
    let row_arcs = (0..rows)
        .map(|_| {
            targets(rng, cols)
                .into_iter()
                .map(|j| (j, ParametricWeight { base: int(rng.gen_range(-3..=3)), eps_count: rng.gen_range(0..=1) }))
                .collect()
        })
        .collect();
    GameGraph::new(col_arcs, row_arcs).unwrap()
}

/// Largest mean of a simple cycle reachable from each node of a weighted digraph.
pub fn max_reachable_cycle_mean(succ: &[Vec<(usize, Rat)>]) -> Vec<Rat> {
    let n = succ.len();
    let mut best_through: Vec<Option<Rat>> = vec![None; n];
    // Simple cycles with smallest node `s`, by depth-first search.
    for s in 0..n {
        let mut stack: Vec<(usize, usize, Rat, usize)> = vec![(s, 0, int(0), 0)];
        let mut on_path = vec![false; n];
        let mut path = vec![s];
        on_path[s] = true;
        while let Some(&mut (v, ref mut next, w, len)) = stack.last_mut() {
            if *next >= succ[v].len() {
                stack.pop();
                on_path[v] = false;
                path.pop();
                continue;
            }
            let (u, a) = succ[v][*next];
            *next += 1;
            if u == s {
                let mean = (w + a) / int(len as i64 + 1);
                for &p in &path {
                    best_through[p] = Some(best_through[p].map_or(mean, |b| b.max(mean)));
                }
            } else if u > s && !on_path[u] {
                on_path[u] = true;
                path.push(u);
                stack.push((u, 0, w + a, len + 1));
            }
        }
    }
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            let mut todo = vec![start];
            seen[start] = true;
            let mut best: Option<Rat> = None;
            while let Some(v) = todo.pop() {
                if let Some(m) = best_through[v] {
                    best = Some(best.map_or(m, |b| b.max(m)));
                }
                for &(u, _) in &succ[v] {
                    if !seen[u] {
                        seen[u] = true;
                        todo.push(u);
                    }
                }
            }
            best.expect("every node has an outgoing arc")
        })
        .collect()
}

/// Game value by enumerating every positional Min strategy and solving the
/// remaining one-player game by cycle enumeration.
pub fn game_value_by_enumeration(g: &GameGraph, eps: Rat) -> Vec<Rat> {
    let cols = g.cols();
    let mut sigma = vec![0usize; cols];
    let mut best: Option<Vec<Rat>> = None;
    loop {
        let succ: Vec<Vec<(usize, Rat)>> = (0..cols)
            .map(|j| {
                let (i, w) = g.col_arcs(j)[sigma[j]];
                g.row_arcs(i).iter().map(|&(k, pw)| (k, w + pw.at(eps))).collect()
            })
            .collect();
        let value = max_reachable_cycle_mean(&succ);
        best = Some(match best {
            None => value,
            Some(b) => b.into_iter().zip(value).map(|(x, y)| x.min(y)).collect(),
        });
        let mut k = 0;
        loop {
            if k == cols {
                return best.unwrap();
            }
            sigma[k] += 1;
            if sigma[k] < g.col_arcs(k).len() {
                break;
            }
            sigma[k] = 0;
            k += 1;
        }
    }
}
