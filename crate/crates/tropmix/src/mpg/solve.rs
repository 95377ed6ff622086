//! Exact game values by value iteration.
//!
//! Iterates the dynamic programming operator on integer-scaled weights. At
//! checkpoints the greedy strategies of both players are evaluated exactly;
//! when the two one-player values agree they are the game value. Otherwise the
//! iteration runs to the pseudo-polynomial bound and the averages are rounded
//! to the nearest fraction whose denominator is at most the number of column
//! nodes.

use num_traits::Signed;

use super::{common_denominator, evaluate_max_strategy, evaluate_min_strategy, scaled, CycleTime, GameGraph};
use crate::germ::Rat;

struct Scaled {
    col: Vec<Vec<(usize, i128)>>,
    row: Vec<Vec<(usize, i128)>>,
    denom: i64,
}

fn scale(g: &GameGraph, eps: Rat) -> Scaled {
    let row_w = g.row_weights(eps);
    let denom = common_denominator(
        g.col_arcs.iter().flatten().map(|(_, w)| w).chain(row_w.iter().flatten().map(|(_, w)| w)),
    );
    let conv = |arcs: &Vec<(usize, Rat)>| arcs.iter().map(|&(t, w)| (t, i128::from(scaled(w, denom)))).collect();
    Scaled { col: g.col_arcs.iter().map(conv).collect(), row: row_w.iter().map(conv).collect(), denom }
}

/// Best reply of Max at every row node against the potentials `x`.
fn row_values(s: &Scaled, x: &[i128]) -> Vec<(i128, usize)> {
    s.row
        .iter()
        .map(|arcs| arcs.iter().map(|&(k, w)| (w + x[k], k)).max_by_key(|&(v, _)| v).expect("row node has an arc"))
        .collect()
}

/// One application of the operator, with the greedy choices of both players.
fn step(s: &Scaled, x: &[i128]) -> (Vec<i128>, Vec<usize>, Vec<usize>) {
    let rv = row_values(s, x);
    let mut next = Vec::with_capacity(x.len());
    let mut sigma = Vec::with_capacity(x.len());
    for arcs in &s.col {
        let (v, i) = arcs.iter().map(|&(i, w)| (w + rv[i].0, i)).min_by_key(|&(v, _)| v).expect("column node has an arc");
        next.push(v);
        sigma.push(i);
    }
    (next, sigma, rv.into_iter().map(|(_, k)| k).collect())
}

fn nearest_fraction(total: i128, steps: i128, max_den: i128) -> (i128, i128) {
    let mut best = (0i128, 1i128);
    let mut best_err: Option<(i128, i128)> = None;
    for q in 1..=max_den {
        // p = round(total·q / steps)
        let num = total * q;
        let p = (2 * num + steps).div_euclid(2 * steps);
        let err = ((p * steps - num).abs(), q * steps);
        let better = match best_err {
            None => true,
            Some((en, ed)) => err.0 * ed < en * err.1,
        };
        if better {
            best = (p, q);
            best_err = Some(err);
        }
    }
    best
}

/// Exact value of the game from every column node at perturbation `eps ≥ 0`.
pub fn solve_game(g: &GameGraph, eps: Rat) -> CycleTime {
    assert!(!eps.is_negative(), "eps must be nonnegative");
    let s = scale(g, eps);
    let cols = g.cols() as i128;
    let max_abs = |arcs: &Vec<Vec<(usize, i128)>>| arcs.iter().flatten().map(|&(_, w)| w.abs()).max().unwrap_or(0);
    let width = max_abs(&s.col) + max_abs(&s.row);
    // After k steps every average is within 2·cols·width/k of the value, and
    // distinct candidate values are at least 1/cols² apart.
    let horizon = 4 * cols * cols * cols * width + 1;
    let mut x = vec![0i128; g.cols()];
    let mut checkpoint = cols;
    let mut k: i128 = 0;
    loop {
        let (next, sigma, tau) = step(&s, &x);
        x = next;
        k += 1;
        if k == checkpoint {
            let upper = evaluate_min_strategy(g, &sigma, eps).expect("greedy choices follow arcs");
            let lower = evaluate_max_strategy(g, &tau, eps).expect("greedy choices follow arcs");
            if upper == lower {
                return upper;
            }
            checkpoint *= 2;
        }
        if k >= horizon {
            let denom = i128::from(s.denom);
            return x
                .iter()
                .map(|&total| {
                    let (p, q) = nearest_fraction(total, k, cols);
                    Rat::new(p as i64, (q * denom) as i64)
                })
                .collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::int;
    use crate::mpg::ParametricWeight;

    #[test]
    fn rounding_picks_small_denominators() {
        assert_eq!(nearest_fraction(1001, 2000, 3), (1, 2));
        assert_eq!(nearest_fraction(-667, 1000, 3), (-2, 3));
        assert_eq!(nearest_fraction(0, 7, 4), (0, 1));
    }

    #[test]
    fn single_choice_matches_evaluation() {
        let w = ParametricWeight::plain;
        let g = GameGraph::new(
            vec![vec![(0, int(1))], vec![(1, int(-2))]],
            vec![vec![(1, w(int(0)))], vec![(0, w(int(2))), (1, ParametricWeight { base: int(1), eps_count: 1 })]],
        )
        .unwrap();
        for eps in [int(0), Rat::new(1, 4)] {
            assert_eq!(solve_game(&g, eps), evaluate_min_strategy(&g, &[0, 1], eps).unwrap());
        }
    }

    #[test]
    fn min_picks_cheaper_cycle() {
        let w = ParametricWeight::plain;
        // Column 0 chooses between a loop of mean 2 (row 0) and a detour to a loop of mean −1.
        let g = GameGraph::new(
            vec![vec![(0, int(0)), (1, int(0))], vec![(2, int(0))]],
            vec![vec![(0, w(int(2)))], vec![(1, w(int(0)))], vec![(1, w(int(-1)))]],
        )
        .unwrap();
        assert_eq!(solve_game(&g, int(0)), vec![int(-1), int(-1)]);
    }
}
