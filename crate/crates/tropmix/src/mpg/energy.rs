//! Integer energy games solved by progress-measure lifting.
//!
//! Max wins the energy game from a node iff the mean payoff from that node is
//! nonnegative, so shifting weights by a threshold decides `χ_j ≥ t`.

use std::collections::VecDeque;

/// Two-player game on integer-weighted arcs; every node needs a successor.
#[derive(Clone, Debug)]
pub(crate) struct IntGame {
    pub succ: Vec<Vec<(usize, i64)>>,
    /// True for nodes where Max moves.
    pub max_node: Vec<bool>,
}

/// Minimal credit per node, `None` where Min wins.
pub(crate) fn progress_measure(game: &IntGame) -> Vec<Option<i64>> {
    let n = game.succ.len();
    let bound: i64 = game
        .succ
        .iter()
        .map(|arcs| arcs.iter().map(|&(_, w)| (-w).max(0)).max().unwrap_or(0))
        .sum();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, arcs) in game.succ.iter().enumerate() {
        for &(u, _) in arcs {
            pred[u].push(v);
        }
    }
    let step = |f: Option<i64>, w: i64| -> Option<i64> {
        let need = (f? - w).max(0);
        (need <= bound).then_some(need)
    };
    // `None` stands for top, so compare with top as the largest value.
    let rank = |f: Option<i64>| f.map_or(i64::MAX, |v| v);
    let mut f: Vec<Option<i64>> = vec![Some(0); n];
    let mut queued = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).collect();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let candidates = game.succ[v].iter().map(|&(u, w)| step(f[u], w));
        let lifted = if game.max_node[v] {
            candidates.min_by_key(|&c| rank(c))
        } else {
            candidates.max_by_key(|&c| rank(c))
        }
        .expect("every node has a successor");
        if rank(lifted) > rank(f[v]) {
            f[v] = lifted;
            for &p in &pred[v] {
                if !queued[p] {
                    queued[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }
    f
}

/// Positional strategy read off a stable progress measure: Max keeps the
/// credit finite, Min drives it to top where it can.
pub(crate) fn strategy_from_measure(game: &IntGame, f: &[Option<i64>]) -> Vec<usize> {
    game.succ
        .iter()
        .enumerate()
        .map(|(v, arcs)| {
            let score = |&(u, w): &(usize, i64)| -> i64 {
                match f[u] {
                    None => i64::MAX,
                    Some(x) => (x - w).max(0),
                }
            };
            let pick = if game.max_node[v] {
                arcs.iter().min_by_key(|a| score(a))
            } else {
                arcs.iter().max_by_key(|a| score(a))
            };
            pick.expect("every node has a successor").0
        })
        .collect()
}
