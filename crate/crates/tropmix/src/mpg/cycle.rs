//! Maximum cycle means of one-player graphs (Karp), per strongly connected
//! component, propagated along reachability.

use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::germ::Rat;

/// Adjacency list with exact weights; every node must have a successor.
pub(crate) type Adjacency = Vec<Vec<(usize, Rat)>>;

fn karp(adj: &Adjacency, comp: &[usize], in_comp: &[bool]) -> Option<Rat> {
    let m = comp.len();
    let has_cycle = m > 1 || adj[comp[0]].iter().any(|&(u, _)| u == comp[0]);
    if !has_cycle {
        return None;
    }
    let n = adj.len();
    // dist[k][v]: heaviest walk of exactly k arcs from comp[0] to v inside the component.
    let mut dist: Vec<Vec<Option<Rat>>> = vec![vec![None; n]; m + 1];
    dist[0][comp[0]] = Some(Rat::zero());
    for k in 1..=m {
        for &v in comp {
            let Some(dv) = dist[k - 1][v] else { continue };
            for &(u, w) in &adj[v] {
                if !in_comp[u] {
                    continue;
                }
                let cand = dv + w;
                if dist[k][u].map_or(true, |d| cand > d) {
                    dist[k][u] = Some(cand);
                }
            }
        }
    }
    comp.iter()
        .filter_map(|&v| {
            let dm = dist[m][v]?;
            (0..m)
                .filter_map(|k| Some((dm - dist[k][v]?) / Rat::from_integer((m - k) as i64)))
                .min()
        })
        .max()
}

fn components(adj: &Adjacency) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..adj.len()).map(|_| g.add_node(())).collect();
    for (v, arcs) in adj.iter().enumerate() {
        for &(u, _) in arcs {
            g.add_edge(nodes[v], nodes[u], ());
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| c.into_iter().map(|ix| ix.index()).collect())
        .collect()
}

fn reachable(adj: &Adjacency, from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &(u, _) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Per node, the largest mean weight of a cycle reachable from it.
pub(crate) fn max_cycle_means(adj: &Adjacency) -> Vec<Rat> {
    let n = adj.len();
    let comps = components(adj);
    let mut comp_mean: Vec<Option<Rat>> = vec![None; n];
    for comp in &comps {
        let mut in_comp = vec![false; n];
        for &v in comp {
            in_comp[v] = true;
        }
        let mean = karp(adj, comp, &in_comp);
        for &v in comp {
            comp_mean[v] = mean;
        }
    }
    (0..n)
        .map(|j| {
            reachable(adj, j)
                .iter()
                .enumerate()
                .filter(|(_, &r)| r)
                .filter_map(|(v, _)| comp_mean[v])
                .max()
                .expect("every node reaches a cycle")
        })
        .collect()
}

pub(crate) fn negate(adj: &Adjacency) -> Adjacency {
    adj.iter().map(|arcs| arcs.iter().map(|&(u, w)| (u, -w)).collect()).collect()
}

/// A cycle reachable from `from` whose mean equals the largest reachable mean.
pub(crate) fn best_cycle(adj: &Adjacency, from: usize) -> (Vec<usize>, Rat) {
    let means = max_cycle_means(adj);
    let target = means[from];
    let reach = reachable(adj, from);
    // Potentials for weights shifted by the target mean on the nodes that can
    // still reach a cycle of that mean; tight arcs then carry the optimal cycles.
    let keep: Vec<bool> = (0..adj.len()).map(|v| reach[v] && means[v] == target).collect();
    let mut pot: Vec<Rat> = vec![Rat::zero(); adj.len()];
    for _ in 0..adj.len() {
        for v in 0..adj.len() {
            if !keep[v] {
                continue;
            }
            for &(u, w) in &adj[v] {
                if keep[u] && pot[v] + w - target > pot[u] {
                    pot[u] = pot[v] + w - target;
                }
            }
        }
    }
    let tight = |v: usize, u: usize, w: Rat| keep[v] && keep[u] && pot[v] + w - target == pot[u];
    // Any cycle made of tight arcs has the target mean; find one by DFS.
    let n = adj.len();
    let mut state = vec![0u8; n];
    for start in (0..n).filter(|&v| keep[v]) {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        state[start] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&(u, w)) = adj[v].get(*next) {
                *next += 1;
                if !tight(v, u, w) {
                    continue;
                }
                match state[u] {
                    0 => {
                        state[u] = 1;
                        stack.push((u, 0));
                    }
                    1 => {
                        let at = stack.iter().position(|&(x, _)| x == u).expect("on stack");
                        return (stack[at..].iter().map(|&(x, _)| x).collect(), target);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    unreachable!("an optimal cycle consists of tight arcs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::int;

    #[test]
    fn self_loop_and_two_cycles() {
        let adj: Adjacency = vec![vec![(0, int(3))]];
        assert_eq!(max_cycle_means(&adj), vec![int(3)]);

        // 0 -> {1, 2}; 1 loops with mean 1, 2 loops with mean 3.
        let adj: Adjacency = vec![vec![(1, int(0)), (2, int(0))], vec![(1, int(1))], vec![(2, int(3))]];
        assert_eq!(max_cycle_means(&adj), vec![int(3), int(1), int(3)]);
        let (cycle, mean) = best_cycle(&adj, 0);
        assert_eq!((cycle, mean), (vec![2], int(3)));
    }

    #[test]
    fn two_node_cycle_mean() {
        let adj: Adjacency = vec![vec![(1, int(1))], vec![(0, int(2)), (1, int(-5))]];
        assert_eq!(max_cycle_means(&adj), vec![Rat::new(3, 2), Rat::new(3, 2)]);
        let (cycle, mean) = best_cycle(&adj, 1);
        assert_eq!(mean, Rat::new(3, 2));
        assert_eq!(cycle.len(), 2);
    }
}
