//! Parametric mean payoff games and the decision procedures built on them.
//!
//! A system `M x ⊕ p ≤ N x ⊕ q` gives a bipartite game: Min moves from column
//! node `j` to row node `i` paying `−M_ij`, Max answers from `i` to a column
//! node `k` receiving `N_ik(ε)`. The constant term is the last column node.
//! The polyhedron is nonempty iff Max wins from that node for some `ε > 0`.

mod cycle;
mod energy;
mod solve;

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::germ::{int, Germ, MaxPlus, Rat};
use crate::system::{MixedInequality, MixedSystem};

use cycle::{best_cycle, max_cycle_means, negate, Adjacency};
use energy::{progress_measure, strategy_from_measure, IntGame};

pub use solve::solve_game;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpgError {
    #[error("+oo coefficient on a right-hand side")]
    PosInf,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid game graph: {0}")]
    InvalidGraph(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// Arc weight `base − eps_count·ε` on an arc from a row node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParametricWeight {
    pub base: Rat,
    pub eps_count: u8,
}

impl ParametricWeight {
    pub fn plain(base: Rat) -> Self {
        ParametricWeight { base, eps_count: 0 }
    }

    pub fn at(self, eps: Rat) -> Rat {
        self.base - int(i64::from(self.eps_count)) * eps
    }
}

/// Per column node value of the game.
pub type CycleTime = Vec<Rat>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Min,
    Max,
}

/// Positional strategy. For Min, `choice[j]` is the row node picked at column
/// node `j`; for Max, `choice[i]` is the column node picked at row node `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub choice: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Col(usize),
    Row(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Col(j) => write!(f, "c{}", j + 1),
            Node::Row(i) => write!(f, "r{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameGraph {
    col_arcs: Vec<Vec<(usize, Rat)>>,
    row_arcs: Vec<Vec<(usize, ParametricWeight)>>,
}

impl GameGraph {
    /// Checks arc endpoints and that every node has an outgoing arc.
    pub fn new(
        col_arcs: Vec<Vec<(usize, Rat)>>,
        row_arcs: Vec<Vec<(usize, ParametricWeight)>>,
    ) -> Result<Self, MpgError> {
        let (cols, rows) = (col_arcs.len(), row_arcs.len());
        for (j, arcs) in col_arcs.iter().enumerate() {
            if arcs.is_empty() {
                return Err(MpgError::InvalidGraph(format!("column node {} has no outgoing arc", j + 1)));
            }
            if let Some(&(i, _)) = arcs.iter().find(|&&(i, _)| i >= rows) {
                return Err(MpgError::InvalidGraph(format!("arc to missing row node {}", i + 1)));
            }
        }
        for (i, arcs) in row_arcs.iter().enumerate() {
            if arcs.is_empty() {
                return Err(MpgError::InvalidGraph(format!("row node {} has no outgoing arc", i + 1)));
            }
            if let Some(&(j, _)) = arcs.iter().find(|&&(j, _)| j >= cols) {
                return Err(MpgError::InvalidGraph(format!("arc to missing column node {}", j + 1)));
            }
            if arcs.iter().any(|(_, w)| w.eps_count > 1) {
                return Err(MpgError::InvalidGraph("eps_count must be 0 or 1".into()));
            }
        }
        Ok(GameGraph { col_arcs, row_arcs })
    }

    pub fn cols(&self) -> usize {
        self.col_arcs.len()
    }

    pub fn rows(&self) -> usize {
        self.row_arcs.len()
    }

    /// Arcs leaving column node `j` as `(row, weight)`.
    pub fn col_arcs(&self, j: usize) -> &[(usize, Rat)] {
        &self.col_arcs[j]
    }

    /// Arcs leaving row node `i` as `(column, weight)`.
    pub fn row_arcs(&self, i: usize) -> &[(usize, ParametricWeight)] {
        &self.row_arcs[i]
    }

    fn row_weights(&self, eps: Rat) -> Vec<Vec<(usize, Rat)>> {
        self.row_arcs.iter().map(|arcs| arcs.iter().map(|&(k, w)| (k, w.at(eps))).collect()).collect()
    }

    fn check_min(&self, sigma: &[usize]) -> Result<(), MpgError> {
        if sigma.len() != self.cols() {
            return Err(MpgError::InvalidStrategy(format!("expected {} choices, got {}", self.cols(), sigma.len())));
        }
        for (j, &i) in sigma.iter().enumerate() {
            if !self.col_arcs[j].iter().any(|&(r, _)| r == i) {
                return Err(MpgError::InvalidStrategy(format!("no arc c{} -> r{}", j + 1, i + 1)));
            }
        }
        Ok(())
    }

    fn check_max(&self, tau: &[usize]) -> Result<(), MpgError> {
        if tau.len() != self.rows() {
            return Err(MpgError::InvalidStrategy(format!("expected {} choices, got {}", self.rows(), tau.len())));
        }
        for (i, &k) in tau.iter().enumerate() {
            if !self.row_arcs[i].iter().any(|&(c, _)| c == k) {
                return Err(MpgError::InvalidStrategy(format!("no arc r{} -> c{}", i + 1, k + 1)));
            }
        }
        Ok(())
    }

    /// Column-node contraction once Min is fixed: arcs carry the row they pass.
    fn fix_min(&self, sigma: &[usize], eps: Rat) -> (Adjacency, Vec<Vec<usize>>) {
        let mut adj = vec![Vec::new(); self.cols()];
        let mut via = vec![Vec::new(); self.cols()];
        for (j, &i) in sigma.iter().enumerate() {
            let to_row = self.col_arcs[j].iter().find(|&&(r, _)| r == i).expect("validated").1;
            for &(k, w) in &self.row_arcs[i] {
                adj[j].push((k, to_row + w.at(eps)));
                via[j].push(i);
            }
        }
        (adj, via)
    }

    fn fix_max(&self, tau: &[usize], eps: Rat) -> (Adjacency, Vec<Vec<usize>>) {
        let mut adj = vec![Vec::new(); self.cols()];
        let mut via = vec![Vec::new(); self.cols()];
        for (j, arcs) in self.col_arcs.iter().enumerate() {
            for &(i, w) in arcs {
                let k = tau[i];
                let back = self.row_arcs[i].iter().find(|&&(c, _)| c == k).expect("validated").1;
                adj[j].push((k, w + back.at(eps)));
                via[j].push(i);
            }
        }
        (adj, via)
    }
}

/// Builds the game of a system with no `+oo` on its right-hand sides.
///
/// A row whose right side is bottom forces its left-side variables to `−∞`;
/// it becomes, per finite left coefficient `m` at column `j`, a row node with
/// arcs `j → r` of weight `−m` and `r → j` of weight `m − 1`, i.e. the
/// equivalent row `m x_j ≤ (m − 1) x_j`. Column nodes left without an
/// outgoing arc get the trivial row `x_j ≤ x_j`.
pub fn build_game(sys: &MixedSystem) -> Result<GameGraph, MpgError> {
    if sys.has_pos_inf() {
        return Err(MpgError::PosInf);
    }
    let n = sys.dim();
    let mut col_arcs: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); n + 1];
    let mut row_arcs: Vec<Vec<(usize, ParametricWeight)>> = Vec::new();
    for row in sys.rows() {
        let lhs: Vec<MaxPlus> = row.lhs().iter().copied().chain([row.lhs_const()]).collect();
        let rhs: Vec<Germ> = row.rhs().iter().copied().chain([row.rhs_const()]).collect();
        if rhs.iter().all(|b| b.is_bottom()) {
            for (j, a) in lhs.iter().enumerate() {
                if let Some(m) = a.finite() {
                    let r = row_arcs.len();
                    col_arcs[j].push((r, -m));
                    row_arcs.push(vec![(j, ParametricWeight::plain(m - Rat::one()))]);
                }
            }
            continue;
        }
        let r = row_arcs.len();
        for (j, a) in lhs.iter().enumerate() {
            if let Some(m) = a.finite() {
                col_arcs[j].push((r, -m));
            }
        }
        let arcs = rhs
            .iter()
            .enumerate()
            .filter_map(|(j, b)| match *b {
                Germ::Plain(v) => Some((j, ParametricWeight { base: v, eps_count: 0 })),
                Germ::Under(v) => Some((j, ParametricWeight { base: v, eps_count: 1 })),
                _ => None,
            })
            .collect();
        row_arcs.push(arcs);
    }
    for j in 0..=n {
        if col_arcs[j].is_empty() {
            let r = row_arcs.len();
            col_arcs[j].push((r, Rat::zero()));
            row_arcs.push(vec![(j, ParametricWeight::plain(Rat::zero()))]);
        }
    }
    GameGraph::new(col_arcs, row_arcs)
}

/// Values of the one-player game left to Max once Min plays `sigma`.
pub fn evaluate_min_strategy(g: &GameGraph, sigma: &[usize], eps: Rat) -> Result<CycleTime, MpgError> {
    g.check_min(sigma)?;
    Ok(max_cycle_means(&g.fix_min(sigma, eps).0))
}

/// Values of the one-player game left to Min once Max plays `tau`.
pub fn evaluate_max_strategy(g: &GameGraph, tau: &[usize], eps: Rat) -> Result<CycleTime, MpgError> {
    g.check_max(tau)?;
    let adj = g.fix_max(tau, eps).0;
    Ok(max_cycle_means(&negate(&adj)).into_iter().map(|v| -v).collect())
}

fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> i64 {
    values.into_iter().fold(1, |acc, v| acc.lcm(v.denom()))
}

fn scaled(v: Rat, k: i64) -> i64 {
    let s = v * int(k);
    assert!(s.is_integer(), "scale must clear denominators");
    s.to_integer()
}

/// Decides, for every column node, whether `player` wins against threshold 0:
/// Max with `χ ≥ 0` (`strict`: `χ > 0`), Min with `χ ≤ 0` (`strict`: `χ < 0`).
/// Also returns a positional strategy for `player` that wins wherever it can.
fn threshold_wins(g: &GameGraph, eps: Rat, player: Player, strict: bool) -> (Vec<bool>, Strategy) {
    let (cols, rows) = (g.cols(), g.rows());
    let row_w = g.row_weights(eps);
    let denom = common_denominator(
        g.col_arcs.iter().flatten().map(|(_, w)| w).chain(row_w.iter().flatten().map(|(_, w)| w)),
    );
    // Cycle means have denominators dividing `denom · length`, length ≤ cols,
    // so scaling by `denom · cols` and paying 1 per step turns `> 0` into `≥ 0`.
    let scale = if strict { denom * cols as i64 } else { denom };
    let sign = if player == Player::Max { 1 } else { -1 };
    let shift = i64::from(strict);
    let mut succ: Vec<Vec<(usize, i64)>> = Vec::with_capacity(cols + rows);
    for arcs in &g.col_arcs {
        succ.push(arcs.iter().map(|&(i, w)| (cols + i, sign * scaled(w, scale) - shift)).collect());
    }
    for arcs in &row_w {
        succ.push(arcs.iter().map(|&(k, w)| (k, sign * scaled(w, scale))).collect());
    }
    let energy_at_rows = player == Player::Max;
    let max_node = (0..cols + rows).map(|v| (v >= cols) == energy_at_rows).collect();
    let game = IntGame { succ, max_node };
    let f = progress_measure(&game);
    let picks = strategy_from_measure(&game, &f);
    let choice = match player {
        Player::Max => picks[cols..].to_vec(),
        Player::Min => picks[..cols].iter().map(|&v| v - cols).collect(),
    };
    (f[..cols].iter().map(Option::is_some).collect(), Strategy { player, choice })
}

/// A positional strategy with the extremal cycle it leads to from the
/// constant node, checkable with Karp's algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub eps: Rat,
    pub strategy: Strategy,
    pub cycle: Vec<Node>,
    pub mean: Rat,
}

impl Certificate {
    fn new(g: &GameGraph, eps: Rat, strategy: Strategy) -> Self {
        let from = g.cols() - 1;
        let (adj, via) = match strategy.player {
            Player::Min => g.fix_min(&strategy.choice, eps),
            Player::Max => g.fix_max(&strategy.choice, eps),
        };
        let search = if strategy.player == Player::Min { adj.clone() } else { negate(&adj) };
        let (cols, best) = best_cycle(&search, from);
        let mut cycle = Vec::with_capacity(2 * cols.len());
        for (pos, &j) in cols.iter().enumerate() {
            let k = cols[(pos + 1) % cols.len()];
            let arc = (0..search[j].len())
                .filter(|&a| search[j][a].0 == k)
                .max_by_key(|&a| search[j][a].1)
                .expect("cycle follows arcs");
            cycle.push(Node::Col(j));
            cycle.push(Node::Row(via[j][arc]));
        }
        let mean = if strategy.player == Player::Min { best } else { -best };
        Certificate { eps, strategy, cycle, mean }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.strategy.player {
            Player::Min => "min",
            Player::Max => "max",
        };
        writeln!(f, "winner: {who} at eps {}", self.eps)?;
        for (from, &to) in self.strategy.choice.iter().enumerate() {
            match self.strategy.player {
                Player::Min => writeln!(f, "{} -> {}", Node::Col(from), Node::Row(to))?,
                Player::Max => writeln!(f, "{} -> {}", Node::Row(from), Node::Col(to))?,
            }
        }
        write!(f, "cycle:")?;
        for node in &self.cycle {
            write!(f, " {node}")?;
        }
        write!(f, " mean {}", self.mean)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessVerdict {
    pub empty: bool,
    /// Nonempty: one Max strategy. Empty: Min strategies at `ε = 0` and `ε = ε*`.
    pub certificates: Vec<Certificate>,
}

/// The small perturbation `1/(n+1)²` at which strict rows are tested.
pub fn critical_eps(dim: usize) -> Rat {
    let m = dim as i64 + 1;
    Rat::new(1, m * m)
}

fn decisive_nodes(g: &GameGraph, dim: usize) -> (Vec<bool>, Strategy, Vec<bool>, Strategy) {
    let (pos0, tau0) = threshold_wins(g, Rat::zero(), Player::Max, true);
    let (nonneg, tau_eps) = threshold_wins(g, critical_eps(dim), Player::Max, false);
    (pos0, tau0, nonneg, tau_eps)
}

/// Emptiness of a system without `+oo` right-hand coefficients.
pub fn is_empty_finite(sys: &MixedSystem) -> Result<bool, MpgError> {
    let g = build_game(sys)?;
    let c = sys.dim();
    let (pos0, _, nonneg, _) = decisive_nodes(&g, c);
    Ok(!(pos0[c] || nonneg[c]))
}

/// [`is_empty_finite`] together with winning strategies.
pub fn is_empty_finite_certified(sys: &MixedSystem) -> Result<EmptinessVerdict, MpgError> {
    let g = build_game(sys)?;
    let c = sys.dim();
    let (pos0, tau0, nonneg, tau_eps) = decisive_nodes(&g, c);
    let eps = critical_eps(c);
    if pos0[c] {
        return Ok(EmptinessVerdict { empty: false, certificates: vec![Certificate::new(&g, Rat::zero(), tau0)] });
    }
    if nonneg[c] {
        return Ok(EmptinessVerdict { empty: false, certificates: vec![Certificate::new(&g, eps, tau_eps)] });
    }
    let (_, sigma0) = threshold_wins(&g, Rat::zero(), Player::Min, false);
    let (_, sigma_eps) = threshold_wins(&g, eps, Player::Min, true);
    Ok(EmptinessVerdict {
        empty: true,
        certificates: vec![Certificate::new(&g, Rat::zero(), sigma0), Certificate::new(&g, eps, sigma_eps)],
    })
}

/// Coordinates (0-based) that are finite at some point of the polyhedron.
pub fn support(sys: &MixedSystem) -> Result<BTreeSet<usize>, MpgError> {
    let g = build_game(sys)?;
    let c = sys.dim();
    let (pos0, _, nonneg, _) = decisive_nodes(&g, c);
    if !(pos0[c] || nonneg[c]) {
        return Ok(BTreeSet::new());
    }
    Ok((0..c).filter(|&j| pos0[j] || nonneg[j]).collect())
}

/// One pass of the general emptiness loop: the rows taken so far and, when
/// they are satisfiable, their support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessStep {
    pub rows: BTreeSet<usize>,
    pub support: Option<BTreeSet<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptinessTrace {
    pub empty: bool,
    pub steps: Vec<EmptinessStep>,
}

impl EmptinessTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

/// Restriction of the chosen rows with every `+oo` right-hand term deleted.
pub fn restrict_rows(sys: &MixedSystem, chosen: &BTreeSet<usize>) -> MixedSystem {
    let rows = chosen.iter().map(|&i| {
        let row = &sys.rows()[i];
        let drop = |b: &Germ| if *b == Germ::PosInf { Germ::NegInf } else { *b };
        MixedInequality::new(row.lhs().to_vec(), row.lhs_const(), row.rhs().iter().map(drop).collect(), row.rhs_const())
    });
    MixedSystem::from_rows(sys.dim(), rows.collect()).expect("same dimension")
}

/// General emptiness test, allowing `+oo` coefficients, with the sets it visits.
pub fn is_empty_traced(sys: &MixedSystem) -> EmptinessTrace {
    let usable: Vec<usize> = (0..sys.len()).filter(|&i| sys.rows()[i].rhs_const() != Germ::PosInf).collect();
    let admissible = |i: usize, support: &BTreeSet<usize>| support.iter().all(|&j| sys.rows()[i].rhs()[j] != Germ::PosInf);
    let mut support: BTreeSet<usize> = (0..sys.dim()).collect();
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    let mut fresh: Vec<usize> = usable.iter().copied().filter(|&i| admissible(i, &support)).collect();
    let mut steps = Vec::new();
    while !fresh.is_empty() {
        chosen.extend(fresh);
        let part = restrict_rows(sys, &chosen);
        if is_empty_finite(&part).expect("+oo terms removed") {
            steps.push(EmptinessStep { rows: chosen, support: None });
            return EmptinessTrace { empty: true, steps };
        }
        support = self::support(&part).expect("+oo terms removed");
        steps.push(EmptinessStep { rows: chosen.clone(), support: Some(support.clone()) });
        fresh = usable.iter().copied().filter(|i| !chosen.contains(i) && admissible(*i, &support)).collect();
    }
    EmptinessTrace { empty: false, steps }
}

pub fn is_empty(sys: &MixedSystem) -> bool {
    is_empty_traced(sys).empty
}

/// Germ with the same modulus, made strict.
fn strict_of(a: MaxPlus) -> Germ {
    match a {
        MaxPlus::NegInf => Germ::NegInf,
        MaxPlus::Fin(v) => Germ::Under(v),
    }
}

/// The system whose emptiness is equivalent to `sys` implying `target`.
pub fn implication_system(sys: &MixedSystem, target: &MixedInequality) -> Result<MixedSystem, MpgError> {
    let n = sys.dim();
    if target.dim() != n {
        return Err(MpgError::DimensionMismatch { expected: n, got: target.dim() });
    }
    let (e, g) = (target.lhs(), target.lhs_const());
    let strict_rhs: Vec<Germ> = e.iter().copied().map(strict_of).collect();
    let plain_rhs: Vec<Germ> = e.iter().copied().map(Germ::from).collect();
    let single = |i: Option<usize>, a: MaxPlus| {
        let mut lhs = vec![MaxPlus::NegInf; n];
        match i {
            Some(i) => {
                lhs[i] = a;
                (lhs, MaxPlus::NegInf)
            }
            None => (lhs, a),
        }
    };
    let mut rows = sys.rows().to_vec();
    let terms = target.rhs().iter().copied().enumerate().chain([(n, target.rhs_const())]);
    for (i, f) in terms {
        let at = (i < n).then_some(i);
        match f {
            Germ::NegInf => {}
            Germ::Plain(v) => {
                let (lhs, lc) = single(at, MaxPlus::Fin(v));
                rows.push(MixedInequality::new(lhs, lc, strict_rhs.clone(), strict_of(g)));
            }
            Germ::Under(v) => {
                let (lhs, lc) = single(at, MaxPlus::Fin(v));
                rows.push(MixedInequality::new(lhs, lc, plain_rhs.clone(), Germ::from(g)));
            }
            Germ::PosInf => {
                // For the constant this is `0 <= -oo`: nothing escapes a `+oo` bound.
                let (lhs, lc) = single(at, MaxPlus::one());
                rows.push(MixedInequality::new(lhs, lc, vec![Germ::NegInf; n], Germ::NegInf));
            }
        }
    }
    if g.is_bottom() {
        let rhs = e.iter().map(|a| if a.is_bottom() { Germ::NegInf } else { Germ::PosInf }).collect();
        rows.push(MixedInequality::new(vec![MaxPlus::NegInf; n], MaxPlus::one(), rhs, Germ::NegInf));
    }
    Ok(MixedSystem::from_rows(n, rows).expect("rows built with the system dimension"))
}

/// Whether every solution of `sys` satisfies `target`.
pub fn implies(sys: &MixedSystem, target: &MixedInequality) -> Result<bool, MpgError> {
    if target.dim() != sys.dim() {
        return Err(MpgError::DimensionMismatch { expected: sys.dim(), got: target.dim() });
    }
    let lhs_bottom = target.lhs_const().is_bottom() && target.lhs().iter().all(|a| a.is_bottom());
    if lhs_bottom || target.rhs_const() == Germ::PosInf {
        return Ok(true);
    }
    Ok(is_empty(&implication_system(sys, target)?))
}
