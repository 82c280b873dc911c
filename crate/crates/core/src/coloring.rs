//! Zero-temperature coloring: the antiferromagnetic Potts energy, an exact
//! search oracle, and warning propagation over `{white, color, contradiction}`
//! messages.
//!
//! Colors are `1..=q`. A warning `Color(c)` on the arc `i -> l` says that,
//! ignoring `l`, node `i` can only take color `c`, so `l` must avoid `c`.
//! `White` means `i` keeps at least two options and constrains nothing.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ColoringError;
use crate::graph::Graph;
use crate::rng::seeded;

/// Colors are stored in a `u32` bitmask; `q` is capped accordingly.
pub const MAX_COLORS: usize = 16;
pub const DEFAULT_MAX_SWEEPS: usize = 1000;
/// Search-tree nodes visited by [`exact_min_energy`] before giving up.
pub const EXACT_SEARCH_BUDGET: u64 = 50_000_000;

pub fn check_q(q: usize) -> Result<(), ColoringError> {
    if !(2..=MAX_COLORS).contains(&q) {
        return Err(ColoringError::InvalidParameter(format!("q must be in 2..={MAX_COLORS}, got {q}")));
    }
    Ok(())
}

/// Set of colors, bit `c - 1` for color `c`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ColorSet(u32);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn full(q: usize) -> Self {
        ColorSet(((1u64 << q) - 1) as u32)
    }

    pub fn single(color: usize) -> Self {
        ColorSet(1 << (color - 1))
    }

    pub fn from_bits(bits: u32) -> Self {
        ColorSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, color: usize) -> bool {
        color >= 1 && self.0 & (1 << (color - 1)) != 0
    }

    pub fn insert(&mut self, color: usize) {
        self.0 |= 1 << (color - 1);
    }

    pub fn remove(&mut self, color: usize) {
        self.0 &= !(1 << (color - 1));
    }

    pub fn union(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 | other.0)
    }

    pub fn difference(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & !other.0)
    }

    /// Smallest color in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |b| self.0 & (1 << b) != 0).map(|b| b + 1)
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ColorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ColorSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

/// A proper-or-not assignment of colors `1..=q` to the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub q: usize,
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn new(q: usize, colors: Vec<usize>) -> Result<Self, ColoringError> {
        check_q(q)?;
        if let Some(&bad) = colors.iter().find(|&&c| c == 0 || c > q) {
            return Err(ColoringError::ColorOutOfRange { color: bad, q });
        }
        Ok(Self { q, colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    fn check_against(&self, g: &Graph) -> Result<(), ColoringError> {
        if self.colors.len() != g.n_nodes() {
            return Err(ColoringError::LengthMismatch { expected: g.n_nodes(), got: self.colors.len() });
        }
        Ok(())
    }
}

/// Number of monochromatic edges.
pub fn energy(g: &Graph, s: &Coloring) -> Result<usize, ColoringError> {
    s.check_against(g)?;
    Ok(g.edges().iter().filter(|&&(a, b)| s.colors[a] == s.colors[b]).count())
}

/// Ground-state energy and one optimal coloring, by depth-first branch and
/// bound. Colors are assigned in node order; a node may only open the
/// smallest color not yet used, which removes the `q!` relabelings.
pub fn exact_min_energy(g: &Graph, q: usize) -> Result<(usize, Coloring), ColoringError> {
    check_q(q)?;
    let n = g.n_nodes();
    if n == 0 {
        return Ok((0, Coloring { q, colors: Vec::new() }));
    }
    let mut search = ExactSearch {
        g,
        q,
        colors: vec![0; n],
        best: usize::MAX,
        best_colors: vec![1; n],
        visited: 0,
    };
    // Start from a greedy bound so pruning bites early.
    search.best_colors = greedy_in_order(g, q);
    search.best = energy(g, &Coloring { q, colors: search.best_colors.clone() })?;
    if !search.descend(0, 0, 0)? {
        return Err(ColoringError::BudgetExceeded { n, q });
    }
    Ok((search.best, Coloring { q, colors: search.best_colors }))
}

struct ExactSearch<'a> {
    g: &'a Graph,
    q: usize,
    colors: Vec<usize>,
    best: usize,
    best_colors: Vec<usize>,
    visited: u64,
}

impl ExactSearch<'_> {
    // Returns Ok(false) when the budget ran out.
    fn descend(&mut self, node: usize, conflicts: usize, used: usize) -> Result<bool, ColoringError> {
        if self.best == 0 {
            return Ok(true);
        }
        if node == self.colors.len() {
            if conflicts < self.best {
                self.best = conflicts;
                self.best_colors.copy_from_slice(&self.colors);
            }
            return Ok(true);
        }
        let max_color = (used + 1).min(self.q);
        for c in 1..=max_color {
            self.visited += 1;
            if self.visited > EXACT_SEARCH_BUDGET {
                return Ok(false);
            }
            let added = self.g.neighbors(node).iter().filter(|&&v| v < node && self.colors[v] == c).count();
            if conflicts + added >= self.best {
                continue;
            }
            self.colors[node] = c;
            if !self.descend(node + 1, conflicts + added, used.max(c))? {
                return Ok(false);
            }
            self.colors[node] = 0;
        }
        Ok(true)
    }
}

fn greedy_in_order(g: &Graph, q: usize) -> Vec<usize> {
    let mut colors = vec![0usize; g.n_nodes()];
    for v in 0..g.n_nodes() {
        let mut counts = vec![0usize; q + 1];
        for &u in g.neighbors(v) {
            counts[colors[u]] += 1;
        }
        colors[v] = (1..=q).min_by_key(|&c| counts[c]).unwrap();
    }
    colors
}

/// Colors a node with allowed list `list` forbids to its neighbors: the
/// list itself when it is a single color, nothing otherwise.
pub fn forbid_map(list: ColorSet) -> Result<ColorSet, ColoringError> {
    match list.len() {
        0 => Err(ColoringError::EmptyList),
        1 => Ok(list),
        _ => Ok(ColorSet::EMPTY),
    }
}

/// Warning value: white, a single forced color, or the empty list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Warning {
    White,
    Color(usize),
    Contradiction,
}

impl Warning {
    /// The warning summarizing an allowed-color list.
    pub fn from_allowed(allowed: ColorSet) -> Warning {
        match allowed.len() {
            0 => Warning::Contradiction,
            1 => Warning::Color(allowed.first().unwrap()),
            _ => Warning::White,
        }
    }

    /// Colors this warning forbids at the receiving node. A contradiction
    /// forbids nothing.
    pub fn forbidden(self) -> ColorSet {
        match self {
            Warning::Color(c) => ColorSet::single(c),
            Warning::White | Warning::Contradiction => ColorSet::EMPTY,
        }
    }

    pub fn relabel(self, perm: &[usize]) -> Warning {
        match self {
            Warning::Color(c) => Warning::Color(perm[c]),
            w => w,
        }
    }
}

/// Combines incoming warnings: colors forced on any neighbor are forbidden;
/// the result is white if at least two colors survive.
pub fn combine_warnings(incoming: &[Warning], q: usize) -> Warning {
    let forbidden = incoming.iter().fold(ColorSet::EMPTY, |acc, w| acc.union(w.forbidden()));
    Warning::from_allowed(ColorSet::full(q).difference(forbidden))
}

/// Initial messages for [`wp_fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub enum WarningInit {
    /// Every arc `i -> l` starts as `Color(σ_i)`.
    FromColoring(Coloring),
    /// Each arc independently uniform over white and the `q` colors.
    Random(u64),
}

/// One warning per arc of a graph, indexed by arc id.
#[derive(Debug, Clone, PartialEq)]
pub struct WarningState {
    pub q: usize,
    pub messages: Vec<Warning>,
}

impl WarningState {
    /// Warning on the arc `from -> to`, if that edge exists.
    pub fn get(&self, g: &Graph, from: usize, to: usize) -> Option<Warning> {
        g.arc_between(from, to).map(|a| self.messages[a])
    }

    pub fn has_contradiction(&self) -> bool {
        self.messages.contains(&Warning::Contradiction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WpStatus {
    Converged,
    NonConverged,
    ContradictionFound,
}

/// Message changes observed during a run, split by direction in the order
/// `Color ≺ White`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Transitions {
    pub color_to_white: usize,
    pub other: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WpRun {
    pub state: WarningState,
    pub status: WpStatus,
    pub sweeps: usize,
    pub transitions: Transitions,
}

/// Incoming warnings to `node`, skipping the one from `exclude`.
fn forbidden_at(g: &Graph, messages: &[Warning], node: usize, exclude: Option<usize>) -> ColorSet {
    let mut forbidden = ColorSet::EMPTY;
    for arc in g.out_arcs(node) {
        if Some(g.arc_target(arc)) == exclude {
            continue;
        }
        forbidden = forbidden.union(messages[g.reverse_arc(arc)].forbidden());
    }
    forbidden
}

/// Iterates the warning equations by asynchronous sweeps over all arcs in
/// a fresh random order each sweep, until a sweep changes nothing.
///
/// The run ends `ContradictionFound` whenever its final messages contain a
/// contradiction, converged or not.
pub fn wp_fixed_point(
    g: &Graph,
    q: usize,
    init: &WarningInit,
    max_sweeps: usize,
    order_seed: u64,
) -> Result<WpRun, ColoringError> {
    check_q(q)?;
    if max_sweeps == 0 {
        return Err(ColoringError::InvalidParameter("max_sweeps must be >= 1".into()));
    }
    let messages = match init {
        WarningInit::FromColoring(s) => {
            s.check_against(g)?;
            if s.q != q {
                return Err(ColoringError::InvalidParameter(format!("coloring uses q={}, run uses q={q}", s.q)));
            }
            (0..g.n_arcs()).map(|a| Warning::Color(s.colors[g.arc_source(a)])).collect()
        }
        WarningInit::Random(seed) => {
            let mut rng = seeded(*seed);
            (0..g.n_arcs())
                .map(|_| match rng.random_range(0..=q) {
                    0 => Warning::White,
                    c => Warning::Color(c),
                })
                .collect()
        }
    };
    let mut state = WarningState { q, messages };
    let mut rng = seeded(order_seed);
    let mut order: Vec<usize> = (0..g.n_arcs()).collect();
    let mut transitions = Transitions::default();
    let full = ColorSet::full(q);
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        order.shuffle(&mut rng);
        let mut changed = 0;
        for &arc in &order {
            let from = g.arc_source(arc);
            let to = g.arc_target(arc);
            let forbidden = forbidden_at(g, &state.messages, from, Some(to));
            let next = Warning::from_allowed(full.difference(forbidden));
            let prev = state.messages[arc];
            if next != prev {
                changed += 1;
                if matches!(prev, Warning::Color(_)) && next == Warning::White {
                    transitions.color_to_white += 1;
                } else {
                    transitions.other += 1;
                }
                state.messages[arc] = next;
            }
        }
        if changed == 0 {
            converged = true;
            break;
        }
    }
    let status = if state.has_contradiction() {
        WpStatus::ContradictionFound
    } else if converged {
        WpStatus::Converged
    } else {
        WpStatus::NonConverged
    };
    Ok(WpRun { state, status, sweeps, transitions })
}

/// Allowed-color list of every node given all its incoming warnings.
pub fn node_allowed(g: &Graph, state: &WarningState) -> Vec<ColorSet> {
    let full = ColorSet::full(state.q);
    (0..g.n_nodes())
        .map(|v| full.difference(forbidden_at(g, &state.messages, v, None)))
        .collect()
}

/// Node-level warnings (the whitening when the state came from a coloring).
pub fn node_warnings(g: &Graph, state: &WarningState) -> Vec<Warning> {
    node_allowed(g, state).into_iter().map(Warning::from_allowed).collect()
}

/// Whitening of a proper coloring: warning propagation started from the
/// coloring itself, reported per node. Under this start messages can only
/// turn from their node's color to white, so the limit exists and does not
/// depend on the update order.
pub fn whitening_from_coloring(g: &Graph, s: &Coloring) -> Result<Vec<Warning>, ColoringError> {
    let run = whitening_run(g, s)?;
    Ok(node_warnings(g, &run.state))
}

/// The full warning-propagation run behind [`whitening_from_coloring`].
pub fn whitening_run(g: &Graph, s: &Coloring) -> Result<WpRun, ColoringError> {
    let conflicts = energy(g, s)?;
    if conflicts > 0 {
        return Err(ColoringError::IllegalColoring { conflicts });
    }
    // Each non-final sweep bleaches at least one arc.
    let run = wp_fixed_point(g, s.q, &WarningInit::FromColoring(s.clone()), g.n_arcs() + 1, 0)?;
    debug_assert_eq!(run.status, WpStatus::Converged);
    Ok(run)
}

/// Per-node warning counts: index 0 white, `c` for color `c`, `q + 1`
/// contradiction.
pub fn warning_histogram(warnings: &[Warning], q: usize) -> Vec<usize> {
    let mut hist = vec![0; q + 2];
    for w in warnings {
        match *w {
            Warning::White => hist[0] += 1,
            Warning::Color(c) => hist[c] += 1,
            Warning::Contradiction => hist[q + 1] += 1,
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(q: usize, c: &[usize]) -> Coloring {
        Coloring::new(q, c.to_vec()).unwrap()
    }

    // Plain q^n enumeration, independent of the branch-and-bound search.
    fn enumerate_min(g: &Graph, q: usize) -> usize {
        let n = g.n_nodes();
        let mut best = usize::MAX;
        let mut colors = vec![1usize; n];
        loop {
            let e = energy(g, &Coloring { q, colors: colors.clone() }).unwrap();
            best = best.min(e);
            let mut i = 0;
            while i < n && colors[i] == q {
                colors[i] = 1;
                i += 1;
            }
            if i == n {
                return best;
            }
            colors[i] += 1;
        }
    }

    fn diamond() -> Graph {
        // 0 and 1 have degree 3; 2 and 3 are not adjacent.
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    #[test]
    fn energy_basics() {
        assert_eq!(energy(&Graph::path(4), &col(2, &[1, 2, 1, 2])).unwrap(), 0);
        let k5 = Graph::complete(5);
        assert_eq!(energy(&k5, &col(3, &[2; 5])).unwrap(), 10);
        assert!(matches!(energy(&k5, &col(3, &[1; 4])), Err(ColoringError::LengthMismatch { .. })));
        assert!(Coloring::new(3, vec![0, 1]).is_err());
        assert!(Coloring::new(3, vec![4]).is_err());
    }

    #[test]
    fn k4_three_colors_costs_one() {
        let k4 = Graph::complete(4);
        assert_eq!(enumerate_min(&k4, 3), 1);
        let (e, witness) = exact_min_energy(&k4, 3).unwrap();
        assert_eq!(e, 1);
        assert_eq!(energy(&k4, &witness).unwrap(), 1);
    }

    #[test]
    fn cycles_with_two_colors() {
        for n in 3..=12 {
            let (e, w) = exact_min_energy(&Graph::cycle(n), 2).unwrap();
            assert_eq!(e, n % 2, "C{n}");
            assert_eq!(energy(&Graph::cycle(n), &w).unwrap(), e);
        }
    }

    #[test]
    fn exact_agrees_with_enumeration_on_small_random_graphs() {
        use crate::graph::{generate, DegreeModel};
        for seed in 0..30 {
            let g = generate(DegreeModel::Gnp { z: 4.0 }, 8, seed).unwrap();
            for q in 2..=3 {
                assert_eq!(exact_min_energy(&g, q).unwrap().0, enumerate_min(&g, q), "seed {seed} q {q}");
            }
        }
    }

    #[test]
    fn exact_budget_exceeded() {
        // K_40 with 2 colors: the branch and bound cannot close this quickly.
        let err = exact_min_energy(&Graph::complete(40), 2);
        assert!(matches!(err, Err(ColoringError::BudgetExceeded { .. })), "{err:?}");
    }

    #[test]
    fn forbid_map_rules() {
        assert_eq!(forbid_map(ColorSet::single(2)).unwrap(), ColorSet::single(2));
        assert_eq!(forbid_map([1, 3].into_iter().collect()).unwrap(), ColorSet::EMPTY);
        assert_eq!(forbid_map(ColorSet::full(3)).unwrap(), ColorSet::EMPTY);
        assert_eq!(forbid_map(ColorSet::EMPTY), Err(ColoringError::EmptyList));
    }

    #[test]
    fn combine_rules() {
        use Warning::*;
        assert_eq!(combine_warnings(&[White, White, White], 3), White);
        assert_eq!(combine_warnings(&[], 3), White);
        assert_eq!(combine_warnings(&[Color(1), Color(2)], 3), Color(3));
        assert_eq!(combine_warnings(&[Color(1), Color(2), Color(3)], 3), Contradiction);
        assert_eq!(combine_warnings(&[Color(1), Color(1)], 3), White);
        assert_eq!(combine_warnings(&[Contradiction, Color(2)], 3), White);
    }

    #[test]
    fn forest_relaxes_to_white() {
        use crate::graph::{generate, DegreeModel};
        let tree = Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        for q in 2..=4 {
            for seed in 0..5 {
                let run = wp_fixed_point(&tree, q, &WarningInit::Random(seed), 100, seed).unwrap();
                assert_eq!(run.status, WpStatus::Converged);
                assert!(run.state.messages.iter().all(|&w| w == Warning::White));
            }
        }
        // Sparse random graphs are forests plus a few cycles; keep only
        // instances with no cycle at all.
        let mut checked = 0;
        for seed in 0..50 {
            let g = generate(DegreeModel::Gnp { z: 0.3 }, 40, seed).unwrap();
            let (_, comps) = crate::graph::component_labels(&g);
            if g.n_edges() + comps != g.n_nodes() {
                continue;
            }
            checked += 1;
            let run = wp_fixed_point(&g, 3, &WarningInit::Random(seed), 100, 1).unwrap();
            assert!(run.state.messages.iter().all(|&w| w == Warning::White));
        }
        assert!(checked > 5);
    }

    #[test]
    fn single_edge_from_coloring() {
        let g = Graph::path(2);
        let run = wp_fixed_point(&g, 3, &WarningInit::FromColoring(col(3, &[1, 2])), 10, 0).unwrap();
        assert_eq!(run.status, WpStatus::Converged);
        assert_eq!(run.state.get(&g, 0, 1), Some(Warning::White));
        assert_eq!(run.state.get(&g, 1, 0), Some(Warning::White));
    }

    #[test]
    fn odd_cycle_two_colors_never_settles_from_coloring() {
        let c5 = Graph::cycle(5);
        let (e, best) = exact_min_energy(&c5, 2).unwrap();
        assert_eq!(e, 1);
        for seed in 0..5 {
            let run = wp_fixed_point(&c5, 2, &WarningInit::FromColoring(best.clone()), 200, seed).unwrap();
            assert!(matches!(run.status, WpStatus::NonConverged | WpStatus::ContradictionFound), "{run:?}");
        }
    }

    #[test]
    fn odd_cycle_fixed_points_are_all_white() {
        // Enumerate all 3^10 message states on C5 with q = 2 and keep the
        // fixed points: none carries a color.
        let c5 = Graph::cycle(5);
        let values = [Warning::White, Warning::Color(1), Warning::Color(2)];
        let arcs = c5.n_arcs();
        let mut fixed = 0;
        for code in 0..3usize.pow(arcs as u32) {
            let mut x = code;
            let messages: Vec<Warning> = (0..arcs)
                .map(|_| {
                    let w = values[x % 3];
                    x /= 3;
                    w
                })
                .collect();
            let stable = (0..arcs).all(|a| {
                let f = forbidden_at(&c5, &messages, c5.arc_source(a), Some(c5.arc_target(a)));
                Warning::from_allowed(ColorSet::full(2).difference(f)) == messages[a]
            });
            if stable {
                fixed += 1;
                assert!(messages.iter().all(|&w| w == Warning::White));
            }
        }
        assert_eq!(fixed, 1);
    }

    #[test]
    fn even_cycles_whiten_cleanly() {
        for n in [4, 6, 10] {
            let g = Graph::cycle(n);
            let s = col(2, &(0..n).map(|i| 1 + i % 2).collect::<Vec<_>>());
            let run = whitening_run(&g, &s).unwrap();
            assert_eq!(run.status, WpStatus::Converged);
            assert!(!run.state.has_contradiction());
            // With two colors every message on a proper even cycle stays frozen.
            assert_eq!(node_warnings(&g, &run.state), s.colors.iter().map(|&c| Warning::Color(c)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn whitening_small_cases() {
        let tree = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let w = whitening_from_coloring(&tree, &col(3, &[1, 2, 1, 3, 1])).unwrap();
        assert!(w.iter().all(|&x| x == Warning::White));

        let single = Graph::empty(1);
        assert_eq!(whitening_from_coloring(&single, &col(3, &[2])).unwrap(), vec![Warning::White]);

        let err = whitening_from_coloring(&Graph::path(2), &col(3, &[1, 1]));
        assert_eq!(err, Err(ColoringError::IllegalColoring { conflicts: 1 }));
    }

    #[test]
    fn diamond_whitening() {
        // The proper 3-colorings of the diamond are exactly: 0 and 1 distinct,
        // 2 and 3 both take the remaining color (3! = 6 of them).
        let g = diamond();
        let mut proper = Vec::new();
        for code in 0..81usize {
            let c: Vec<usize> = (0..4).map(|k| 1 + (code / 3usize.pow(k)) % 3).collect();
            if energy(&g, &col(3, &c)).unwrap() == 0 {
                proper.push(c);
            }
        }
        assert_eq!(proper.len(), 6);
        assert!(proper.iter().all(|c| c[2] == c[3] && c[0] != c[1]));
        // By hand: 2 -> 0 sees only 1's color, keeps two options, turns
        // white; then every arc bleaches in turn.
        for c in proper {
            let w = whitening_from_coloring(&g, &col(3, &c)).unwrap();
            assert_eq!(w, vec![Warning::White; 4], "{c:?}");
        }
    }

    #[test]
    fn complete_graph_with_spare_color_bleaches() {
        // In K4 with q = 4 a cavity node sees only two colors, so it keeps two options.
        let g = Graph::complete(4);
        let s = col(4, &[1, 2, 3, 4]);
        let w = whitening_from_coloring(&g, &s).unwrap();
        assert_eq!(w, vec![Warning::White; 4]);
    }

    #[test]
    fn histogram_counts() {
        let w = [Warning::White, Warning::Color(2), Warning::Contradiction, Warning::White];
        assert_eq!(warning_histogram(&w, 3), vec![2, 0, 1, 0, 1]);
    }

    #[test]
    fn color_set_ops() {
        let s: ColorSet = [1, 3].into_iter().collect();
        assert_eq!(s.len(), 2);
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(s.first(), Some(1));
        assert_eq!(ColorSet::full(3).difference(s), ColorSet::single(2));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3]);
    }
}
