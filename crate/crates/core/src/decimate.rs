//! Survey-guided decimation: repeatedly converge survey propagation, freeze
//! the most biased node to its preferred color and simplify, then finish
//! the unbiased remainder with greedy coloring and local search.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::coloring::{energy, ColorSet, Coloring};
use crate::error::SurveyError;
use crate::graph::Graph;
use crate::rng::seeded;
use crate::survey::{check_survey_q, iterate, marginals, SpParams, SpStatus, SurveyState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecimationParams {
    pub sp: SpParams,
    /// Below this maximal bias the surveys carry no information and the
    /// residual graph goes to the local solver.
    pub bias_floor: f64,
    /// Local-search steps per residual node.
    pub local_search_factor: usize,
}

impl Default for DecimationParams {
    fn default() -> Self {
        Self { sp: SpParams::default(), bias_floor: 0.05, local_search_factor: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureStage {
    SurveyUnsat,
    SurveyNonConverged,
    Propagation,
    LocalSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub stage: FailureStage,
    /// Decimation rounds completed (one biased node fixed per round).
    pub rounds: usize,
    /// Nodes whose color was fixed, by decimation or by propagation.
    pub fixed_nodes: usize,
    pub sp_sweeps: usize,
    /// Monochromatic edges left by local search, when that stage failed.
    pub conflicts: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecimationStats {
    pub rounds: usize,
    pub fixed_nodes: usize,
    pub residual_nodes: usize,
    pub sp_sweeps: usize,
    pub local_search_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecimationOutcome {
    Colored { coloring: Coloring, stats: DecimationStats },
    Failed(FailureReport),
}

impl DecimationOutcome {
    pub fn coloring(&self) -> Option<&Coloring> {
        match self {
            DecimationOutcome::Colored { coloring, .. } => Some(coloring),
            DecimationOutcome::Failed(_) => None,
        }
    }
}

struct Decimator<'a> {
    g: &'a Graph,
    state: SurveyState,
    colors: Vec<usize>,
    fixed: usize,
    rounds: usize,
    sp_sweeps: usize,
}

impl Decimator<'_> {
    fn fail(&self, stage: FailureStage, conflicts: usize, message: String) -> DecimationOutcome {
        DecimationOutcome::Failed(FailureReport {
            stage,
            rounds: self.rounds,
            fixed_nodes: self.fixed,
            sp_sweeps: self.sp_sweeps,
            conflicts,
            message,
        })
    }

    /// Fixes `node` to `color` and propagates: neighbors lose the color,
    /// and neighbors left with one color are fixed in turn.
    fn fix(&mut self, node: usize, color: usize) -> Result<(), String> {
        let mut queue = VecDeque::from([(node, color)]);
        while let Some((v, c)) = queue.pop_front() {
            if self.colors[v] != 0 {
                continue;
            }
            self.colors[v] = c;
            self.fixed += 1;
            self.state.remove_node(self.g, v);
            for &u in self.g.neighbors(v) {
                if self.colors[u] != 0 {
                    continue;
                }
                let mut list = self.state.list(u);
                list.remove(c);
                self.state.restrict(u, list);
                match list.len() {
                    0 => return Err(format!("node {u} lost its last color while fixing {v} to {c}")),
                    1 => queue.push_back((u, list.first().unwrap())),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Colors `g` with `q` colors by survey-guided decimation. Returns either a
/// proper coloring (checked to have zero energy) or a failure report.
pub fn decimate_solve(
    g: &Graph,
    q: usize,
    seed: u64,
    params: &DecimationParams,
) -> Result<DecimationOutcome, SurveyError> {
    check_survey_q(q)?;
    let mut rng = seeded(seed);
    let mut dec = Decimator {
        g,
        state: SurveyState::random(g, q, params.sp.damping, &mut rng),
        colors: vec![0; g.n_nodes()],
        fixed: 0,
        rounds: 0,
        sp_sweeps: 0,
    };
    loop {
        let (status, sweeps) = iterate(g, &mut dec.state, &params.sp, &mut rng);
        dec.sp_sweeps += sweeps;
        match status {
            SpStatus::Converged => {}
            SpStatus::Unsat => {
                return Ok(dec.fail(FailureStage::SurveyUnsat, 0, "survey propagation found an all-forbidden node".into()))
            }
            SpStatus::NonConverged => {
                return Ok(dec.fail(
                    FailureStage::SurveyNonConverged,
                    0,
                    format!("no convergence within {} sweeps", params.sp.max_sweeps),
                ))
            }
        }
        let m = marginals(g, &dec.state);
        if m.contradictory > 0 {
            return Ok(dec.fail(FailureStage::SurveyUnsat, 0, format!("{} contradictory marginals", m.contradictory)));
        }
        if m.max_bias < params.bias_floor {
            break;
        }
        let (node, survey) = m
            .surveys
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.as_ref().map(|s| (v, s)))
            .max_by(|a, b| a.1.bias().total_cmp(&b.1.bias()))
            .expect("max_bias above the floor implies a live node");
        let color = survey.argmax_color();
        dec.rounds += 1;
        if let Err(msg) = dec.fix(node, color) {
            return Ok(dec.fail(FailureStage::Propagation, 0, msg));
        }
    }

    let residual: Vec<usize> = (0..g.n_nodes()).filter(|&v| dec.colors[v] == 0).collect();
    let lists: Vec<ColorSet> = (0..g.n_nodes()).map(|v| dec.state.list(v)).collect();
    let steps = params.local_search_factor * residual.len();
    let conflicts = color_residual(g, &residual, &lists, &mut dec.colors, steps, &mut rng);
    if conflicts > 0 {
        return Ok(dec.fail(FailureStage::LocalSearch, conflicts, format!("{conflicts} conflicts after {steps} steps")));
    }
    let coloring = Coloring::new(q, dec.colors.clone()).expect("colors drawn from 1..=q");
    let e = energy(g, &coloring).expect("length matches");
    if e != 0 {
        return Ok(dec.fail(FailureStage::LocalSearch, e, "final coloring is not proper".into()));
    }
    Ok(DecimationOutcome::Colored {
        coloring,
        stats: DecimationStats {
            rounds: dec.rounds,
            fixed_nodes: dec.fixed,
            residual_nodes: residual.len(),
            sp_sweeps: dec.sp_sweeps,
            local_search_steps: steps,
        },
    })
}

/// Smallest-last ordering of `nodes` within the subgraph they induce: the
/// returned order colors each node after at most `degeneracy` of its
/// residual neighbors.
fn smallest_last_order(g: &Graph, nodes: &[usize], active: &[bool]) -> Vec<usize> {
    let mut degree = vec![0usize; g.n_nodes()];
    let mut max_deg = 0;
    for &v in nodes {
        degree[v] = g.neighbors(v).iter().filter(|&&u| active[u]).count();
        max_deg = max_deg.max(degree[v]);
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for &v in nodes {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; g.n_nodes()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut low = 0;
    while order.len() < nodes.len() {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().unwrap();
        // Entries go stale when a degree drops; skip them.
        if removed[v] || degree[v] != low {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if active[u] && !removed[u] {
                degree[u] -= 1;
                buckets[degree[u]].push(u);
                low = low.min(degree[u]);
            }
        }
    }
    order.reverse();
    order
}

/// Colors the `residual` nodes from their lists; already colored nodes are
/// respected through the lists. Returns the number of residual conflicts
/// left after local search.
fn color_residual<R: Rng>(
    g: &Graph,
    residual: &[usize],
    lists: &[ColorSet],
    colors: &mut [usize],
    steps: usize,
    rng: &mut R,
) -> usize {
    let mut active = vec![false; g.n_nodes()];
    for &v in residual {
        active[v] = true;
    }
    let conflicts_with = |colors: &[usize], v: usize, c: usize| {
        g.neighbors(v).iter().filter(|&&u| active[u] && colors[u] == c).count()
    };
    for v in smallest_last_order(g, residual, &active) {
        let list = lists[v];
        colors[v] = list.iter().min_by_key(|&c| conflicts_with(colors, v, c)).expect("nonempty list");
    }
    // conf[v]: residual neighbors sharing v's color. `bad` holds the nodes
    // with conf > 0, `slot` their position in it.
    let mut conf = vec![0usize; g.n_nodes()];
    let mut bad = Vec::new();
    let mut slot = vec![usize::MAX; g.n_nodes()];
    for &v in residual {
        conf[v] = conflicts_with(colors, v, colors[v]);
        if conf[v] > 0 {
            slot[v] = bad.len();
            bad.push(v);
        }
    }
    let mut options = Vec::with_capacity(lists.first().map_or(0, |l| l.len()));
    for _ in 0..steps {
        let Some(&v) = bad.choose(rng) else { break };
        options.clear();
        options.extend(lists[v].iter().map(|c| (c, conflicts_with(colors, v, c))));
        let best = options.iter().map(|o| o.1).min().unwrap();
        // Occasional random move to escape plateaus.
        let new = if rng.random::<f64>() < 0.1 {
            options.choose(rng).unwrap().0
        } else {
            let ties = options.iter().filter(|o| o.1 == best).count();
            options.iter().filter(|o| o.1 == best).nth(rng.random_range(0..ties)).unwrap().0
        };
        let old = colors[v];
        if new == old {
            continue;
        }
        colors[v] = new;
        for &u in g.neighbors(v) {
            if !active[u] {
                continue;
            }
            if colors[u] == old {
                conf[u] -= 1;
                conf[v] -= 1;
            } else if colors[u] == new {
                conf[u] += 1;
                conf[v] += 1;
            }
            track(&mut bad, &mut slot, u, conf[u]);
        }
        track(&mut bad, &mut slot, v, conf[v]);
    }
    residual.iter().map(|&v| conf[v]).sum::<usize>() / 2
}

/// Keeps `bad` equal to the set of nodes with a nonzero conflict count.
fn track(bad: &mut Vec<usize>, slot: &mut [usize], v: usize, conflicts: usize) {
    if conflicts > 0 && slot[v] == usize::MAX {
        slot[v] = bad.len();
        bad.push(v);
    } else if conflicts == 0 && slot[v] != usize::MAX {
        let k = slot[v];
        bad.swap_remove(k);
        if let Some(&moved) = bad.get(k) {
            slot[moved] = k;
        }
        slot[v] = usize::MAX;
    }
}
