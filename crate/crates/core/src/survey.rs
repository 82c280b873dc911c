//! Survey propagation for graph coloring.
//!
//! A survey is a probability vector over warning values `{white, 1..q}`.
//! Combining independent incoming surveys amounts to computing the law of
//! the forbidden-color set they induce; that law lives on the `2^q` subsets
//! of the colors and is built one incoming survey at a time.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::coloring::{check_q, ColorSet, Warning};
use crate::error::SurveyError;
use crate::graph::Graph;
use crate::rng::{seeded, Rng as SeededRng};

/// Normalization tolerance of a valid survey.
pub const NORM_TOL: f64 = 1e-9;
/// Largest `q` for surveys; the combiner keeps `2^q` subset weights.
pub const MAX_SURVEY_COLORS: usize = 12;
/// Remaining mass below which a combination counts as all-forbidden.
const ALL_FORBIDDEN_EPS: f64 = 1e-12;

/// Probability vector over `{white, 1..q}`; index 0 is white.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Survey {
    probs: Vec<f64>,
}

impl Survey {
    pub fn new(probs: Vec<f64>) -> Result<Self, SurveyError> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    pub fn white(q: usize) -> Self {
        let mut probs = vec![0.0; q + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    pub fn pure(q: usize, color: usize) -> Self {
        let mut probs = vec![0.0; q + 1];
        probs[color] = 1.0;
        Self { probs }
    }

    /// Point mass on a single warning; `None` for a contradiction.
    pub fn from_warning(q: usize, w: Warning) -> Option<Self> {
        match w {
            Warning::White => Some(Self::white(q)),
            Warning::Color(c) => Some(Self::pure(q, c)),
            Warning::Contradiction => None,
        }
    }

    pub fn q(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn white_mass(&self) -> f64 {
        self.probs[0]
    }

    /// `1 - P(white)`: how strongly the message carries a color.
    pub fn bias(&self) -> f64 {
        1.0 - self.probs[0]
    }

    /// Most likely non-white color.
    pub fn argmax_color(&self) -> usize {
        let mut best = 1;
        for c in 2..self.probs.len() {
            if self.probs[c] > self.probs[best] {
                best = c;
            }
        }
        best
    }

    pub fn relabel(&self, perm: &[usize]) -> Survey {
        let mut probs = vec![0.0; self.probs.len()];
        probs[0] = self.probs[0];
        for c in 1..self.probs.len() {
            probs[perm[c]] = self.probs[c];
        }
        Survey { probs }
    }
}

pub(crate) fn validate_probs(probs: &[f64]) -> Result<(), SurveyError> {
    if probs.len() < 3 {
        return Err(SurveyError::InvalidParameter("a survey needs at least two colors".into()));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(SurveyError::InvalidParameter(format!("negative or non-finite entry in {probs:?}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(SurveyError::InvalidParameter(format!("survey sums to {total}")));
    }
    Ok(())
}

pub fn check_survey_q(q: usize) -> Result<(), SurveyError> {
    check_q(q).map_err(|e| SurveyError::InvalidParameter(e.to_string()))?;
    if q > MAX_SURVEY_COLORS {
        return Err(SurveyError::InvalidParameter(format!("surveys support q <= {MAX_SURVEY_COLORS}")));
    }
    Ok(())
}

/// Reusable workspace for combining surveys of a fixed `q`.
#[derive(Debug, Clone)]
pub struct Combiner {
    q: usize,
    subsets: Vec<f64>,
}

impl Combiner {
    pub fn new(q: usize) -> Self {
        assert!((2..=MAX_SURVEY_COLORS).contains(&q), "unsupported q = {q}");
        Self { q, subsets: vec![0.0; 1 << q] }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Starts a new combination: nothing forbidden yet.
    pub fn reset(&mut self) {
        self.subsets.fill(0.0);
        self.subsets[0] = 1.0;
    }

    /// Folds in one incoming survey `probs` (length `q + 1`).
    pub fn push(&mut self, probs: &[f64]) {
        let q = self.q;
        // Descending order: subset G only reads G itself and G minus one
        // bit, which are not yet overwritten.
        for g in (0..self.subsets.len()).rev() {
            let mut stay = probs[0];
            let mut acc = 0.0;
            let mut bits = g;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let p = probs[b + 1];
                stay += p;
                acc += self.subsets[g & !(1 << b)] * p;
            }
            self.subsets[g] = self.subsets[g] * stay + acc;
        }
        debug_assert_eq!(q + 1, probs.len());
    }

    /// Maps the forbidden-set law through the allowed-list rule, restricted
    /// to colors in `list`, writing the renormalized survey into `out`.
    /// Returns the contradiction mass, or `AllForbidden` when nothing else
    /// remains (then `out` is left untouched).
    pub fn finish(&self, list: ColorSet, out: &mut [f64]) -> Result<f64, SurveyError> {
        let mut white = 0.0;
        let mut colors = [0.0f64; MAX_SURVEY_COLORS + 1];
        let mut contradiction = 0.0;
        let list_bits = list.bits() as usize;
        for (f, &w) in self.subsets.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let allowed = list_bits & !f;
            match allowed.count_ones() {
                0 => contradiction += w,
                1 => colors[allowed.trailing_zeros() as usize + 1] += w,
                _ => white += w,
            }
        }
        let kept = white + colors[1..=self.q].iter().sum::<f64>();
        if kept <= ALL_FORBIDDEN_EPS {
            return Err(SurveyError::AllForbidden);
        }
        out[0] = white / kept;
        for c in 1..=self.q {
            out[c] = colors[c] / kept;
        }
        Ok(contradiction / (kept + contradiction))
    }

    /// Probability that the combined warnings leave at least one color of
    /// `list` free.
    pub fn free_probability(&self, list: ColorSet) -> f64 {
        let list_bits = list.bits() as usize;
        self.subsets
            .iter()
            .enumerate()
            .filter(|&(f, _)| list_bits & !f != 0)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// Law of the combined warning given independent incoming surveys, with
/// contradictory combinations removed and the rest renormalized. Returns
/// the survey and the removed contradiction mass.
pub fn combine_distribution(incoming: &[Survey], q: usize) -> Result<(Survey, f64), SurveyError> {
    check_survey_q(q)?;
    if let Some(bad) = incoming.iter().find(|s| s.q() != q) {
        return Err(SurveyError::InvalidParameter(format!("survey over {} colors, expected {q}", bad.q())));
    }
    let mut combiner = Combiner::new(q);
    combiner.reset();
    for s in incoming {
        combiner.push(&s.probs);
    }
    let mut out = vec![0.0; q + 1];
    let mass = combiner.finish(ColorSet::full(q), &mut out)?;
    Ok((Survey { probs: out }, mass))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpParams {
    /// Weight kept on the previous message at each update.
    pub damping: f64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SpParams {
    fn default() -> Self {
        Self { damping: 0.2, tol: 1e-6, max_sweeps: 2000 }
    }
}

impl SpParams {
    fn validate(&self) -> Result<(), SurveyError> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(SurveyError::InvalidParameter(format!("damping must be in [0, 1), got {}", self.damping)));
        }
        if !(self.tol > 0.0) {
            return Err(SurveyError::InvalidParameter(format!("tolerance must be > 0, got {}", self.tol)));
        }
        if self.max_sweeps == 0 {
            return Err(SurveyError::InvalidParameter("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// One survey per arc, stored flat: arc `a` owns `messages[a*(q+1)..(a+1)*(q+1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyState {
    pub q: usize,
    pub damping: f64,
    messages: Vec<f64>,
    /// Allowed colors per node; all colors unless restricted by decimation.
    lists: Vec<ColorSet>,
    /// Nodes removed from the instance; their outgoing arcs carry white.
    removed: Vec<bool>,
}

impl SurveyState {
    /// Every arc carries an independent random survey.
    pub fn random(g: &Graph, q: usize, damping: f64, rng: &mut SeededRng) -> Self {
        let width = q + 1;
        let mut messages = vec![0.0; g.n_arcs() * width];
        for chunk in messages.chunks_exact_mut(width) {
            for p in chunk.iter_mut() {
                *p = rng.random::<f64>();
            }
            let total: f64 = chunk.iter().sum();
            for p in chunk.iter_mut() {
                *p /= total;
            }
        }
        Self::with_messages(g, q, damping, messages)
    }

    pub fn white(g: &Graph, q: usize, damping: f64) -> Self {
        let mut messages = vec![0.0; g.n_arcs() * (q + 1)];
        for chunk in messages.chunks_exact_mut(q + 1) {
            chunk[0] = 1.0;
        }
        Self::with_messages(g, q, damping, messages)
    }

    /// State with the given survey on every arc (indexed by arc id).
    pub fn from_surveys(g: &Graph, q: usize, damping: f64, surveys: &[Survey]) -> Result<Self, SurveyError> {
        if surveys.len() != g.n_arcs() {
            return Err(SurveyError::InvalidParameter(format!(
                "{} surveys for {} arcs",
                surveys.len(),
                g.n_arcs()
            )));
        }
        if surveys.iter().any(|s| s.q() != q) {
            return Err(SurveyError::InvalidParameter("survey width does not match q".into()));
        }
        let messages = surveys.iter().flat_map(|s| s.probs.iter().copied()).collect();
        Ok(Self::with_messages(g, q, damping, messages))
    }

    fn with_messages(g: &Graph, q: usize, damping: f64, messages: Vec<f64>) -> Self {
        Self {
            q,
            damping,
            messages,
            lists: vec![ColorSet::full(q); g.n_nodes()],
            removed: vec![false; g.n_nodes()],
        }
    }

    pub fn message(&self, arc: usize) -> &[f64] {
        let w = self.q + 1;
        &self.messages[arc * w..(arc + 1) * w]
    }

    pub fn survey(&self, arc: usize) -> Survey {
        Survey { probs: self.message(arc).to_vec() }
    }

    fn set_message(&mut self, arc: usize, probs: &[f64]) {
        let w = self.q + 1;
        self.messages[arc * w..(arc + 1) * w].copy_from_slice(probs);
    }

    pub fn list(&self, node: usize) -> ColorSet {
        self.lists[node]
    }

    pub fn is_removed(&self, node: usize) -> bool {
        self.removed[node]
    }

    pub(crate) fn restrict(&mut self, node: usize, list: ColorSet) {
        self.lists[node] = list;
    }

    /// Drops `node` from the instance: its messages become white and stay so.
    pub(crate) fn remove_node(&mut self, g: &Graph, node: usize) {
        self.removed[node] = true;
        let mut white = vec![0.0; self.q + 1];
        white[0] = 1.0;
        for arc in g.out_arcs(node) {
            self.set_message(arc, &white);
        }
    }

    /// True when every stored message is a valid survey.
    pub fn is_valid(&self) -> bool {
        self.messages.chunks_exact(self.q + 1).all(|c| validate_probs(c).is_ok())
    }
}

fn combine_into(
    g: &Graph,
    state: &SurveyState,
    combiner: &mut Combiner,
    node: usize,
    exclude: Option<usize>,
    out: &mut [f64],
) -> Result<f64, SurveyError> {
    combiner.reset();
    for arc in g.out_arcs(node) {
        let k = g.arc_target(arc);
        if Some(k) == exclude || state.removed[k] {
            continue;
        }
        combiner.push(state.message(g.reverse_arc(arc)));
    }
    combiner.finish(state.lists[node], out)
}

/// Damped update of the survey on `arc` (`i -> l`) from the surveys
/// flowing into `i` from its other neighbors. Does not modify `state`.
pub fn sp_update_message(g: &Graph, state: &SurveyState, arc: usize) -> Result<Survey, SurveyError> {
    let mut combiner = Combiner::new(state.q);
    let mut fresh = vec![0.0; state.q + 1];
    combine_into(g, state, &mut combiner, g.arc_source(arc), Some(g.arc_target(arc)), &mut fresh)?;
    let old = state.message(arc);
    let probs = fresh
        .iter()
        .zip(old)
        .map(|(new, old)| (1.0 - state.damping) * new + state.damping * old)
        .collect();
    Ok(Survey { probs })
}

/// Node marginal: all incoming surveys of `node` combined.
pub fn node_marginal(g: &Graph, state: &SurveyState, node: usize) -> Result<Survey, SurveyError> {
    let mut combiner = Combiner::new(state.q);
    let mut out = vec![0.0; state.q + 1];
    combine_into(g, state, &mut combiner, node, None, &mut out)?;
    Ok(Survey { probs: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpStatus {
    Converged,
    NonConverged,
    /// Some message had every incoming combination forbid all colors.
    Unsat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpRun {
    pub state: SurveyState,
    pub status: SpStatus,
    pub sweeps: usize,
    pub max_bias: f64,
}

/// Runs survey propagation from random messages until the largest change
/// in a sweep drops below `params.tol`.
pub fn sp_fixed_point(g: &Graph, q: usize, seed: u64, params: &SpParams) -> Result<SpRun, SurveyError> {
    check_survey_q(q)?;
    params.validate()?;
    let mut rng = seeded(seed);
    let mut state = SurveyState::random(g, q, params.damping, &mut rng);
    let (status, sweeps) = iterate(g, &mut state, params, &mut rng);
    let max_bias = marginals(g, &state).max_bias;
    Ok(SpRun { state, status, sweeps, max_bias })
}

/// Continues asynchronous sweeps on an existing state. Returns the status
/// and the number of sweeps done.
pub(crate) fn iterate(g: &Graph, state: &mut SurveyState, params: &SpParams, rng: &mut SeededRng) -> (SpStatus, usize) {
    let q = state.q;
    let mut combiner = Combiner::new(q);
    let mut fresh = vec![0.0; q + 1];
    let mut order: Vec<usize> = (0..g.n_arcs()).filter(|&a| !state.removed[g.arc_source(a)]).collect();
    let d = params.damping;
    for sweep in 1..=params.max_sweeps {
        order.shuffle(rng);
        let mut max_change = 0.0f64;
        for &arc in &order {
            let from = g.arc_source(arc);
            let to = g.arc_target(arc);
            if state.removed[to] {
                continue;
            }
            if combine_into(g, state, &mut combiner, from, Some(to), &mut fresh).is_err() {
                return (SpStatus::Unsat, sweep);
            }
            let w = q + 1;
            let slot = &mut state.messages[arc * w..(arc + 1) * w];
            for (old, &new) in slot.iter_mut().zip(&fresh) {
                let next = (1.0 - d) * new + d * *old;
                max_change = max_change.max((next - *old).abs());
                *old = next;
            }
        }
        if max_change < params.tol {
            return (SpStatus::Converged, sweep);
        }
    }
    (SpStatus::NonConverged, params.max_sweeps)
}

/// Node marginals of a state with summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    /// `None` for removed nodes and for nodes where everything is forbidden.
    pub surveys: Vec<Option<Survey>>,
    pub max_bias: f64,
    pub contradictory: usize,
}

pub fn marginals(g: &Graph, state: &SurveyState) -> Marginals {
    let mut combiner = Combiner::new(state.q);
    let mut out = vec![0.0; state.q + 1];
    let mut max_bias = 0.0f64;
    let mut contradictory = 0;
    let surveys = (0..g.n_nodes())
        .map(|v| {
            if state.removed[v] {
                return None;
            }
            match combine_into(g, state, &mut combiner, v, None, &mut out) {
                Ok(_) => {
                    max_bias = max_bias.max(1.0 - out[0]);
                    Some(Survey { probs: out.clone() })
                }
                Err(_) => {
                    contradictory += 1;
                    None
                }
            }
        })
        .collect();
    Marginals { surveys, max_bias, contradictory }
}

/// Histogram of node biases in `bins` equal-width bins over `[0, 1]`.
pub fn bias_histogram(m: &Marginals, bins: usize) -> Vec<usize> {
    let mut hist = vec![0; bins];
    for s in m.surveys.iter().flatten() {
        let b = (s.bias() * bins as f64) as usize;
        hist[b.min(bins - 1)] += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::combine_warnings;

    fn s(p: &[f64]) -> Survey {
        Survey::new(p.to_vec()).unwrap()
    }

    #[test]
    fn survey_validation() {
        assert!(Survey::new(vec![0.5, 0.5]).is_err());
        assert!(Survey::new(vec![0.5, 0.6, 0.0]).is_err());
        assert!(Survey::new(vec![1.5, -0.5, 0.0]).is_err());
        assert!(Survey::new(vec![0.2, 0.3, 0.5]).is_ok());
    }

    #[test]
    fn empty_combination_is_white() {
        let (out, mass) = combine_distribution(&[], 3).unwrap();
        assert_eq!(out, Survey::white(3));
        assert_eq!(mass, 0.0);
    }

    #[test]
    fn two_equal_colors_leave_two_free() {
        let (out, mass) = combine_distribution(&[Survey::pure(3, 1), Survey::pure(3, 1)], 3).unwrap();
        assert_eq!(out, Survey::white(3));
        assert_eq!(mass, 0.0);
    }

    #[test]
    fn two_distinct_colors_force_the_third() {
        let (out, mass) = combine_distribution(&[Survey::pure(3, 1), Survey::pure(3, 2)], 3).unwrap();
        assert_eq!(out, Survey::pure(3, 3));
        assert_eq!(mass, 0.0);
    }

    #[test]
    fn all_colors_forbidden_is_an_error() {
        let inc = [Survey::pure(3, 1), Survey::pure(3, 2), Survey::pure(3, 3)];
        assert_eq!(combine_distribution(&inc, 3), Err(SurveyError::AllForbidden));
    }

    #[test]
    fn contradiction_mass_is_reported() {
        // Three neighbors, each half white, half a distinct color: only the
        // all-colored tuple (1/8) is contradictory.
        let inc = [s(&[0.5, 0.5, 0.0, 0.0]), s(&[0.5, 0.0, 0.5, 0.0]), s(&[0.5, 0.0, 0.0, 0.5])];
        let (out, mass) = combine_distribution(&inc, 3).unwrap();
        assert!((mass - 0.125).abs() < 1e-15);
        // Forced colors come from tuples with exactly the two others colored.
        for c in 1..=3 {
            assert!((out.probs()[c] - (0.125 / 0.875)).abs() < 1e-15);
        }
        assert!((out.white_mass() - 0.5 / 0.875).abs() < 1e-15);
    }

    #[test]
    fn pure_inputs_reduce_to_warning_combination() {
        let values = [Warning::White, Warning::Color(1), Warning::Color(2), Warning::Color(3)];
        for a in values {
            for b in values {
                for c in values {
                    let ws = [a, b, c];
                    let surveys: Vec<_> = ws.iter().map(|&w| Survey::from_warning(3, w).unwrap()).collect();
                    match combine_warnings(&ws, 3) {
                        Warning::Contradiction => {
                            assert_eq!(combine_distribution(&surveys, 3), Err(SurveyError::AllForbidden))
                        }
                        w => assert_eq!(combine_distribution(&surveys, 3).unwrap().0, Survey::from_warning(3, w).unwrap()),
                    }
                }
            }
        }
    }

    #[test]
    fn leaf_sends_white() {
        let g = Graph::path(2);
        let mut rng = seeded(1);
        let state = SurveyState::random(&g, 3, 0.0, &mut rng);
        let arc = g.arc_between(0, 1).unwrap();
        assert_eq!(sp_update_message(&g, &state, arc).unwrap(), Survey::white(3));
    }

    #[test]
    fn update_forces_third_color() {
        // Star: node 0 with neighbors 1, 2, 3. Surveys 1->0 = color 1, 2->0 = color 2.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let surveys: Vec<Survey> = (0..g.n_arcs())
            .map(|a| match (g.arc_source(a), g.arc_target(a)) {
                (1, 0) => Survey::pure(3, 1),
                (2, 0) => Survey::pure(3, 2),
                _ => Survey::white(3),
            })
            .collect();
        let state = SurveyState::from_surveys(&g, 3, 0.0, &surveys).unwrap();
        let out = sp_update_message(&g, &state, g.arc_between(0, 3).unwrap()).unwrap();
        assert_eq!(out, Survey::pure(3, 3));
        assert_eq!(node_marginal(&g, &state, 3).unwrap(), Survey::white(3));
        // Node 0's marginal sees colors 1, 2 and white: forced to 3.
        assert_eq!(node_marginal(&g, &state, 0).unwrap(), Survey::pure(3, 3));
    }

    #[test]
    fn damping_blends_old_and_new() {
        let g = Graph::path(2);
        let surveys = vec![Survey::pure(3, 2); 2];
        let state = SurveyState::from_surveys(&g, 3, 0.25, &surveys).unwrap();
        let out = sp_update_message(&g, &state, 0).unwrap();
        assert_eq!(out.probs(), &[0.75, 0.0, 0.25, 0.0]);
    }

    #[test]
    fn isolated_node_marginal_is_white() {
        let g = Graph::empty(3);
        let state = SurveyState::white(&g, 3, 0.2);
        assert_eq!(node_marginal(&g, &state, 1).unwrap(), Survey::white(3));
    }

    #[test]
    fn forest_converges_to_white() {
        let g = Graph::from_edges(8, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6), (5, 7)]).unwrap();
        let run = sp_fixed_point(&g, 3, 4, &SpParams::default()).unwrap();
        assert_eq!(run.status, SpStatus::Converged);
        assert!(run.max_bias < 1e-6);
    }

    #[test]
    fn params_validated() {
        let g = Graph::path(3);
        let bad = SpParams { damping: 1.0, ..SpParams::default() };
        assert!(sp_fixed_point(&g, 3, 0, &bad).is_err());
        assert!(sp_fixed_point(&g, 1, 0, &SpParams::default()).is_err());
    }

    #[test]
    fn free_probability_matches_complement_of_contradiction() {
        let inc = [s(&[0.5, 0.5, 0.0, 0.0]), s(&[0.5, 0.0, 0.5, 0.0]), s(&[0.5, 0.0, 0.0, 0.5])];
        let mut c = Combiner::new(3);
        c.reset();
        for x in &inc {
            c.push(x.probs());
        }
        assert!((c.free_probability(ColorSet::full(3)) - 0.875).abs() < 1e-15);
    }
}
