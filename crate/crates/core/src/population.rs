//! Population dynamics for the distribution of surveys on Poisson random
//! graphs, and the complexity Σ(z) computed from it.
//!
//! A population of `S` surveys represents the law of the survey on a random
//! arc. One replacement step draws a degree `n ~ Poisson(z)`, combines `n`
//! random members and overwrites a random member with the result. On a
//! Poisson graph the excess degree is again `Poisson(z)`, so full node
//! marginals are built by the same step.

use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::ColorSet;
use crate::error::SurveyError;
use crate::rng::{substream, Rng as SeededRng};
use crate::survey::{check_survey_q, Combiner, Survey};

/// Smallest population size accepted.
pub const MIN_POPULATION: usize = 1000;
/// Consecutive all-forbidden draws tolerated before declaring collapse.
pub const MAX_REDRAWS: usize = 1000;

/// How members are set up before the first sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationInit {
    /// Every member pure white: the trivial fixed point.
    White,
    /// Every member fully colored with equal weight on each color.
    Symmetric,
    /// Every member a point mass on a uniformly random color.
    PureColors,
}

#[derive(Debug, Clone)]
pub struct Population {
    q: usize,
    z: f64,
    members: Vec<f64>,
    degree: Option<Poisson<f64>>,
    rng: SeededRng,
    combiner: Combiner,
    scratch: Vec<f64>,
}

impl Population {
    pub fn new(q: usize, z: f64, size: usize, init: PopulationInit, mut rng: SeededRng) -> Result<Self, SurveyError> {
        check_survey_q(q)?;
        if !(z >= 0.0 && z.is_finite()) {
            return Err(SurveyError::InvalidParameter(format!("connectivity must be >= 0, got {z}")));
        }
        if size < MIN_POPULATION {
            return Err(SurveyError::InvalidParameter(format!(
                "population size must be >= {MIN_POPULATION}, got {size}"
            )));
        }
        let w = q + 1;
        let mut members = vec![0.0; size * w];
        for m in members.chunks_exact_mut(w) {
            match init {
                PopulationInit::White => m[0] = 1.0,
                PopulationInit::Symmetric => m[1..].fill(1.0 / q as f64),
                PopulationInit::PureColors => m[rng.random_range(1..=q)] = 1.0,
            }
        }
        let degree = (z > 0.0).then(|| Poisson::new(z).expect("positive finite mean"));
        Ok(Self { q, z, members, degree, rng, combiner: Combiner::new(q), scratch: vec![0.0; w] })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn size(&self) -> usize {
        self.members.len() / (self.q + 1)
    }

    pub fn member(&self, k: usize) -> &[f64] {
        let w = self.q + 1;
        &self.members[k * w..(k + 1) * w]
    }

    pub fn surveys(&self) -> impl Iterator<Item = Survey> + '_ {
        self.members.chunks_exact(self.q + 1).map(|m| Survey::new(m.to_vec()).expect("members stay normalized"))
    }

    /// Mean of `1 - P(white)` over members.
    pub fn mean_bias(&self) -> f64 {
        let w = self.q + 1;
        let total: f64 = self.members.chunks_exact(w).map(|m| 1.0 - m[0]).sum();
        total / self.size() as f64
    }

    /// Fraction of members whose white mass is below `threshold`.
    pub fn fraction_colored(&self, threshold: f64) -> f64 {
        let w = self.q + 1;
        self.members.chunks_exact(w).filter(|m| m[0] < threshold).count() as f64 / self.size() as f64
    }

    /// Mean probability of each color over members, index 0 white.
    pub fn mean_survey(&self) -> Vec<f64> {
        let w = self.q + 1;
        let mut acc = vec![0.0; w];
        for m in self.members.chunks_exact(w) {
            for (a, p) in acc.iter_mut().zip(m) {
                *a += p;
            }
        }
        acc.iter().map(|a| a / self.size() as f64).collect()
    }

    /// Exactly white: every member has unit white mass.
    pub fn is_trivial(&self) -> bool {
        self.members.chunks_exact(self.q + 1).all(|m| m[0] == 1.0)
    }

    fn draw_degree(&mut self) -> usize {
        match &self.degree {
            Some(d) => d.sample(&mut self.rng) as usize,
            None => 0,
        }
    }

    /// Combines `Poisson(z)` random members into `self.scratch`, redrawing
    /// when every color is forbidden.
    fn draw_combined(&mut self) -> Result<(), SurveyError> {
        let size = self.size();
        let w = self.q + 1;
        for _ in 0..MAX_REDRAWS {
            let n = self.draw_degree();
            self.combiner.reset();
            for _ in 0..n {
                let k = self.rng.random_range(0..size);
                self.combiner.push(&self.members[k * w..(k + 1) * w]);
            }
            if self.combiner.finish(ColorSet::full(self.q), &mut self.scratch).is_ok() {
                return Ok(());
            }
        }
        Err(SurveyError::PopulationCollapse { retries: MAX_REDRAWS })
    }

    /// `S` replacement steps.
    pub fn sweep(&mut self) -> Result<(), SurveyError> {
        let size = self.size();
        let w = self.q + 1;
        for _ in 0..size {
            self.draw_combined()?;
            let target = self.rng.random_range(0..size);
            self.members[target * w..(target + 1) * w].copy_from_slice(&self.scratch);
        }
        Ok(())
    }

    /// A fresh full node marginal (same law as a member on Poisson graphs).
    pub fn sample_marginal(&mut self) -> Result<Vec<f64>, SurveyError> {
        self.draw_combined()?;
        Ok(self.scratch.clone())
    }
}

/// Monte Carlo mean of a log term, with the samples whose argument was not
/// positive left out and counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub rejected: usize,
    pub total: usize,
}

impl LogEstimate {
    pub fn reject_fraction(&self) -> f64 {
        self.rejected as f64 / self.total.max(1) as f64
    }
}

#[derive(Default)]
struct Accumulator {
    n: usize,
    sum: f64,
    sum_sq: f64,
    rejected: usize,
}

impl Accumulator {
    fn push_log(&mut self, arg: f64) {
        if arg > 0.0 {
            let x = arg.ln();
            self.n += 1;
            self.sum += x;
            self.sum_sq += x * x;
        } else {
            self.rejected += 1;
        }
    }

    fn finish(self) -> Result<LogEstimate, SurveyError> {
        let total = self.n + self.rejected;
        if total == 0 || 2 * self.rejected > total {
            return Err(SurveyError::Unstable { rejected: self.rejected, total });
        }
        let mean = self.sum / self.n as f64;
        let var = if self.n > 1 {
            ((self.sum_sq - self.n as f64 * mean * mean) / (self.n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Ok(LogEstimate { mean, stderr: (var / self.n as f64).sqrt(), rejected: self.rejected, total })
    }
}

/// `E[ln(1 - Σ_c ω_i(c) ω_k(c))]` over pairs of independent full marginals.
pub fn delta_sigma_edge(p: &mut Population, pair_samples: usize) -> Result<LogEstimate, SurveyError> {
    let mut acc = Accumulator::default();
    for _ in 0..pair_samples {
        let a = p.sample_marginal()?;
        let b = p.sample_marginal()?;
        acc.push_log(edge_argument(&a, &b));
    }
    acc.finish()
}

/// `1 - Σ_{c >= 1} a(c) b(c)`: probability two independent warnings do not
/// force the same color.
pub fn edge_argument(a: &[f64], b: &[f64]) -> f64 {
    1.0 - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

/// Probability that independent warnings with laws `neighbors` leave at
/// least one of the `q` colors uncovered, by inclusion-exclusion over the
/// nonempty color subsets.
pub fn uncovered_probability(neighbors: &[Vec<f64>], q: usize) -> f64 {
    let mut total = 0.0;
    for subset in 1u32..(1 << q) {
        let mut prod = 1.0;
        for w in neighbors {
            let hit: f64 = (0..q).filter(|b| subset & (1 << b) != 0).map(|b| w[b + 1]).sum();
            prod *= 1.0 - hit;
        }
        if subset.count_ones() % 2 == 1 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// `E[ln P(colors not all covered)]` for a new node joined to
/// `Poisson(z)` nodes with independent full marginals.
pub fn delta_sigma_site(p: &mut Population, site_samples: usize) -> Result<LogEstimate, SurveyError> {
    let mut acc = Accumulator::default();
    let mut neighbors = Vec::new();
    for _ in 0..site_samples {
        let k = p.draw_degree();
        neighbors.clear();
        for _ in 0..k {
            neighbors.push(p.sample_marginal()?);
        }
        let free = uncovered_probability(&neighbors, p.q());
        // Round-off can leave a tiny negative residue for certain coverage.
        acc.push_log(if free < 1e-14 { 0.0 } else { free });
    }
    acc.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityParams {
    pub population: usize,
    pub burn_in: usize,
    pub samples: usize,
    /// Mean non-white mass separating the trivial and nontrivial branches.
    pub trivial_floor: f64,
    pub init: PopulationInit,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        Self {
            population: 100_000,
            burn_in: 300,
            samples: 100_000,
            trivial_floor: 1e-3,
            init: PopulationInit::Symmetric,
        }
    }
}

/// One point of the complexity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityPoint {
    pub z: f64,
    pub sigma: f64,
    pub stderr: f64,
    pub nontrivial: bool,
    pub reject_frac: f64,
    pub mean_bias: f64,
    pub site: Option<LogEstimate>,
    pub edge: Option<LogEstimate>,
}

impl ComplexityPoint {
    fn trivial(z: f64, mean_bias: f64) -> Self {
        Self { z, sigma: 0.0, stderr: 0.0, nontrivial: false, reject_frac: 0.0, mean_bias, site: None, edge: None }
    }
}

/// Equilibrates a population at `(z, q)` and returns its mean bias, or
/// `None` if it collapsed.
pub fn equilibrate(z: f64, q: usize, params: &ComplexityParams, rng: SeededRng) -> Result<Option<Population>, SurveyError> {
    let mut pop = Population::new(q, z, params.population, params.init, rng)?;
    for _ in 0..params.burn_in {
        match pop.sweep() {
            Ok(()) => {}
            Err(SurveyError::PopulationCollapse { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
        if pop.is_trivial() {
            break;
        }
    }
    Ok(Some(pop))
}

/// `Σ(z) = ΔΣ_site - (z/2) ΔΣ_edge` from an equilibrated population. Below
/// the nontrivial branch Σ is reported as 0 with the flag unset.
pub fn complexity(z: f64, q: usize, params: &ComplexityParams, rng: SeededRng) -> Result<ComplexityPoint, SurveyError> {
    let Some(mut pop) = equilibrate(z, q, params, rng)? else {
        return Ok(ComplexityPoint::trivial(z, 0.0));
    };
    let mean_bias = pop.mean_bias();
    if mean_bias <= params.trivial_floor {
        return Ok(ComplexityPoint::trivial(z, mean_bias));
    }
    let site = delta_sigma_site(&mut pop, params.samples)?;
    let edge = delta_sigma_edge(&mut pop, params.samples)?;
    let half = 0.5 * z;
    let rejected = site.rejected + edge.rejected;
    let total = site.total + edge.total;
    Ok(ComplexityPoint {
        z,
        sigma: site.mean - half * edge.mean,
        stderr: (site.stderr.powi(2) + (half * edge.stderr).powi(2)).sqrt(),
        nontrivial: true,
        reject_frac: rejected as f64 / total as f64,
        mean_bias,
        site: Some(site),
        edge: Some(edge),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Onset of the nontrivial branch.
    pub z_d: Option<Threshold>,
    /// Zero of Σ on the nontrivial branch.
    pub z_c: Option<Threshold>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityCurve {
    pub q: usize,
    pub points: Vec<ComplexityPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanParams {
    pub complexity: ComplexityParams,
    /// Bisection steps refining the onset between grid points.
    pub onset_bisections: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self { complexity: ComplexityParams::default(), onset_bisections: 3 }
    }
}

/// Complexity on every grid point and the two thresholds. Grid point `k`
/// runs on random stream `k` of `seed`; bisection probes use streams past
/// the grid.
pub fn threshold_scan(
    q: usize,
    z_grid: &[f64],
    params: &ScanParams,
    seed: u64,
) -> Result<(ComplexityCurve, Thresholds), SurveyError> {
    if z_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SurveyError::InvalidParameter("z grid must be strictly increasing".into()));
    }
    let points = z_grid
        .par_iter()
        .enumerate()
        .map(|(k, &z)| complexity(z, q, &params.complexity, substream(seed, k as u64)))
        .collect::<Result<Vec<_>, _>>()?;

    let z_d = match points.iter().position(|p| p.nontrivial) {
        None => None,
        Some(0) => {
            let spacing = z_grid.get(1).map_or(0.0, |z| z - z_grid[0]);
            Some(Threshold { value: z_grid[0], uncertainty: spacing })
        }
        Some(k) => {
            let (mut lo, mut hi) = (z_grid[k - 1], z_grid[k]);
            for step in 0..params.onset_bisections {
                let mid = 0.5 * (lo + hi);
                let stream = (z_grid.len() + step) as u64;
                let alive = equilibrate(mid, q, &params.complexity, substream(seed, stream))?
                    .is_some_and(|p| p.mean_bias() > params.complexity.trivial_floor);
                if alive {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(Threshold { value: 0.5 * (lo + hi), uncertainty: 0.5 * (hi - lo) })
        }
    };

    let branch: Vec<&ComplexityPoint> = points.iter().filter(|p| p.nontrivial).collect();
    let z_c = branch.windows(2).find(|w| w[0].sigma > 0.0 && w[1].sigma <= 0.0).map(|w| {
        let (a, b) = (w[0], w[1]);
        let slope = (b.sigma - a.sigma) / (b.z - a.z);
        let value = a.z - a.sigma / slope;
        let stat = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt() / slope.abs();
        Threshold { value, uncertainty: stat }
    });

    Ok((ComplexityCurve { q, points }, Thresholds { z_d, z_c }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn white_population_is_absorbing() {
        for z in [0.5, 3.0, 4.5, 8.0] {
            let mut p = Population::new(3, z, 2000, PopulationInit::White, seeded(1)).unwrap();
            for _ in 0..5 {
                p.sweep().unwrap();
            }
            assert!(p.is_trivial());
        }
    }

    #[test]
    fn too_small_population_rejected() {
        assert!(Population::new(3, 4.0, 10, PopulationInit::White, seeded(0)).is_err());
        assert!(Population::new(3, -1.0, 5000, PopulationInit::White, seeded(0)).is_err());
    }

    #[test]
    fn pure_colors_stay_pure() {
        let mut p = Population::new(3, 4.6, 2000, PopulationInit::PureColors, seeded(4)).unwrap();
        for _ in 0..5 {
            p.sweep().unwrap();
        }
        for m in p.surveys() {
            assert!(m.probs().iter().all(|&x| x == 0.0 || x == 1.0), "{m:?}");
        }
    }

    #[test]
    fn all_white_terms_vanish() {
        let mut p = Population::new(3, 4.5, 2000, PopulationInit::White, seeded(2)).unwrap();
        let e = delta_sigma_edge(&mut p, 500).unwrap();
        let s = delta_sigma_site(&mut p, 500).unwrap();
        assert_eq!((e.mean, e.rejected), (0.0, 0));
        assert_eq!((s.mean, s.rejected), (0.0, 0));
    }

    #[test]
    fn equal_pure_pair_has_zero_argument() {
        let a = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(edge_argument(&a, &a), 0.0);
        let mut acc = Accumulator::default();
        acc.push_log(edge_argument(&a, &a));
        acc.push_log(1.0);
        acc.push_log(1.0);
        let est = acc.finish().unwrap();
        assert_eq!((est.rejected, est.total, est.mean), (1, 3, 0.0));
    }

    #[test]
    fn mostly_rejected_is_unstable() {
        let mut acc = Accumulator::default();
        acc.push_log(0.0);
        acc.push_log(0.0);
        acc.push_log(0.5);
        assert_eq!(acc.finish(), Err(SurveyError::Unstable { rejected: 2, total: 3 }));
    }

    #[test]
    fn uncovered_probability_cases() {
        assert_eq!(uncovered_probability(&[], 3), 1.0);
        let pure = |c: usize| {
            let mut v = vec![0.0; 4];
            v[c] = 1.0;
            v
        };
        assert!(uncovered_probability(&[pure(1), pure(2), pure(3)], 3).abs() < 1e-15);
        assert!((uncovered_probability(&[pure(1), pure(2)], 3) - 1.0).abs() < 1e-15);
        assert!((uncovered_probability(&vec![vec![1.0, 0.0, 0.0, 0.0]; 5], 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncovered_probability_matches_combiner() {
        let mut rng = seeded(8);
        for _ in 0..200 {
            let k = rng.random_range(0..6);
            let ws: Vec<Vec<f64>> = (0..k)
                .map(|_| {
                    let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
                    let t: f64 = raw.iter().sum();
                    raw.iter().map(|x| x / t).collect()
                })
                .collect();
            let mut c = Combiner::new(3);
            c.reset();
            for w in &ws {
                c.push(w);
            }
            assert!((c.free_probability(ColorSet::full(3)) - uncovered_probability(&ws, 3)).abs() < 1e-12);
        }
    }

    #[test]
    fn low_connectivity_collapses_to_trivial() {
        let params = ComplexityParams { population: 2000, burn_in: 100, samples: 1000, ..Default::default() };
        let pt = complexity(3.0, 3, &params, seeded(0)).unwrap();
        assert!(!pt.nontrivial);
        assert_eq!(pt.sigma, 0.0);
    }

    #[test]
    fn scan_rejects_unsorted_grid() {
        let params = ScanParams::default();
        assert!(threshold_scan(3, &[4.5, 4.4], &params, 0).is_err());
    }
}
