//! Minimum-cost bipartite matching (the assignment problem) and the random
//! ensemble harness used to check the ensemble-average laws.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::MatchingError;
use crate::rng::substream;

/// Largest size accepted by [`brute_force`] (9! = 362880 permutations).
pub const BRUTE_FORCE_MAX_N: usize = 9;

pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
pub const ZETA3: f64 = 1.202_056_903_159_594_2;

/// Square matrix of finite, nonnegative costs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, costs: Vec<f64>) -> Result<Self, MatchingError> {
        if costs.len() != n * n {
            return Err(MatchingError::InvalidCosts(format!("expected {} entries, got {}", n * n, costs.len())));
        }
        if let Some(bad) = costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(MatchingError::InvalidCosts(format!("entry {bad} is not a finite nonnegative number")));
        }
        Ok(Self { n, costs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatchingError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatchingError::InvalidCosts("matrix is not square".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.costs[row * self.n + col]
    }

    /// Cost of `assignment`, summed in row order.
    pub fn cost_of(&self, assignment: &[usize]) -> f64 {
        assignment.iter().enumerate().map(|(i, &k)| self.get(i, k)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingResult {
    /// `assignment[i]` is the column matched to row `i`.
    pub assignment: Vec<usize>,
    pub total_cost: f64,
}

/// Exhaustive minimum over all `n!` permutations. Among optimal permutations
/// the lexicographically smallest wins.
pub fn brute_force(c: &CostMatrix) -> Result<MatchingResult, MatchingError> {
    let n = c.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(MatchingError::TooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = c.cost_of(&perm);
    // Permutations are visited in lexicographic order, so a strict
    // improvement test keeps the smallest optimal one.
    while next_permutation(&mut perm) {
        let cost = c.cost_of(&perm);
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&perm);
        }
    }
    Ok(MatchingResult { assignment: best, total_cost: best_cost })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Optimal assignment by shortest augmenting paths with row/column
/// potentials (Hungarian method), `O(n^3)`.
pub fn solve_exact(c: &CostMatrix) -> MatchingResult {
    let n = c.n();
    if n == 0 {
        return MatchingResult { assignment: Vec::new(), total_cost: 0.0 };
    }
    // 1-based internally; column 0 is the virtual root of each search.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];
    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[col0] = true;
            let i0 = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = c.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = col0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    col1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of_col[j] - 1] = j - 1;
    }
    let total_cost = c.cost_of(&assignment);
    MatchingResult { assignment, total_cost }
}

/// Cost law of the random ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum CostDistribution {
    /// `d = -ln(u)`, density `e^{-d}`.
    Exponential,
    /// Density `1 - A d` on `[0, 1]`, the missing mass `A/2` spread
    /// uniformly on `[1, 2]`. Valid for `0 <= A <= 1`.
    UniformLinear { a: f64 },
}

impl CostDistribution {
    pub fn validate(&self) -> Result<(), MatchingError> {
        if let CostDistribution::UniformLinear { a } = *self {
            if !(0.0..=1.0).contains(&a) {
                return Err(MatchingError::InvalidParameter(format!(
                    "slope A = {a} makes the density negative or unnormalizable; need 0 <= A <= 1"
                )));
            }
        }
        Ok(())
    }

    /// Slope of the density at zero: `P(d) = 1 - A d + O(d^2)`.
    pub fn slope(&self) -> f64 {
        match *self {
            CostDistribution::Exponential => 1.0,
            CostDistribution::UniformLinear { a } => a,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match *self {
            CostDistribution::Exponential => -(1.0 - u).ln(),
            CostDistribution::UniformLinear { a } => {
                let head = 1.0 - 0.5 * a;
                if u < head {
                    if a == 0.0 {
                        u
                    } else {
                        // Inverse of F(d) = d - A d^2 / 2 on [0, 1].
                        (1.0 - (1.0 - 2.0 * a * u).sqrt()) / a
                    }
                } else {
                    1.0 + (u - head) / (0.5 * a)
                }
            }
        }
    }

    /// Large-`n` prediction `ζ(2) - (2(1-A)ζ(3) + 1)/n`.
    pub fn asymptotic_mean(&self, n: usize) -> f64 {
        ZETA2 - (2.0 * (1.0 - self.slope()) * ZETA3 + 1.0) / n as f64
    }

    /// Best available prediction for the mean optimal cost at size `n`:
    /// exact for exponential costs, asymptotic otherwise.
    pub fn target_mean(&self, n: usize) -> f64 {
        match self {
            CostDistribution::Exponential => exponential_exact_mean(n),
            CostDistribution::UniformLinear { .. } => self.asymptotic_mean(n),
        }
    }
}

/// `Σ_{k=1..n} 1/k²`, the exact mean optimal cost for exponential costs.
pub fn exponential_exact_mean(n: usize) -> f64 {
    // Summed from the small terms up for accuracy.
    (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum()
}

pub fn random_instance<R: Rng + ?Sized>(n: usize, dist: CostDistribution, rng: &mut R) -> CostMatrix {
    let costs = (0..n * n).map(|_| dist.sample(rng)).collect();
    CostMatrix { n, costs }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n: usize,
    pub samples: usize,
    pub mean_cost: f64,
    pub std_error: f64,
    pub dist: CostDistribution,
}

impl EnsembleStats {
    pub fn target(&self) -> f64 {
        self.dist.target_mean(self.n)
    }

    pub fn z_score(&self) -> f64 {
        (self.mean_cost - self.target()) / self.std_error
    }
}

/// Mean and standard error of the optimal cost over `samples` independent
/// instances. Instance `k` uses its own random stream derived from `seed`,
/// so the result does not depend on the thread count.
pub fn ensemble_average(
    n: usize,
    dist: CostDistribution,
    samples: usize,
    seed: u64,
) -> Result<EnsembleStats, MatchingError> {
    dist.validate()?;
    if samples < 2 {
        return Err(MatchingError::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    if n == 0 {
        return Err(MatchingError::InvalidParameter("size must be >= 1".into()));
    }
    let costs: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k);
            solve_exact(&random_instance(n, dist, &mut rng)).total_cost
        })
        .collect();
    let mean = costs.iter().sum::<f64>() / samples as f64;
    let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok(EnsembleStats {
        n,
        samples,
        mean_cost: mean,
        std_error: (var / samples as f64).sqrt(),
        dist,
    })
}
