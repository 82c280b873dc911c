//! Mean-field, local mean-field and Bethe (cavity) approximations for the
//! ferromagnetic Ising model on a lattice of coordination `z`.
//!
//! All scalar recursions are solved by damped fixed-point iteration
//! `m <- (1 - DAMPING) m + DAMPING f(m)`.

use serde::Serialize;

use crate::error::BetheError;

pub const DAMPING: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Largest coordination for which the `2^z` neighbor sum is enumerated.
pub const MAX_ENUMERATED_Z: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetheParams {
    pub beta: f64,
    pub j_coupling: f64,
    pub z: usize,
}

impl BetheParams {
    pub fn new(beta: f64, j_coupling: f64, z: usize) -> Result<Self, BetheError> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(BetheError::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
        }
        if !j_coupling.is_finite() {
            return Err(BetheError::InvalidParameter("coupling must be finite".into()));
        }
        if z < 1 {
            return Err(BetheError::InvalidParameter("coordination z must be >= 1".into()));
        }
        Ok(Self { beta, j_coupling, z })
    }

    /// Convenience constructor with `J = 1`, so `beta` is the product βJ.
    pub fn reduced(beta_j: f64, z: usize) -> Result<Self, BetheError> {
        Self::new(beta_j, 1.0, z)
    }

    pub fn beta_j(&self) -> f64 {
        self.beta * self.j_coupling
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn check_magnetization(m: f64) -> Result<(), BetheError> {
    if !(m.abs() <= 1.0) {
        return Err(BetheError::InvalidParameter(format!("magnetization {m} outside [-1, 1]")));
    }
    Ok(())
}

fn damped_iteration(init: f64, tol: f64, map: impl Fn(f64) -> f64) -> Result<FixedPointReport, BetheError> {
    damped_iteration_capped(init, tol, MAX_ITERATIONS, map)
}

// Damped iteration with an Aitken extrapolation after every pair of steps
// (Steffensen). The extrapolated point is kept only if it stays in [-1, 1]
// on the same side of zero as `init`, so the branch selected by `init` is
// preserved. Map evaluations count as iterations.
fn damped_iteration_capped(
    init: f64,
    tol: f64,
    max_iterations: usize,
    map: impl Fn(f64) -> f64,
) -> Result<FixedPointReport, BetheError> {
    check_magnetization(init)?;
    if !(tol > 0.0) {
        return Err(BetheError::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let step = |m: f64| (1.0 - DAMPING) * m + DAMPING * map(m);
    let same_branch = |x: f64| x.abs() <= 1.0 && x * init >= 0.0;
    let mut m = init;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        let x1 = step(m);
        iterations += 1;
        residual = (x1 - m).abs();
        if residual <= tol {
            return Ok(FixedPointReport { value: x1, iterations, residual });
        }
        let x2 = step(x1);
        iterations += 1;
        let denom = x2 - 2.0 * x1 + m;
        let accelerated = m - (x1 - m) * (x1 - m) / denom;
        m = if denom != 0.0 && accelerated.is_finite() && same_branch(accelerated) {
            accelerated
        } else {
            x2
        };
    }
    Err(BetheError::IterationLimit { last: m, iterations, residual })
}

/// Solves `m = tanh(βJ z m)`.
pub fn naive_mean_field(p: &BetheParams, init: f64, tol: f64) -> Result<FixedPointReport, BetheError> {
    let k = p.beta_j() * p.z as f64;
    damped_iteration(init, tol, |m| (k * m).tanh())
}

/// Magnetization of a spin whose `z` neighbors are independent with
/// magnetization `m`, by exact enumeration of the `2^z` neighbor states.
pub fn local_mean_field(p: &BetheParams, m: f64) -> Result<f64, BetheError> {
    check_magnetization(m)?;
    if p.z > MAX_ENUMERATED_Z {
        return Err(BetheError::TooManyNeighbors { z: p.z, max: MAX_ENUMERATED_Z });
    }
    let up = 0.5 * (1.0 + m);
    let down = 0.5 * (1.0 - m);
    let bj = p.beta_j();
    // The local field depends only on the number of up neighbors.
    let mut total = 0.0;
    for state in 0u32..(1u32 << p.z) {
        let ups = state.count_ones() as i32;
        let downs = p.z as i32 - ups;
        let weight = up.powi(ups) * down.powi(downs);
        if weight != 0.0 {
            total += weight * (bj * (ups - downs) as f64).tanh();
        }
    }
    Ok(total)
}

/// Solves the cavity recursion `m_C = tanh((z-1) artanh(tanh(βJ) m_C))`.
pub fn cavity_fixed_point(p: &BetheParams, init: f64, tol: f64) -> Result<FixedPointReport, BetheError> {
    let t = p.beta_j().tanh();
    let branches = (p.z - 1) as f64;
    check_magnetization(init)?;
    // The map is odd and concave on [0, 1], so with slope <= 1 at the origin
    // zero is the only fixed point. Iterating there converges only
    // geometrically with ratio (z-1)tanh(βJ), which is 1 - 4e-9 for a
    // chain at βJ = 10.
    if branches * t <= 1.0 || init == 0.0 {
        return Ok(FixedPointReport { value: 0.0, iterations: 0, residual: 0.0 });
    }
    damped_iteration(init, tol, move |m| (branches * clamped_atanh(t * m)).tanh())
}

/// Full-site magnetization from the cavity magnetization:
/// `m = tanh(z artanh(tanh(βJ) m_C))`.
pub fn full_magnetization(p: &BetheParams, m_c: f64) -> Result<f64, BetheError> {
    check_magnetization(m_c)?;
    let t = p.beta_j().tanh();
    Ok((p.z as f64 * clamped_atanh(t * m_c)).tanh())
}

/// Nearest-neighbor correlation `<σ_i σ_k>` on a link, i.e. minus the
/// energy per link in units of J.
pub fn link_energy(p: &BetheParams, m_c: f64) -> Result<f64, BetheError> {
    check_magnetization(m_c)?;
    let t = p.beta_j().tanh();
    let m2 = m_c * m_c;
    Ok((t + m2) / (1.0 + t * m2))
}

// artanh(±1) is infinite; tanh of it is ±1, which is the right limit.
fn clamped_atanh(x: f64) -> f64 {
    if x >= 1.0 {
        f64::INFINITY
    } else if x <= -1.0 {
        f64::NEG_INFINITY
    } else {
        x.atanh()
    }
}

/// Cavity magnetization used by sweeps: the converged value, or the last
/// iterate when critical slowing-down hits the iteration cap.
pub fn cavity_magnetization(p: &BetheParams, init: f64, tol: f64) -> Result<f64, BetheError> {
    match cavity_fixed_point(p, init, tol) {
        Ok(r) => Ok(r.value),
        Err(BetheError::IterationLimit { last, .. }) => Ok(last),
        Err(e) => Err(e),
    }
}

/// One row of a βJ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "betaJ")]
    pub beta_j: f64,
    #[serde(rename = "m_C")]
    pub m_c: f64,
    pub m: f64,
    #[serde(rename = "E_link")]
    pub e_link: f64,
}

/// Evaluates the cavity solution on each βJ of `grid`, starting every
/// point from the fully magnetized state.
pub fn sweep(z: usize, grid: &[f64], tol: f64) -> Result<Vec<SweepRow>, BetheError> {
    grid.iter()
        .map(|&beta_j| {
            let p = BetheParams::reduced(beta_j, z)?;
            let raw = cavity_magnetization(&p, 1.0, tol)?;
            // Snap the paramagnetic branch to an exact zero.
            let m_c = if raw.abs() < ZERO_THRESHOLD { 0.0 } else { raw };
            Ok(SweepRow {
                beta_j,
                m_c,
                m: full_magnetization(&p, m_c)?,
                e_link: link_energy(&p, m_c)?,
            })
        })
        .collect()
}

/// Below this a cavity magnetization counts as the paramagnetic zero.
pub const ZERO_THRESHOLD: f64 = 1e-3;

/// Smallest βJ with a nonzero cavity magnetization, found by scanning
/// `[0, beta_max]` with `steps` points and bisecting the first bracket.
/// Returns `None` when no ordered phase exists on the interval.
pub fn cavity_onset(z: usize, beta_max: f64, steps: usize, bisections: usize) -> Result<Option<f64>, BetheError> {
    let ordered = |beta_j: f64| -> Result<bool, BetheError> {
        let p = BetheParams::reduced(beta_j, z)?;
        Ok(cavity_magnetization(&p, 1.0, DEFAULT_TOLERANCE)?.abs() > ZERO_THRESHOLD)
    };
    let mut prev = 0.0;
    for k in 1..=steps {
        let b = beta_max * k as f64 / steps as f64;
        if ordered(b)? {
            let (mut lo, mut hi) = (prev, b);
            for _ in 0..bisections {
                let mid = 0.5 * (lo + hi);
                if ordered(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = b;
    }
    Ok(None)
}
