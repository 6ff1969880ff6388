//! Variation and selection operators shared by the four searches.

use rand::seq::index::sample;
use rand::Rng;

use super::Bounds;
use crate::error::{Error, Result};

/// Index drawn with probability `weights[i] / Σ weights`.
pub fn roulette_select<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("roulette weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("roulette weights sum to zero".into()));
    }
    let mut target = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.iter().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        last = i;
        if target < *w {
            return Ok(i);
        }
        target -= w;
    }
    Ok(last)
}

/// Exchanges the segments between sorted cut positions. A cut at `c` splits
/// before index `c`.
pub fn crossover_at(a: &[f64], b: &[f64], cuts: &[usize]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), b.len(), "crossover parents differ in length");
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    let mut bounds: Vec<usize> = cuts.to_vec();
    bounds.push(a.len());
    let mut start = 0;
    for (seg, end) in bounds.into_iter().enumerate() {
        if seg % 2 == 1 {
            c1[start..end].copy_from_slice(&b[start..end]);
            c2[start..end].copy_from_slice(&a[start..end]);
        }
        start = end;
    }
    (c1, c2)
}

/// `k`-point crossover with distinct random cut positions in `1..len`.
pub fn multipoint_crossover<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R, k: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), b.len(), "crossover parents differ in length");
    if a.len() < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let k = k.clamp(1, a.len() - 1);
    let mut cuts: Vec<usize> = sample(rng, a.len() - 1, k).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    crossover_at(a, b, &cuts)
}

/// Effective per-gene mutation rate: higher when the population is uniform.
pub fn mutation_rate(mutation_prob: f64, diversity: f64) -> f64 {
    (mutation_prob * (2.0 - diversity)).clamp(0.0, 1.0)
}

/// Perturbs each gene with probability [`mutation_rate`] by a uniform step
/// within ±10% of its range, then clamps to the box.
pub fn adaptive_mutation<R: Rng + ?Sized>(
    g: &[f64],
    diversity: f64,
    rng: &mut R,
    mutation_prob: f64,
    bounds: &Bounds,
) -> Vec<f64> {
    let rate = mutation_rate(mutation_prob, diversity);
    let mut out = g.to_vec();
    if rate == 0.0 {
        return out;
    }
    for (i, x) in out.iter_mut().enumerate() {
        if rng.gen::<f64>() < rate {
            *x += rng.gen_range(-0.1..=0.1) * bounds.range(i);
        }
    }
    bounds.clamp(&mut out);
    out
}

/// Metropolis rule on scalar energies (lower is better).
pub fn metropolis_accept<R: Rng + ?Sized>(current: f64, candidate: f64, temp: f64, rng: &mut R) -> bool {
    debug_assert!(temp > 0.0);
    if candidate <= current {
        return true;
    }
    rng.gen::<f64>() < (-(candidate - current) / temp).exp()
}

/// PSO coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoCoefficients {
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
}

/// `ωv + c₁r₁(pbest − x) + c₂r₂(gbest − x)`, clamped to `±vmax`.
pub fn pso_velocity_update<R: Rng + ?Sized>(
    v: &[f64],
    x: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    coef: PsoCoefficients,
    vmax: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let r1: f64 = rng.gen();
    let r2: f64 = rng.gen();
    (0..v.len())
        .map(|i| {
            let raw = coef.inertia * v[i] + coef.c1 * r1 * (pbest[i] - x[i]) + coef.c2 * r2 * (gbest[i] - x[i]);
            raw.clamp(-vmax[i], vmax[i])
        })
        .collect()
}

/// Picks a level per variable with probability `τ^α η^β / Σ τ^α η^β`.
pub fn aco_path_select<R: Rng + ?Sized>(
    tau: &[Vec<f64>],
    eta: &[Vec<f64>],
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Vec<usize> {
    select_levels(&aco_level_weights(tau, eta, alpha, beta), rng)
}

/// `τ^α η^β` per (variable, level).
pub fn aco_level_weights(tau: &[Vec<f64>], eta: &[Vec<f64>], alpha: f64, beta: f64) -> Vec<Vec<f64>> {
    tau.iter()
        .zip(eta)
        .map(|(t, e)| t.iter().zip(e).map(|(t, e)| t.powf(alpha) * e.powf(beta)).collect())
        .collect()
}

/// One roulette draw per variable over precomputed level weights.
pub fn select_levels<R: Rng + ?Sized>(weights: &[Vec<f64>], rng: &mut R) -> Vec<usize> {
    weights
        .iter()
        .map(|w| roulette_select(w, rng).unwrap_or_else(|_| rng.gen_range(0..w.len())))
        .collect()
}

/// `τ ← (1 − ρ)τ + Δτ` elementwise.
pub fn aco_pheromone_update(tau: &mut [Vec<f64>], deposits: &[Vec<f64>], rho: f64) {
    for (t_row, d_row) in tau.iter_mut().zip(deposits) {
        for (t, d) in t_row.iter_mut().zip(d_row) {
            *t = (1.0 - rho) * *t + d;
        }
    }
}
