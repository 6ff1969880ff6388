//! Pareto machinery shared by every search: dominance, non-dominated
//! sorting, crowding distance, max-min normalization, a bounded archive and
//! the two-objective hypervolume. All objectives are minimized.

mod archive;
mod hypervolume;

pub use archive::{ParetoArchive, DEFAULT_CAPACITY as DEFAULT_ARCHIVE_CAPACITY};
pub use hypervolume::{exclusive_contributions_2d, hypervolume, hypervolume_2d, HypervolumeError};

use std::cmp::Ordering;

use crate::costs::{DispatchSchedule, ObjectiveMode, ObjectiveVector};

/// Anything with a minimization objective vector.
pub trait Objectives {
    fn objectives(&self) -> &[f64];
}

impl Objectives for Vec<f64> {
    fn objectives(&self) -> &[f64] {
        self
    }
}

impl<const N: usize> Objectives for [f64; N] {
    fn objectives(&self) -> &[f64] {
        self
    }
}

/// A repaired schedule with its costs and the vector used for comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSolution {
    pub schedule: DispatchSchedule,
    pub objectives: ObjectiveVector,
    /// Penalty-augmented objectives selected by the search mode.
    pub fitness: Vec<f64>,
}

impl ScoredSolution {
    pub fn new(schedule: DispatchSchedule, objectives: ObjectiveVector, mode: ObjectiveMode) -> Self {
        let fitness = objectives.fitness(mode);
        ScoredSolution {
            schedule,
            objectives,
            fitness,
        }
    }
}

impl Objectives for ScoredSolution {
    fn objectives(&self) -> &[f64] {
        &self.fitness
    }
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Partitions `points` into ranked fronts of indices (fast non-dominated sort).
///
/// Front 0 holds the non-dominated points; indices inside a front are ascending.
pub fn non_dominated_sort<T: Objectives>(points: &[T]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].objectives(), points[j].objectives());
            if dominates(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Rank of every point (index of its front).
pub fn ranks<T: Objectives>(points: &[T]) -> Vec<usize> {
    let mut rank = vec![0; points.len()];
    for (r, front) in non_dominated_sort(points).iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// Crowding distance of each member of a front.
///
/// Boundary points of every objective get infinity. A point whose objective
/// vector repeats an earlier one gets zero; the first copy is scored as if the
/// repeat were absent.
pub fn crowding_distance<T: Objectives>(front: &[T]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let unique: Vec<usize> = (0..n)
        .filter(|&i| (0..i).all(|j| front[j].objectives() != front[i].objectives()))
        .collect();
    if unique.len() <= 2 {
        for &i in &unique {
            dist[i] = f64::INFINITY;
        }
        return dist;
    }
    let m = front[0].objectives().len();
    let mut order = unique.clone();
    for k in 0..m {
        let val = |i: usize| front[i].objectives()[k];
        order.sort_by(|&a, &b| val(a).partial_cmp(&val(b)).unwrap_or(Ordering::Equal));
        let lo = val(order[0]);
        let hi = val(order[order.len() - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[order.len() - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            if dist[w[1]].is_finite() {
                dist[w[1]] += (val(w[2]) - val(w[0])) / range;
            }
        }
    }
    dist
}

/// Per-objective max-min scaling into `[0, 1]`; a constant objective maps to 0.5.
pub fn normalize<T: Objectives>(values: &[T]) -> Vec<Vec<f64>> {
    let Some(first) = values.first() else {
        return Vec::new();
    };
    let m = first.objectives().len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for v in values {
        for (k, x) in v.objectives().iter().enumerate() {
            lo[k] = lo[k].min(*x);
            hi[k] = hi[k].max(*x);
        }
    }
    values
        .iter()
        .map(|v| {
            v.objectives()
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let range = hi[k] - lo[k];
                    if range > 0.0 {
                        (x - lo[k]) / range
                    } else {
                        0.5
                    }
                })
                .collect()
        })
        .collect()
}
