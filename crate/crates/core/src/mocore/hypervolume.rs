use std::cmp::Ordering;

use thiserror::Error;

use super::{dominates, Objectives};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypervolumeError {
    #[error("point {index} does not dominate the reference point")]
    NotDominating { index: usize },
    #[error("hypervolume supports 1 or 2 objectives, got {0}")]
    Dimension(usize),
}

fn sorted_by_first(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap_or(Ordering::Equal)
            .then(a[1].partial_cmp(&b[1]).unwrap_or(Ordering::Equal))
    });
    pts
}

/// Area dominated by `front` and bounded by `reference`.
pub fn hypervolume_2d(front: &[[f64; 2]], reference: [f64; 2]) -> Result<f64, HypervolumeError> {
    if let Some(index) = front.iter().position(|p| !dominates(p, &reference)) {
        return Err(HypervolumeError::NotDominating { index });
    }
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in sorted_by_first(front) {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    Ok(area)
}

/// Hypervolume for one or two objectives. In one dimension it is the
/// distance from the best point to the reference.
pub fn hypervolume<T: Objectives>(front: &[T], reference: &[f64]) -> Result<f64, HypervolumeError> {
    match reference.len() {
        1 => {
            if let Some(index) = front.iter().position(|p| p.objectives()[0] >= reference[0]) {
                return Err(HypervolumeError::NotDominating { index });
            }
            Ok(front
                .iter()
                .map(|p| reference[0] - p.objectives()[0])
                .fold(0.0, f64::max))
        }
        2 => {
            let pts: Vec<[f64; 2]> = front.iter().map(|p| [p.objectives()[0], p.objectives()[1]]).collect();
            hypervolume_2d(&pts, [reference[0], reference[1]])
        }
        d => Err(HypervolumeError::Dimension(d)),
    }
}

/// Area each point alone contributes to the hypervolume of a mutually
/// non-dominated 2-D set. Points that do not dominate `reference` contribute 0.
pub fn exclusive_contributions_2d<T: Objectives>(points: &[T], reference: [f64; 2]) -> Vec<f64> {
    let mut out = vec![0.0; points.len()];
    let mut inside: Vec<usize> = (0..points.len())
        .filter(|&i| {
            let p = points[i].objectives();
            p[0] < reference[0] && p[1] < reference[1]
        })
        .collect();
    inside.sort_by(|&a, &b| {
        let (pa, pb) = (points[a].objectives(), points[b].objectives());
        pa[0].partial_cmp(&pb[0])
            .unwrap_or(Ordering::Equal)
            .then(pb[1].partial_cmp(&pa[1]).unwrap_or(Ordering::Equal))
    });
    for (k, &i) in inside.iter().enumerate() {
        let p = points[i].objectives();
        let right = inside.get(k + 1).map_or(reference[0], |&j| points[j].objectives()[0]);
        let above = if k == 0 { reference[1] } else { points[inside[k - 1]].objectives()[1] };
        out[i] = ((right - p[0]) * (above - p[1])).max(0.0);
    }
    out
}
