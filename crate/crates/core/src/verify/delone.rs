//! Uniform discreteness and relative density of patches.

use super::index::{Metric, PatchIndex, Side};
use super::{Thresholds, VerifyError};
use crate::cutproject::{LatticeLaw, LatticePoint, ModelSetPatch};
use crate::exactfield::Embedding;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub metric: Metric,
    pub core_radius: f64,
    pub core_points: u64,
    pub min_separation: f64,
    /// A closest pair, as exact lattice points.
    pub pair: (LatticePoint, LatticePoint),
    /// `x^-1 y` (or `y - x` for the Euclidean metric), exact and nonzero.
    pub exact_difference: LatticePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub metric: Metric,
    pub core_radius: f64,
    pub grid_step: f64,
    pub grid_points: u64,
    /// `max_g min_l d(l, g)` over the grid; infinite if some grid point has
    /// no patch point within the patch radius.
    pub covering_radius_estimate: f64,
    pub worst_grid_point: Vec<f64>,
}

/// Both Delone quantities at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeloneScale {
    pub radius: f64,
    pub separation: SeparationReport,
    pub covering: CoveringReport,
}

/// Delone checks at two scales with their pass/fail verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeloneReport {
    pub small: DeloneScale,
    pub large: DeloneScale,
    pub thresholds: Thresholds,
    pub separation_positive: bool,
    pub separation_stable: bool,
    pub covering_finite: bool,
    pub covering_stable: bool,
    pub pass: bool,
}

impl DeloneReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, sc) in [("small", &self.small), ("large", &self.large)] {
            s += &format!(
                "scale {name}: radius {} core_radius {} core_points {} min_separation {:.12} covering_radius_estimate {:.6} grid_step {} grid_points {}\n",
                sc.radius,
                sc.separation.core_radius,
                sc.separation.core_points,
                sc.separation.min_separation,
                sc.covering.covering_radius_estimate,
                sc.covering.grid_step,
                sc.covering.grid_points
            );
        }
        let v = |b: bool| if b { "PASS" } else { "FAIL" };
        s += &format!(
            "separation_positive {}\nseparation_stable {}\ncovering_finite {}\ncovering_stable {}\ndelone {}\n",
            v(self.separation_positive),
            v(self.separation_stable),
            v(self.covering_finite),
            v(self.covering_stable),
            v(self.pass)
        );
        s
    }
}

fn core_box(patch: &ModelSetPatch, core: f64) -> Vec<f64> {
    patch
        .scheme()
        .weights()
        .iter()
        .map(|&w| core.powi(w as i32))
        .collect()
}

/// Minimum distance over distinct pairs of core points, by exhaustive
/// ball queries.
pub fn min_separation(
    patch: &ModelSetPatch,
    metric: Metric,
) -> Result<SeparationReport, VerifyError> {
    let idx = PatchIndex::new(patch);
    let core = patch.core_radius();
    let bounds = core_box(patch, core);
    let in_core = |c: &[f64]| c.iter().zip(&bounds).all(|(v, b)| v.abs() <= *b);
    let mut core_points = 0u64;
    let mut best = f64::INFINITY;
    let mut best_pair: Option<(Vec<usize>, Vec<usize>)> = None;
    idx.for_each_in_box(&bounds, |px, cx| {
        core_points += 1;
        let found = if best.is_finite() {
            let mut r = best;
            let mut hit: Option<(f64, Vec<usize>)> = None;
            idx.search(metric, Side::Right, cx, &mut r, &mut |h, r| {
                if h.path == px || !in_core(h.coords) {
                    return;
                }
                let better = match &hit {
                    None => h.dist < best,
                    Some((d, _)) => h.dist < *d,
                };
                if better {
                    hit = Some((h.dist, h.path.to_vec()));
                    *r = h.dist;
                }
            });
            hit
        } else {
            // first point: grow the ball until another core point appears
            idx.nearest(
                metric,
                Side::Right,
                cx,
                1e-3,
                4.0 * patch.radius().max(1.0),
                &|h| h.path == px || !in_core(h.coords),
            )
        };
        if let Some((d, py)) = found {
            if d < best {
                best = d;
                best_pair = Some((px.to_vec(), py));
            }
        }
    });
    let (px, py) = best_pair.ok_or(VerifyError::EmptyCore { core_radius: core })?;
    let (x, y) = (idx.point(&px), idx.point(&py));
    let diff = match metric {
        Metric::GroupQuasi => patch.scheme().mul(&LatticeLaw::inverse(&x), &y)?,
        Metric::Euclidean => x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b.0 - a.0, b.1 - a.1))
            .collect(),
    };
    if diff.iter().all(|&p| p == (0, 0)) {
        return Err(VerifyError::Internal("closest pair is not distinct".into()));
    }
    // recomputed from the exact difference so equal pairs give equal values
    let scheme = patch.scheme();
    let best = match metric {
        Metric::GroupQuasi => scheme.quasi_norm(&diff),
        Metric::Euclidean => scheme
            .embed(&diff, Embedding::Principal)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt(),
    };
    Ok(SeparationReport {
        metric,
        core_radius: core,
        core_points,
        min_separation: best,
        pair: (x, y),
        exact_difference: diff,
    })
}

/// Largest distance from a grid point of the core to the patch.
///
/// Grid coordinates are multiples of `step^w_k` (of `step` for the
/// Euclidean metric) inside the core box.
pub fn covering_radius(
    patch: &ModelSetPatch,
    metric: Metric,
    grid_step: f64,
) -> Result<CoveringReport, VerifyError> {
    if !(grid_step > 0.0) {
        return Err(VerifyError::InvalidInput(
            "grid_step must be positive".into(),
        ));
    }
    let idx = PatchIndex::new(patch);
    let core = patch.core_radius();
    let weights = patch.scheme().weights().to_vec();
    let bounds = core_box(patch, core);
    let steps: Vec<f64> = weights
        .iter()
        .map(|&w| match metric {
            Metric::GroupQuasi => grid_step.powi(w as i32),
            Metric::Euclidean => grid_step,
        })
        .collect();
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .zip(&steps)
        .map(|(&b, &h)| {
            let m = (b / h).floor() as i64;
            (-m..=m).map(|j| j as f64 * h).collect()
        })
        .collect();
    let total: u64 = axes.iter().map(|a| a.len() as u64).product();
    if total == 0 || patch.is_empty() {
        return Err(VerifyError::EmptyCore { core_radius: core });
    }
    let max_r = 4.0 * patch.radius().max(1.0);
    let mut worst = 0.0f64;
    let mut worst_point = vec![0.0; weights.len()];
    let mut g = vec![0.0; weights.len()];
    let mut pos = vec![0usize; weights.len()];
    let mut warm = grid_step;
    loop {
        for (k, a) in axes.iter().enumerate() {
            g[k] = a[pos[k]];
        }
        let d = match idx.nearest(metric, Side::Left, &g, warm * 1.5 + 1e-9, max_r, &|_| false) {
            Some((d, _)) => d,
            None => f64::INFINITY,
        };
        if d > worst {
            worst = d;
            worst_point.clone_from(&g);
        }
        if d.is_finite() {
            warm = d.max(grid_step * 0.25);
        }
        // odometer, last coordinate fastest
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(CoveringReport {
                    metric,
                    core_radius: core,
                    grid_step,
                    grid_points: total,
                    covering_radius_estimate: worst,
                    worst_grid_point: worst_point,
                });
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < axes[k].len() {
                break;
            }
            pos[k] = 0;
        }
    }
}

/// Separation and covering at one scale.
pub fn delone_scale(
    patch: &ModelSetPatch,
    metric: Metric,
    grid_step: f64,
) -> Result<DeloneScale, VerifyError> {
    Ok(DeloneScale {
        radius: patch.radius(),
        separation: min_separation(patch, metric)?,
        covering: covering_radius(patch, metric, grid_step)?,
    })
}

/// Delone checks on a patch and on a larger patch of the same set.
pub fn delone_two_scale(
    small: &ModelSetPatch,
    large: &ModelSetPatch,
    metric: Metric,
    grid_step: f64,
    thresholds: &Thresholds,
) -> Result<DeloneReport, VerifyError> {
    let a = delone_scale(small, metric, grid_step)?;
    let b = delone_scale(large, metric, grid_step)?;
    Ok(judge(a, b, thresholds))
}

pub(crate) fn judge(a: DeloneScale, b: DeloneScale, t: &Thresholds) -> DeloneReport {
    let (sa, sb) = (a.separation.min_separation, b.separation.min_separation);
    let (ca, cb) = (
        a.covering.covering_radius_estimate,
        b.covering.covering_radius_estimate,
    );
    let separation_positive = sa > t.min_separation && sb > t.min_separation;
    let separation_stable = (sa - sb).abs() <= t.separation_rel_tol * sa.max(sb);
    let covering_finite = ca.is_finite() && cb.is_finite();
    let covering_stable = covering_finite && (ca - cb).abs() <= t.covering_rel_tol * ca.max(cb);
    DeloneReport {
        small: a,
        large: b,
        thresholds: t.clone(),
        separation_positive,
        separation_stable,
        covering_finite,
        covering_stable,
        pass: separation_positive && separation_stable && covering_finite && covering_stable,
    }
}
