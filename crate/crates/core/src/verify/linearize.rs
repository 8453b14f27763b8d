//! Linear approximation of maps on abelian patches.

use super::{Thresholds, VerifyError};
use crate::cutproject::{LatticePoint, ModelSetPatch};
use crate::exactfield::{Embedding, QuadFieldElem, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Values of the map on patch points.
#[derive(Debug, Clone)]
pub enum HomValues {
    /// `x -> a x + b sigma(x)` in every coordinate.
    Formula { a: Rational, b: Rational },
    /// Images given point by point.
    Explicit(BTreeMap<LatticePoint, Vec<QuadFieldElem>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizationResult {
    pub dim: usize,
    pub radius: f64,
    pub points_small: u64,
    pub points_large: u64,
    /// Least-squares fit on the radius-`R` subpatch (row `i` gives output `i`).
    pub fit_small: Vec<Vec<f64>>,
    /// The same fit on the radius-`2R` subpatch.
    pub fit_large: Vec<Vec<f64>>,
    pub coefficient_drift: f64,
    /// `sup |phi(x) - fit_small x|` over the radius-`R` subpatch.
    pub residual_small: f64,
    /// `sup |phi(x) - fit_small x|` over the radius-`2R` subpatch.
    pub residual_large: f64,
    pub growth_ratio: f64,
    /// Small-denominator rationals within the drift tolerance of both fits.
    pub rational_fit: Option<Vec<Vec<String>>>,
    /// `sup |phi(x) - Q x|` over the radius-`2R` subpatch for the rational fit.
    pub rational_residual: Option<f64>,
    /// Whether that residual is within the window bound, decided exactly.
    pub rational_residual_within_window: Option<bool>,
    pub pass: bool,
}

impl LinearizationResult {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "linearize dim {} radius {} points_small {} points_large {}\n",
            self.dim, self.radius, self.points_small, self.points_large
        );
        s += &format!(
            "fit_small {:?}\nfit_large {:?}\n",
            self.fit_small, self.fit_large
        );
        s += &format!(
            "coefficient_drift {:e}\nresidual_small {:.12}\nresidual_large {:.12}\ngrowth_ratio {:.9}\n",
            self.coefficient_drift, self.residual_small, self.residual_large, self.growth_ratio
        );
        if let Some(q) = &self.rational_fit {
            s += &format!("rational_fit {q:?}\n");
        }
        if let Some(r) = self.rational_residual {
            s += &format!("rational_residual {r:.12}\n");
        }
        if let Some(w) = self.rational_residual_within_window {
            s += &format!("rational_residual_within_window {w}\n");
        }
        s += &format!("linearize {}\n", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

/// Best rational with denominator at most `max_den` (continued fractions).
fn rational_approx(v: f64, max_den: i64) -> Option<Rational> {
    if !v.is_finite() || v.abs() > 1e12 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i64;
        let (p2, q2) = (
            ai.checked_mul(p1)?.checked_add(p0)?,
            ai.checked_mul(q1)?.checked_add(q0)?,
        );
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a;
        if frac.abs() < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    (q1 != 0).then(|| Rational::new(BigInt::from(p1), BigInt::from(q1)))
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, usize> {
    // Gauss-Jordan on a (n x n), right-hand sides b (n x r)
    let n = a.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c].abs() <= 1e-12 * scale {
            return Err(c);
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    for j in c..n {
                        a[i][j] -= f * a[c][j];
                    }
                    for j in 0..b[i].len() {
                        b[i][j] -= f * b[c][j];
                    }
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| b[i].iter().map(|v| v / a[i][i]).collect())
        .collect())
}

struct Sample {
    x: Vec<f64>,
    phi: Vec<f64>,
    x_exact: Vec<QuadFieldElem>,
    phi_exact: Vec<QuadFieldElem>,
    inner: bool,
}

/// Least-squares linear fit of `phi` at radius `R`, checked against the
/// fit at `2R`.
pub fn linearize_hom(
    patch: &ModelSetPatch,
    values: &HomValues,
    radius: f64,
    thresholds: &Thresholds,
) -> Result<LinearizationResult, VerifyError> {
    let scheme = patch.scheme();
    if !scheme.is_abelian() {
        return Err(VerifyError::InvalidInput(
            "linearization needs an abelian patch".into(),
        ));
    }
    if !(radius > 0.0) || 2.0 * radius > patch.radius() * (1.0 + 1e-12) {
        return Err(VerifyError::InvalidInput(format!(
            "need 0 < 2R <= patch radius {}, got R = {radius}",
            patch.radius()
        )));
    }
    let n = scheme.dim();
    let d = scheme.d();
    let mut samples = Vec::new();
    for p in patch.iter() {
        let x = scheme.embed(&p, Embedding::Principal);
        let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm > 2.0 * radius {
            continue;
        }
        let x_exact = scheme.to_field(&p);
        let phi_exact = match values {
            HomValues::Formula { a, b } => x_exact
                .iter()
                .map(|v| &v.scale(a) + &v.conjugate().scale(b))
                .collect(),
            HomValues::Explicit(map) => map
                .get(&p)
                .cloned()
                .ok_or_else(|| VerifyError::InvalidInput(format!("no value for point {p:?}")))?,
        };
        if phi_exact.len() != n || phi_exact.iter().any(|v| v.d() != d) {
            return Err(VerifyError::InvalidInput(format!(
                "bad value for point {p:?}"
            )));
        }
        samples.push(Sample {
            phi: phi_exact
                .iter()
                .map(|v| v.embed(Embedding::Principal))
                .collect(),
            x,
            x_exact,
            phi_exact,
            inner: norm <= radius,
        });
    }
    let fit = |inner_only: bool| -> Result<Vec<Vec<f64>>, VerifyError> {
        let mut g = vec![vec![0.0; n]; n];
        let mut h = vec![vec![0.0; n]; n];
        for s in samples.iter().filter(|s| s.inner || !inner_only) {
            for i in 0..n {
                for j in 0..n {
                    g[i][j] += s.x[i] * s.x[j];
                    h[i][j] += s.x[i] * s.phi[j];
                }
            }
        }
        // G M^T = H
        let mt = solve(g, h).map_err(|rank| VerifyError::RankDeficient { rank, needed: n })?;
        Ok((0..n).map(|i| (0..n).map(|j| mt[j][i]).collect()).collect())
    };
    let small = fit(true)?;
    let large = fit(false)?;
    let drift = small
        .iter()
        .flatten()
        .zip(large.iter().flatten())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let residual = |m: &[Vec<f64>], s: &Sample| -> f64 {
        (0..n).fold(0.0f64, |acc, i| {
            let lin: f64 = (0..n).map(|j| m[i][j] * s.x[j]).sum();
            acc.max((s.phi[i] - lin).abs())
        })
    };
    let residual_small = samples
        .iter()
        .filter(|s| s.inner)
        .fold(0.0f64, |m, s| m.max(residual(&small, s)));
    let residual_large = samples
        .iter()
        .fold(0.0f64, |m, s| m.max(residual(&small, s)));
    let growth_ratio = if residual_small > 0.0 {
        residual_large / residual_small
    } else if residual_large == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let rational: Option<Vec<Vec<Rational>>> = small
        .iter()
        .zip(&large)
        .map(|(rs, rl)| {
            rs.iter()
                .zip(rl)
                .map(|(&a, &b)| {
                    let q = rational_approx(b, 1000)?;
                    let qf = num_traits::ToPrimitive::to_f64(&q)?;
                    ((qf - a).abs() <= thresholds.drift_tol
                        && (qf - b).abs() <= thresholds.drift_tol)
                        .then_some(q)
                })
                .collect()
        })
        .collect();
    let (rational_residual, within) = match &rational {
        Some(q) => {
            let mut sup: Option<QuadFieldElem> = None;
            for s in &samples {
                for i in 0..n {
                    let mut v = s.phi_exact[i].clone();
                    for j in 0..n {
                        if !q[i][j].is_zero() {
                            v = &v - &s.x_exact[j].scale(&q[i][j]);
                        }
                    }
                    let v = if v.signum() == Ordering::Less { -v } else { v };
                    if sup
                        .as_ref()
                        .map_or(true, |m| v.cmp_real(m) == Ok(Ordering::Greater))
                    {
                        sup = Some(v);
                    }
                }
            }
            let within = match (patch.window(), &sup) {
                (Some(w), Some(m)) => {
                    let bound = w
                        .bounds()
                        .iter()
                        .max()
                        .cloned()
                        .unwrap_or_else(Rational::zero);
                    let b = QuadFieldElem::from_rational(bound, d);
                    Some(
                        m.cmp_real(&b)
                            .map(|o| o != Ordering::Greater)
                            .unwrap_or(false),
                    )
                }
                _ => None,
            };
            (sup.map(|m| m.embed(Embedding::Principal)), within)
        }
        None => (None, None),
    };
    let rational_fit = rational.map(|q| {
        q.iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect()
    });
    Ok(LinearizationResult {
        dim: n,
        radius,
        points_small: samples.iter().filter(|s| s.inner).count() as u64,
        points_large: samples.len() as u64,
        fit_small: small,
        fit_large: large,
        coefficient_drift: drift,
        residual_small,
        residual_large,
        growth_ratio,
        rational_fit,
        rational_residual,
        rational_residual_within_window: within,
        pass: drift <= thresholds.drift_tol && growth_ratio <= thresholds.growth_ratio_tol,
    })
}
