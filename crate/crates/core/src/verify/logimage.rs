//! Word identities on patches and Delone checks of `log L^n` in the algebra.

use super::delone::{covering_radius, judge, min_separation, DeloneReport, DeloneScale};
use super::index::Metric;
use super::products::product_patch;
use super::{Thresholds, VerifyError};
use crate::cutproject::{LatticePoint, ModelSetPatch, PointSet};
use crate::exactfield::{QuadFieldElem, Rational};
use crate::freenilp::{Target, WordCertificate};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordIdentityReport {
    pub target: Target,
    pub class: usize,
    pub m: String,
    pub n: u64,
    pub seed: u64,
    pub samples: u64,
    pub zero_residuals: u64,
    /// Word values that are lattice points.
    pub in_lattice: u64,
    pub pass: bool,
}

impl WordIdentityReport {
    pub fn to_text(&self) -> String {
        format!(
            "word_identity target {:?} class {} m {} n {} seed {} samples {} zero_residuals {} in_lattice {} {}\n",
            self.target,
            self.class,
            self.m,
            self.n,
            self.seed,
            self.samples,
            self.zero_residuals,
            self.in_lattice,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn sample(patch: &ModelSetPatch, rng: &mut ChaCha8Rng) -> LatticePoint {
    match patch.points() {
        PointSet::Product(c) => c.iter().map(|v| v[rng.gen_range(0..v.len())]).collect(),
        PointSet::List(l) => l[rng.gen_range(0..l.len())].clone(),
    }
}

fn check_word(
    patch: &ModelSetPatch,
    cert: &WordCertificate,
    target: Target,
    samples: u64,
    seed: u64,
) -> Result<WordIdentityReport, VerifyError> {
    if cert.target != target {
        return Err(VerifyError::InvalidInput(format!(
            "certificate target is {:?}, expected {target:?}",
            cert.target
        )));
    }
    let scheme = patch.scheme();
    let class = scheme.algebra().class();
    if cert.class < class {
        return Err(VerifyError::InvalidInput(format!(
            "certificate class {} is below the algebra class {class}",
            cert.class
        )));
    }
    if cert.word.alphabet() != 2 {
        return Err(VerifyError::InvalidInput(
            "certificate word must have two letters".into(),
        ));
    }
    if patch.is_empty() {
        return Err(VerifyError::EmptyCore {
            core_radius: patch.core_radius(),
        });
    }
    let d = scheme.d();
    let law = scheme.law();
    let m = Rational::from_integer(cert.m.clone());
    let zero = vec![QuadFieldElem::zero(d); scheme.dim()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut zero_residuals, mut in_lattice) = (0u64, 0u64);
    for _ in 0..samples {
        let x = scheme.to_field(&sample(patch, &mut rng));
        let y = scheme.to_field(&sample(patch, &mut rng));
        let w = cert
            .word
            .evaluate(
                &[x.clone(), y.clone()],
                zero.clone(),
                |a, b| law.mul(a, b),
                // exponential coordinates: x^e = e x
                |a, e| {
                    let e = Rational::from_integer(e.into());
                    a.iter().map(|v| v.scale(&e)).collect()
                },
            )
            .map_err(|e| VerifyError::Internal(e.to_string()))?;
        let expected: Vec<QuadFieldElem> = match target {
            Target::Sum => x.iter().zip(&y).map(|(a, b)| (a + b).scale(&m)).collect(),
            Target::Bracket => scheme
                .algebra()
                .bracket(&x, &y)
                .iter()
                .map(|v| v.scale(&m))
                .collect(),
        };
        if w == expected {
            zero_residuals += 1;
        }
        if scheme.from_field(&w).is_some() {
            in_lattice += 1;
        }
    }
    Ok(WordIdentityReport {
        target,
        class: cert.class,
        m: cert.m.to_string(),
        n: cert.n,
        seed,
        samples,
        zero_residuals,
        in_lattice,
        pass: samples > 0 && zero_residuals == samples && in_lattice == samples,
    })
}

/// `w(x, y) = m (x + y)` exactly for seeded random pairs from the patch.
pub fn check_word_sum_identity(
    patch: &ModelSetPatch,
    cert: &WordCertificate,
    samples: u64,
    seed: u64,
) -> Result<WordIdentityReport, VerifyError> {
    check_word(patch, cert, Target::Sum, samples, seed)
}

/// `w'(x, y) = m' [x, y]` exactly for seeded random pairs from the patch.
pub fn check_bracket_word_identity(
    patch: &ModelSetPatch,
    cert: &WordCertificate,
    samples: u64,
    seed: u64,
) -> Result<WordIdentityReport, VerifyError> {
    check_word(patch, cert, Target::Bracket, samples, seed)
}

/// `n_2 ... n_c` from the sum certificates of classes `1..=c`.
///
/// At class 1 `log` is a homomorphism and `n0 = 1`; each further class
/// multiplies by the `n` of its sum word.
pub fn n0_from_certificates(certs: &[WordCertificate]) -> Result<u64, VerifyError> {
    let mut n0 = 1u64;
    for (j, cert) in certs.iter().enumerate() {
        if cert.target != Target::Sum || cert.class != j + 1 {
            return Err(VerifyError::InvalidInput(format!(
                "certificate {j} must be a sum certificate of class {}",
                j + 1
            )));
        }
        if j > 0 {
            n0 = n0
                .checked_mul(cert.n)
                .ok_or_else(|| VerifyError::InvalidInput("n0 overflows".into()))?;
        }
    }
    Ok(n0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogImageReport {
    pub n: usize,
    pub n0: u64,
    pub small_points: u64,
    pub large_points: u64,
    pub delone: DeloneReport,
    pub word_check: WordIdentityReport,
    pub pass: bool,
}

impl LogImageReport {
    pub fn to_text(&self) -> String {
        format!(
            "log_image n {} n0 {} small_points {} large_points {}\n{}{}log_image {}\n",
            self.n,
            self.n0,
            self.small_points,
            self.large_points,
            self.delone.to_text(),
            self.word_check.to_text(),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Euclidean Delone checks of `L^n` (as vectors of exponential coordinates)
/// on balls of radius `small` and `large`, plus a word check on `L^n`.
#[allow(clippy::too_many_arguments)]
pub fn log_image_delone(
    patch: &ModelSetPatch,
    n: usize,
    certs: &[WordCertificate],
    small: &Rational,
    large: &Rational,
    grid_step: f64,
    samples: u64,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<LogImageReport, VerifyError> {
    let class = patch.scheme().algebra().class();
    if certs.len() < class {
        return Err(VerifyError::InvalidInput(format!(
            "need sum certificates for classes 1..={class}"
        )));
    }
    let n0 = n0_from_certificates(&certs[..class])?;
    if (n as u64) < n0 {
        return Err(VerifyError::InvalidInput(format!(
            "n = {n} is below n0 = {n0}"
        )));
    }
    let scale = |r: &Rational| -> Result<(ModelSetPatch, DeloneScale), VerifyError> {
        let p = product_patch(patch, n, r)?;
        let s = DeloneScale {
            radius: r.to_f64().unwrap_or(f64::NAN),
            separation: min_separation(&p, Metric::Euclidean)?,
            covering: covering_radius(&p, Metric::Euclidean, grid_step)?,
        };
        Ok((p, s))
    };
    let (ps, a) = scale(small)?;
    let (pl, b) = scale(large)?;
    let delone = judge(a, b, thresholds);
    let word_check = check_word_sum_identity(&ps, &certs[class - 1], samples, seed)?;
    Ok(LogImageReport {
        n,
        n0,
        small_points: ps.len() as u64,
        large_points: pl.len() as u64,
        pass: delone.pass && word_check.pass,
        delone,
        word_check,
    })
}
