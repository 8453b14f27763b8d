//! Sums of `X = {0} u +-{k^n + k^-n}`: `k`-fold sums stay away from zero,
//! `(k+1)`-fold sums do not.

use super::VerifyError;
use crate::exactfield::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

const MAX_SUMSET: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowersReport {
    pub k: u32,
    pub n_max: u32,
    pub set_size: usize,
    pub k_fold_sums: usize,
    /// Smallest nonzero `|s|` over `k`-fold sums, exact.
    pub min_nonzero_k_fold: String,
    pub min_nonzero_k_fold_f64: f64,
    /// Every nonzero `k`-fold sum has `|s| >= k - 1`.
    pub k_fold_bound_holds: bool,
    pub k1_fold_sums: usize,
    /// `n` for which `k^-(n+1) - k^-(n-1)` is a `(k+1)`-fold sum.
    pub targets_found: Vec<u32>,
    pub targets_missing: Vec<u32>,
    pub min_nonzero_k1_fold: String,
    pub min_nonzero_k1_fold_f64: f64,
    pub pass: bool,
}

impl PowersReport {
    pub fn to_text(&self) -> String {
        format!(
            "powers k {} n_max {} set_size {}\nk_fold_sums {} min_nonzero_k_fold {} ({:.9}) bound_k_minus_1 {}\nk1_fold_sums {} targets_found {} targets_missing {:?} min_nonzero_k1_fold {} ({:.3e})\npowers {}\n",
            self.k,
            self.n_max,
            self.set_size,
            self.k_fold_sums,
            self.min_nonzero_k_fold,
            self.min_nonzero_k_fold_f64,
            if self.k_fold_bound_holds { "PASS" } else { "FAIL" },
            self.k1_fold_sums,
            self.targets_found.len(),
            self.targets_missing,
            self.min_nonzero_k1_fold,
            self.min_nonzero_k1_fold_f64,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn sumset(a: &BTreeSet<BigInt>, x: &[BigInt]) -> Result<BTreeSet<BigInt>, VerifyError> {
    let mut out = BTreeSet::new();
    for s in a {
        for v in x {
            out.insert(s + v);
        }
        if out.len() > MAX_SUMSET {
            return Err(VerifyError::BudgetExceeded {
                partial: out.len() as u64,
                budget: MAX_SUMSET as u64,
            });
        }
    }
    Ok(out)
}

fn min_nonzero(s: &BTreeSet<BigInt>) -> BigInt {
    s.iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.abs())
        .min()
        .unwrap_or_default()
}

/// Exhaustive check with `X` built from `n = 1..=n_max`.
pub fn counterexample_powers(k: u32, n_max: u32) -> Result<PowersReport, VerifyError> {
    if k < 2 || n_max < 3 {
        return Err(VerifyError::InvalidInput(
            "need k >= 2 and n_max >= 3".into(),
        ));
    }
    let kb = BigInt::from(k);
    // everything is scaled by k^n_max
    let scale = num_traits::pow(kb.clone(), n_max as usize);
    let pw = |e: u32| num_traits::pow(kb.clone(), e as usize);
    let mut x = vec![BigInt::zero()];
    for n in 1..=n_max {
        let y = pw(n + n_max) + pw(n_max - n);
        x.push(-y.clone());
        x.push(y);
    }
    x.sort();
    let mut sums: BTreeSet<BigInt> = x.iter().cloned().collect();
    for _ in 1..k {
        sums = sumset(&sums, &x)?;
    }
    let bound = &scale * BigInt::from(k - 1);
    let k_fold_bound_holds = sums.iter().all(|s| s.is_zero() || s.abs() >= bound);
    let mk = min_nonzero(&sums);
    let k_fold_sums = sums.len();
    let sums1 = sumset(&sums, &x)?;
    let mut targets_found = Vec::new();
    let mut targets_missing = Vec::new();
    for n in 1..n_max {
        let t = pw(n_max - n - 1) - pw(n_max - n + 1);
        if sums1.contains(&t) {
            targets_found.push(n);
        } else {
            targets_missing.push(n);
        }
    }
    let mk1 = min_nonzero(&sums1);
    let as_rat = |v: &BigInt| Rational::new(v.clone(), scale.clone());
    let f = |v: &BigInt| as_rat(v).to_f64().unwrap_or(f64::NAN);
    Ok(PowersReport {
        k,
        n_max,
        set_size: x.len(),
        k_fold_sums,
        min_nonzero_k_fold: as_rat(&mk).to_string(),
        min_nonzero_k_fold_f64: f(&mk),
        k_fold_bound_holds,
        k1_fold_sums: sums1.len(),
        pass: k_fold_bound_holds && targets_missing.is_empty(),
        targets_found,
        targets_missing,
        min_nonzero_k1_fold: as_rat(&mk1).to_string(),
        min_nonzero_k1_fold_f64: f(&mk1),
    })
}
