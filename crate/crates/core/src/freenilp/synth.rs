//! Synthesis of words whose logarithm is a multiple of `X + Y` or `[X, Y]`
//! in every nilpotent group of class at most `c`.
//!
//! Start from a seed that is correct in low degree. At degree `d`, the
//! residual `log w - m * target` is a combination of degree-`d` Hall elements.
//! Substituting `x -> x^s, y -> y^s` multiplies it by `s^d` (and the target by
//! `s` or `s^2`), so a suitable `s` makes all coefficients integral; each
//! Hall element is then cancelled by a nested group commutator whose first
//! letter carries the integer coefficient.

use super::elem::FreeNilpElem;
use super::hall::{hall_basis, HallBasis, HallTree};
use super::word::{free_log_of_tree, free_log_of_word, GroupWord, WordError, WordTree};
use crate::exactfield::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;

pub const MAX_SYNTHESIS_CLASS: usize = 5;
pub const MAX_ITERATED_ARITY: usize = 5;
/// Upper bound on the flat letter count of a synthesized word.
pub const DEFAULT_LETTER_BUDGET: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthesisError {
    #[error("word synthesis for class {c} exceeded the budget ({budget})")]
    SynthesisBudgetExceeded { c: usize, budget: String },
    #[error("class {c} outside the supported range 1..={max}")]
    UnsupportedClass { c: usize, max: usize },
    #[error("arity {n} outside the supported range 2..={max}")]
    UnsupportedArity { n: usize, max: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Sum,
    Bracket,
}

impl Target {
    fn degree(self) -> u32 {
        match self {
            Target::Sum => 1,
            Target::Bracket => 2,
        }
    }
}

/// A word `w` with `log w = m * target` in the free nilpotent algebra of
/// class `class`; `residual` is `log w - m * target` and must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WordCertificate {
    pub word: GroupWord,
    pub m: BigInt,
    pub n: u64,
    pub target: Target,
    pub class: usize,
    pub log: FreeNilpElem,
    pub residual: FreeNilpElem,
}

impl WordCertificate {
    /// Recomputes the logarithm from scratch.
    pub fn verify(&self) -> bool {
        let log = free_log_of_word(&self.word, self.class);
        let expected =
            target_elem(log.basis(), self.target).scale(&Rational::from_integer(self.m.clone()));
        log.sub(&expected).is_zero() && self.n == self.word.letter_count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "target": self.target,
            "class": self.class,
            "word": self.word.to_string(),
            "m": self.m.to_string(),
            "n": self.n,
            "log": self.log.to_string(),
            "residual": self.residual.to_string(),
        })
    }
}

fn target_elem(basis: &Arc<HallBasis>, target: Target) -> FreeNilpElem {
    let x = FreeNilpElem::generator(basis, 0);
    let y = FreeNilpElem::generator(basis, 1);
    match target {
        Target::Sum => x.add(&y),
        Target::Bracket => x.bracket(&y),
    }
}

/// Nested group commutator for Hall element `h` whose log is `e * h` plus
/// higher-degree terms.
fn commutator_word(basis: &HallBasis, h: usize, e: i64) -> GroupWord {
    match basis.tree(h) {
        HallTree::Letter(l) => GroupWord::letter(basis.generators(), l, e),
        HallTree::Bracket(u, v) => {
            GroupWord::commutator(&commutator_word(basis, u, e), &commutator_word(basis, v, 1))
        }
    }
}

/// Smallest `s >= 1` with `s^d * q` integral.
fn clearing_scale(q: &Rational, d: u32) -> BigInt {
    let mut den = q.denom().clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while den > BigInt::one() {
        if &p * &p > den {
            p = den.clone();
        }
        let mut v = 0u32;
        while (&den % &p).is_zero() {
            den /= &p;
            v += 1;
        }
        if v > 0 {
            s *= num_traits::pow(p.clone(), v.div_ceil(d) as usize);
        }
        p += 1;
    }
    s
}

fn synthesize(c: usize, target: Target, budget: u64) -> Result<WordCertificate, SynthesisError> {
    if c == 0 || c > MAX_SYNTHESIS_CLASS {
        return Err(SynthesisError::UnsupportedClass {
            c,
            max: MAX_SYNTHESIS_CLASS,
        });
    }
    let basis = hall_basis(2, c);
    let (mut word, mut m, start) = match (target, c) {
        (Target::Sum, 1) => (GroupWord::parse("x y", 2)?, BigInt::one(), 2),
        (Target::Sum, _) => (GroupWord::parse("(x y)(y x)", 2)?, BigInt::from(2), 3),
        (Target::Bracket, 1) => (GroupWord::empty(2), BigInt::one(), 2),
        (Target::Bracket, _) => (GroupWord::parse("x y x^-1 y^-1", 2)?, BigInt::one(), 3),
    };
    let over = |c| SynthesisError::SynthesisBudgetExceeded {
        c,
        budget: format!("{budget} letters, exponents within i64"),
    };
    let tgt = target_elem(&basis, target);
    for d in start..=c {
        let log = free_log_of_word(&word, c);
        let residual = log
            .sub(&tgt.scale(&Rational::from_integer(m.clone())))
            .homogeneous(d);
        if residual.is_zero() {
            continue;
        }
        let s = residual
            .terms()
            .map(|(_, q)| clearing_scale(q, d as u32))
            .fold(BigInt::one(), |acc, s| acc.lcm(&s));
        if !s.is_one() {
            let si = s.to_i64().ok_or_else(|| over(c))?;
            word = word.scale_letters(&[si, si]).map_err(|_| over(c))?;
            m *= num_traits::pow(s.clone(), target.degree() as usize);
        }
        let sd = num_traits::pow(Rational::from_integer(s), d);
        for (h, q) in residual.terms() {
            let e = -(q * &sd);
            debug_assert!(e.is_integer());
            let e = e.to_integer().to_i64().ok_or_else(|| over(c))?;
            word.append(&commutator_word(&basis, h, e));
        }
        if word.letter_count() > budget {
            return Err(over(c));
        }
    }
    let log = free_log_of_word(&word, c);
    let residual = log.sub(&tgt.scale(&Rational::from_integer(m.clone())));
    let cert = WordCertificate {
        n: word.letter_count(),
        word,
        m,
        target,
        class: c,
        log,
        residual,
    };
    if !cert.residual.is_zero() {
        return Err(over(c));
    }
    Ok(cert)
}

/// `w_c` and `m_c` with `log w_c(x, y) = m_c (log x + log y)`.
pub fn synthesize_sum_word(c: usize) -> Result<WordCertificate, SynthesisError> {
    synthesize(c, Target::Sum, DEFAULT_LETTER_BUDGET)
}

/// `w'_c` and `m'_c` with `log w'_c(x, y) = m'_c [log x, log y]`.
pub fn synthesize_bracket_word(c: usize) -> Result<WordCertificate, SynthesisError> {
    synthesize(c, Target::Bracket, DEFAULT_LETTER_BUDGET)
}

/// Same as [`synthesize_sum_word`] with an explicit letter budget.
pub fn synthesize_with_budget(
    c: usize,
    target: Target,
    budget: u64,
) -> Result<WordCertificate, SynthesisError> {
    synthesize(c, target, budget)
}

/// `w_{c,n}` with `log w_{c,n}(x_1..x_n) = m_c^(n-1) (log x_1 + ... + log x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedWord {
    pub base: WordCertificate,
    pub arity: usize,
    pub tree: WordTree,
    /// `m_c^(n-1)`
    pub multiplier: BigInt,
    pub letter_count: BigInt,
    pub log: FreeNilpElem,
}

impl IteratedWord {
    /// Rechecks the identity through the substitution tree.
    pub fn verify(&self) -> bool {
        let log = free_log_of_tree(&self.tree, self.base.class);
        let basis = Arc::clone(log.basis());
        let sum = (0..self.arity).fold(FreeNilpElem::zero(&basis), |acc, i| {
            acc.add(&FreeNilpElem::generator(&basis, i))
        });
        log.sub(&sum.scale(&Rational::from_integer(self.multiplier.clone())))
            .is_zero()
    }
}

pub fn iterate_sum_word(c: usize, n: usize) -> Result<IteratedWord, SynthesisError> {
    if !(2..=MAX_ITERATED_ARITY).contains(&n) {
        return Err(SynthesisError::UnsupportedArity {
            n,
            max: MAX_ITERATED_ARITY,
        });
    }
    let base = synthesize_sum_word(c)?;
    let embed = |w: &GroupWord, letters: [usize; 2]| -> GroupWord {
        let subs: Vec<GroupWord> = letters
            .iter()
            .map(|&l| GroupWord::letter(n, l, 1))
            .collect();
        w.substitute(&subs, n)
    };
    let mut tree = WordTree::Flat(embed(&base.word, [0, 1]));
    let mut mult = base.m.clone();
    for j in 2..n {
        // w_{c,j+1} = w_c(w_{c,j}, x_{j+1}^(m_c^(j-1)))
        let e = mult
            .to_i64()
            .ok_or(SynthesisError::SynthesisBudgetExceeded {
                c,
                budget: "exponent within i64".into(),
            })?;
        tree = WordTree::Subst {
            outer: base.word.clone(),
            args: vec![tree, WordTree::Flat(GroupWord::letter(n, j, e))],
        };
        mult *= &base.m;
    }
    let log = free_log_of_tree(&tree, c);
    let it = IteratedWord {
        letter_count: tree.letter_count(),
        base,
        arity: n,
        tree,
        multiplier: mult,
        log,
    };
    if !it.verify() {
        return Err(SynthesisError::SynthesisBudgetExceeded {
            c,
            budget: "iterated identity failed".into(),
        });
    }
    Ok(it)
}
