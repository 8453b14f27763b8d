//! Elements of the free nilpotent Lie algebra and the BCH product.

use super::hall::HallBasis;
use crate::exactfield::Rational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Sparse combination of Hall basis elements.
#[derive(Clone)]
pub struct FreeNilpElem {
    basis: Arc<HallBasis>,
    coeffs: BTreeMap<usize, Rational>,
}

impl PartialEq for FreeNilpElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for FreeNilpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeNilpElem({self})")
    }
}

impl FreeNilpElem {
    pub fn zero(basis: &Arc<HallBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element with index `i`.
    pub fn basis_element(basis: &Arc<HallBasis>, i: usize) -> Self {
        Self::from_coeffs(basis, [(i, Rational::one())])
    }

    /// Generator `X_i`.
    pub fn generator(basis: &Arc<HallBasis>, i: usize) -> Self {
        assert!(i < basis.generators(), "generator index out of range");
        Self::basis_element(basis, i)
    }

    pub fn from_coeffs(
        basis: &Arc<HallBasis>,
        coeffs: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Self {
        let mut m = BTreeMap::new();
        for (i, c) in coeffs {
            assert!(i < basis.len(), "Hall index out of range");
            if !c.is_zero() {
                m.insert(i, c);
            }
        }
        Self {
            basis: Arc::clone(basis),
            coeffs: m,
        }
    }

    pub fn from_dense(basis: &Arc<HallBasis>, v: Vec<Rational>) -> Self {
        Self::from_coeffs(basis, v.into_iter().enumerate())
    }

    pub fn basis(&self) -> &Arc<HallBasis> {
        &self.basis
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dense(&self) -> Vec<Rational> {
        (0..self.basis.len()).map(|i| self.coeff(i)).collect()
    }

    /// Component of degree exactly `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        Self::from_coeffs(
            &self.basis,
            self.coeffs
                .iter()
                .filter(|(i, _)| self.basis.degree(**i) == d)
                .map(|(i, c)| (*i, c.clone())),
        )
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|&i| self.basis.degree(i)).min()
    }

    fn check(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis),
            "elements over different Hall bases"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut m = self.coeffs.clone();
        for (i, c) in &other.coeffs {
            let e = m.entry(*i).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                m.remove(i);
            }
        }
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: m,
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(&self.basis);
        }
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn to_series(&self) -> Vec<Rational> {
        self.basis.expand(&self.dense())
    }

    fn from_series(basis: &Arc<HallBasis>, s: &[Rational]) -> Self {
        let coords = basis
            .project(s)
            .expect("series is a Lie element by construction");
        Self::from_dense(basis, coords)
    }

    /// Lie bracket, truncated at the class.
    pub fn bracket(&self, other: &Self) -> Self {
        self.check(other);
        let a = self.basis.algebra();
        let s = a.commutator(&self.to_series(), &other.to_series());
        Self::from_series(&self.basis, &s)
    }

    /// Image under the endomorphism `X_i -> s_i X_i`.
    pub fn scale_letters(&self, s: &[Rational]) -> Self {
        Self::from_coeffs(
            &self.basis,
            self.coeffs.iter().map(|(i, c)| {
                let f = self
                    .basis
                    .multidegree(*i)
                    .iter()
                    .zip(s)
                    .fold(Rational::one(), |acc, (&m, si)| {
                        acc * num_traits::pow(si.clone(), m)
                    });
                (*i, c * f)
            }),
        )
    }
}

impl fmt::Display for FreeNilpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.coeffs.iter().enumerate() {
            let name = self.basis.element_name(*i);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag} {name}")?;
            }
        }
        Ok(())
    }
}

/// `log(exp x exp y)` truncated at the class of the common basis.
pub fn bch(x: &FreeNilpElem, y: &FreeNilpElem) -> FreeNilpElem {
    x.check(y);
    let a = x.basis.algebra();
    let g = a.mul(&a.exp(&x.to_series()), &a.exp(&y.to_series()));
    FreeNilpElem::from_series(&x.basis, &a.log(&g))
}

/// `log(exp x_1 ... exp x_n)` in one pass.
pub fn bch_many(basis: &Arc<HallBasis>, xs: &[FreeNilpElem]) -> FreeNilpElem {
    let a = basis.algebra();
    let mut g = a.one();
    for x in xs {
        g = a.mul(&g, &a.exp(&x.to_series()));
    }
    FreeNilpElem::from_series(basis, &a.log(&g))
}
