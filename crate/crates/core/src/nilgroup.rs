//! The simply connected nilpotent Lie group of a [`LieAlgebra`] in the
//! exponential chart: elements are coordinate vectors, the product is the BCH
//! series specialized to the structure constants, and `x^e = e x`.

use crate::exactfield::{Embedding, QuadFieldElem, Rational, Scalar};
use crate::freenilp::{bch, hall_basis, FreeNilpElem, GroupWord, HallTree, WordError};
use crate::liealg::LieAlgebra;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupError {
    #[error("element has {got} coordinates, the group has dimension {expected}")]
    AlgebraMismatch { expected: usize, got: usize },
    #[error("the standard basis is not adapted to the lower central series")]
    NotAdapted,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Exponent vector over `2 dim` variables `(x_1..x_n, y_1..y_n)`.
pub type Monomial = Vec<u8>;

/// Polynomial form of the product: coordinate `k` of `x y` is
/// `sum coeff * prod x_i^a_i y_j^b_j` over `polys[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLaw<F: Scalar> {
    dim: usize,
    polys: Vec<Vec<(Monomial, F)>>,
}

type PolyMap<F> = BTreeMap<Monomial, F>;

fn poly_mul<F: Scalar>(p: &PolyMap<F>, q: &PolyMap<F>) -> PolyMap<F> {
    let mut out: PolyMap<F> = BTreeMap::new();
    for (mp, cp) in p {
        for (mq, cq) in q {
            let m: Monomial = mp.iter().zip(mq).map(|(a, b)| a + b).collect();
            let c = cp.mul_ref(cq);
            match out.get_mut(&m) {
                Some(v) => *v = v.add_ref(&c),
                None => {
                    out.insert(m, c);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero_elem());
    out
}

fn poly_add_scaled<F: Scalar>(acc: &mut PolyMap<F>, p: &PolyMap<F>, s: &F) {
    for (m, c) in p {
        let c = c.mul_ref(s);
        match acc.get_mut(m) {
            Some(v) => *v = v.add_ref(&c),
            None => {
                acc.insert(m.clone(), c);
            }
        }
    }
    acc.retain(|_, v| !v.is_zero_elem());
}

impl<F: Scalar> GroupLaw<F> {
    /// Specializes the free BCH series of the algebra's class.
    pub fn compile(g: &LieAlgebra<F>) -> Self {
        let n = g.dim();
        let c = g.class().max(1);
        let basis = hall_basis(2, c);
        let x = FreeNilpElem::generator(&basis, 0);
        let y = FreeNilpElem::generator(&basis, 1);
        let series = bch(&x, &y);
        let zero = g.zero().clone();
        let var = |i: usize| -> PolyMap<F> {
            let mut m = vec![0u8; 2 * n];
            m[i] = 1;
            BTreeMap::from([(m, zero.one_like())])
        };
        // value of each Hall element as a vector of polynomials
        let mut values: Vec<Vec<PolyMap<F>>> = Vec::with_capacity(basis.len());
        for h in 0..basis.len() {
            let v = match basis.tree(h) {
                HallTree::Letter(0) => (0..n).map(var).collect(),
                HallTree::Letter(_) => (0..n).map(|i| var(n + i)).collect(),
                HallTree::Bracket(u, w) => {
                    let mut out: Vec<PolyMap<F>> = vec![BTreeMap::new(); n];
                    for i in 0..n {
                        if values[u][i].is_empty() {
                            continue;
                        }
                        for j in 0..n {
                            if values[w][j].is_empty() {
                                continue;
                            }
                            let prod = poly_mul(&values[u][i], &values[w][j]);
                            for (k, slot) in out.iter_mut().enumerate() {
                                let s = g.coeff(i, j, k);
                                if !s.is_zero_elem() {
                                    poly_add_scaled(slot, &prod, s);
                                }
                            }
                        }
                    }
                    out
                }
            };
            values.push(v);
        }
        let mut polys: Vec<PolyMap<F>> = vec![BTreeMap::new(); n];
        for (h, q) in series.terms() {
            let s = zero.from_rational_like(q);
            for (k, slot) in polys.iter_mut().enumerate() {
                poly_add_scaled(slot, &values[h][k], &s);
            }
        }
        Self {
            dim: n,
            polys: polys.into_iter().map(|p| p.into_iter().collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polys(&self) -> &[Vec<(Monomial, F)>] {
        &self.polys
    }

    /// Highest total degree among all coordinate polynomials.
    pub fn degree(&self) -> usize {
        self.polys
            .iter()
            .flatten()
            .map(|(m, _)| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Coordinate `k` of `x y`.
    pub fn coord(&self, k: usize, x: &[F], y: &[F]) -> F {
        let zero = x.first().or(y.first()).expect("nonempty").zero_like();
        let n = self.dim;
        self.polys[k].iter().fold(zero, |acc, (m, c)| {
            let mut t = c.clone();
            for (v, &e) in m.iter().enumerate() {
                let base = if v < n { &x[v] } else { &y[v - n] };
                for _ in 0..e {
                    t = t.mul_ref(base);
                }
            }
            acc.add_ref(&t)
        })
    }

    pub fn mul(&self, x: &[F], y: &[F]) -> Vec<F> {
        (0..self.dim).map(|k| self.coord(k, x, y)).collect()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> GroupLaw<G> {
        GroupLaw {
            dim: self.dim,
            polys: self
                .polys
                .iter()
                .map(|p| p.iter().map(|(m, c)| (m.clone(), f(c))).collect())
                .collect(),
        }
    }
}

impl GroupLaw<Rational> {
    pub fn to_f64(&self) -> GroupLaw<f64> {
        self.map(Scalar::approx)
    }
}

impl GroupLaw<QuadFieldElem> {
    /// The real law in the chosen embedding.
    pub fn embedded(&self, which: Embedding) -> GroupLaw<f64> {
        self.map(|c| c.embed(which))
    }
}

/// Group element in the exponential chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilGroupElem<F> {
    pub coords: Vec<F>,
}

impl<F: Scalar> NilGroupElem<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Self { coords }
    }
}

/// A group with its compiled law and quasi-norm weights.
#[derive(Debug, Clone)]
pub struct NilGroup<F: Scalar> {
    algebra: LieAlgebra<F>,
    law: GroupLaw<F>,
    weights: Option<Vec<usize>>,
}

impl<F: Scalar> NilGroup<F> {
    pub fn new(algebra: LieAlgebra<F>) -> Self {
        let law = GroupLaw::compile(&algebra);
        let weights = algebra.standard_weights();
        Self {
            algebra,
            law,
            weights,
        }
    }

    /// Group of the algebra rewritten in its adapted basis.
    pub fn adapted(algebra: &LieAlgebra<F>) -> Self {
        let ab = algebra.adapted_basis();
        let g = algebra
            .change_basis(&ab.vectors)
            .expect("adapted basis is a basis");
        Self::new(g)
    }

    pub fn algebra(&self) -> &LieAlgebra<F> {
        &self.algebra
    }

    pub fn law(&self) -> &GroupLaw<F> {
        &self.law
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn weights(&self) -> Result<&[usize], GroupError> {
        self.weights.as_deref().ok_or(GroupError::NotAdapted)
    }

    pub fn identity(&self) -> NilGroupElem<F> {
        NilGroupElem::new(vec![self.algebra.zero().zero_like(); self.dim()])
    }

    fn check(&self, x: &NilGroupElem<F>) -> Result<(), GroupError> {
        if x.coords.len() != self.dim() {
            return Err(GroupError::AlgebraMismatch {
                expected: self.dim(),
                got: x.coords.len(),
            });
        }
        Ok(())
    }

    pub fn group_mul(
        &self,
        x: &NilGroupElem<F>,
        y: &NilGroupElem<F>,
    ) -> Result<NilGroupElem<F>, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(NilGroupElem::new(self.law.mul(&x.coords, &y.coords)))
    }

    pub fn inverse(&self, x: &NilGroupElem<F>) -> NilGroupElem<F> {
        NilGroupElem::new(x.coords.iter().map(Scalar::neg_ref).collect())
    }

    /// `x^e = exp(e log x)`.
    pub fn pow(&self, x: &NilGroupElem<F>, e: i64) -> NilGroupElem<F> {
        let s = self
            .algebra
            .zero()
            .from_rational_like(&Rational::from_integer(e.into()));
        NilGroupElem::new(x.coords.iter().map(|c| c.mul_ref(&s)).collect())
    }

    pub fn eval_word(
        &self,
        w: &GroupWord,
        args: &[NilGroupElem<F>],
    ) -> Result<NilGroupElem<F>, GroupError> {
        for a in args {
            self.check(a)?;
        }
        Ok(w.evaluate(
            args,
            self.identity(),
            |a, b| NilGroupElem::new(self.law.mul(&a.coords, &b.coords)),
            |a, e| self.pow(a, e),
        )?)
    }

    /// `max_i |x_i|^(1/w_i)` in the principal embedding.
    pub fn quasi_norm(&self, x: &NilGroupElem<F>) -> Result<f64, GroupError> {
        self.check(x)?;
        let w = self.weights()?;
        let approx: Vec<f64> = x.coords.iter().map(Scalar::approx).collect();
        Ok(weighted_norm(&approx, w))
    }

    /// `||x^-1 y||`.
    pub fn quasi_dist(&self, x: &NilGroupElem<F>, y: &NilGroupElem<F>) -> Result<f64, GroupError> {
        let d = self.group_mul(&self.inverse(x), y)?;
        self.quasi_norm(&d)
    }

    /// Sampled constant `C` with `||xy|| <= C (||x|| + ||y||)` over random
    /// pairs with coordinates in `[-r^w_i, r^w_i]`.
    pub fn quasi_triangle_constant(
        &self,
        radius: f64,
        samples: usize,
        seed: u64,
    ) -> Result<f64, GroupError> {
        let w = self.weights()?.to_vec();
        let law = self.law.map(Scalar::approx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut draw = || -> Vec<f64> {
                w.iter()
                    .map(|&wi| {
                        let b = radius.powi(wi as i32);
                        rng.gen_range(-b..=b)
                    })
                    .collect()
            };
            let (x, y) = (draw(), draw());
            let denom = weighted_norm(&x, &w) + weighted_norm(&y, &w);
            if denom > 0.0 {
                worst = worst.max(weighted_norm(&law.mul(&x, &y), &w) / denom);
            }
        }
        Ok(worst)
    }
}

/// `max_i |v_i|^(1/w_i)`.
pub fn weighted_norm(v: &[f64], weights: &[usize]) -> f64 {
    v.iter()
        .zip(weights)
        .map(|(x, &w)| match w {
            1 => x.abs(),
            2 => x.abs().sqrt(),
            _ => x.abs().powf(1.0 / w as f64),
        })
        .fold(0.0, f64::max)
}
