//! Splitting a nilpotent Lie algebra into indecomposable ideals through
//! idempotents of its centroid.
//!
//! A centroid idempotent `e` splits `g = e(g) (+) (1-e)(g)` into ideals, and
//! every such splitting arises this way. Idempotents are produced from the
//! Fitting decomposition of `(a - lambda)` for centroid elements `a` and
//! eigenvalues `lambda` in the coefficient field. Indecomposability is
//! certified when the centroid modulo its radical is one-dimensional, since
//! then its only idempotents are `0` and `1`.

use super::{LieAlgebra, LieAlgebraError};
use crate::exactfield::{Rational, Scalar};
use crate::linalg::{self, Matrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Centroid candidates examined per ideal before giving up.
pub const DEFAULT_SEARCH_BUDGET: usize = 400;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecomposeError {
    #[error("idempotent search exhausted after {tried} candidates on an ideal of dimension {ideal_dim} (centroid dim {centroid_dim}, radical dim {radical_dim})")]
    IdempotentSearchExhausted {
        tried: usize,
        ideal_dim: usize,
        centroid_dim: usize,
        radical_dim: usize,
    },
    #[error(transparent)]
    Algebra(#[from] LieAlgebraError),
}

/// Complementary idempotents `A + B = 1` realizing one splitting step, in the
/// coordinates of the ideal that was split.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentPair<F: Scalar> {
    pub a: Matrix<F>,
    pub b: Matrix<F>,
}

impl<F: Scalar> IdempotentPair<F> {
    /// Checks `A + B = 1`, `det A = det B = 0`, `A^2 = A`, `B^2 = B`,
    /// `A[e_i,e_j] = [Ae_i,Ae_j]` and `B[e_i,e_j] = [Be_i,Be_j]`.
    pub fn satisfies_system(&self, g: &LieAlgebra<F>) -> bool {
        let n = g.dim();
        let zero = g.zero();
        let id = linalg::identity(zero, n);
        let sum: Matrix<F> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add_ref(y)).collect())
            .collect();
        if sum != id {
            return false;
        }
        if !linalg::determinant(&self.a).is_zero_elem()
            || !linalg::determinant(&self.b).is_zero_elem()
        {
            return false;
        }
        if linalg::mat_mul(&self.a, &self.a) != self.a
            || linalg::mat_mul(&self.b, &self.b) != self.b
        {
            return false;
        }
        for p in [&self.a, &self.b] {
            for i in 0..n {
                for j in 0..n {
                    let (ei, ej) = (g.basis_vector(i), g.basis_vector(j));
                    let lhs = linalg::mat_vec(p, &g.bracket(&ei, &ej));
                    let rhs = g.bracket(&linalg::mat_vec(p, &ei), &linalg::mat_vec(p, &ej));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Invariants used to compare factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoInvariants {
    pub dim: usize,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
    pub center_dim: usize,
    pub centroid_dim: usize,
    /// Rank of the bracket viewed as a `dim x dim^2` matrix.
    pub bracket_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    /// Invariants agree but no decision procedure applies at this dimension.
    InvariantsEqualUndecided,
}

pub fn iso_invariants<F: Scalar>(g: &LieAlgebra<F>) -> IsoInvariants {
    let f = g.lower_central_series();
    let mut derived = vec![linalg::identity(g.zero(), g.dim())];
    loop {
        let last = derived.last().expect("nonempty");
        if last.is_empty() {
            break;
        }
        let mut gens = Vec::new();
        for x in last {
            for y in last {
                gens.push(g.bracket(x, y));
            }
        }
        let next = linalg::span_basis(&gens);
        derived.push(next);
    }
    IsoInvariants {
        dim: g.dim(),
        lower_central_dims: f.dims(),
        derived_dims: derived.iter().map(Vec::len).collect(),
        center_dim: f.center.len(),
        centroid_dim: g.centroid().len(),
        bracket_rank: {
            let n = g.dim();
            let rows: Matrix<F> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| g.bracket(&g.basis_vector(i), &g.basis_vector(j)))
                .collect();
            linalg::rank(&rows)
        },
    }
}

/// Nilpotent Lie algebras of dimension at most 4 over a field of
/// characteristic zero are determined by dimension and lower central series
/// (abelian, `h3 (+) k^m`, filiform), so equal invariants decide isomorphism
/// there.
pub fn same_iso_class<F: Scalar>(g: &LieAlgebra<F>, h: &LieAlgebra<F>) -> IsoVerdict {
    let (a, b) = (iso_invariants(g), iso_invariants(h));
    if a != b {
        IsoVerdict::NotIsomorphic
    } else if a.dim <= 4 {
        IsoVerdict::Isomorphic
    } else {
        IsoVerdict::InvariantsEqualUndecided
    }
}

/// One indecomposable ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<F: Scalar> {
    /// Basis of the ideal in the coordinates of the input algebra.
    pub ideal_basis: Vec<Vec<F>>,
    /// The ideal as a Lie algebra in that basis.
    pub algebra: LieAlgebra<F>,
    pub invariants: IsoInvariants,
    /// Centroid dimension and radical dimension; their difference is 1.
    pub centroid_dim: usize,
    pub radical_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult<F: Scalar> {
    pub factors: Vec<Factor<F>>,
    /// Idempotent pairs used at each split, with the ideal they split (in that
    /// ideal's own coordinates).
    pub splits: Vec<(LieAlgebra<F>, IdempotentPair<F>)>,
    pub candidates_tried: usize,
}

impl<F: Scalar> DecompositionResult<F> {
    pub fn is_indecomposable(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.factors.iter().map(|f| f.algebra.dim()).collect();
        d.sort_unstable();
        d
    }

    /// Isomorphism classes with multiplicities, sorted.
    pub fn iso_classes(&self) -> Vec<(IsoInvariants, usize)> {
        let mut inv: Vec<IsoInvariants> =
            self.factors.iter().map(|f| f.invariants.clone()).collect();
        inv.sort();
        let mut out: Vec<(IsoInvariants, usize)> = Vec::new();
        for i in inv {
            match out.last_mut() {
                Some((last, m)) if *last == i => *m += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }
}

pub fn decompose_indecomposable<F: Scalar>(
    g: &LieAlgebra<F>,
    budget: usize,
) -> Result<DecompositionResult<F>, DecomposeError> {
    let mut result = DecompositionResult {
        factors: Vec::new(),
        splits: Vec::new(),
        candidates_tried: 0,
    };
    let basis = linalg::identity(g.zero(), g.dim());
    split_recursive(g, basis, budget, &mut result)?;
    Ok(result)
}

fn split_recursive<F: Scalar>(
    g: &LieAlgebra<F>,
    basis: Vec<Vec<F>>,
    budget: usize,
    out: &mut DecompositionResult<F>,
) -> Result<(), DecomposeError> {
    let sub = g.on_subspace(&basis)?;
    let centroid = sub.centroid();
    let radical_dim = radical_dim(&centroid, sub.zero());
    if centroid.len() - radical_dim == 1 {
        out.factors.push(Factor {
            invariants: iso_invariants(&sub),
            ideal_basis: basis,
            algebra: sub,
            centroid_dim: centroid.len(),
            radical_dim,
        });
        return Ok(());
    }
    let mut tried = 0;
    for cand in candidates(&centroid) {
        if tried == budget {
            break;
        }
        tried += 1;
        out.candidates_tried += 1;
        if let Some((k, i)) = fitting_split(&sub, &cand) {
            let pair = projector_pair(&sub, &i, &k);
            debug_assert!(pair.satisfies_system(&sub));
            out.splits.push((sub.clone(), pair));
            let to_outer = |v: &Vec<F>| -> Vec<F> {
                let mut w = vec![g.zero().zero_like(); g.dim()];
                for (c, b) in v.iter().zip(&basis) {
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi = wi.add_ref(&c.mul_ref(bi));
                    }
                }
                w
            };
            let first: Vec<Vec<F>> = i.iter().map(to_outer).collect();
            let second: Vec<Vec<F>> = k.iter().map(to_outer).collect();
            split_recursive(g, first, budget, out)?;
            split_recursive(g, second, budget, out)?;
            return Ok(());
        }
    }
    Err(DecomposeError::IdempotentSearchExhausted {
        tried,
        ideal_dim: basis.len(),
        centroid_dim: centroid.len(),
        radical_dim,
    })
}

/// `dim rad(C)` by Dickson's criterion: in characteristic zero the radical of a
/// matrix algebra is the kernel of its trace form.
fn radical_dim<F: Scalar>(centroid: &[Matrix<F>], zero: &F) -> usize {
    let m = centroid.len();
    let trace = |x: &Matrix<F>| {
        x.iter()
            .enumerate()
            .fold(zero.zero_like(), |acc, (i, row)| acc.add_ref(&row[i]))
    };
    let gram: Matrix<F> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| trace(&linalg::mat_mul(&centroid[i], &centroid[j])))
                .collect()
        })
        .collect();
    linalg::kernel(&gram, m, zero).len()
}

/// Deterministic candidate order: basis elements, then `c_i + t c_j` for
/// `t = 1, -1, 2, -2` over pairs in lexicographic order.
fn candidates<F: Scalar>(centroid: &[Matrix<F>]) -> impl Iterator<Item = Matrix<F>> + '_ {
    let singles = centroid.iter().cloned();
    let m = centroid.len();
    let pairs = [1i64, -1, 2, -2].into_iter().flat_map(move |t| {
        (0..m).flat_map(move |i| {
            (i + 1..m).map(move |j| {
                let proto = &centroid[i][0][0];
                let tq = proto.from_rational_like(&Rational::from_integer(BigInt::from(t)));
                centroid[i]
                    .iter()
                    .zip(&centroid[j])
                    .map(|(ri, rj)| {
                        ri.iter()
                            .zip(rj)
                            .map(|(x, y)| x.add_ref(&tq.mul_ref(y)))
                            .collect()
                    })
                    .collect()
            })
        })
    });
    singles.chain(pairs)
}

/// Fitting decomposition of `(a - lambda)^n` for an eigenvalue `lambda` in the
/// base field; returns `(kernel, image)` bases when both are proper.
fn fitting_split<F: Scalar>(
    g: &LieAlgebra<F>,
    a: &Matrix<F>,
) -> Option<(Vec<Vec<F>>, Vec<Vec<F>>)> {
    let n = g.dim();
    let zero = g.zero();
    let mut roots = vec![zero.zero_like()];
    if let Some(mu) = minimal_polynomial(a) {
        for r in rational_roots(&mu) {
            let v = zero.from_rational_like(&r);
            if !roots.contains(&v) {
                roots.push(v);
            }
        }
    }
    for lambda in roots {
        let mut shifted = a.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = row[i].sub_ref(&lambda);
        }
        let mut power = linalg::identity(zero, n);
        for _ in 0..n {
            power = linalg::mat_mul(&power, &shifted);
        }
        let kernel = linalg::kernel(&power, n, zero);
        if kernel.is_empty() || kernel.len() == n {
            continue;
        }
        // image = span of columns
        let image = linalg::span_basis(&linalg::transpose(&power));
        return Some((kernel, image));
    }
    None
}

/// Projectors `A` onto `first` along `second` and `B = 1 - A`.
fn projector_pair<F: Scalar>(
    g: &LieAlgebra<F>,
    first: &[Vec<F>],
    second: &[Vec<F>],
) -> IdempotentPair<F> {
    let n = g.dim();
    let zero = g.zero();
    let cols: Vec<Vec<F>> = first.iter().chain(second).cloned().collect();
    let p = linalg::transpose(&cols);
    let p_inv = linalg::inverse(&p).expect("complementary subspaces");
    let mut diag = linalg::zeros(zero, n, n);
    for (i, row) in diag.iter_mut().enumerate().take(first.len()) {
        row[i] = zero.one_like();
    }
    let a = linalg::mat_mul(&linalg::mat_mul(&p, &diag), &p_inv);
    let id = linalg::identity(zero, n);
    let b = id
        .iter()
        .zip(&a)
        .map(|(ri, ra)| ri.iter().zip(ra).map(|(x, y)| x.sub_ref(y)).collect())
        .collect();
    IdempotentPair { a, b }
}

/// Minimal polynomial coefficients `[c_0, ..., c_k = 1]`, rational entries
/// only; `None` when the matrix powers leave the rationals.
fn minimal_polynomial<F: Scalar>(a: &Matrix<F>) -> Option<Vec<Rational>> {
    let n = a.len();
    let zero = &a[0][0];
    let flat_q = |m: &Matrix<F>| -> Option<Vec<Rational>> {
        m.iter().flatten().map(Scalar::rational_value).collect()
    };
    let mut powers: Vec<Vec<Rational>> = Vec::new();
    let mut current = linalg::identity(zero, n);
    for _ in 0..=n {
        let v = flat_q(&current)?;
        if !powers.is_empty() {
            let coords = linalg::coordinates_in(&powers, &v);
            if let Some(c) = coords {
                let mut poly: Vec<Rational> = c.into_iter().map(|x| -x).collect();
                poly.push(Rational::one());
                return Some(poly);
            }
        }
        powers.push(v);
        current = linalg::mat_mul(&current, a);
    }
    None
}

/// Rational roots by the rational root theorem; skips polynomials whose
/// integer coefficients are too large to factor quickly.
fn rational_roots(poly: &[Rational]) -> Vec<Rational> {
    let den_lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = poly
        .iter()
        .map(|c| (c * Rational::from_integer(den_lcm.clone())).to_integer())
        .collect();
    let mut roots = Vec::new();
    while ints.len() > 1 && ints[0].is_zero() {
        ints.remove(0);
        roots.push(Rational::zero());
    }
    if ints.len() <= 1 {
        return roots;
    }
    let (Some(c0), Some(ck)) = (
        ints[0].abs().to_u64(),
        ints.last().expect("nonempty").abs().to_u64(),
    ) else {
        return roots;
    };
    const LIMIT: u64 = 1_000_000;
    if c0 > LIMIT || ck > LIMIT {
        return roots;
    }
    let divisors = |v: u64| (1..=v).filter(move |d| v % d == 0);
    let eval = |r: &Rational| {
        ints.iter().rev().fold(Rational::zero(), |acc, c| {
            acc * r + Rational::from_integer(c.clone())
        })
    };
    for p in divisors(c0) {
        for q in divisors(ck) {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(s) * BigInt::from(p), BigInt::from(q));
                if eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat_int, CoeffField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> Rational {
        rat_int(n)
    }

    #[test]
    fn heisenberg_is_indecomposable() {
        let d = decompose_indecomposable(&LieAlgebra::heisenberg(), DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(d.is_indecomposable());
        assert_eq!(d.factors[0].centroid_dim - d.factors[0].radical_dim, 1);
    }

    #[test]
    fn heisenberg_plus_line_splits() {
        let g = LieAlgebra::heisenberg()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        let d = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(d.factor_dims(), vec![1, 3]);
        for (alg, pair) in &d.splits {
            assert!(pair.satisfies_system(alg));
        }
    }

    #[test]
    fn abelian_three_splits_into_lines() {
        let d = decompose_indecomposable(&LieAlgebra::abelian(3), DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(d.factor_dims(), vec![1, 1, 1]);
    }

    #[test]
    fn factors_reassemble_and_commute() {
        let g = LieAlgebra::heisenberg()
            .direct_sum(&LieAlgebra::filiform4())
            .unwrap()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        let d = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(d.factor_dims(), vec![1, 3, 4]);
        let all: Vec<Vec<Rational>> = d
            .factors
            .iter()
            .flat_map(|f| f.ideal_basis.clone())
            .collect();
        assert_eq!(linalg::rank(&all), g.dim());
        for (a, fa) in d.factors.iter().enumerate() {
            for fb in d.factors.iter().skip(a + 1) {
                for x in &fa.ideal_basis {
                    for y in &fb.ideal_basis {
                        assert!(g.bracket(x, y).iter().all(|c| c.is_zero_elem()));
                    }
                }
            }
        }
    }

    /// The printed mixed condition `B[e_i,e_j] = [Ae_i, Be_j]` fails for the
    /// obvious block projectors of `h3 (+) R`, while the corrected
    /// `B[e_i,e_j] = [Be_i, Be_j]` holds.
    #[test]
    fn printed_mixed_condition_rejects_block_projectors() {
        let g = LieAlgebra::heisenberg()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        let mut a = linalg::zeros(&r(0), 4, 4);
        for i in 0..3 {
            a[i][i] = r(1);
        }
        let mut b = linalg::zeros(&r(0), 4, 4);
        b[3][3] = r(1);
        let pair = IdempotentPair {
            a: a.clone(),
            b: b.clone(),
        };
        assert!(pair.satisfies_system(&g));
        let (e0, e1) = (g.basis_vector(0), g.basis_vector(1));
        let b_of_bracket = linalg::mat_vec(&b, &g.bracket(&e0, &e1));
        let mixed = g.bracket(&linalg::mat_vec(&a, &e0), &linalg::mat_vec(&b, &e1));
        assert_eq!(b_of_bracket, mixed); // both zero here
        let swapped = IdempotentPair { a: b, b: a };
        // with A and B swapped the mixed form demands A[e1,e2] = [Be1, Ae2] = 0
        let (sa, sb) = (&swapped.a, &swapped.b);
        let lhs = linalg::mat_vec(sb, &g.bracket(&e0, &e1));
        let rhs = g.bracket(&linalg::mat_vec(sa, &e0), &linalg::mat_vec(sb, &e1));
        assert_ne!(lhs, rhs);
        assert!(swapped.satisfies_system(&g));
    }

    /// Exhaustive check over idempotent-like 0/1 diagonal-block candidates:
    /// no projector with entries in {-1,0,1} satisfies the corrected system on h3.
    #[test]
    fn no_small_idempotent_pair_on_heisenberg() {
        let g = LieAlgebra::heisenberg();
        let n = 3;
        let id = linalg::identity(&r(0), n);
        for code in 0..3usize.pow(9) {
            let mut c = code;
            let mut a = linalg::zeros(&r(0), n, n);
            for k in 0..9 {
                a[k / n][k % n] = r((c % 3) as i64 - 1);
                c /= 3;
            }
            let b = id
                .iter()
                .zip(&a)
                .map(|(ri, ra)| ri.iter().zip(ra).map(|(x, y)| x - y).collect())
                .collect();
            assert!(!IdempotentPair { a, b }.satisfies_system(&g));
        }
    }

    fn random_basis_change(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
        loop {
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..n).map(|_| r(rng.gen_range(-3..=3))).collect())
                .collect();
            if linalg::rank(&m) == n {
                return m;
            }
        }
    }

    #[test]
    fn iso_classes_invariant_under_basis_change() {
        let g = LieAlgebra::heisenberg()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        let reference = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET)
            .unwrap()
            .iso_classes();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let basis = random_basis_change(&mut rng, 4);
            let h = g.change_basis(&basis).unwrap();
            let d = decompose_indecomposable(&h, DEFAULT_SEARCH_BUDGET).unwrap();
            assert_eq!(d.iso_classes(), reference);
        }
    }

    #[test]
    fn iso_verdicts() {
        let h = LieAlgebra::heisenberg();
        let a = LieAlgebra::abelian(3);
        assert_eq!(same_iso_class(&h, &a), IsoVerdict::NotIsomorphic);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h2 = h.change_basis(&random_basis_change(&mut rng, 3)).unwrap();
        assert_eq!(same_iso_class(&h, &h2), IsoVerdict::Isomorphic);
        let h5 = h.direct_sum(&LieAlgebra::abelian(2)).unwrap();
        assert_eq!(
            same_iso_class(&h5, &h5),
            IsoVerdict::InvariantsEqualUndecided
        );
    }

    #[test]
    fn rational_root_finder() {
        // (x - 1)(x + 2)(2x - 3) = 2x^3 - x^2 - 7x + 6
        let poly = vec![r(6), r(-7), r(-1), r(2)];
        let mut roots = rational_roots(&poly);
        roots.sort();
        assert_eq!(roots, vec![r(-2), r(1), Rational::new(3.into(), 2.into())]);
        assert!(rational_roots(&[r(-2), r(0), r(1)]).is_empty());
    }

    #[test]
    fn quad_field_algebra_decomposes() {
        let g = LieAlgebra::heisenberg()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap()
            .lift_to_quad(2)
            .unwrap();
        assert_eq!(g.field(), CoeffField::Quad(2));
        let d = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(d.factor_dims(), vec![1, 3]);
    }
}
