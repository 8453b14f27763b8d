//! Nilpotent Lie algebras presented by exact structure constants.

mod decompose;
mod io;

pub use decompose::{
    decompose_indecomposable, iso_invariants, same_iso_class, DecomposeError, DecompositionResult,
    Factor, IdempotentPair, IsoInvariants, IsoVerdict, DEFAULT_SEARCH_BUDGET,
};
pub use io::{parse_algebra, write_algebra, AnyAlgebra};

use crate::exactfield::{CoeffField, QuadFieldElem, Rational, Scalar};
use crate::linalg::{self, Matrix};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieAlgebraError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("bracket table has {got} entries, expected dim^3 = {expected}")]
    BadTableSize { expected: usize, got: usize },
    #[error("antisymmetry fails at c[{i}][{j}][{k}] (1-based)")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on (e{i}, e{j}, e{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("lower central series stabilizes at a nonzero term of dimension {stable_dim}")]
    NotNilpotent { stable_dim: usize },
    #[error("coefficient fields differ: {0} vs {1}")]
    FieldMismatch(CoeffField, CoeffField),
    #[error("vectors do not span an ideal/subalgebra of the expected dimension")]
    NotASubalgebra,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomError {
    #[error("the {count} generators span only a {rank}-dimensional subspace of a {dim}-dimensional algebra")]
    GeneratorsDoNotSpan {
        count: usize,
        rank: usize,
        dim: usize,
    },
    #[error(
        "the prescribed images are not linear: generator {index} is inconsistent with the others"
    )]
    NotLinear { index: usize },
    #[error("not a homomorphism: L[e{i},e{j}] != [L e{i}, L e{j}]")]
    NotAHomomorphism { i: usize, j: usize },
    #[error("vector length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A finite-dimensional nilpotent Lie algebra with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<F: Scalar> {
    dim: usize,
    field: CoeffField,
    zero: F,
    table: Vec<F>,
    class: usize,
}

impl<F: Scalar> LieAlgebra<F> {
    /// Validates antisymmetry, the Jacobi identity and nilpotency.
    pub fn new(
        dim: usize,
        field: CoeffField,
        zero: F,
        table: Vec<F>,
    ) -> Result<Self, LieAlgebraError> {
        if dim == 0 {
            return Err(LieAlgebraError::ZeroDimension);
        }
        if table.len() != dim * dim * dim {
            return Err(LieAlgebraError::BadTableSize {
                expected: dim * dim * dim,
                got: table.len(),
            });
        }
        let mut g = Self {
            dim,
            field,
            zero,
            table,
            class: 0,
        };
        g.check_antisymmetry()?;
        g.check_jacobi()?;
        g.class = g.compute_class()?;
        Ok(g)
    }

    /// Builds from the nonzero `c[i][j][k]` with `i < j` (0-based), filling in
    /// the antisymmetric partner.
    pub fn from_upper_entries(
        dim: usize,
        field: CoeffField,
        zero: F,
        entries: &[(usize, usize, usize, F)],
    ) -> Result<Self, LieAlgebraError> {
        if dim == 0 {
            return Err(LieAlgebraError::ZeroDimension);
        }
        let mut table = vec![zero.zero_like(); dim * dim * dim];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(LieAlgebraError::IndexOutOfRange(idx + 1));
                }
            }
            if i >= j {
                return Err(LieAlgebraError::NotAntisymmetric {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
            table[(i * dim + j) * dim + k] = v.clone();
            table[(j * dim + i) * dim + k] = v.neg_ref();
        }
        Self::new(dim, field, zero, table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    /// Nilpotency class; 1 for abelian algebras.
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn zero(&self) -> &F {
        &self.zero
    }

    /// `c_{ij}^k`, 0-based.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &F {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(Scalar::is_zero_elem)
    }

    /// Nonzero upper-triangular entries `(i, j, k, c)` with `i < j`.
    pub fn upper_entries(&self) -> Vec<(usize, usize, usize, F)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.coeff(i, j, k);
                    if !c.is_zero_elem() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[F], y: &[F]) -> Vec<F> {
        let n = self.dim;
        let mut out = vec![self.zero.zero_like(); n];
        for i in 0..n {
            if x[i].is_zero_elem() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero_elem() || i == j {
                    continue;
                }
                let xy = x[i].mul_ref(&y[j]);
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.coeff(i, j, k);
                    if !c.is_zero_elem() {
                        *o = o.add_ref(&xy.mul_ref(c));
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<F> {
        let mut v = vec![self.zero.zero_like(); self.dim];
        v[i] = self.zero.one_like();
        v
    }

    fn check_antisymmetry(&self) -> Result<(), LieAlgebraError> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.coeff(i, j, k);
                    let b = self.coeff(j, i, k);
                    if !a.add_ref(b).is_zero_elem() {
                        return Err(LieAlgebraError::NotAntisymmetric {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<(), LieAlgebraError> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (
                        self.basis_vector(i),
                        self.basis_vector(j),
                        self.basis_vector(k),
                    );
                    let a = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let b = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let c = self.bracket(&ek, &self.bracket(&ei, &ej));
                    if a.iter()
                        .zip(&b)
                        .zip(&c)
                        .any(|((x, y), z)| !x.add_ref(y).add_ref(z).is_zero_elem())
                    {
                        return Err(LieAlgebraError::JacobiViolation {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `[g, V]` for a subspace `V` given by a basis.
    fn bracket_with_all(&self, basis: &[Vec<F>]) -> Vec<Vec<F>> {
        let mut gens = Vec::new();
        for i in 0..self.dim {
            let ei = self.basis_vector(i);
            for v in basis {
                let b = self.bracket(&ei, v);
                if b.iter().any(|x| !x.is_zero_elem()) {
                    gens.push(b);
                }
            }
        }
        linalg::span_basis(&gens)
    }

    fn lcs_terms(&self) -> Result<Vec<Vec<Vec<F>>>, LieAlgebraError> {
        let mut terms = vec![linalg::identity(&self.zero, self.dim)];
        loop {
            let last = terms.last().expect("nonempty");
            let next = self.bracket_with_all(last);
            if next.is_empty() {
                terms.push(next);
                return Ok(terms);
            }
            if next.len() == last.len() {
                return Err(LieAlgebraError::NotNilpotent {
                    stable_dim: next.len(),
                });
            }
            terms.push(next);
        }
    }

    fn compute_class(&self) -> Result<usize, LieAlgebraError> {
        Ok(self.lcs_terms()?.len() - 1)
    }

    /// Lower central series with centre and derived algebra.
    pub fn lower_central_series(&self) -> Filtration<F> {
        let terms = self.lcs_terms().expect("validated algebra is nilpotent");
        let center = self.center();
        let derived = terms.get(1).cloned().unwrap_or_default();
        Filtration {
            terms,
            center,
            derived,
        }
    }

    /// `{x : [x, e_i] = 0 for all i}`.
    pub fn center(&self) -> Vec<Vec<F>> {
        let n = self.dim;
        // row (i, k): sum_x x_m c[m][i][k] = 0
        let mut rows = Vec::new();
        for i in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|m| self.coeff(m, i, k).clone()).collect());
            }
        }
        linalg::kernel(&rows, n, &self.zero)
    }

    /// Basis refining the lower central series. Standard basis vectors are
    /// preferred so an already adapted presentation comes back unchanged.
    pub fn adapted_basis(&self) -> AdaptedBasis<F> {
        let terms = self.lcs_terms().expect("validated algebra is nilpotent");
        let c = terms.len() - 1;
        let mut vectors = Vec::new();
        let mut weights = Vec::new();
        for j in 1..=c {
            let term = &terms[j - 1];
            let deeper = &terms[j];
            let mut current: Vec<Vec<F>> = deeper.clone();
            let mut level = Vec::new();
            let candidates = (0..self.dim)
                .map(|i| self.basis_vector(i))
                .chain(term.iter().cloned());
            for cand in candidates {
                if current.len() == term.len() {
                    break;
                }
                if !linalg::in_span(term, &cand) || linalg::in_span(&current, &cand) {
                    continue;
                }
                current.push(cand.clone());
                level.push(cand);
            }
            weights.extend(std::iter::repeat_n(j, level.len()));
            vectors.extend(level);
        }
        AdaptedBasis { vectors, weights }
    }

    /// Weights of the standard basis if it is already adapted.
    pub fn standard_weights(&self) -> Option<Vec<usize>> {
        let ab = self.adapted_basis();
        let identity = ab
            .vectors
            .iter()
            .enumerate()
            .all(|(i, v)| *v == self.basis_vector(i));
        identity.then_some(ab.weights)
    }

    /// Structure constants in a new basis (vectors given in old coordinates).
    pub fn change_basis(&self, basis: &[Vec<F>]) -> Result<Self, LieAlgebraError> {
        if basis.len() != self.dim || linalg::rank(&basis.to_vec()) != self.dim {
            return Err(LieAlgebraError::DependentBasis);
        }
        self.on_subspace(basis)
    }

    /// The subalgebra spanned by `basis`, expressed in that basis.
    pub fn on_subspace(&self, basis: &[Vec<F>]) -> Result<Self, LieAlgebraError> {
        let m = basis.len();
        if m == 0 {
            return Err(LieAlgebraError::ZeroDimension);
        }
        let mut table = vec![self.zero.zero_like(); m * m * m];
        for i in 0..m {
            for j in 0..m {
                let b = self.bracket(&basis[i], &basis[j]);
                let coords =
                    linalg::coordinates_in(basis, &b).ok_or(LieAlgebraError::NotASubalgebra)?;
                for (k, c) in coords.into_iter().enumerate() {
                    table[(i * m + j) * m + k] = c;
                }
            }
        }
        Self::new(m, self.field, self.zero.clone(), table)
    }

    /// Block-diagonal direct sum `self (+) other`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, LieAlgebraError> {
        if self.field != other.field {
            return Err(LieAlgebraError::FieldMismatch(self.field, other.field));
        }
        let n = self.dim + other.dim;
        let mut table = vec![self.zero.zero_like(); n * n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    table[(i * n + j) * n + k] = self.coeff(i, j, k).clone();
                }
            }
        }
        let o = self.dim;
        for i in 0..other.dim {
            for j in 0..other.dim {
                for k in 0..other.dim {
                    table[((i + o) * n + j + o) * n + k + o] = other.coeff(i, j, k).clone();
                }
            }
        }
        Self::new(n, self.field, self.zero.clone(), table)
    }

    /// Basis of the centroid `{A : A[x,y] = [Ax,y] = [x,Ay]}` as `dim x dim`
    /// matrices acting on column vectors.
    pub fn centroid(&self) -> Vec<Matrix<F>> {
        let n = self.dim;
        let var = |k: usize, l: usize| k * n + l;
        let mut rows: Vec<Vec<F>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // (A[e_i,e_j])_k = sum_l c_ij^l A_kl
                    let mut lhs = vec![self.zero.zero_like(); n * n];
                    for l in 0..n {
                        lhs[var(k, l)] = self.coeff(i, j, l).clone();
                    }
                    // ([A e_i, e_j])_k = sum_m A_mi c_mj^k
                    let mut left = lhs.clone();
                    for m in 0..n {
                        let c = self.coeff(m, j, k);
                        left[var(m, i)] = left[var(m, i)].sub_ref(c);
                    }
                    // ([e_i, A e_j])_k = sum_m A_mj c_im^k
                    let mut right = lhs;
                    for m in 0..n {
                        let c = self.coeff(i, m, k);
                        right[var(m, j)] = right[var(m, j)].sub_ref(c);
                    }
                    for r in [left, right] {
                        if r.iter().any(|x| !x.is_zero_elem()) {
                            rows.push(r);
                        }
                    }
                }
            }
        }
        linalg::kernel(&rows, n * n, &self.zero)
            .into_iter()
            .map(|v| v.chunks(n).map(<[F]>::to_vec).collect())
            .collect()
    }

    /// Checks `A[x,y] = [Ax,y] = [x,Ay]` on all basis pairs.
    pub fn is_in_centroid(&self, a: &Matrix<F>) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let (ei, ej) = (self.basis_vector(i), self.basis_vector(j));
                let lhs = linalg::mat_vec(a, &self.bracket(&ei, &ej));
                let l = self.bracket(&linalg::mat_vec(a, &ei), &ej);
                let r = self.bracket(&ei, &linalg::mat_vec(a, &ej));
                if lhs != l || lhs != r {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `L` (target_dim x dim) satisfies `L[e_i,e_j] = [L e_i, L e_j]`;
    /// returns the first failing pair (0-based).
    pub fn hom_witness(&self, target: &Self, l: &Matrix<F>) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let (ei, ej) = (self.basis_vector(i), self.basis_vector(j));
                let lhs = linalg::mat_vec(l, &self.bracket(&ei, &ej));
                let rhs = target.bracket(&linalg::mat_vec(l, &ei), &linalg::mat_vec(l, &ej));
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Applies `f` to every structure constant.
    pub fn map_coeffs<G: Scalar>(
        &self,
        field: CoeffField,
        zero: G,
        f: impl Fn(&F) -> G,
    ) -> Result<LieAlgebra<G>, LieAlgebraError> {
        let table = self.table.iter().map(f).collect();
        LieAlgebra::new(self.dim, field, zero, table)
    }
}

impl LieAlgebra<Rational> {
    /// Heisenberg algebra `h3`: `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::from_upper_entries(
            3,
            CoeffField::Rational,
            Rational::zero(),
            &[(0, 1, 2, Rational::one())],
        )
        .expect("h3 is valid")
    }

    pub fn abelian(n: usize) -> Self {
        Self::from_upper_entries(n, CoeffField::Rational, Rational::zero(), &[])
            .expect("abelian algebra is valid")
    }

    /// Four-dimensional filiform algebra: `[e1,e2] = e3`, `[e1,e3] = e4`.
    pub fn filiform4() -> Self {
        Self::from_upper_entries(
            4,
            CoeffField::Rational,
            Rational::zero(),
            &[(0, 1, 2, Rational::one()), (0, 2, 3, Rational::one())],
        )
        .expect("filiform algebra is valid")
    }

    /// The same structure constants viewed over `Q(sqrt d)`.
    pub fn lift_to_quad(&self, d: u64) -> Result<LieAlgebra<QuadFieldElem>, LieAlgebraError> {
        self.map_coeffs(CoeffField::Quad(d), QuadFieldElem::zero(d), |c| {
            QuadFieldElem::from_rational(c.clone(), d)
        })
    }
}

/// Lower central series `g = g^1 > g^2 > ... > g^{c+1} = 0` with the centre
/// and derived algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration<F: Scalar> {
    /// `terms[j]` is a basis of `g^{j+1}`; the last term is empty.
    pub terms: Vec<Vec<Vec<F>>>,
    pub center: Vec<Vec<F>>,
    pub derived: Vec<Vec<F>>,
}

impl<F: Scalar> Filtration<F> {
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Vec::len).collect()
    }
}

/// A basis refining the lower central series, with weights `w_i = max{j : b_i in g^j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedBasis<F: Scalar> {
    pub vectors: Vec<Vec<F>>,
    pub weights: Vec<usize>,
}

/// Unique linear map `L` with `L(log_generators[i]) = images[i]`, accepted
/// only if it is a Lie algebra homomorphism.
pub fn extend_lattice_hom<F: Scalar>(
    g: &LieAlgebra<F>,
    log_generators: &[Vec<F>],
    target: &LieAlgebra<F>,
    images: &[Vec<F>],
) -> Result<Matrix<F>, HomError> {
    let n = g.dim();
    let m = target.dim();
    for v in log_generators {
        if v.len() != n {
            return Err(HomError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    for v in images {
        if v.len() != m {
            return Err(HomError::DimensionMismatch {
                expected: m,
                got: v.len(),
            });
        }
    }
    let r = linalg::rank(&log_generators.to_vec());
    if r < n {
        return Err(HomError::GeneratorsDoNotSpan {
            count: log_generators.len(),
            rank: r,
            dim: n,
        });
    }
    // rows of L: L_r . g_i = images[i][r]
    let mut l = Vec::with_capacity(m);
    for row in 0..m {
        let rhs: Vec<F> = images.iter().map(|u| u[row].clone()).collect();
        match linalg::solve(&log_generators.to_vec(), &rhs) {
            Some(sol) => l.push(sol),
            None => {
                let index = first_inconsistent(log_generators, &rhs);
                return Err(HomError::NotLinear { index });
            }
        }
    }
    if let Some((i, j)) = g.hom_witness(target, &l) {
        return Err(HomError::NotAHomomorphism { i: i + 1, j: j + 1 });
    }
    Ok(l)
}

fn first_inconsistent<F: Scalar>(gens: &[Vec<F>], rhs: &[F]) -> usize {
    for k in 1..=gens.len() {
        if linalg::solve_consistent(&gens[..k].to_vec(), &rhs[..k]).is_none() {
            return k - 1;
        }
    }
    gens.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat_int, Rational};

    fn r(n: i64) -> Rational {
        rat_int(n)
    }

    #[test]
    fn validation_examples() {
        let h = LieAlgebra::heisenberg();
        assert_eq!(h.class(), 2);
        assert_eq!(LieAlgebra::abelian(2).class(), 1);
        assert_eq!(LieAlgebra::filiform4().class(), 3);

        // sl2-like: [e1,e2]=e3, [e3,e1]=2e1, [e3,e2]=-2e2
        let sl2 = LieAlgebra::from_upper_entries(
            3,
            CoeffField::Rational,
            r(0),
            &[(0, 1, 2, r(1)), (0, 2, 0, r(-2)), (1, 2, 1, r(2))],
        );
        assert!(matches!(
            sl2,
            Err(LieAlgebraError::NotNilpotent { stable_dim: 3 })
        ));

        assert_eq!(
            LieAlgebra::<Rational>::new(0, CoeffField::Rational, r(0), vec![]),
            Err(LieAlgebraError::ZeroDimension)
        );
        assert_eq!(LieAlgebra::abelian(1).class(), 1);
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [e1,e2]=e2, [e1,e3]=e2, [e2,e3]=e1: the Jacobi sum is -e1
        let bad = LieAlgebra::from_upper_entries(
            3,
            CoeffField::Rational,
            r(0),
            &[(0, 1, 1, r(1)), (0, 2, 1, r(1)), (1, 2, 0, r(1))],
        );
        assert!(
            matches!(bad, Err(LieAlgebraError::JacobiViolation { .. })),
            "{bad:?}"
        );
    }

    #[test]
    fn antisymmetry_violation_is_reported() {
        let mut table = vec![r(0); 8];
        table[1] = r(1); // c[0][0][1]
        let err = LieAlgebra::new(2, CoeffField::Rational, r(0), table).unwrap_err();
        assert_eq!(err, LieAlgebraError::NotAntisymmetric { i: 1, j: 1, k: 2 });
    }

    #[test]
    fn lower_central_series_examples() {
        let h = LieAlgebra::heisenberg();
        let f = h.lower_central_series();
        assert_eq!(f.class(), 2);
        assert_eq!(f.dims(), vec![3, 1, 0]);
        assert_eq!(f.terms[1], vec![vec![r(0), r(0), r(1)]]);
        assert_eq!(f.center, vec![vec![r(0), r(0), r(1)]]);

        let a = LieAlgebra::abelian(4).lower_central_series();
        assert_eq!(a.dims(), vec![4, 0]);
        assert_eq!(a.center.len(), 4);

        let fil = LieAlgebra::filiform4().lower_central_series();
        assert_eq!(fil.class(), 3);
        assert_eq!(fil.center, vec![vec![r(0), r(0), r(0), r(1)]]);
    }

    #[test]
    fn adapted_basis_examples() {
        assert_eq!(
            LieAlgebra::heisenberg().standard_weights(),
            Some(vec![1, 1, 2])
        );
        assert_eq!(
            LieAlgebra::abelian(3).standard_weights(),
            Some(vec![1, 1, 1])
        );
        assert_eq!(
            LieAlgebra::filiform4().standard_weights(),
            Some(vec![1, 1, 2, 3])
        );
        // h3 with the centre first is not adapted in its standard basis
        let h = LieAlgebra::from_upper_entries(3, CoeffField::Rational, r(0), &[(1, 2, 0, r(1))])
            .unwrap();
        assert_eq!(h.standard_weights(), None);
        let ab = h.adapted_basis();
        assert_eq!(ab.weights, vec![1, 1, 2]);
        let rebased = h.change_basis(&ab.vectors).unwrap();
        assert_eq!(rebased.standard_weights(), Some(vec![1, 1, 2]));
    }

    #[test]
    fn direct_sum_examples() {
        let h = LieAlgebra::heisenberg();
        let s = h.direct_sum(&LieAlgebra::abelian(1)).unwrap();
        assert_eq!((s.dim(), s.class()), (4, 2));
        let rr = LieAlgebra::abelian(1)
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        assert_eq!(rr, LieAlgebra::abelian(2));
        let hh = h.direct_sum(&h).unwrap();
        assert_eq!(hh.dim(), 6);
        assert_eq!(hh.lower_central_series().dims()[1], 2);
        let q = LieAlgebra::heisenberg().lift_to_quad(2).unwrap();
        assert!(matches!(q.direct_sum(&q).and_then(|_| Ok(())), Ok(())));
    }

    /// Oracle: every matrix with entries in {-1, 0, 1} that satisfies the
    /// centroid identities, found by direct enumeration.
    fn brute_force_centroid_rank(g: &LieAlgebra<Rational>) -> usize {
        let n = g.dim();
        let mut found = Vec::new();
        let total = 3usize.pow((n * n) as u32);
        for code in 0..total {
            let mut c = code;
            let mut a = linalg::zeros(&r(0), n, n);
            for k in 0..n * n {
                a[k / n][k % n] = r((c % 3) as i64 - 1);
                c /= 3;
            }
            if g.is_in_centroid(&a) {
                found.push(a.concat());
            }
        }
        linalg::rank(&found)
    }

    #[test]
    fn centroid_dimension_matches_enumeration() {
        let h = LieAlgebra::heisenberg();
        assert_eq!(h.centroid().len(), brute_force_centroid_rank(&h));
        let a2 = LieAlgebra::abelian(2);
        assert_eq!(a2.centroid().len(), brute_force_centroid_rank(&a2));
    }

    #[test]
    fn centroid_examples() {
        let h = LieAlgebra::heisenberg();
        let c = h.centroid();
        let id = linalg::identity(&r(0), 3);
        assert!(c.iter().all(|a| h.is_in_centroid(a)));
        assert!(linalg::in_span(
            &c.iter().map(|m| m.concat()).collect::<Vec<_>>(),
            &id.concat()
        ));
        assert_eq!(c.len(), h.centroid().len());
        // h3 centroid: lambda*I plus maps from span(e1,e2) into the centre
        assert_eq!(c.len(), 3);

        assert_eq!(LieAlgebra::abelian(3).centroid().len(), 9);

        let s = h.direct_sum(&LieAlgebra::abelian(1)).unwrap();
        let mut p1 = linalg::zeros(&r(0), 4, 4);
        for i in 0..3 {
            p1[i][i] = r(1);
        }
        let mut p2 = linalg::zeros(&r(0), 4, 4);
        p2[3][3] = r(1);
        assert!(s.is_in_centroid(&p1) && s.is_in_centroid(&p2));
        let basis: Vec<Vec<Rational>> = s.centroid().iter().map(|m| m.concat()).collect();
        assert!(linalg::in_span(&basis, &p1.concat()));
        assert!(linalg::in_span(&basis, &p2.concat()));
    }

    #[test]
    fn centroid_elements_commute_with_ad() {
        let f = LieAlgebra::filiform4()
            .direct_sum(&LieAlgebra::abelian(1))
            .unwrap();
        for a in f.centroid() {
            for i in 0..f.dim() {
                // ad_{e_i} as a matrix: column j is [e_i, e_j]
                let ad: Matrix<Rational> = linalg::transpose(
                    &(0..f.dim())
                        .map(|j| f.bracket(&f.basis_vector(i), &f.basis_vector(j)))
                        .collect(),
                );
                assert_eq!(linalg::mat_mul(&a, &ad), linalg::mat_mul(&ad, &a));
            }
        }
    }

    #[test]
    fn extend_hom_examples() {
        let h = LieAlgebra::heisenberg();
        let gens: Vec<Vec<Rational>> = (0..3).map(|i| h.basis_vector(i)).collect();
        let l = extend_lattice_hom(&h, &gens, &h, &gens).unwrap();
        assert_eq!(l, linalg::identity(&r(0), 3));

        let r2 = LieAlgebra::abelian(2);
        let imgs: Vec<Vec<Rational>> = gens
            .iter()
            .map(|g| vec![g[0].clone(), g[1].clone()])
            .collect();
        let p = extend_lattice_hom(&h, &gens, &r2, &imgs).unwrap();
        assert_eq!(p, vec![vec![r(1), r(0), r(0)], vec![r(0), r(1), r(0)]]);

        let r1 = LieAlgebra::abelian(1);
        let ones = vec![vec![r(1)]; 3];
        assert_eq!(
            extend_lattice_hom(&h, &gens, &r1, &ones),
            Err(HomError::NotAHomomorphism { i: 1, j: 2 })
        );

        let short = &gens[..2];
        assert!(matches!(
            extend_lattice_hom(&h, short, &h, short),
            Err(HomError::GeneratorsDoNotSpan { rank: 2, .. })
        ));
    }

    #[test]
    fn extend_hom_with_redundant_generators() {
        let h = LieAlgebra::heisenberg();
        let mut gens: Vec<Vec<Rational>> = (0..3).map(|i| h.basis_vector(i)).collect();
        gens.push(vec![r(1), r(1), r(0)]);
        let mut imgs = gens.clone();
        let l = extend_lattice_hom(&h, &gens, &h, &imgs).unwrap();
        assert_eq!(l, linalg::identity(&r(0), 3));
        imgs[3] = vec![r(1), r(2), r(0)];
        assert_eq!(
            extend_lattice_hom(&h, &gens, &h, &imgs),
            Err(HomError::NotLinear { index: 3 })
        );
    }
}
