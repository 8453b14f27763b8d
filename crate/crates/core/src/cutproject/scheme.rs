//! Schemes `(G, H, L)` obtained by restricting scalars of a nilpotent group
//! over `Q(sqrt d)`, and exact arithmetic on the lattice
//! `L = sum (1/m_i) Z[sqrt d] e_i`.

use super::CutProjectError;
use crate::exactfield::{Embedding, QuadFieldElem, Rational};
use crate::liealg::LieAlgebra;
use crate::nilgroup::GroupLaw;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Integer numerators `(a, b)` of one coordinate `(a + b sqrt d) / m`.
pub type Pair = (i64, i64);
/// A lattice element as one pair per coordinate.
pub type LatticePoint = Vec<Pair>;

/// Exponent vector over the `4n` integer variables
/// `(xa_1..xa_n, xb_1..xb_n, ya_1..ya_n, yb_1..yb_n)`.
type IntMono = Vec<u8>;
/// Polynomial with coefficients `p + q sqrt d`.
type QPoly = BTreeMap<IntMono, (Rational, Rational)>;

/// Integer polynomial divided by a common denominator.
#[derive(Debug, Clone, PartialEq)]
struct IntPoly {
    den: i128,
    terms: Vec<(Vec<(u16, u8)>, i128)>,
}

impl IntPoly {
    fn from_rational(p: &BTreeMap<IntMono, Rational>) -> Self {
        let den = p.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = p
            .iter()
            .map(|(m, c)| {
                let v = (c * Rational::from_integer(den.clone())).to_integer();
                let sparse = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i as u16, e))
                    .collect();
                (sparse, v.to_i128().expect("coefficient fits in i128"))
            })
            .collect();
        Self {
            den: den.to_i128().expect("denominator fits in i128"),
            terms,
        }
    }

    /// Numerator at an integer point, or `None` on overflow.
    fn numerator(&self, vars: &[i128]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for &(v, e) in m {
                for _ in 0..e {
                    t = t.checked_mul(vars[v as usize])?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }
}

/// Where the lattice fails to be closed: `x y` leaves `L` in `coordinate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureWitness {
    pub coordinate: usize,
    pub x: LatticePoint,
    pub y: LatticePoint,
    /// Exact value of `m_k (x y)_k`, which is not in `Z[sqrt d]`.
    pub value: String,
}

impl fmt::Display for ClosureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x = {:?}, y = {:?}: scaled coordinate {} of x*y is {}",
            self.x,
            self.y,
            self.coordinate + 1,
            self.value
        )
    }
}

/// Outcome of the grid check that `L L` lands in `L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureCertificate {
    /// Highest total degree of the product polynomials.
    pub degree_bound: usize,
    /// Each variable runs over `-degree_bound..=degree_bound`.
    pub grid_side: usize,
    /// Distinct variable supports whose grids were evaluated.
    pub supports_checked: usize,
    pub evaluations: u64,
    pub passed: bool,
    pub witness: Option<ClosureWitness>,
}

/// Exact product on lattice numerators.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeLaw {
    dim: usize,
    /// `m_k (x y)_k = (A_k + B_k sqrt d)`, one pair of polynomials per coordinate.
    parts: Vec<(IntPoly, IntPoly)>,
}

impl LatticeLaw {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn vars(x: &[Pair], y: &[Pair]) -> Vec<i128> {
        let mut v = Vec::with_capacity(4 * x.len());
        v.extend(x.iter().map(|p| p.0 as i128));
        v.extend(x.iter().map(|p| p.1 as i128));
        v.extend(y.iter().map(|p| p.0 as i128));
        v.extend(y.iter().map(|p| p.1 as i128));
        v
    }

    /// `x y` exactly; fails on machine overflow.
    pub fn mul(&self, x: &[Pair], y: &[Pair]) -> Result<LatticePoint, CutProjectError> {
        let vars = Self::vars(x, y);
        self.parts
            .iter()
            .map(|(a, b)| {
                let na = a.numerator(&vars).ok_or(CutProjectError::Overflow)?;
                let nb = b.numerator(&vars).ok_or(CutProjectError::Overflow)?;
                debug_assert!(na % a.den == 0 && nb % b.den == 0, "closure certified");
                let ra = i64::try_from(na / a.den).map_err(|_| CutProjectError::Overflow)?;
                let rb = i64::try_from(nb / b.den).map_err(|_| CutProjectError::Overflow)?;
                Ok((ra, rb))
            })
            .collect()
    }

    pub fn inverse(x: &[Pair]) -> LatticePoint {
        x.iter().map(|&(a, b)| (-a, -b)).collect()
    }

    /// `x^e`, which is `e x` in the exponential chart.
    pub fn pow(x: &[Pair], e: i64) -> Result<LatticePoint, CutProjectError> {
        x.iter()
            .map(|&(a, b)| {
                Ok((
                    a.checked_mul(e).ok_or(CutProjectError::Overflow)?,
                    b.checked_mul(e).ok_or(CutProjectError::Overflow)?,
                ))
            })
            .collect()
    }
}

/// Product polynomial of coordinate `k` split as `x_k + y_k + Q_k`, where
/// `Q_k` only reads coordinates of smaller weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLaw {
    dim: usize,
    /// Monomials over `2n` variables as `(variable, exponent)` lists.
    q: Vec<Vec<(Vec<(usize, u8)>, f64)>>,
}

impl LevelLaw {
    /// Splits an embedded group law; `None` if some coordinate is not of the
    /// form `x_k + y_k + (terms in lower-weight coordinates)`.
    pub fn from_law(law: &GroupLaw<f64>, weights: &[usize]) -> Option<Self> {
        let n = law.dim();
        let mut q = Vec::with_capacity(n);
        for (k, poly) in law.polys().iter().enumerate() {
            let mut rest = Vec::new();
            let (mut seen_x, mut seen_y) = (false, false);
            for (m, c) in poly {
                let vars: Vec<(usize, u8)> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                if vars == [(k, 1)] && *c == 1.0 {
                    seen_x = true;
                    continue;
                }
                if vars == [(n + k, 1)] && *c == 1.0 {
                    seen_y = true;
                    continue;
                }
                if vars.iter().any(|&(v, _)| weights[v % n] >= weights[k]) {
                    return None;
                }
                rest.push((vars, *c));
            }
            if !(seen_x && seen_y) {
                return None;
            }
            q.push(rest);
        }
        Some(Self { dim: n, q })
    }

    /// Law of an abelian group: `Q_k = 0`.
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            q: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_abelian(&self) -> bool {
        self.q.iter().all(Vec::is_empty)
    }

    /// `Q_k(x, y)`; only entries of lower weight than `k` are read.
    pub fn q(&self, k: usize, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        self.q[k]
            .iter()
            .map(|(m, c)| {
                m.iter().fold(*c, |t, &(v, e)| {
                    let base = if v < n { x[v] } else { y[v - n] };
                    t * base.powi(e as i32)
                })
            })
            .sum()
    }

    pub fn mul(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|k| x[k] + y[k] + self.q(k, x, y))
            .collect()
    }
}

/// A cut-and-project scheme over `Q(sqrt d)`.
#[derive(Debug, Clone)]
pub struct Scheme {
    algebra: LieAlgebra<QuadFieldElem>,
    d: u64,
    denominators: Vec<i64>,
    weights: Vec<usize>,
    law: GroupLaw<QuadFieldElem>,
    principal: LevelLaw,
    conjugate: LevelLaw,
    lattice_law: LatticeLaw,
    closure: ClosureCertificate,
}

/// Builds the scheme and certifies lattice closure.
pub fn build_scheme(
    algebra: &LieAlgebra<QuadFieldElem>,
    d: u64,
    denominators: &[i64],
) -> Result<Scheme, CutProjectError> {
    let n = algebra.dim();
    if algebra.field().radicand() != Some(d) {
        return Err(CutProjectError::InvalidAlgebra(format!(
            "algebra is over {}, scheme needs Q(sqrt {d})",
            algebra.field()
        )));
    }
    if denominators.len() != n {
        return Err(CutProjectError::InvalidAlgebra(format!(
            "{} denominators for a {n}-dimensional algebra",
            denominators.len()
        )));
    }
    if denominators.iter().any(|&m| m <= 0) {
        return Err(CutProjectError::InvalidAlgebra(
            "denominators must be positive".into(),
        ));
    }
    let weights = algebra.standard_weights().ok_or_else(|| {
        CutProjectError::InvalidAlgebra(
            "standard basis is not adapted to the lower central series".into(),
        )
    })?;
    let law = GroupLaw::compile(algebra);
    let principal = LevelLaw::from_law(&law.embedded(Embedding::Principal), &weights)
        .ok_or_else(|| CutProjectError::InvalidAlgebra("group law is not triangular".into()))?;
    let conjugate = LevelLaw::from_law(&law.embedded(Embedding::Conjugate), &weights)
        .ok_or_else(|| CutProjectError::InvalidAlgebra("group law is not triangular".into()))?;
    let polys = integer_polys(&law, d, denominators);
    let closure = verify_closure_polys(&polys, n, d);
    if let Some(w) = &closure.witness {
        return Err(CutProjectError::ClosureFailed { witness: w.clone() });
    }
    let parts = polys
        .iter()
        .map(|(a, b)| (IntPoly::from_rational(a), IntPoly::from_rational(b)))
        .collect();
    Ok(Scheme {
        algebra: algebra.clone(),
        d,
        denominators: denominators.to_vec(),
        weights,
        law,
        principal,
        conjugate,
        lattice_law: LatticeLaw { dim: n, parts },
        closure,
    })
}

/// Re-runs the closure check of a built scheme.
pub fn verify_lattice_closure(scheme: &Scheme) -> ClosureCertificate {
    let polys = integer_polys(&scheme.law, scheme.d, &scheme.denominators);
    verify_closure_polys(&polys, scheme.dim(), scheme.d)
}

type SplitPoly = (BTreeMap<IntMono, Rational>, BTreeMap<IntMono, Rational>);

fn qpoly_mul(p: &QPoly, q: &QPoly, d: u64) -> QPoly {
    let dq = Rational::from_integer(d.into());
    let mut out = QPoly::new();
    for (mp, (p1, q1)) in p {
        for (mq, (p2, q2)) in q {
            let m: IntMono = mp.iter().zip(mq).map(|(a, b)| a + b).collect();
            let a = p1 * p2 + &dq * q1 * q2;
            let b = p1 * q2 + q1 * p2;
            let e = out
                .entry(m)
                .or_insert_with(|| (Rational::zero(), Rational::zero()));
            e.0 += a;
            e.1 += b;
        }
    }
    out.retain(|_, (a, b)| !(a.is_zero() && b.is_zero()));
    out
}

/// `m_k (x y)_k` as `A_k + B_k sqrt d` over the integer numerators.
fn integer_polys(law: &GroupLaw<QuadFieldElem>, d: u64, dens: &[i64]) -> Vec<SplitPoly> {
    let n = law.dim();
    let nv = 4 * n;
    let unit = |i: usize| {
        let mut m = vec![0u8; nv];
        m[i] = 1;
        m
    };
    // coordinate i of x or y as a polynomial in the numerators
    let coord_poly = |side: usize, i: usize| -> QPoly {
        let inv = Rational::new(BigInt::one(), dens[i].into());
        let a = unit(2 * n * side + i);
        let b = unit(2 * n * side + n + i);
        QPoly::from([
            (a, (inv.clone(), Rational::zero())),
            (b, (Rational::zero(), inv)),
        ])
    };
    law.polys()
        .iter()
        .enumerate()
        .map(|(k, poly)| {
            let mut acc = QPoly::new();
            for (m, c) in poly {
                let scale = Rational::from_integer(dens[k].into());
                let mut t = QPoly::from([(vec![0u8; nv], (c.a() * &scale, c.b() * &scale))]);
                for (v, &e) in m.iter().enumerate() {
                    let f = if v < n {
                        coord_poly(0, v)
                    } else {
                        coord_poly(1, v - n)
                    };
                    for _ in 0..e {
                        t = qpoly_mul(&t, &f, d);
                    }
                }
                for (mono, (a, b)) in t {
                    let e = acc
                        .entry(mono)
                        .or_insert_with(|| (Rational::zero(), Rational::zero()));
                    e.0 += a;
                    e.1 += b;
                }
            }
            let mut pa = BTreeMap::new();
            let mut pb = BTreeMap::new();
            for (m, (a, b)) in acc {
                if !a.is_zero() {
                    pa.insert(m.clone(), a);
                }
                if !b.is_zero() {
                    pb.insert(m, b);
                }
            }
            (pa, pb)
        })
        .collect()
}

/// Integer-valued polynomial check: a polynomial of degree at most `D` in
/// each variable is integer valued on `Z^V` iff it is integral on
/// `{0..D}^S` for every monomial support `S` (others set to zero), since its
/// binomial-basis coefficients are finite differences there. We evaluate on
/// the symmetric grid `{-D..D}^S`.
fn verify_closure_polys(polys: &[SplitPoly], n: usize, d: u64) -> ClosureCertificate {
    let degree = polys
        .iter()
        .flat_map(|(a, b)| a.keys().chain(b.keys()))
        .map(|m| m.iter().map(|&e| e as usize).sum::<usize>())
        .max()
        .unwrap_or(0);
    let order: Vec<i128> = std::iter::once(0)
        .chain((1..=degree as i128).flat_map(|v| [v, -v]))
        .collect();
    let mut supports_checked = 0;
    let mut evaluations = 0u64;
    for (k, (pa, pb)) in polys.iter().enumerate() {
        let ia = IntPoly::from_rational(pa);
        let ib = IntPoly::from_rational(pb);
        let supports: BTreeSet<Vec<usize>> = pa
            .keys()
            .chain(pb.keys())
            .map(|m| {
                m.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        for s in &supports {
            supports_checked += 1;
            let mut idx = vec![0usize; s.len()];
            'grid: loop {
                let mut vars = vec![0i128; 4 * n];
                for (&v, &i) in s.iter().zip(&idx) {
                    vars[v] = order[i];
                }
                evaluations += 1;
                let na = ia.numerator(&vars).expect("grid values are small");
                let nb = ib.numerator(&vars).expect("grid values are small");
                if na % ia.den != 0 || nb % ib.den != 0 {
                    let to_point = |off: usize| -> LatticePoint {
                        (0..n)
                            .map(|i| (vars[off + i] as i64, vars[off + n + i] as i64))
                            .collect()
                    };
                    let value = QuadFieldElem::from_parts(
                        Rational::new(na.into(), ia.den.into()),
                        Rational::new(nb.into(), ib.den.into()),
                        d,
                    );
                    return ClosureCertificate {
                        degree_bound: degree,
                        grid_side: 2 * degree + 1,
                        supports_checked,
                        evaluations,
                        passed: false,
                        witness: Some(ClosureWitness {
                            coordinate: k,
                            x: to_point(0),
                            y: to_point(2 * n),
                            value: value.to_string(),
                        }),
                    };
                }
                // odometer, last variable fastest
                let mut pos = s.len();
                loop {
                    if pos == 0 {
                        break 'grid;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < order.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
    }
    ClosureCertificate {
        degree_bound: degree,
        grid_side: 2 * degree + 1,
        supports_checked,
        evaluations,
        passed: true,
        witness: None,
    }
}

impl Scheme {
    pub fn algebra(&self) -> &LieAlgebra<QuadFieldElem> {
        &self.algebra
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn denominators(&self) -> &[i64] {
        &self.denominators
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn law(&self) -> &GroupLaw<QuadFieldElem> {
        &self.law
    }

    pub fn lattice_law(&self) -> &LatticeLaw {
        &self.lattice_law
    }

    pub fn closure(&self) -> &ClosureCertificate {
        &self.closure
    }

    /// Real law of `G` (principal) or `H` (conjugate).
    pub fn level_law(&self, which: Embedding) -> &LevelLaw {
        match which {
            Embedding::Principal => &self.principal,
            Embedding::Conjugate => &self.conjugate,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.algebra.is_abelian()
    }

    pub fn mul(&self, x: &[Pair], y: &[Pair]) -> Result<LatticePoint, CutProjectError> {
        self.lattice_law.mul(x, y)
    }

    pub fn to_field(&self, x: &[Pair]) -> Vec<QuadFieldElem> {
        x.iter()
            .zip(&self.denominators)
            .map(|(&(a, b), &m)| {
                QuadFieldElem::from_parts(
                    Rational::new(a.into(), m.into()),
                    Rational::new(b.into(), m.into()),
                    self.d,
                )
            })
            .collect()
    }

    /// Numerators of field coordinates, if they lie in `L`.
    pub fn from_field(&self, v: &[QuadFieldElem]) -> Option<LatticePoint> {
        v.iter()
            .zip(&self.denominators)
            .map(|(c, &m)| {
                let mm = Rational::from_integer(m.into());
                let a = c.a() * &mm;
                let b = c.b() * &mm;
                if !a.is_integer() || !b.is_integer() {
                    return None;
                }
                Some((a.to_integer().to_i64()?, b.to_integer().to_i64()?))
            })
            .collect()
    }

    /// Embedding of a lattice point in `G` or `H`.
    pub fn embed(&self, x: &[Pair], which: Embedding) -> Vec<f64> {
        let s = (self.d as f64).sqrt();
        let sign = match which {
            Embedding::Principal => 1.0,
            Embedding::Conjugate => -1.0,
        };
        x.iter()
            .zip(&self.denominators)
            .map(|(&(a, b), &m)| (a as f64 + sign * b as f64 * s) / m as f64)
            .collect()
    }

    /// Quasi-norm in `G`.
    pub fn quasi_norm(&self, x: &[Pair]) -> f64 {
        crate::nilgroup::weighted_norm(&self.embed(x, Embedding::Principal), &self.weights)
    }

    /// `||x^-1 y||` in `G`.
    pub fn quasi_dist(&self, x: &[Pair], y: &[Pair]) -> Result<f64, CutProjectError> {
        Ok(self.quasi_norm(&self.mul(&LatticeLaw::inverse(x), y)?))
    }

    /// Indices of the coordinates spanning the derived algebra.
    pub fn derived_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] >= 2).collect()
    }

    /// Scheme of the abelianization `G/[G,G]`.
    pub fn abelianization(&self) -> Result<Scheme, CutProjectError> {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| self.weights[i] == 1).collect();
        let g = LieAlgebra::<Rational>::abelian(keep.len())
            .lift_to_quad(self.d)
            .map_err(|e| CutProjectError::InvalidAlgebra(e.to_string()))?;
        let dens: Vec<i64> = keep.iter().map(|&i| self.denominators[i]).collect();
        build_scheme(&g, self.d, &dens)
    }

    /// Scheme of the derived subgroup `[G,G]` with the inherited lattice.
    pub fn derived(&self) -> Result<Scheme, CutProjectError> {
        let keep = self.derived_indices();
        if keep.is_empty() {
            return Err(CutProjectError::InvalidAlgebra(
                "derived subgroup is trivial".into(),
            ));
        }
        let basis: Vec<Vec<QuadFieldElem>> =
            keep.iter().map(|&i| self.algebra.basis_vector(i)).collect();
        let g = self
            .algebra
            .on_subspace(&basis)
            .map_err(|e| CutProjectError::InvalidAlgebra(e.to_string()))?;
        let dens: Vec<i64> = keep.iter().map(|&i| self.denominators[i]).collect();
        let sub = build_scheme(&g, self.d, &dens)?;
        // the restricted weights must be those of the ambient group
        let ambient: Vec<usize> = keep.iter().map(|&i| self.weights[i]).collect();
        Ok(Scheme {
            weights: ambient,
            ..sub
        })
    }
}

/// `|a + s b sqrt d| <= num / den` decided exactly, `s = +-1`.
pub(crate) fn pair_abs_le(a: i64, b: i64, d: u64, num: i128, den: i128, conj: bool) -> bool {
    use crate::exactfield::sign_int_surd;
    use std::cmp::Ordering;
    let (a, b) = (
        a as i128 * den,
        if conj { -(b as i128) } else { b as i128 } * den,
    );
    sign_int_surd(num - a, -b, d) != Ordering::Less
        && sign_int_surd(num + a, b, d) != Ordering::Less
}

/// Numerator and denominator of a nonnegative rational as machine integers.
pub(crate) fn rational_parts(q: &Rational) -> Result<(i128, i128), CutProjectError> {
    let num = q.numer().to_i128().ok_or(CutProjectError::Overflow)?;
    let den = q.denom().to_i128().ok_or(CutProjectError::Overflow)?;
    debug_assert!(!q.is_negative());
    Ok((num, den))
}
