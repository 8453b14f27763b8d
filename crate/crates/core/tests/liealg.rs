use nilmodel::exactfield::{rat, Rational};
use nilmodel::liealg::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Mat = Vec<Vec<Rational>>;

/// Rank by plain Gaussian elimination.
fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Mat = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn apply(a: &Mat, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rational::zero(), |s, (x, y)| s + x * y)
        })
        .collect()
}

/// `[x, y]` straight from the structure constants.
fn br(g: &LieAlgebra<Rational>, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let n = g.dim();
    let mut out = vec![Rational::zero(); n];
    for i in 0..n {
        for j in 0..n {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += &x[i] * &y[j] * g.coeff(i, j, k);
            }
        }
    }
    out
}

fn e(n: usize, i: usize) -> Vec<Rational> {
    (0..n)
        .map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

fn summand(k: u8) -> (LieAlgebra<Rational>, Vec<usize>) {
    match k % 4 {
        0 => (LieAlgebra::heisenberg(), vec![3]),
        1 => (LieAlgebra::abelian(1), vec![1]),
        2 => (LieAlgebra::abelian(2), vec![1, 1]),
        _ => (LieAlgebra::filiform4(), vec![4]),
    }
}

/// A direct sum of at most `max_dim` dimensions and the sorted dims of its factors.
fn direct_sum_of(picks: &[u8], max_dim: usize) -> (LieAlgebra<Rational>, Vec<usize>) {
    let (mut g, mut dims) = summand(picks[0]);
    for &k in &picks[1..] {
        let (h, d) = summand(k);
        if g.dim() + h.dim() > max_dim {
            break;
        }
        g = g.direct_sum(&h).unwrap();
        dims.extend(d);
    }
    dims.sort_unstable();
    (g, dims)
}

fn invertible(entries: &[(i64, i64)], n: usize) -> Option<Mat> {
    let m: Mat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (p, q) = entries[(i * n + j) % entries.len()];
                    rat(p, q)
                })
                .collect()
        })
        .collect();
    // keep the matrix near the identity so the basis change is usually invertible
    let m: Mat = m
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, v)| if i == j { v + rat(3, 1) } else { v })
                .collect()
        })
        .collect();
    (rank(&m) == n).then_some(m)
}

fn entry() -> impl Strategy<Value = (i64, i64)> {
    (-2i64..=2, 1i64..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decomposition_survives_basis_change(
        picks in proptest::collection::vec(0u8..4, 1..4),
        entries in proptest::collection::vec(entry(), 49),
    ) {
        let (g, dims) = direct_sum_of(&picks, 5);
        let n = g.dim();
        let Some(p) = invertible(&entries, n) else { return Ok(()) };
        let h = g.change_basis(&p).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (br(&h, &e(n, i), &e(n, j)), br(&h, &e(n, j), &e(n, i)));
                prop_assert!(a.iter().zip(&b).all(|(x, y)| (x + y).is_zero()));
            }
        }
        let r = decompose_indecomposable(&h, DEFAULT_SEARCH_BUDGET).unwrap();
        prop_assert_eq!(r.factor_dims(), dims);
        let all: Mat = r.factors.iter().flat_map(|f| f.ideal_basis.clone()).collect();
        prop_assert_eq!(rank(&all), n);
        for (a, fa) in r.factors.iter().enumerate() {
            for x in &fa.ideal_basis {
                for i in 0..n {
                    // ideals: [x, e_i] stays in the span of the ideal
                    let mut span = fa.ideal_basis.clone();
                    span.push(br(&h, x, &e(n, i)));
                    prop_assert_eq!(rank(&span), fa.ideal_basis.len());
                }
                for fb in &r.factors[a + 1..] {
                    for y in &fb.ideal_basis {
                        prop_assert!(br(&h, x, y).iter().all(Zero::is_zero));
                    }
                }
            }
        }
        let base = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET).unwrap();
        prop_assert_eq!(r.iso_classes(), base.iso_classes());
    }

    #[test]
    fn centroid_commutes_with_ad(
        picks in proptest::collection::vec(0u8..4, 1..3),
        entries in proptest::collection::vec(entry(), 49),
    ) {
        let (g, _) = direct_sum_of(&picks, 5);
        let n = g.dim();
        let Some(p) = invertible(&entries, n) else { return Ok(()) };
        let h = g.change_basis(&p).unwrap();
        let c = h.centroid();
        // the identity is in the span
        let mut flat: Mat = c.iter().map(|m| m.concat()).collect();
        flat.push((0..n).flat_map(|i| e(n, i)).collect());
        prop_assert_eq!(rank(&flat), c.len());
        for a in &c {
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (e(n, i), e(n, j));
                    let lhs = apply(a, &br(&h, &x, &y));
                    prop_assert_eq!(&lhs, &br(&h, &apply(a, &x), &y));
                    prop_assert_eq!(&lhs, &br(&h, &x, &apply(a, &y)));
                }
            }
        }
    }

    /// Automorphisms of h3: `(x, y) -> M (x, y)`, `z -> det(M) z`.
    #[test]
    fn heisenberg_automorphisms_extend(
        m in proptest::collection::vec(entry(), 4),
        entries in proptest::collection::vec(entry(), 9),
    ) {
        let h = LieAlgebra::heisenberg();
        let m: Vec<Rational> = m.iter().map(|&(p, q)| rat(p, q)).collect();
        let det = &m[0] * &m[3] - &m[1] * &m[2];
        prop_assume!(!det.is_zero());
        let l: Mat = vec![
            vec![m[0].clone(), m[1].clone(), rat(0, 1)],
            vec![m[2].clone(), m[3].clone(), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), det.clone()],
        ];
        let Some(gens) = invertible(&entries, 3) else { return Ok(()) };
        let images: Mat = gens.iter().map(|v| apply(&l, v)).collect();
        let got = extend_lattice_hom(&h, &gens, &h, &images).unwrap();
        prop_assert_eq!(&got, &l);
        for i in 0..3 {
            for j in 0..3 {
                let (x, y) = (e(3, i), e(3, j));
                prop_assert_eq!(apply(&got, &br(&h, &x, &y)), br(&h, &apply(&got, &x), &apply(&got, &y)));
            }
        }
        // scaling the centre by anything but det breaks the bracket
        let mut bad = l.clone();
        bad[2][2] = &det + rat(1, 1);
        let images: Mat = gens.iter().map(|v| apply(&bad, v)).collect();
        let is_witness = matches!(
            extend_lattice_hom(&h, &gens, &h, &images),
            Err(HomError::NotAHomomorphism { .. })
        );
        prop_assert!(is_witness);
    }

    #[test]
    fn algebra_files_round_trip(
        picks in proptest::collection::vec(0u8..4, 1..3),
        entries in proptest::collection::vec(entry(), 49),
    ) {
        let (g, _) = direct_sum_of(&picks, 5);
        let Some(p) = invertible(&entries, g.dim()) else { return Ok(()) };
        let h = AnyAlgebra::Rational(g.change_basis(&p).unwrap());
        let text = write_algebra(&h);
        prop_assert_eq!(parse_algebra(&text).unwrap(), h);
    }
}

#[test]
fn redundant_generators_must_agree() {
    let h = LieAlgebra::heisenberg();
    let mut gens: Mat = (0..3).map(|i| e(3, i)).collect();
    gens.push(vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
    let mut images = gens.clone();
    assert!(extend_lattice_hom(&h, &gens, &h, &images).is_ok());
    images[3] = vec![rat(1, 1), rat(2, 1), rat(0, 1)];
    assert_eq!(
        extend_lattice_hom(&h, &gens, &h, &images),
        Err(HomError::NotLinear { index: 3 })
    );
    assert_eq!(
        extend_lattice_hom(&h, &gens[..2], &h, &images[..2]),
        Err(HomError::GeneratorsDoNotSpan {
            count: 2,
            rank: 2,
            dim: 3
        })
    );
}

#[test]
fn free_nilpotent_rank_two_class_three_is_indecomposable() {
    // [e1,e2]=e3, [e1,e3]=e4, [e2,e3]=e5
    let g = LieAlgebra::from_upper_entries(
        5,
        nilmodel::exactfield::CoeffField::Rational,
        rat(0, 1),
        &[
            (0, 1, 2, rat(1, 1)),
            (0, 2, 3, rat(1, 1)),
            (1, 2, 4, rat(1, 1)),
        ],
    )
    .unwrap();
    assert_eq!(g.class(), 3);
    assert_eq!(g.lower_central_series().dims(), vec![5, 3, 2, 0]);
    let r = decompose_indecomposable(&g, DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(r.is_indecomposable());
    let s = g.direct_sum(&LieAlgebra::abelian(1)).unwrap();
    let r = decompose_indecomposable(&s, DEFAULT_SEARCH_BUDGET).unwrap();
    assert_eq!(r.factor_dims(), vec![1, 5]);
}
