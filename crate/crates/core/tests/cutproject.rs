use nilmodel::cutproject::*;
use nilmodel::exactfield::{rat, Embedding, QuadFieldElem, Rational};
use nilmodel::liealg::LieAlgebra;
use nilmodel::verify::product_patch;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

fn h3_scheme() -> Arc<Scheme> {
    let g = LieAlgebra::heisenberg().lift_to_quad(2).unwrap();
    Arc::new(build_scheme(&g, 2, &[1, 1, 2]).unwrap())
}

fn abelian_scheme(n: usize, den: &[i64]) -> Arc<Scheme> {
    let g = LieAlgebra::abelian(n).lift_to_quad(2).unwrap();
    Arc::new(build_scheme(&g, 2, den).unwrap())
}

fn h3_window() -> Window {
    Window::parse(&["2", "2", "4"]).unwrap()
}

/// `-bound <= x <= bound`, decided with field signs only.
fn within(x: &QuadFieldElem, bound: &Rational) -> bool {
    let b = QuadFieldElem::from_rational(bound.clone(), x.d());
    (&b - x).signum() != Ordering::Less && (&b + x).signum() != Ordering::Less
}

/// Brute-force model set: every integer pair in a generous box, filtered
/// with exact field comparisons.
fn brute_force(scheme: &Scheme, window: &Window, r: &Rational) -> BTreeSet<LatticePoint> {
    let d = scheme.d();
    let s = (d as f64).sqrt();
    let rf = r.to_f64().unwrap();
    let mut coords: Vec<Vec<Pair>> = Vec::new();
    for i in 0..scheme.dim() {
        let m = scheme.denominators()[i];
        let w = scheme.weights()[i];
        let wb = &window.bounds()[i];
        let wf = wb.to_f64().unwrap();
        let rb = num_traits::pow(r.clone(), w);
        let big = m as f64 * (rf.powi(w as i32) + wf);
        let (amax, bmax) = (big as i64 + 2, (big / s) as i64 + 2);
        let mut v = Vec::new();
        for a in -amax..=amax {
            for b in -bmax..=bmax {
                let x = QuadFieldElem::from_ints(a, b, d).scale(&rat(1, m));
                if within(&x, &rb) && within(&x.conjugate(), wb) {
                    v.push((a, b));
                }
            }
        }
        coords.push(v);
    }
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; coords.len()];
    if coords.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        out.insert(idx.iter().zip(&coords).map(|(&i, c)| c[i]).collect());
        let mut k = idx.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < coords[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn point_set(p: &ModelSetPatch) -> BTreeSet<LatticePoint> {
    p.iter().collect()
}

#[test]
fn heisenberg_golden_counts() {
    let p = enumerate_model_set(&h3_scheme(), &h3_window(), &region(20)).unwrap();
    match p.points() {
        PointSet::Product(c) => {
            let sizes: Vec<usize> = c.iter().map(Vec::len).collect();
            assert_eq!(sizes, vec![59, 59, 9051]);
        }
        PointSet::List(_) => panic!("model set should be a product"),
    }
    assert_eq!(p.len(), 31_506_531);
    assert_eq!(p.meta().doubling_added, Some(0));
    assert!(p.contains_identity());
    assert!(p.is_symmetric());
    assert_eq!(p.core_radius(), 10.0);
}

#[test]
fn enumeration_matches_brute_force() {
    let s = h3_scheme();
    for (r, w) in [
        (rat(3, 1), h3_window()),
        (rat(5, 2), Window::parse(&["1", "1/2", "3"]).unwrap()),
    ] {
        let p = enumerate_model_set(&s, &w, &r).unwrap();
        assert_eq!(point_set(&p), brute_force(&s, &w, &r));
    }
    let s = abelian_scheme(2, &[1, 3]);
    let w = Window::parse(&["3/2", "1"]).unwrap();
    let p = enumerate_model_set(&s, &w, &rat(7, 1)).unwrap();
    assert_eq!(point_set(&p), brute_force(&s, &w, &rat(7, 1)));
}

#[test]
fn points_are_sorted_and_in_window() {
    let s = h3_scheme();
    let w = h3_window();
    let p = enumerate_model_set(&s, &w, &region(4)).unwrap();
    let pts: Vec<LatticePoint> = p.iter().collect();
    assert!(pts.windows(2).all(|x| x[0] < x[1]));
    assert!(p.check_star_consistency().unwrap());
    for x in &pts {
        for (i, v) in s.to_field(x).iter().enumerate() {
            assert!(within(&v.conjugate(), &w.bounds()[i]));
        }
    }
}

#[test]
fn closure_examples() {
    let s = h3_scheme();
    let c = verify_lattice_closure(&s);
    assert!(c.passed);
    assert_eq!((c.degree_bound, c.grid_side), (2, 5));
    let g = LieAlgebra::heisenberg().lift_to_quad(2).unwrap();
    match build_scheme(&g, 2, &[1, 1, 1]) {
        Err(CutProjectError::ClosureFailed { witness }) => {
            assert_eq!(witness.coordinate, 2);
            // e1 e2 has z-coordinate 1/2
            let x = s.to_field(&witness.x);
            let y = s.to_field(&witness.y);
            assert_eq!(g.bracket(&x, &y)[2], QuadFieldElem::from_ints(1, 0, 2));
        }
        other => panic!("expected closure failure, got {other:?}"),
    }
    let a = abelian_scheme(1, &[1]);
    assert!(a.closure().passed);
    assert_eq!(a.closure().degree_bound, 1);
    // filiform over Q(sqrt 2): degree-3 terms carry 1/12
    let f = LieAlgebra::filiform4().lift_to_quad(2).unwrap();
    let fs = build_scheme(&f, 2, &[1, 1, 2, 12]).unwrap();
    assert!(fs.closure().passed);
    assert_eq!(fs.closure().degree_bound, 3);
    assert!(matches!(
        build_scheme(&f, 2, &[1, 1, 1, 1]),
        Err(CutProjectError::ClosureFailed { .. })
    ));
}

#[test]
fn pisot_examples() {
    let y = pisot_patch(&rat(1, 1), &rat(1, 1), 2, 2).unwrap();
    assert_eq!(y.len(), 15);
    // direct expansion of +-sum_{i in I} g^i over I subset {0,1,2}
    let g = QuadFieldElem::from_ints(1, 1, 2);
    let pw = [QuadFieldElem::one(2), g.clone(), &g * &g];
    let mut expected = BTreeSet::new();
    for mask in 0u32..8 {
        let mut s = QuadFieldElem::zero(2);
        for (i, p) in pw.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = &s + p;
            }
        }
        expected.insert((s.a().to_string(), s.b().to_string()));
        let n = -s;
        expected.insert((n.a().to_string(), n.b().to_string()));
    }
    let got: BTreeSet<(String, String)> = y
        .iter()
        .map(|p| {
            let v = &y.scheme().to_field(&p)[0];
            (v.a().to_string(), v.b().to_string())
        })
        .collect();
    assert_eq!(got, expected);

    let y0 = pisot_patch(&rat(1, 1), &rat(1, 1), 2, 0).unwrap();
    let vals: Vec<f64> = y0
        .iter()
        .map(|p| y0.scheme().embed(&p, Embedding::Principal)[0])
        .collect();
    assert_eq!(vals, vec![-1.0, 0.0, 1.0]);

    // |sigma(y)| <= 1 / (1 - (sqrt 2 - 1)) = 1 + sqrt(2)/2
    let bound = QuadFieldElem::new(rat(1, 1), rat(1, 2), 2).unwrap();
    let y = pisot_patch(&rat(1, 1), &rat(1, 1), 2, 10).unwrap();
    for p in y.iter() {
        let s = y.scheme().to_field(&p)[0].conjugate();
        assert_ne!((&bound - &s).signum(), Ordering::Less);
        assert_ne!((&bound + &s).signum(), Ordering::Less);
    }
    assert!((y.meta().star_bound.unwrap() - 1.70710678).abs() < 1e-6);
    assert!(matches!(
        pisot_patch(&rat(2, 1), &rat(0, 1), 2, 3),
        Err(CutProjectError::NotPisot(_))
    ));
}

#[test]
fn pisot_gap_bound() {
    // |norm(y1 - y2)| >= 1 and |sigma(y1 - y2)| <= 2 (1 + sqrt(2)/2)
    let y = pisot_patch(&rat(1, 1), &rat(1, 1), 2, 12).unwrap();
    let mut v: Vec<f64> = y
        .iter()
        .map(|p| y.scheme().embed(&p, Embedding::Principal)[0])
        .collect();
    v.sort_by(f64::total_cmp);
    let gap = v
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    assert!(gap >= 1.0 / 3.415, "gap {gap}");
}

#[test]
fn abelianize_and_derived() {
    let s = h3_scheme();
    let p = enumerate_model_set(&s, &h3_window(), &region(5)).unwrap();
    let a = abelianize_patch(&p).unwrap();
    assert_eq!(a.dim(), 2);
    let expected: BTreeSet<LatticePoint> = p.iter().map(|x| x[..2].to_vec()).collect();
    assert_eq!(point_set(&a), expected);
    assert_eq!(a.meta().kind, PatchKind::Abelianized);

    let ab = abelian_scheme(2, &[1, 1]);
    let q = enumerate_model_set(&ab, &Window::parse(&["1", "2"]).unwrap(), &region(6)).unwrap();
    assert_eq!(point_set(&abelianize_patch(&q).unwrap()), point_set(&q));

    let l2 = product_patch(&p, 2, &region(2)).unwrap();
    let z = intersect_derived(&l2).unwrap();
    assert!(z.len() > 1);
    assert_eq!(z.dim(), 1);
    let expected: BTreeSet<LatticePoint> = l2
        .iter()
        .filter(|x| x[0] == (0, 0) && x[1] == (0, 0))
        .map(|x| vec![x[2]])
        .collect();
    assert_eq!(point_set(&z), expected);

    let l2 = product_patch(&q, 2, &region(3)).unwrap();
    let e = intersect_derived(&l2).unwrap();
    assert_eq!(point_set(&e), BTreeSet::from([vec![(0, 0), (0, 0)]]));
}

#[test]
fn jsonl_and_csv_output() {
    let s = h3_scheme();
    let p = enumerate_model_set(&s, &h3_window(), &region(2)).unwrap();
    let mut buf = Vec::new();
    p.write_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let recs: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.len() as u128, p.len());
    for (r, x) in recs.iter().zip(p.iter()) {
        let c: Vec<[i64; 2]> = serde_json::from_value(r["coords"].clone()).unwrap();
        assert_eq!(c.iter().map(|v| (v[0], v[1])).collect::<Vec<_>>(), x);
        assert_eq!(r["den"], serde_json::json!([1, 1, 2]));
        let star: Vec<f64> = serde_json::from_value(r["star"].clone()).unwrap();
        assert!(star
            .iter()
            .zip([2.0, 2.0, 4.0])
            .all(|(v, w)| v.abs() <= w + 1e-12));
    }
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,star1,star2,star3"));
    assert_eq!(lines.count() as u128, p.len());
    let mut again = Vec::new();
    p.write_csv(&mut again).unwrap();
    assert_eq!(again, text.into_bytes());
}

#[test]
fn config_round_trip() {
    let text = "[field]\nd = 2\n[algebra]\nbuiltin = \"heisenberg\"\n[lattice]\ndenominators = [1, 1, 2]\n[window]\nbounds = [\"2\", \"2\", \"4\"]\n[region]\nradius = 3\n";
    let c = SchemeConfig::parse(text).unwrap();
    let s = c.scheme(std::path::Path::new(".")).unwrap();
    let p = enumerate_model_set(&s, &c.window().unwrap(), &c.radius().unwrap()).unwrap();
    let q = enumerate_model_set(&h3_scheme(), &h3_window(), &region(3)).unwrap();
    assert_eq!(point_set(&p), point_set(&q));
}

fn small_window() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1i64..6, 1i64..4), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symmetric_with_identity(w in small_window(), r in 1i64..5) {
        let win = Window::new(w.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap();
        let p = enumerate_model_set(&h3_scheme(), &win, &region(r)).unwrap();
        prop_assert!(p.contains_identity());
        prop_assert!(p.is_symmetric());
        prop_assert!(p.check_star_consistency().unwrap());
        let pts = point_set(&p);
        for x in &pts {
            prop_assert!(pts.contains(&LatticeLaw::inverse(x)));
        }
    }

    #[test]
    fn monotone_in_window_and_radius(w in small_window(), r in 1i64..4, grow in 0usize..3) {
        let s = h3_scheme();
        let win = Window::new(w.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap();
        let mut bigger: Vec<Rational> = win.bounds().to_vec();
        bigger[grow] = &bigger[grow] * rat(3, 2);
        let big = Window::new(bigger).unwrap();
        let p = point_set(&enumerate_model_set(&s, &win, &region(r)).unwrap());
        let q = point_set(&enumerate_model_set(&s, &big, &region(r)).unwrap());
        let t = point_set(&enumerate_model_set(&s, &win, &region(r + 1)).unwrap());
        prop_assert!(p.is_subset(&q));
        prop_assert!(p.is_subset(&t));
    }

    #[test]
    fn lattice_product_is_field_product(
        x in prop::collection::vec((-20i64..20, -20i64..20), 3),
        y in prop::collection::vec((-20i64..20, -20i64..20), 3),
    ) {
        let s = h3_scheme();
        let p = s.mul(&x, &y).unwrap();
        prop_assert_eq!(s.to_field(&p), s.law().mul(&s.to_field(&x), &s.to_field(&y)));
        let e = s.mul(&p, &LatticeLaw::inverse(&p)).unwrap();
        prop_assert!(e.iter().all(|&c| c == (0, 0)));
    }
}
