//! Windows, model-set patches and the patches derived from them.

use super::scheme::{pair_abs_le, rational_parts, LatticePoint, Pair, Scheme};
use super::CutProjectError;
use crate::exactfield::{parse_rational, Embedding, QuadFieldElem, Rational};
use crate::liealg::LieAlgebra;
use num_traits::{Signed, ToPrimitive};
use std::cmp::Ordering;
use std::io::{self, Write};
use std::sync::Arc;

/// Default cap on the number of integer candidates examined per enumeration.
pub const DEFAULT_CANDIDATE_BUDGET: u128 = 200_000_000;
/// Largest doubled search box (per coordinate) that is re-scanned in full.
pub const DOUBLING_CHECK_LIMIT: u128 = 40_000_000;

/// Symmetric box `|star(x)_i| <= w_i` in `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    bounds: Vec<Rational>,
}

impl Window {
    pub fn new(bounds: Vec<Rational>) -> Result<Self, CutProjectError> {
        if bounds.iter().any(|w| !w.is_positive()) {
            return Err(CutProjectError::InvalidWindow(
                "every bound must be positive".into(),
            ));
        }
        Ok(Self { bounds })
    }

    pub fn parse(bounds: &[impl AsRef<str>]) -> Result<Self, CutProjectError> {
        let v = bounds
            .iter()
            .map(|s| {
                parse_rational(s.as_ref())
                    .map_err(|e| CutProjectError::InvalidWindow(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(v)
    }

    pub fn bounds(&self) -> &[Rational] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            bounds: keep.iter().map(|&i| self.bounds[i].clone()).collect(),
        }
    }
}

/// The points of a patch. Model sets with box windows are products of
/// one-dimensional coordinate sets and are never materialized.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSet {
    /// Per-coordinate sorted lists; the patch is their Cartesian product.
    Product(Vec<Vec<Pair>>),
    /// Explicit sorted, deduplicated list.
    List(Vec<LatticePoint>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    ModelSet,
    Pisot,
    Abelianized,
    Derived,
    Products,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PatchMeta {
    pub kind: PatchKind,
    /// Integer pairs examined during enumeration.
    pub candidates: u128,
    /// Per coordinate `(|a| bound, |b| bound)` of the search box.
    pub search_box: Vec<(i64, i64)>,
    /// Points found by re-enumerating in the doubled box but not in the box.
    pub doubling_added: Option<u64>,
    /// Bound on `|star(y)|` for one-dimensional Pisot patches.
    pub star_bound: Option<f64>,
    /// Number of factors for product patches.
    pub factors: Option<usize>,
}

impl PatchMeta {
    fn new(kind: PatchKind) -> Self {
        Self {
            kind,
            candidates: 0,
            search_box: Vec::new(),
            doubling_added: None,
            star_bound: None,
            factors: None,
        }
    }
}

/// A finite piece of a model set (or of a set derived from one).
#[derive(Debug, Clone)]
pub struct ModelSetPatch {
    scheme: Arc<Scheme>,
    window: Option<Window>,
    radius: f64,
    core_radius: f64,
    points: PointSet,
    meta: PatchMeta,
}

fn coordinate_bounds(
    m: i64,
    w: usize,
    radius: &Rational,
    window: &Rational,
) -> (Rational, Rational) {
    let mm = Rational::from_integer(m.into());
    (&mm * num_traits::pow(radius.clone(), w), &mm * window)
}

struct CoordinateSet {
    points: Vec<Pair>,
    candidates: u128,
    search_box: (i64, i64),
    doubling_added: Option<u64>,
}

/// All `(a, b)` with `|a + b sqrt d| <= u` and `|a - b sqrt d| <= v`.
fn coordinate_points(d: u64, u: &Rational, v: &Rational) -> Result<CoordinateSet, CutProjectError> {
    let (un, ud) = rational_parts(u)?;
    let (vn, vd) = rational_parts(v)?;
    let s = (d as f64).sqrt();
    let (uf, vf) = (un as f64 / ud as f64, vn as f64 / vd as f64);
    let bmax = ((uf + vf) / (2.0 * s)).floor() as i64 + 1;
    let amax = ((uf + vf) / 2.0).floor() as i64 + 1;
    let pred =
        |a: i64, b: i64| pair_abs_le(a, b, d, un, ud, false) && pair_abs_le(a, b, d, vn, vd, true);
    // for fixed b the solutions form an integer interval around [lo, hi]
    let scan = |bm: i64, am: i64, out: &mut Vec<Pair>| -> (u128, u64) {
        let mut cand = 0u128;
        let mut found = 0u64;
        for b in -bm..=bm {
            let bs = b as f64 * s;
            let lo = (-uf - bs).max(-vf + bs);
            let hi = (uf - bs).min(vf + bs);
            if lo > hi + 2.0 {
                continue;
            }
            let a0 = (lo.floor() as i64 - 1).max(-am);
            let a1 = (hi.ceil() as i64 + 1).min(am);
            for a in a0..=a1 {
                cand += 1;
                if pred(a, b) {
                    found += 1;
                    out.push((a, b));
                }
            }
        }
        (cand, found)
    };
    let mut points = Vec::new();
    let (candidates, found) = scan(bmax, amax, &mut points);
    // brute force over the doubled box, when affordable
    let area = (4 * amax as u128 + 1) * (4 * bmax as u128 + 1);
    let doubling_added = (area <= DOUBLING_CHECK_LIMIT).then(|| {
        let mut all = 0u64;
        for b in -2 * bmax..=2 * bmax {
            for a in -2 * amax..=2 * amax {
                if pred(a, b) {
                    all += 1;
                }
            }
        }
        all - found
    });
    points.sort_unstable();
    Ok(CoordinateSet {
        points,
        candidates,
        search_box: (amax, bmax),
        doubling_added,
    })
}

/// `P_0 = {x in L : ||x|| <= R, star(x) in W}`, complete and exact.
pub fn enumerate_model_set(
    scheme: &Arc<Scheme>,
    window: &Window,
    radius: &Rational,
) -> Result<ModelSetPatch, CutProjectError> {
    enumerate_model_set_with_budget(scheme, window, radius, DEFAULT_CANDIDATE_BUDGET)
}

pub fn enumerate_model_set_with_budget(
    scheme: &Arc<Scheme>,
    window: &Window,
    radius: &Rational,
    budget: u128,
) -> Result<ModelSetPatch, CutProjectError> {
    let n = scheme.dim();
    if window.dim() != n {
        return Err(CutProjectError::InvalidWindow(format!(
            "window has {} bounds, scheme has dimension {n}",
            window.dim()
        )));
    }
    if !radius.is_positive() {
        return Err(CutProjectError::InvalidWindow(
            "region radius must be positive".into(),
        ));
    }
    let s = (scheme.d() as f64).sqrt();
    let bounds: Vec<(Rational, Rational)> = (0..n)
        .map(|i| {
            coordinate_bounds(
                scheme.denominators()[i],
                scheme.weights()[i],
                radius,
                &window.bounds[i],
            )
        })
        .collect();
    let estimate: f64 = bounds
        .iter()
        .map(|(u, v)| {
            let (uf, vf) = (
                u.to_f64().unwrap_or(f64::MAX),
                v.to_f64().unwrap_or(f64::MAX),
            );
            (2.0 * ((uf + vf) / (2.0 * s)).floor() + 3.0) * (2.0 * uf.min(vf) + 3.0)
        })
        .sum();
    if estimate > budget as f64 {
        return Err(CutProjectError::RegionTooLarge {
            count: estimate as u128,
            budget,
        });
    }
    let mut meta = PatchMeta::new(PatchKind::ModelSet);
    let mut coords = Vec::with_capacity(n);
    let mut added = Some(0u64);
    for (u, v) in &bounds {
        let c = coordinate_points(scheme.d(), u, v)?;
        meta.candidates += c.candidates;
        meta.search_box.push(c.search_box);
        added = added.zip(c.doubling_added).map(|(x, y)| x + y);
        coords.push(c.points);
    }
    meta.doubling_added = added;
    let r = radius.to_f64().unwrap_or(f64::MAX);
    Ok(ModelSetPatch {
        scheme: Arc::clone(scheme),
        window: Some(window.clone()),
        radius: r,
        core_radius: r / 2.0,
        points: PointSet::Product(coords),
        meta,
    })
}

/// `Y = {+-sum_{i in I} g^i : I subset {0..max_exp}}` for a quadratic Pisot
/// number `g = a + b sqrt d`.
pub fn pisot_patch(
    a: &Rational,
    b: &Rational,
    d: u64,
    max_exp: u32,
) -> Result<ModelSetPatch, CutProjectError> {
    let g = QuadFieldElem::new(a.clone(), b.clone(), d)
        .map_err(|e| CutProjectError::NotPisot(e.to_string()))?;
    let not_pisot = |why: &str| CutProjectError::NotPisot(format!("{g}: {why}"));
    let one = QuadFieldElem::one(d);
    if (&g - &one).signum() != Ordering::Greater {
        return Err(not_pisot("not greater than 1"));
    }
    let conj = g.conjugate();
    if (&conj - &one).signum() != Ordering::Less || (&conj + &one).signum() != Ordering::Greater {
        return Err(not_pisot("conjugate is not inside (-1, 1)"));
    }
    let trace = a * Rational::from_integer(2.into());
    if !trace.is_integer() || !g.norm().is_integer() {
        return Err(not_pisot("not an algebraic integer"));
    }
    if max_exp > 24 {
        return Err(CutProjectError::RegionTooLarge {
            count: 1u128 << (max_exp + 1),
            budget: 1 << 25,
        });
    }
    let m = num_integer::Integer::lcm(a.denom(), b.denom())
        .to_i64()
        .ok_or(CutProjectError::Overflow)?;
    let g_scheme = LieAlgebra::<Rational>::abelian(1)
        .lift_to_quad(d)
        .map_err(|e| CutProjectError::InvalidAlgebra(e.to_string()))?;
    let scheme = Arc::new(super::build_scheme(&g_scheme, d, &[m])?);
    let mut powers: Vec<Pair> = Vec::new();
    let mut p = one.clone();
    for _ in 0..=max_exp {
        let pt = scheme
            .from_field(&[p.clone()])
            .ok_or(CutProjectError::Overflow)?;
        powers.push(pt[0]);
        p = &p * &g;
    }
    let mut sums: Vec<Pair> = vec![(0, 0)];
    for &(pa, pb) in &powers {
        let len = sums.len();
        for i in 0..len {
            let (sa, sb) = sums[i];
            sums.push((sa + pa, sb + pb));
        }
    }
    let mut pts: Vec<LatticePoint> = sums
        .iter()
        .flat_map(|&(sa, sb)| [vec![(sa, sb)], vec![(-sa, -sb)]])
        .collect();
    pts.sort_unstable();
    pts.dedup();
    // |star(y)| <= 1 / (1 - |sigma(g)|), checked exactly
    let abs_conj = if conj.signum() == Ordering::Less {
        -&conj
    } else {
        conj.clone()
    };
    let star_bound = (&one - &abs_conj)
        .inverse()
        .map_err(|_| not_pisot("degenerate"))?;
    for y in &pts {
        let s = scheme.to_field(y)[0].conjugate();
        let abs_s = if s.signum() == Ordering::Less { -&s } else { s };
        if (&star_bound - &abs_s).signum() == Ordering::Less {
            return Err(CutProjectError::Internal(format!(
                "star bound violated by {y:?}"
            )));
        }
    }
    let top = powers
        .last()
        .map(|&p| scheme.embed(&[p], Embedding::Principal)[0])
        .unwrap_or(1.0);
    let gf = g.embed(Embedding::Principal);
    // Y_N is exactly Y intersected with the open ball of radius g^(N+1)
    let sound = top * gf;
    let mut meta = PatchMeta::new(PatchKind::Pisot);
    meta.candidates = sums.len() as u128 * 2;
    meta.star_bound = Some(star_bound.embed(Embedding::Principal));
    Ok(ModelSetPatch {
        scheme,
        window: None,
        radius: sound,
        core_radius: sound / 2.0,
        points: PointSet::List(pts),
        meta,
    })
}

/// Image in `G/[G,G]`: the weight-one coordinates.
pub fn abelianize_patch(patch: &ModelSetPatch) -> Result<ModelSetPatch, CutProjectError> {
    let scheme = &patch.scheme;
    let keep: Vec<usize> = (0..scheme.dim())
        .filter(|&i| scheme.weights()[i] == 1)
        .collect();
    let ab = Arc::new(scheme.abelianization()?);
    let points = match &patch.points {
        PointSet::Product(c) => PointSet::Product(keep.iter().map(|&i| c[i].clone()).collect()),
        PointSet::List(l) => {
            let mut v: Vec<LatticePoint> = l
                .iter()
                .map(|p| keep.iter().map(|&i| p[i]).collect())
                .collect();
            v.sort_unstable();
            v.dedup();
            PointSet::List(v)
        }
    };
    let mut meta = patch.meta.clone();
    meta.kind = PatchKind::Abelianized;
    Ok(ModelSetPatch {
        scheme: ab,
        window: patch.window.as_ref().map(|w| w.restrict(&keep)),
        radius: patch.radius,
        core_radius: patch.core_radius,
        points,
        meta,
    })
}

/// Points with vanishing coordinates outside `[g, g]`, expressed in the
/// derived subgroup. If `[G, G]` is trivial the result is `{e}` in `G`.
pub fn intersect_derived(patch: &ModelSetPatch) -> Result<ModelSetPatch, CutProjectError> {
    let scheme = &patch.scheme;
    let keep = scheme.derived_indices();
    let outside: Vec<usize> = (0..scheme.dim()).filter(|i| !keep.contains(i)).collect();
    let filtered: Vec<LatticePoint> = patch
        .iter()
        .filter(|p| outside.iter().all(|&i| p[i] == (0, 0)))
        .collect();
    let mut meta = patch.meta.clone();
    meta.kind = PatchKind::Derived;
    if keep.is_empty() {
        return Ok(ModelSetPatch {
            scheme: Arc::clone(scheme),
            window: patch.window.clone(),
            radius: patch.radius,
            core_radius: patch.core_radius,
            points: PointSet::List(filtered),
            meta,
        });
    }
    let sub = Arc::new(scheme.derived()?);
    let mut pts: Vec<LatticePoint> = filtered
        .iter()
        .map(|p| keep.iter().map(|&i| p[i]).collect())
        .collect();
    pts.sort_unstable();
    pts.dedup();
    Ok(ModelSetPatch {
        scheme: sub,
        window: patch.window.as_ref().map(|w| w.restrict(&keep)),
        radius: patch.radius,
        core_radius: patch.core_radius,
        points: PointSet::List(pts),
        meta,
    })
}

impl ModelSetPatch {
    /// Patch from an explicit point list (sorted and deduplicated here).
    pub fn from_points(
        scheme: &Arc<Scheme>,
        mut points: Vec<LatticePoint>,
        radius: f64,
        core_radius: f64,
        kind: PatchKind,
    ) -> Self {
        points.sort_unstable();
        points.dedup();
        Self {
            scheme: Arc::clone(scheme),
            window: None,
            radius,
            core_radius,
            points: PointSet::List(points),
            meta: PatchMeta::new(kind),
        }
    }

    pub fn with_core_radius(mut self, core: f64) -> Self {
        self.core_radius = core;
        self
    }

    pub(crate) fn with_meta(mut self, f: impl FnOnce(&mut PatchMeta)) -> Self {
        f(&mut self.meta);
        self
    }

    pub fn scheme(&self) -> &Arc<Scheme> {
        &self.scheme
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn meta(&self) -> &PatchMeta {
        &self.meta
    }

    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    pub fn len(&self) -> u128 {
        match &self.points {
            PointSet::Product(c) => c.iter().map(|v| v.len() as u128).product(),
            PointSet::List(l) => l.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in lexicographic order of their integer coordinates.
    pub fn iter(&self) -> Box<dyn Iterator<Item = LatticePoint> + '_> {
        match &self.points {
            PointSet::List(l) => Box::new(l.iter().cloned()),
            PointSet::Product(c) => Box::new(ProductIter::new(c)),
        }
    }

    /// Exact membership.
    pub fn contains(&self, x: &[Pair]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match &self.points {
            PointSet::Product(c) => x
                .iter()
                .zip(c)
                .all(|(p, list)| list.binary_search(p).is_ok()),
            PointSet::List(l) => l.binary_search_by(|p| p.as_slice().cmp(x)).is_ok(),
        }
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&vec![(0, 0); self.dim()])
    }

    /// Closed under `x -> x^-1`.
    pub fn is_symmetric(&self) -> bool {
        match &self.points {
            PointSet::Product(c) => c.iter().all(|list| {
                list.iter()
                    .all(|&(a, b)| list.binary_search(&(-a, -b)).is_ok())
            }),
            PointSet::List(l) => l
                .iter()
                .all(|p| self.contains(&super::LatticeLaw::inverse(p))),
        }
    }

    /// Explicit list of all points, refusing more than `limit`.
    pub fn to_list(&self, limit: u128) -> Result<Vec<LatticePoint>, CutProjectError> {
        if self.len() > limit {
            return Err(CutProjectError::RegionTooLarge {
                count: self.len(),
                budget: limit,
            });
        }
        Ok(self.iter().collect())
    }

    /// Every window bound holds exactly for every point (and every coordinate
    /// is within the region radius).
    pub fn check_star_consistency(&self) -> Result<bool, CutProjectError> {
        let Some(w) = &self.window else {
            return Ok(true);
        };
        let s = &self.scheme;
        let coord_ok = |i: usize, &(a, b): &Pair| -> Result<bool, CutProjectError> {
            let m = Rational::from_integer(s.denominators()[i].into());
            let (n, dn) = rational_parts(&(&m * &w.bounds[i]))?;
            Ok(pair_abs_le(a, b, s.d(), n, dn, true))
        };
        match &self.points {
            PointSet::Product(c) => {
                for (i, list) in c.iter().enumerate() {
                    for p in list {
                        if !coord_ok(i, p)? {
                            return Ok(false);
                        }
                    }
                }
            }
            PointSet::List(l) => {
                for p in l {
                    for (i, c) in p.iter().enumerate() {
                        if !coord_ok(i, c)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// One JSON object per point: `coords`, `den`, `embed`, `star`.
    pub fn write_jsonl(&self, mut w: impl Write) -> io::Result<()> {
        for p in self.iter() {
            let rec = serde_json::json!({
                "coords": p.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
                "den": self.scheme.denominators(),
                "embed": self.scheme.embed(&p, Embedding::Principal),
                "star": self.scheme.embed(&p, Embedding::Conjugate),
            });
            writeln!(w, "{rec}")?;
        }
        Ok(())
    }

    /// CSV of principal and conjugate embeddings.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let n = self.dim();
        let head: Vec<String> = (1..=n)
            .map(|i| format!("x{i}"))
            .chain((1..=n).map(|i| format!("star{i}")))
            .collect();
        writeln!(w, "{}", head.join(","))?;
        for p in self.iter() {
            let vals: Vec<String> = self
                .scheme
                .embed(&p, Embedding::Principal)
                .into_iter()
                .chain(self.scheme.embed(&p, Embedding::Conjugate))
                .map(|v| v.to_string())
                .collect();
            writeln!(w, "{}", vals.join(","))?;
        }
        Ok(())
    }

    /// Summary as JSON (no point data).
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.meta.kind,
            "dim": self.dim(),
            "d": self.scheme.d(),
            "denominators": self.scheme.denominators(),
            "window": self.window.as_ref().map(|w| w.bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>()),
            "radius": self.radius,
            "core_radius": self.core_radius,
            "points": self.len().to_string(),
            "candidates": self.meta.candidates.to_string(),
            "search_box": self.meta.search_box,
            "doubling_added": self.meta.doubling_added,
            "star_bound": self.meta.star_bound,
            "closure": self.scheme.closure(),
        })
    }
}

struct ProductIter<'a> {
    coords: &'a [Vec<Pair>],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> ProductIter<'a> {
    fn new(coords: &'a [Vec<Pair>]) -> Self {
        Self {
            coords,
            idx: vec![0; coords.len()],
            done: coords.iter().any(Vec::is_empty),
        }
    }
}

impl Iterator for ProductIter<'_> {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        if self.done {
            return None;
        }
        let out = self
            .idx
            .iter()
            .zip(self.coords)
            .map(|(&i, c)| c[i])
            .collect();
        let mut pos = self.idx.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.idx[pos] += 1;
            if self.idx[pos] < self.coords[pos].len() {
                break;
            }
            self.idx[pos] = 0;
        }
        Some(out)
    }
}

/// Integer `R` or ratio as a rational; convenience for callers with `f64`-free inputs.
pub fn region(r: i64) -> Rational {
    Rational::from_integer(r.into())
}
