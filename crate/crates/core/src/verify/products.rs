//! Product sets `L^k` and finite sets `F` with `L L` inside `F L`.

use super::index::{Metric, PatchIndex, Side};
use super::VerifyError;
use crate::cutproject::{
    pair_abs_le, rational_parts, LatticeLaw, LatticePoint, ModelSetPatch, Pair, PatchKind, Scheme,
};
use crate::exactfield::{Embedding, Rational};
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Default cap on the size of any intermediate product set.
pub const DEFAULT_PRODUCT_BUDGET: u64 = 5_000_000;

/// Exact test `||x|| <= radius` for the box quasi-norm.
struct Ball {
    d: u64,
    bounds: Vec<(i128, i128)>,
}

impl Ball {
    fn new(scheme: &Scheme, radius: &Rational) -> Result<Self, VerifyError> {
        let bounds = scheme
            .weights()
            .iter()
            .zip(scheme.denominators())
            .map(|(&w, &m)| {
                let b = num_traits::pow(radius.clone(), w) * Rational::from_integer(m.into());
                rational_parts(&b)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            d: scheme.d(),
            bounds,
        })
    }

    /// `values[j]` is coordinate `coords[j]`.
    fn contains_at(&self, coords: &[usize], values: &[Pair]) -> bool {
        coords.iter().zip(values).all(|(&i, &(a, b))| {
            let (n, q) = self.bounds[i];
            pair_abs_le(a, b, self.d, n, q, false)
        })
    }
}

/// Deduplicated top-weight parts, `stride` pairs each, sorted by the
/// embedding of their first coordinate.
#[derive(Debug, Clone, PartialEq)]
struct TopSet {
    vals: Vec<Pair>,
    keys: Vec<f64>,
}

/// Splits coordinates into the maximal-weight ones, which enter products
/// additively, and the rest.
struct Levels {
    low: Vec<usize>,
    top: Vec<usize>,
    dim: usize,
    sqrt_d: f64,
    first_den: f64,
}

impl Levels {
    fn new(scheme: &Scheme) -> Self {
        let w = scheme.weights();
        let wmax = w.iter().copied().max().unwrap_or(1);
        let top: Vec<usize> = (0..w.len()).filter(|&i| w[i] == wmax).collect();
        Self {
            low: (0..w.len()).filter(|&i| w[i] != wmax).collect(),
            first_den: scheme.denominators()[top[0]] as f64,
            top,
            dim: w.len(),
            sqrt_d: (scheme.d() as f64).sqrt(),
        }
    }

    fn stride(&self) -> usize {
        self.top.len()
    }

    fn key(&self, p: Pair) -> f64 {
        (p.0 as f64 + p.1 as f64 * self.sqrt_d) / self.first_den
    }

    fn join(&self, low: &[Pair], top: &[Pair]) -> LatticePoint {
        let mut x = vec![(0, 0); self.dim];
        for (&i, &v) in self.low.iter().zip(low) {
            x[i] = v;
        }
        for (&i, &v) in self.top.iter().zip(top) {
            x[i] = v;
        }
        x
    }

    fn topset(&self, mut flat: Vec<Pair>) -> TopSet {
        let t = self.stride();
        let count = flat.len() / t;
        let mut order: Vec<usize> = (0..count).collect();
        let keys: Vec<f64> = (0..count).map(|i| self.key(flat[i * t])).collect();
        order.sort_unstable_by(|&i, &j| {
            keys[i]
                .total_cmp(&keys[j])
                .then_with(|| flat[i * t..(i + 1) * t].cmp(&flat[j * t..(j + 1) * t]))
        });
        let mut vals = Vec::with_capacity(flat.len());
        let mut out_keys = Vec::with_capacity(count);
        for i in order {
            let v = &flat[i * t..(i + 1) * t];
            let n = out_keys.len();
            if n > 0 && &vals[(n - 1) * t..n * t] == v {
                continue;
            }
            vals.extend_from_slice(v);
            out_keys.push(keys[i]);
        }
        flat.clear();
        TopSet {
            vals,
            keys: out_keys,
        }
    }

    fn sumset(&self, a: &TopSet, b: &TopSet) -> TopSet {
        let t = self.stride();
        let mut flat = Vec::with_capacity(a.vals.len() * b.keys.len());
        for x in a.vals.chunks(t) {
            for y in b.vals.chunks(t) {
                flat.extend(x.iter().zip(y).map(|(p, q)| (p.0 + q.0, p.1 + q.1)));
            }
        }
        self.topset(flat)
    }

    /// Groups points by their low part.
    fn group(&self, points: impl Iterator<Item = LatticePoint>) -> Vec<(LatticePoint, TopSet)> {
        let mut map: BTreeMap<LatticePoint, Vec<Pair>> = BTreeMap::new();
        for p in points {
            let low: LatticePoint = self.low.iter().map(|&i| p[i]).collect();
            map.entry(low)
                .or_default()
                .extend(self.top.iter().map(|&i| p[i]));
        }
        map.into_iter().map(|(k, v)| (k, self.topset(v))).collect()
    }
}

/// Ids such that equal top sets share an id.
fn topset_ids(groups: &[(LatticePoint, TopSet)]) -> Vec<usize> {
    let mut seen: HashMap<&[Pair], usize> = HashMap::new();
    groups
        .iter()
        .map(|(_, t)| {
            let n = seen.len();
            *seen.entry(t.vals.as_slice()).or_insert(n)
        })
        .collect()
}

/// `L^k` restricted to the ball of radius `radius`: products
/// `l_1 ... l_k` with every `l_i` and every partial product in the ball.
pub fn product_patch(
    patch: &ModelSetPatch,
    k: usize,
    radius: &Rational,
) -> Result<ModelSetPatch, VerifyError> {
    product_patch_with_budget(patch, k, radius, DEFAULT_PRODUCT_BUDGET)
}

pub fn product_patch_with_budget(
    patch: &ModelSetPatch,
    k: usize,
    radius: &Rational,
    budget: u64,
) -> Result<ModelSetPatch, VerifyError> {
    if k == 0 {
        return Err(VerifyError::InvalidInput("k must be at least 1".into()));
    }
    let rf = radius.to_f64().unwrap_or(f64::NAN);
    if !(rf > 0.0) || rf > patch.radius() {
        return Err(VerifyError::InvalidInput(format!(
            "product radius {radius} must be positive and at most the patch radius {}",
            patch.radius()
        )));
    }
    let scheme = patch.scheme();
    let ball = Ball::new(scheme, radius)?;
    let lv = Levels::new(scheme);
    let t = lv.stride();
    let all: Vec<usize> = (0..lv.dim).collect();
    let slack = |v: f64| v * (1.0 + 1e-9) + 1e-12;
    let boxb: Vec<f64> = scheme
        .weights()
        .iter()
        .map(|&w| slack(rf.powi(w as i32)))
        .collect();
    let top_bound = boxb[lv.top[0]];
    let src = PatchIndex::new(patch);
    let mut base: Vec<LatticePoint> = Vec::new();
    src.for_each_in_box(&boxb, |p, _| {
        let x = src.point(p);
        if ball.contains_at(&all, &x) {
            base.push(x);
        }
    });
    let base_groups = lv.group(base.into_iter());
    let base_ids = topset_ids(&base_groups);
    let mut current = base_groups.clone();
    let zeros = vec![(0i64, 0i64); t];
    for _ in 1..k {
        let cur_ids = topset_ids(&current);
        // low part and top offset of every admissible pair of low parts
        let mut contrib: Vec<(LatticePoint, usize, usize, LatticePoint)> = Vec::new();
        for (ui, (u, _)) in current.iter().enumerate() {
            let ux = lv.join(u, &zeros);
            for (xi, (x, _)) in base_groups.iter().enumerate() {
                let prod = scheme.mul(&ux, &lv.join(x, &zeros))?;
                let low: LatticePoint = lv.low.iter().map(|&i| prod[i]).collect();
                if ball.contains_at(&lv.low, &low) {
                    contrib.push((low, ui, xi, lv.top.iter().map(|&i| prod[i]).collect()));
                }
            }
        }
        contrib.sort();
        let mut sums: HashMap<(usize, usize), TopSet> = HashMap::new();
        let mut next: Vec<(LatticePoint, TopSet)> = Vec::new();
        let mut total = 0u64;
        let mut start = 0;
        while start < contrib.len() {
            let mut end = start;
            while end < contrib.len() && contrib[end].0 == contrib[start].0 {
                end += 1;
            }
            let mut flat: Vec<Pair> = Vec::new();
            for (_, ui, xi, q) in &contrib[start..end] {
                let s = sums
                    .entry((cur_ids[*ui], base_ids[*xi]))
                    .or_insert_with(|| lv.sumset(&current[*ui].1, &base_groups[*xi].1));
                let qf = lv.key(q[0]);
                let lo = s.keys.partition_point(|&v| v < -top_bound - qf);
                let hi = s.keys.partition_point(|&v| v <= top_bound - qf);
                let mut cand = vec![(0i64, 0i64); t];
                for j in lo..hi {
                    for (c, (a, b)) in cand
                        .iter_mut()
                        .zip(s.vals[j * t..(j + 1) * t].iter().zip(q))
                    {
                        *c = (a.0 + b.0, a.1 + b.1);
                    }
                    if ball.contains_at(&lv.top, &cand) {
                        flat.extend_from_slice(&cand);
                    }
                }
            }
            if !flat.is_empty() {
                let set = lv.topset(flat);
                total += set.keys.len() as u64;
                if total > budget {
                    return Err(VerifyError::BudgetExceeded {
                        partial: total,
                        budget,
                    });
                }
                next.push((contrib[start].0.clone(), set));
            }
            start = end;
        }
        current = next;
    }
    let points: Vec<LatticePoint> = current
        .iter()
        .flat_map(|(low, set)| set.vals.chunks(t).map(|top| lv.join(low, top)))
        .collect();
    Ok(
        ModelSetPatch::from_points(scheme, points, rf, rf / 2.0, PatchKind::Products)
            .with_meta(|m| m.factors = Some(k)),
    )
}

/// One recorded factorization `product = F[f] * lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    pub product: LatticePoint,
    pub f: usize,
    pub lambda: LatticePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxCertificate {
    #[serde(rename = "F")]
    pub f: Vec<LatticePoint>,
    pub factorizations: Vec<Factorization>,
    pub products_checked: u64,
    pub lambda_radius: f64,
    pub product_radius: f64,
    /// Every factorization recomputed with exact arithmetic.
    pub replay_ok: bool,
}

impl ApproxCertificate {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "F_size {}\nproducts_checked {}\nlambda_radius {}\nproduct_radius {}\nreplay {}\n",
            self.f.len(),
            self.products_checked,
            self.lambda_radius,
            self.product_radius,
            if self.replay_ok { "PASS" } else { "FAIL" }
        );
        for (i, f) in self.f.iter().enumerate() {
            s += &format!("F[{i}] {f:?}\n");
        }
        s
    }

    /// Recomputes every `F[f] * lambda` and checks `lambda` is in `patch`.
    pub fn replay(&self, patch: &ModelSetPatch) -> bool {
        self.factorizations.iter().all(|r| {
            r.f < self.f.len()
                && patch.contains(&r.lambda)
                && patch.scheme().mul(&self.f[r.f], &r.lambda).ok().as_ref() == Some(&r.product)
        })
    }
}

/// Greedy `F` with `products` inside `F * patch`.
///
/// Products are scanned by quasi-norm, then lexicographically. A product
/// not covered by the current `F` adds `p l^-1` for the patch point `l`
/// minimizing `||p l^-1||`.
pub fn approx_certificate(
    patch: &ModelSetPatch,
    products: &ModelSetPatch,
) -> Result<ApproxCertificate, VerifyError> {
    let scheme = patch.scheme();
    if products.scheme().dim() != scheme.dim() || products.scheme().d() != scheme.d() {
        return Err(VerifyError::InvalidInput(
            "patches belong to different schemes".into(),
        ));
    }
    let mut order: Vec<(f64, LatticePoint)> = products
        .iter()
        .map(|p| (scheme.quasi_norm(&p), p))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let idx = PatchIndex::new(patch);
    let max_r = 4.0 * patch.radius().max(1.0);
    let mut f: Vec<LatticePoint> = Vec::new();
    let mut f_inv: Vec<LatticePoint> = Vec::new();
    let mut factorizations = Vec::with_capacity(order.len());
    let mut last = 0;
    for (_, p) in order {
        let mut found = None;
        // the previous hit first, then F in order
        for i in std::iter::once(last)
            .chain(0..f_inv.len())
            .filter(|&i| i < f_inv.len())
        {
            let l = scheme.mul(&f_inv[i], &p)?;
            if patch.contains(&l) {
                found = Some((i, l));
                break;
            }
        }
        let (i, l) = match found {
            Some(x) => x,
            None => {
                // f = p l^-1 is smallest for l nearest to p in the
                // right-invariant distance ||l p^-1|| = ||p y|| with y = l^-1
                let c = scheme.embed(&LatticeLaw::inverse(&p), Embedding::Principal);
                let (_, path) = idx
                    .nearest(Metric::GroupQuasi, Side::Right, &c, 0.5, max_r, &|_| false)
                    .ok_or_else(|| VerifyError::FactorizationGap { product: p.clone() })?;
                let y = idx.point(&path);
                let l = LatticeLaw::inverse(&y);
                if !patch.contains(&l) {
                    return Err(VerifyError::FactorizationGap { product: p });
                }
                let new_f = scheme.mul(&p, &y)?;
                f_inv.push(LatticeLaw::inverse(&new_f));
                f.push(new_f);
                (f.len() - 1, l)
            }
        };
        last = i;
        factorizations.push(Factorization {
            product: p,
            f: i,
            lambda: l,
        });
    }
    let mut cert = ApproxCertificate {
        f,
        products_checked: factorizations.len() as u64,
        factorizations,
        lambda_radius: patch.radius(),
        product_radius: products.radius(),
        replay_ok: false,
    };
    cert.replay_ok = cert.replay(patch);
    Ok(cert)
}
