//! Coordinate-by-coordinate search structures over patch points.
//!
//! In an adapted basis coordinate `k` of `x^-1 y` is `y_k - x_k + Q_k` with
//! `Q_k` depending only on lower coordinates, so a ball query can fix one
//! coordinate at a time with a sorted-range lookup.

use crate::cutproject::{LatticePoint, LevelLaw, ModelSetPatch, Pair, PointSet};
use crate::exactfield::Embedding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `||x^-1 y||` with the homogeneous quasi-norm.
    GroupQuasi,
    /// Euclidean distance of coordinate vectors.
    Euclidean,
}

/// Which side the query center is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    /// Points `y` with `d(c, y) = ||c^-1 y||` small.
    Right,
    /// Points `l` with `d(l, c) = ||l^-1 c||` small.
    Left,
}

enum Store {
    /// Per level: values sorted ascending and the exact pair of each.
    Product(Vec<Vec<(f64, Pair)>>),
    /// Per level: nodes; a node holds sorted values and child ids (point
    /// ids at the last level).
    Trie {
        levels: Vec<Vec<TrieNode>>,
        points: Vec<LatticePoint>,
    },
}

struct TrieNode {
    vals: Vec<f64>,
    children: Vec<u32>,
}

/// Search index over the principal embedding of a patch.
pub(crate) struct PatchIndex<'a> {
    dim: usize,
    weights: Vec<usize>,
    law: &'a LevelLaw,
    store: Store,
}

/// One hit: the exact point and its distance to the query center.
pub(crate) struct Hit<'p> {
    pub path: &'p [usize],
    pub coords: &'p [f64],
    pub dist: f64,
}

impl<'a> PatchIndex<'a> {
    pub fn new(patch: &'a ModelSetPatch) -> Self {
        let scheme = patch.scheme();
        let n = scheme.dim();
        let s = (scheme.d() as f64).sqrt();
        let embed =
            |k: usize, &(a, b): &Pair| (a as f64 + b as f64 * s) / scheme.denominators()[k] as f64;
        let store = match patch.points() {
            PointSet::Product(c) => Store::Product(
                c.iter()
                    .enumerate()
                    .map(|(k, list)| {
                        let mut v: Vec<(f64, Pair)> =
                            list.iter().map(|p| (embed(k, p), *p)).collect();
                        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                        v
                    })
                    .collect(),
            ),
            PointSet::List(l) => {
                let mut order: Vec<u32> = (0..l.len() as u32).collect();
                let key = |i: u32, k: usize| embed(k, &l[i as usize][k]);
                order.sort_by(|&i, &j| {
                    for k in 0..n {
                        let c = key(i, k).total_cmp(&key(j, k));
                        if c != std::cmp::Ordering::Equal {
                            return c;
                        }
                    }
                    l[i as usize].cmp(&l[j as usize])
                });
                let mut levels: Vec<Vec<TrieNode>> = (0..n).map(|_| Vec::new()).collect();
                build_trie(&order, 0, n, &key, &mut levels);
                Store::Trie {
                    levels,
                    points: l.clone(),
                }
            }
        };
        Self {
            dim: n,
            weights: scheme.weights().to_vec(),
            law: scheme.level_law(Embedding::Principal),
            store,
        }
    }

    fn values(&self, level: usize, node: u32) -> LevelValues<'_> {
        match &self.store {
            Store::Product(v) => LevelValues::Pairs(&v[level]),
            Store::Trie { levels, .. } => LevelValues::Plain(&levels[level][node as usize].vals),
        }
    }

    fn child(&self, level: usize, node: u32, i: usize) -> u32 {
        match &self.store {
            Store::Product(_) => 0,
            Store::Trie { levels, .. } => levels[level][node as usize].children[i],
        }
    }

    /// Exact point at a path.
    pub fn point(&self, path: &[usize]) -> LatticePoint {
        match &self.store {
            Store::Product(v) => path.iter().enumerate().map(|(k, &i)| v[k][i].1).collect(),
            Store::Trie { levels, points } => {
                let mut node = 0u32;
                for (k, &i) in path.iter().enumerate() {
                    node = levels[k][node as usize].children[i];
                }
                points[node as usize].clone()
            }
        }
    }

    /// Visits every point whose coordinates satisfy `|x_k| <= box_k`, in
    /// index order.
    pub fn for_each_in_box(&self, bounds: &[f64], mut f: impl FnMut(&[usize], &[f64])) {
        let mut path = vec![0usize; self.dim];
        let mut coords = vec![0.0; self.dim];
        self.box_rec(0, 0, bounds, &mut path, &mut coords, &mut f);
    }

    fn box_rec(
        &self,
        level: usize,
        node: u32,
        bounds: &[f64],
        path: &mut Vec<usize>,
        coords: &mut Vec<f64>,
        f: &mut impl FnMut(&[usize], &[f64]),
    ) {
        if level == self.dim {
            f(path, coords);
            return;
        }
        let vals = self.values(level, node);
        let (lo, hi) = vals.range(-bounds[level], bounds[level]);
        for i in lo..hi {
            path[level] = i;
            coords[level] = vals.get(i);
            let c = self.child(level, node, i);
            self.box_rec(level + 1, c, bounds, path, coords, f);
        }
    }

    /// All points within distance `*r` of `center`; the visitor may shrink
    /// `*r` to prune the remaining search.
    pub fn search(
        &self,
        metric: Metric,
        side: Side,
        center: &[f64],
        r: &mut f64,
        visit: &mut impl FnMut(&Hit<'_>, &mut f64),
    ) {
        let n = self.dim;
        let mut st = SearchState {
            path: vec![0; n],
            coords: vec![0.0; n],
            neg: vec![0.0; n],
            neg_center: center.iter().map(|v| -v).collect(),
        };
        self.search_rec(metric, side, center, 0, 0, 0.0, r, &mut st, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn search_rec(
        &self,
        metric: Metric,
        side: Side,
        center: &[f64],
        level: usize,
        node: u32,
        partial: f64,
        r: &mut f64,
        st: &mut SearchState,
        visit: &mut impl FnMut(&Hit<'_>, &mut f64),
    ) {
        if level == self.dim {
            let dist = match metric {
                Metric::GroupQuasi => partial,
                Metric::Euclidean => partial.sqrt(),
            };
            if dist <= *r {
                let hit = Hit {
                    path: &st.path,
                    coords: &st.coords,
                    dist,
                };
                visit(&hit, r);
            }
            return;
        }
        let k = level;
        let w = self.weights[k];
        let (target, rad) = match metric {
            Metric::GroupQuasi => {
                let t = match side {
                    // (c^-1 y)_k = y_k - c_k + Q_k(-c, y)
                    Side::Right => center[k] - self.law.q(k, &st.neg_center, &st.coords),
                    // (l^-1 c)_k = c_k - l_k + Q_k(-l, c)
                    Side::Left => center[k] + self.law.q(k, &st.neg, center),
                };
                (t, r.powi(w as i32))
            }
            Metric::Euclidean => (center[k], (*r * *r - partial).max(0.0).sqrt()),
        };
        let slack = rad * 1e-9 + 1e-12 * (1.0 + target.abs());
        let vals = self.values(level, node);
        let (lo, hi) = vals.range(target - rad - slack, target + rad + slack);
        for i in lo..hi {
            let v = vals.get(i);
            // the bound may have shrunk inside the loop
            let delta = (v - target).abs();
            let next = match metric {
                Metric::GroupQuasi => {
                    let rad_now = r.powi(w as i32);
                    if delta > rad_now + slack {
                        if v > target {
                            break;
                        }
                        continue;
                    }
                    partial.max(root(delta, w))
                }
                Metric::Euclidean => {
                    let p = partial + delta * delta;
                    if p > *r * *r * (1.0 + 1e-9) + 1e-24 {
                        if v > target {
                            break;
                        }
                        continue;
                    }
                    p
                }
            };
            st.path[k] = i;
            st.coords[k] = v;
            st.neg[k] = -v;
            let c = self.child(level, node, i);
            self.search_rec(metric, side, center, level + 1, c, next, r, st, visit);
        }
        st.coords[k] = 0.0;
        st.neg[k] = 0.0;
    }

    /// Distance to the nearest point (other than those rejected by `skip`),
    /// searching balls of growing radius up to `max_r`.
    pub fn nearest(
        &self,
        metric: Metric,
        side: Side,
        center: &[f64],
        start: f64,
        max_r: f64,
        skip: &impl Fn(&Hit<'_>) -> bool,
    ) -> Option<(f64, Vec<usize>)> {
        let mut r = start.max(1e-9);
        loop {
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut rr = r;
            self.search(metric, side, center, &mut rr, &mut |h, rr| {
                if skip(h) {
                    return;
                }
                let better = match &best {
                    None => true,
                    Some((d, p)) => h.dist < *d || (h.dist == *d && h.path < p.as_slice()),
                };
                if better {
                    best = Some((h.dist, h.path.to_vec()));
                    *rr = h.dist;
                }
            });
            if best.is_some() {
                return best;
            }
            if r >= max_r {
                return None;
            }
            r = (r * 2.0).min(max_r);
        }
    }
}

struct SearchState {
    path: Vec<usize>,
    coords: Vec<f64>,
    neg: Vec<f64>,
    neg_center: Vec<f64>,
}

enum LevelValues<'a> {
    Pairs(&'a [(f64, Pair)]),
    Plain(&'a [f64]),
}

impl LevelValues<'_> {
    fn get(&self, i: usize) -> f64 {
        match self {
            LevelValues::Pairs(v) => v[i].0,
            LevelValues::Plain(v) => v[i],
        }
    }

    /// Index range of values in `[lo, hi]`.
    fn range(&self, lo: f64, hi: f64) -> (usize, usize) {
        match self {
            LevelValues::Pairs(v) => (
                v.partition_point(|x| x.0 < lo),
                v.partition_point(|x| x.0 <= hi),
            ),
            LevelValues::Plain(v) => (
                v.partition_point(|&x| x < lo),
                v.partition_point(|&x| x <= hi),
            ),
        }
    }
}

fn root(x: f64, w: usize) -> f64 {
    match w {
        1 => x,
        2 => x.sqrt(),
        _ => x.powf(1.0 / w as f64),
    }
}

/// Builds trie levels from `order` (sorted by coordinates); returns the id
/// of the created node at `level`.
fn build_trie(
    order: &[u32],
    level: usize,
    n: usize,
    key: &impl Fn(u32, usize) -> f64,
    levels: &mut Vec<Vec<TrieNode>>,
) -> u32 {
    let id = levels[level].len() as u32;
    levels[level].push(TrieNode {
        vals: Vec::new(),
        children: Vec::new(),
    });
    let mut vals = Vec::new();
    let mut children = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let v = key(order[i], level);
        let mut j = i + 1;
        if level + 1 < n {
            while j < order.len() && key(order[j], level) == v {
                j += 1;
            }
            let c = build_trie(&order[i..j], level + 1, n, key, levels);
            vals.push(v);
            children.push(c);
        } else {
            // distinct exact points with equal embeddings cannot occur
            vals.push(v);
            children.push(order[i]);
        }
        i = j;
    }
    let node = &mut levels[level][id as usize];
    node.vals = vals;
    node.children = children;
    id
}
