//! Hall bases of free nilpotent Lie algebras and the projection of Lie
//! polynomials onto them.

use super::series::{Series, TruncAlg};
use crate::exactfield::Rational;
use crate::linalg;
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HallTree {
    Letter(usize),
    /// Bracket of two earlier basis elements, by index.
    Bracket(usize, usize),
}

/// Hall basis for `k` generators through degree `c`.
///
/// Elements are ordered by degree, then by creation. `[u, v]` is a Hall
/// element when `u < v` and, if `v = [v1, v2]`, also `v1 <= u`.
#[derive(Debug)]
pub struct HallBasis {
    k: usize,
    c: usize,
    trees: Vec<HallTree>,
    degrees: Vec<usize>,
    by_degree: Vec<Vec<usize>>,
    alg: TruncAlg,
    expansions: Vec<Series>,
    projectors: Vec<Projector>,
}

/// Pivot words and the inverse of the Hall-expansion submatrix on them.
#[derive(Debug)]
struct Projector {
    pivots: Vec<usize>,
    inverse: Vec<Vec<Rational>>,
}

type Cache = RwLock<HashMap<(usize, usize), Arc<HallBasis>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared basis for `(k, c)`, built once per process.
pub fn hall_basis(k: usize, c: usize) -> Arc<HallBasis> {
    assert!(k >= 1 && c >= 1, "hall_basis needs k >= 1 and c >= 1");
    if let Some(b) = cache().read().expect("hall cache poisoned").get(&(k, c)) {
        return Arc::clone(b);
    }
    let built = Arc::new(HallBasis::build(k, c));
    let mut w = cache().write().expect("hall cache poisoned");
    Arc::clone(w.entry((k, c)).or_insert(built))
}

impl HallBasis {
    fn build(k: usize, c: usize) -> Self {
        let mut trees = Vec::new();
        let mut degrees = Vec::new();
        let mut by_degree = vec![Vec::new(); c + 1];
        for i in 0..k {
            by_degree[1].push(trees.len());
            trees.push(HallTree::Letter(i));
            degrees.push(1);
        }
        for d in 2..=c {
            for du in 1..d {
                let dv = d - du;
                for &u in &by_degree[du].clone() {
                    for &v in &by_degree[dv].clone() {
                        if u >= v {
                            continue;
                        }
                        if let HallTree::Bracket(v1, _) = trees[v] {
                            if v1 > u {
                                continue;
                            }
                        }
                        by_degree[d].push(trees.len());
                        trees.push(HallTree::Bracket(u, v));
                        degrees.push(d);
                    }
                }
            }
        }
        let alg = TruncAlg::new(k, c);
        let mut expansions: Vec<Series> = Vec::with_capacity(trees.len());
        for t in &trees {
            let e = match *t {
                HallTree::Letter(i) => alg.letter(i),
                HallTree::Bracket(u, v) => alg.commutator(&expansions[u], &expansions[v]),
            };
            expansions.push(e);
        }
        let mut projectors = Vec::with_capacity(c + 1);
        projectors.push(Projector {
            pivots: Vec::new(),
            inverse: Vec::new(),
        });
        for d in 1..=c {
            let range = alg.degree_range(d);
            if by_degree[d].is_empty() {
                projectors.push(Projector {
                    pivots: Vec::new(),
                    inverse: Vec::new(),
                });
                continue;
            }
            let rows: Vec<Vec<Rational>> = by_degree[d]
                .iter()
                .map(|&h| expansions[h][range.clone()].to_vec())
                .collect();
            let mut reduced = rows.clone();
            let pivots_local = linalg::rref(&mut reduced);
            assert_eq!(pivots_local.len(), rows.len(), "Hall elements independent");
            // square system: coefficient vector c with sum_h c_h rows[h][p] = value[p]
            let square: Vec<Vec<Rational>> = pivots_local
                .iter()
                .map(|&p| rows.iter().map(|r| r[p].clone()).collect())
                .collect();
            let inverse = linalg::inverse(&square).expect("pivot submatrix invertible");
            projectors.push(Projector {
                pivots: pivots_local.iter().map(|p| p + range.start).collect(),
                inverse,
            });
        }
        Self {
            k,
            c,
            trees,
            degrees,
            by_degree,
            alg,
            expansions,
            projectors,
        }
    }

    pub fn generators(&self) -> usize {
        self.k
    }

    pub fn class(&self) -> usize {
        self.c
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree(&self, i: usize) -> HallTree {
        self.trees[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn of_degree(&self, d: usize) -> &[usize] {
        self.by_degree.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_degree[1..].iter().map(Vec::len).collect()
    }

    pub fn algebra(&self) -> &TruncAlg {
        &self.alg
    }

    pub fn expansion(&self, i: usize) -> &Series {
        &self.expansions[i]
    }

    /// Number of occurrences of each letter in element `i`.
    pub fn multidegree(&self, i: usize) -> Vec<usize> {
        match self.trees[i] {
            HallTree::Letter(l) => {
                let mut v = vec![0; self.k];
                v[l] = 1;
                v
            }
            HallTree::Bracket(u, v) => self
                .multidegree(u)
                .into_iter()
                .zip(self.multidegree(v))
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Hall coordinates of a Lie polynomial given as a series; `None` when the
    /// series is not a Lie element (or has a constant term).
    pub fn project(&self, s: &[Rational]) -> Option<Vec<Rational>> {
        if !s[0].is_zero() {
            return None;
        }
        let mut coords = vec![Rational::zero(); self.len()];
        for d in 1..=self.c {
            let pr = &self.projectors[d];
            let values: Vec<Rational> = pr.pivots.iter().map(|&p| s[p].clone()).collect();
            if values.iter().all(Zero::is_zero) {
                continue;
            }
            let c = linalg::mat_vec(&pr.inverse, &values);
            for (&h, v) in self.by_degree[d].iter().zip(c) {
                coords[h] = v;
            }
        }
        // confirm the reconstruction matches everywhere
        (self.expand(&coords).as_slice() == s).then_some(coords)
    }

    pub fn expand(&self, coords: &[Rational]) -> Series {
        let mut out = self.alg.zero();
        for (h, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&self.expansions[h]) {
                if !e.is_zero() {
                    *o += c * e;
                }
            }
        }
        out
    }

    pub fn letter_name(&self, i: usize) -> String {
        letter_name(self.k, i, true)
    }

    pub fn element_name(&self, i: usize) -> String {
        match self.trees[i] {
            HallTree::Letter(l) => self.letter_name(l),
            HallTree::Bracket(u, v) => {
                format!("[{},{}]", self.element_name(u), self.element_name(v))
            }
        }
    }
}

/// `X, Y, Z` for at most three generators, else `X1, X2, ...`.
pub fn letter_name(k: usize, i: usize, upper: bool) -> String {
    let s = if k <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    };
    if upper {
        s.to_uppercase()
    } else {
        s
    }
}

impl fmt::Display for HallBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.len()).map(|i| self.element_name(i)).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Necklace polynomial `(1/d) sum_{e|d} mu(e) k^(d/e)`.
pub fn witt_count(k: usize, d: usize) -> usize {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d % e == 0 {
            total += mobius(e) as i128 * (k as i128).pow((d / e) as u32);
        }
    }
    (total / d as i128) as usize
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}
