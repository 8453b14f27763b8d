//! Dense linear algebra over any [`Scalar`]: row reduction, kernels, spans.
//!
//! Matrices are row-major `Vec<Vec<F>>`. Everything here is exact for the
//! exact scalar types; for `f64` the pivot choice is by largest magnitude.

use crate::exactfield::Scalar;

pub type Matrix<F> = Vec<Vec<F>>;

pub fn zeros<F: Scalar>(proto: &F, rows: usize, cols: usize) -> Matrix<F> {
    vec![vec![proto.zero_like(); cols]; rows]
}

pub fn identity<F: Scalar>(proto: &F, n: usize) -> Matrix<F> {
    let mut m = zeros(proto, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = proto.one_like();
    }
    m
}

pub fn mat_mul<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let proto = &a[0][0];
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(proto, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate().take(inner) {
            if aik.is_zero_elem() {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].add_ref(&aik.mul_ref(&b[k][j]));
            }
        }
    }
    out
}

pub fn mat_vec<F: Scalar>(a: &Matrix<F>, v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(v[0].zero_like(), |acc, (x, y)| acc.add_ref(&x.mul_ref(y)))
        })
        .collect()
}

pub fn transpose<F: Scalar>(a: &Matrix<F>) -> Matrix<F> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Scalar>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !row[c].is_zero_elem() {
                let mag = row[c].magnitude();
                if best.is_none_or(|(_, b)| mag > b) {
                    best = Some((i, mag));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv_ref().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero_elem() {
                continue;
            }
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero_elem() {
                    *x = x.sub_ref(&f.mul_ref(pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Scalar>(m: &Matrix<F>) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the null space `{x : m x = 0}`; `cols` is needed when `m` has no rows.
pub fn kernel<F: Scalar>(m: &Matrix<F>, cols: usize, proto: &F) -> Vec<Vec<F>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![proto.zero_like(); cols];
            v[f] = proto.one_like();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = w[r][f].neg_ref();
            }
            v
        })
        .collect()
}

/// Row-reduced basis of the span of `vectors` (all of length `dim`).
pub fn span_basis<F: Scalar>(vectors: &[Vec<F>]) -> Vec<Vec<F>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut w = vectors.to_vec();
    let n = rref(&mut w).len();
    w.truncate(n);
    w
}

pub fn in_span<F: Scalar>(basis: &[Vec<F>], v: &[F]) -> bool {
    let mut rows = basis.to_vec();
    let before = rank(&rows);
    rows.push(v.to_vec());
    rank(&rows) == before
}

/// Solve `a x = b` for a square or overdetermined consistent system.
/// Returns `None` if inconsistent or not uniquely solvable.
pub fn solve<F: Scalar>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    let cols = a.first()?.len();
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) || pivots.len() != cols {
        return None;
    }
    Some((0..cols).map(|i| aug[i][cols].clone()).collect())
}

/// Any solution of `a x = b`, or `None` if the system is inconsistent.
pub fn solve_consistent<F: Scalar>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    let cols = a.first()?.len();
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![b[0].zero_like(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn inverse<F: Scalar>(a: &Matrix<F>) -> Option<Matrix<F>> {
    let n = a.len();
    let proto = &a[0][0];
    let mut aug: Matrix<F> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    proto.one_like()
                } else {
                    proto.zero_like()
                }
            }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn determinant<F: Scalar>(a: &Matrix<F>) -> F {
    let n = a.len();
    let proto = &a[0][0];
    let mut m = a.clone();
    let mut det = proto.one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero_elem()) else {
            return proto.zero_like();
        };
        if p != c {
            m.swap(p, c);
            det = det.neg_ref();
        }
        det = det.mul_ref(&m[c][c]);
        let inv = m[c][c].inv_ref().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero_elem() {
                continue;
            }
            let f = m[i][c].mul_ref(&inv);
            for j in c..n {
                let t = f.mul_ref(&m[c][j]);
                m[i][j] = m[i][j].sub_ref(&t);
            }
        }
    }
    det
}

/// Coordinates of `v` in the (independent) `basis`, if `v` lies in its span.
pub fn coordinates_in<F: Scalar>(basis: &[Vec<F>], v: &[F]) -> Option<Vec<F>> {
    if basis.is_empty() {
        return v.iter().all(Scalar::is_zero_elem).then(Vec::new);
    }
    // columns are basis vectors
    let a = transpose(&basis.to_vec());
    solve(&a, v)
}
