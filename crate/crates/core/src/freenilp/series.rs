//! Truncated free associative algebra on `k` letters: all words of length at
//! most `c`, stored densely.

use crate::exactfield::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Dense coefficient vector indexed by word; index 0 is the empty word.
pub type Series = Vec<Rational>;

#[derive(Debug, Clone)]
pub struct TruncAlg {
    k: usize,
    c: usize,
    /// `offsets[d]` = index of the first word of length `d`.
    offsets: Vec<usize>,
    /// `k^d`
    powers: Vec<usize>,
    degree_of: Vec<usize>,
}

impl TruncAlg {
    pub fn new(k: usize, c: usize) -> Self {
        let mut offsets = Vec::with_capacity(c + 2);
        let mut powers = Vec::with_capacity(c + 1);
        let mut total = 0;
        let mut p = 1usize;
        for _ in 0..=c {
            offsets.push(total);
            powers.push(p);
            total += p;
            p *= k;
        }
        offsets.push(total);
        let mut degree_of = vec![0; total];
        for d in 0..=c {
            degree_of[offsets[d]..offsets[d + 1]].fill(d);
        }
        Self {
            k,
            c,
            offsets,
            powers,
            degree_of,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.c + 1]
    }

    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn zero(&self) -> Series {
        vec![Rational::zero(); self.len()]
    }

    pub fn one(&self) -> Series {
        let mut s = self.zero();
        s[0] = Rational::one();
        s
    }

    pub fn index_of(&self, word: &[usize]) -> usize {
        let code = word.iter().fold(0, |acc, &l| acc * self.k + l);
        self.offsets[word.len()] + code
    }

    pub fn word_of(&self, idx: usize) -> Vec<usize> {
        let d = self.degree_of[idx];
        let mut code = idx - self.offsets[d];
        let mut w = vec![0; d];
        for slot in w.iter_mut().rev() {
            *slot = code % self.k;
            code /= self.k;
        }
        w
    }

    pub fn letter(&self, i: usize) -> Series {
        let mut s = self.zero();
        s[self.offsets[1] + i] = Rational::one();
        s
    }

    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = self.zero();
        let bnz: Vec<usize> = (0..b.len()).filter(|&j| !b[j].is_zero()).collect();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let di = self.degree_of[i];
            let ci = i - self.offsets[di];
            for &j in &bnz {
                let dj = self.degree_of[j];
                if di + dj > self.c {
                    break;
                }
                let cj = j - self.offsets[dj];
                let idx = self.offsets[di + dj] + ci * self.powers[dj] + cj;
                out[idx] += ai * &b[j];
            }
        }
        out
    }

    pub fn commutator(&self, a: &Series, b: &Series) -> Series {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        ab.into_iter().zip(ba).map(|(x, y)| x - y).collect()
    }

    /// `exp(x)` for `x` without constant term.
    pub fn exp(&self, x: &Series) -> Series {
        debug_assert!(x[0].is_zero());
        let mut out = self.one();
        let mut term = self.one();
        for n in 1..=self.c {
            term = self.mul(&term, x);
            let inv = Rational::new(BigInt::one(), BigInt::from(n));
            for t in term.iter_mut() {
                if !t.is_zero() {
                    *t *= &inv;
                }
            }
            for (o, t) in out.iter_mut().zip(&term) {
                if !t.is_zero() {
                    *o += t;
                }
            }
        }
        out
    }

    /// `exp(e * X_i)` for a single letter; only the words `i^j` are nonzero.
    pub fn exp_letter(&self, i: usize, e: &Rational) -> Series {
        let mut out = self.zero();
        let mut coeff = Rational::one();
        let mut word = Vec::new();
        for j in 0..=self.c {
            if j > 0 {
                coeff = coeff * e / Rational::from_integer(BigInt::from(j));
                word.push(i);
            }
            out[self.index_of(&word)] = coeff.clone();
        }
        out
    }

    /// `log(g)` for `g` with constant term 1.
    pub fn log(&self, g: &Series) -> Series {
        debug_assert!(g[0].is_one());
        let mut z = g.clone();
        z[0] = Rational::zero();
        let mut out = self.zero();
        let mut power = self.one();
        for n in 1..=self.c {
            power = self.mul(&power, &z);
            let coeff = Rational::new(
                BigInt::from(if n % 2 == 1 { 1 } else { -1 }),
                BigInt::from(n),
            );
            for (o, p) in out.iter_mut().zip(&power) {
                if !p.is_zero() {
                    *o += p * &coeff;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;

    #[test]
    fn indexing_round_trips() {
        let a = TruncAlg::new(3, 4);
        assert_eq!(a.len(), 1 + 3 + 9 + 27 + 81);
        for idx in 0..a.len() {
            assert_eq!(a.index_of(&a.word_of(idx)), idx);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let a = TruncAlg::new(2, 5);
        let mut x = a.letter(0);
        let y = a.letter(1);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi += yi * rat(3, 2);
        }
        let back = a.log(&a.exp(&x));
        assert_eq!(back, x);
        let e = a.exp_letter(1, &rat(-2, 3));
        let direct = a.exp(&a.letter(1).iter().map(|v| v * rat(-2, 3)).collect());
        assert_eq!(e, direct);
    }
}
