//! Free group words: flat `(letter, exponent)` sequences, a parser for the
//! textual syntax, and substitution trees for iterated words.

use super::elem::FreeNilpElem;
use super::hall::{hall_basis, letter_name, HallBasis};
use crate::exactfield::Rational;
use num_bigint::BigInt;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WordError {
    #[error("cannot parse word at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("letter index {letter} outside alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("word has arity {expected} but {got} arguments were given")]
    ArityMismatch { expected: usize, got: usize },
    #[error("exponent overflow")]
    Overflow,
}

/// Freely reduced word: adjacent letters differ and exponents are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    alphabet: usize,
    syllables: Vec<(usize, i64)>,
}

impl GroupWord {
    pub fn empty(alphabet: usize) -> Self {
        Self {
            alphabet,
            syllables: Vec::new(),
        }
    }

    pub fn letter(alphabet: usize, i: usize, e: i64) -> Self {
        let mut w = Self::empty(alphabet);
        w.push(i, e);
        w
    }

    pub fn from_syllables(
        alphabet: usize,
        syllables: impl IntoIterator<Item = (usize, i64)>,
    ) -> Result<Self, WordError> {
        let mut w = Self::empty(alphabet);
        for (l, e) in syllables {
            if l >= alphabet {
                return Err(WordError::LetterOutOfRange {
                    letter: l,
                    alphabet,
                });
            }
            w.push(l, e);
        }
        Ok(w)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Total letter count with multiplicity.
    pub fn letter_count(&self) -> u64 {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    /// Appends `letter^e`, merging with the last syllable.
    pub fn push(&mut self, letter: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == letter {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((letter, e));
    }

    pub fn append(&mut self, other: &GroupWord) {
        for &(l, e) in &other.syllables {
            self.push(l, e);
        }
    }

    pub fn inverse(&self) -> GroupWord {
        let mut w = Self::empty(self.alphabet);
        for &(l, e) in self.syllables.iter().rev() {
            w.push(l, -e);
        }
        w
    }

    pub fn power(&self, e: i64) -> GroupWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Self::empty(self.alphabet);
        for _ in 0..e.unsigned_abs() {
            w.append(&base);
        }
        w
    }

    /// Commutator `a b a^-1 b^-1`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        let mut w = a.clone();
        w.append(b);
        w.append(&a.inverse());
        w.append(&b.inverse());
        w
    }

    /// Replace every letter by `letter^s_letter`.
    pub fn scale_letters(&self, s: &[i64]) -> Result<GroupWord, WordError> {
        let mut w = Self::empty(self.alphabet);
        for &(l, e) in &self.syllables {
            w.push(l, e.checked_mul(s[l]).ok_or(WordError::Overflow)?);
        }
        Ok(w)
    }

    /// Substitute words for letters; each substitute is over `alphabet`.
    pub fn substitute(&self, subs: &[GroupWord], alphabet: usize) -> GroupWord {
        let mut w = Self::empty(alphabet);
        for &(l, e) in &self.syllables {
            w.append(&subs[l].power(e));
        }
        w
    }

    /// Evaluate in any group given by `mul`, `pow` and an identity.
    pub fn evaluate<T: Clone>(
        &self,
        args: &[T],
        identity: T,
        mul: impl Fn(&T, &T) -> T,
        pow: impl Fn(&T, i64) -> T,
    ) -> Result<T, WordError> {
        if args.len() != self.alphabet {
            return Err(WordError::ArityMismatch {
                expected: self.alphabet,
                got: args.len(),
            });
        }
        Ok(self
            .syllables
            .iter()
            .fold(identity, |acc, &(l, e)| mul(&acc, &pow(&args[l], e))))
    }

    /// Parse `x y^2 (x y)^-1 z`; letters `x, y, z` or `x1, x2, ...`.
    pub fn parse(s: &str, alphabet: usize) -> Result<GroupWord, WordError> {
        let chars: Vec<char> = s.chars().collect();
        let mut p = Parser {
            chars: &chars,
            pos: 0,
            alphabet,
        };
        let w = p.sequence()?;
        p.skip_ws();
        if p.pos != chars.len() {
            return Err(p.err("unexpected character"));
        }
        Ok(w)
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> WordError {
        WordError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self) -> Result<GroupWord, WordError> {
        let mut w = GroupWord::empty(self.alphabet);
        while let Some(ch) = self.peek() {
            if ch == ')' {
                break;
            }
            let atom = self.atom()?;
            let e = self.exponent()?;
            w.append(&atom.power(e));
        }
        Ok(w)
    }

    fn atom(&mut self) -> Result<GroupWord, WordError> {
        let ch = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        match ch {
            '(' => {
                self.pos += 1;
                let w = self.sequence()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(w)
            }
            '1' => {
                self.pos += 1;
                Ok(GroupWord::empty(self.alphabet))
            }
            'x' | 'y' | 'z' => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx = if start == self.pos {
                    match ch {
                        'x' => 0,
                        'y' => 1,
                        _ => 2,
                    }
                } else if ch == 'x' {
                    let n: usize = self.chars[start..self.pos]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| self.err("bad letter index"))?;
                    if n == 0 {
                        return Err(self.err("letter indices start at 1"));
                    }
                    n - 1
                } else {
                    return Err(self.err("only x takes a numeric index"));
                };
                if idx >= self.alphabet {
                    return Err(WordError::LetterOutOfRange {
                        letter: idx,
                        alphabet: self.alphabet,
                    });
                }
                Ok(GroupWord::letter(self.alphabet, idx, 1))
            }
            _ => Err(self.err("expected a letter or '('")),
        }
    }

    fn exponent(&mut self) -> Result<i64, WordError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| self.err("bad exponent"))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(l, e)| {
                let name = letter_name(self.alphabet, l, false);
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A word possibly built by substituting words into the letters of an outer
/// word; kept unflattened because flattening grows geometrically.
#[derive(Debug, Clone, PartialEq)]
pub enum WordTree {
    Flat(GroupWord),
    Subst {
        outer: GroupWord,
        args: Vec<WordTree>,
    },
}

impl WordTree {
    pub fn alphabet(&self) -> usize {
        match self {
            WordTree::Flat(w) => w.alphabet(),
            WordTree::Subst { args, .. } => args[0].alphabet(),
        }
    }

    /// Letter count of the flattened word, with multiplicity.
    pub fn letter_count(&self) -> BigInt {
        match self {
            WordTree::Flat(w) => BigInt::from(w.letter_count()),
            WordTree::Subst { outer, args } => {
                let counts: Vec<BigInt> = args.iter().map(WordTree::letter_count).collect();
                outer
                    .syllables()
                    .iter()
                    .map(|&(l, e)| &counts[l] * BigInt::from(e.unsigned_abs()))
                    .sum()
            }
        }
    }

    /// Flattened word if its length is at most `limit`.
    pub fn flatten(&self, limit: u64) -> Option<GroupWord> {
        if self.letter_count() > BigInt::from(limit) {
            return None;
        }
        Some(match self {
            WordTree::Flat(w) => w.clone(),
            WordTree::Subst { outer, args } => {
                let subs: Vec<GroupWord> = args
                    .iter()
                    .map(|a| a.flatten(limit).expect("within limit"))
                    .collect();
                outer.substitute(&subs, self.alphabet())
            }
        })
    }

    /// Evaluate in any group; arguments of substitutions are evaluated first.
    pub fn evaluate<T: Clone>(
        &self,
        args: &[T],
        identity: &T,
        mul: &impl Fn(&T, &T) -> T,
        pow: &impl Fn(&T, i64) -> T,
    ) -> Result<T, WordError> {
        match self {
            WordTree::Flat(w) => w.evaluate(args, identity.clone(), mul, pow),
            WordTree::Subst { outer, args: inner } => {
                let vals = inner
                    .iter()
                    .map(|t| t.evaluate(args, identity, mul, pow))
                    .collect::<Result<Vec<T>, _>>()?;
                outer.evaluate(&vals, identity.clone(), mul, pow)
            }
        }
    }
}

/// `log` of a flat word in the free nilpotent algebra of class `c` on the
/// word's alphabet.
pub fn free_log_of_word(w: &GroupWord, c: usize) -> FreeNilpElem {
    let basis = hall_basis(w.alphabet(), c);
    log_of_flat(&basis, w, &[])
}

/// `log` of a word tree, evaluating substitutions through their logs.
pub fn free_log_of_tree(t: &WordTree, c: usize) -> FreeNilpElem {
    let basis = hall_basis(t.alphabet(), c);
    log_of_tree(&basis, t)
}

fn log_of_tree(basis: &Arc<HallBasis>, t: &WordTree) -> FreeNilpElem {
    match t {
        WordTree::Flat(w) => log_of_flat(basis, w, &[]),
        WordTree::Subst { outer, args } => {
            let logs: Vec<FreeNilpElem> = args.iter().map(|a| log_of_tree(basis, a)).collect();
            log_of_flat(basis, outer, &logs)
        }
    }
}

/// With `args` empty, letters are the generators; otherwise letter `i` stands
/// for `exp(args[i])`.
fn log_of_flat(basis: &Arc<HallBasis>, w: &GroupWord, args: &[FreeNilpElem]) -> FreeNilpElem {
    let a = basis.algebra();
    let mut g = a.one();
    let arg_series: Vec<Vec<Rational>> = args.iter().map(FreeNilpElem::to_series).collect();
    let mut cache: HashMap<(usize, i64), Vec<Rational>> = HashMap::new();
    for &(l, e) in w.syllables() {
        let er = Rational::from_integer(BigInt::from(e));
        let factor = cache.entry((l, e)).or_insert_with(|| {
            if args.is_empty() {
                a.exp_letter(l, &er)
            } else {
                let scaled: Vec<Rational> = arg_series[l].iter().map(|v| v * &er).collect();
                a.exp(&scaled)
            }
        });
        g = a.mul(&g, factor);
    }
    let coords = basis
        .project(&a.log(&g))
        .expect("log of a group-like series is Lie");
    FreeNilpElem::from_dense(basis, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freenilp::elem::bch;

    #[test]
    fn parse_and_display() {
        let w = GroupWord::parse("(x y)(y x)", 2).unwrap();
        assert_eq!(w.to_string(), "x y^2 x");
        assert_eq!(w.letter_count(), 4);
        let c = GroupWord::parse("x y x^-1 y^-1", 2).unwrap();
        assert_eq!(c.syllables(), &[(0, 1), (1, 1), (0, -1), (1, -1)]);
        assert_eq!(
            GroupWord::parse("(x y)^-2", 2).unwrap().to_string(),
            "y^-1 x^-1 y^-1 x^-1"
        );
        assert_eq!(GroupWord::parse("x1 x3^2", 3).unwrap().to_string(), "x z^2");
        assert_eq!(GroupWord::parse("x x^-1", 2).unwrap(), GroupWord::empty(2));
        assert!(matches!(
            GroupWord::parse("z", 2),
            Err(WordError::LetterOutOfRange { .. })
        ));
        assert!(matches!(
            GroupWord::parse("(x y", 2),
            Err(WordError::Parse { .. })
        ));
        assert!(matches!(
            GroupWord::parse("x^", 2),
            Err(WordError::Parse { .. })
        ));
        let round = GroupWord::parse(&c.to_string(), 2).unwrap();
        assert_eq!(round, c);
    }

    #[test]
    fn free_logs() {
        let b = hall_basis(2, 2);
        let comm = GroupWord::parse("x y x^-1 y^-1", 2).unwrap();
        assert_eq!(free_log_of_word(&comm, 2).to_string(), "[X,Y]");
        assert_eq!(
            free_log_of_word(&GroupWord::parse("x", 2).unwrap(), 2).to_string(),
            "X"
        );
        let w2 = GroupWord::parse("(x y)(y x)", 2).unwrap();
        assert_eq!(free_log_of_word(&w2, 2).to_string(), "2 X + 2 Y");
        // matches the BCH fold
        let (x, y) = (
            FreeNilpElem::generator(&b, 0),
            FreeNilpElem::generator(&b, 1),
        );
        assert_eq!(free_log_of_word(&w2, 2), bch(&bch(&x, &y), &bch(&y, &x)));
    }

    #[test]
    fn tree_flattening_agrees() {
        let inner = WordTree::Flat(GroupWord::parse("x y", 3).unwrap());
        let t = WordTree::Subst {
            outer: GroupWord::parse("x y x^-1", 2).unwrap(),
            args: vec![inner, WordTree::Flat(GroupWord::parse("z^2", 3).unwrap())],
        };
        assert_eq!(t.letter_count(), BigInt::from(6));
        let flat = t.flatten(100).unwrap();
        assert_eq!(flat.to_string(), "x y z^2 y^-1 x^-1");
        assert_eq!(free_log_of_tree(&t, 3), free_log_of_word(&flat, 3));
        assert!(t.flatten(5).is_none());
    }
}
