//! Text format for structure constants:
//!
//! ```text
//! dim 3
//! field Q(sqrt 2)
//! 1 2 3 1
//! ```
//!
//! Indices are 1-based and only `i < j` is listed. `#` starts a comment.

use super::{LieAlgebra, LieAlgebraError};
use crate::exactfield::{parse_rational, CoeffField, QuadFieldElem, Rational};
use num_traits::Zero;
use std::fmt::Write as _;

/// An algebra over whichever field its file declares.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAlgebra {
    Rational(LieAlgebra<Rational>),
    Quad(LieAlgebra<QuadFieldElem>),
}

impl AnyAlgebra {
    pub fn field(&self) -> CoeffField {
        match self {
            AnyAlgebra::Rational(g) => g.field(),
            AnyAlgebra::Quad(g) => g.field(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyAlgebra::Rational(g) => g.dim(),
            AnyAlgebra::Quad(g) => g.dim(),
        }
    }

    /// View over `Q(sqrt d)`, lifting rational algebras.
    pub fn into_quad(self, d: u64) -> Result<LieAlgebra<QuadFieldElem>, LieAlgebraError> {
        match self {
            AnyAlgebra::Rational(g) => g.lift_to_quad(d),
            AnyAlgebra::Quad(g) => {
                if g.field() == CoeffField::Quad(d) {
                    Ok(g)
                } else {
                    Err(LieAlgebraError::FieldMismatch(
                        g.field(),
                        CoeffField::Quad(d),
                    ))
                }
            }
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> LieAlgebraError {
    LieAlgebraError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_algebra(text: &str) -> Result<AnyAlgebra, LieAlgebraError> {
    let mut dim: Option<usize> = None;
    let mut field: Option<CoeffField> = None;
    let mut raw: Vec<(usize, usize, usize, usize, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("dim") {
            let v = rest
                .trim()
                .parse()
                .map_err(|_| perr(lineno, format!("bad dimension '{}'", rest.trim())))?;
            dim = Some(v);
            continue;
        }
        if let Some(rest) = line.strip_prefix("field") {
            field = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| perr(lineno, format!("{e}")))?,
            );
            continue;
        }
        let parts: Vec<&str> = line.splitn(4, char::is_whitespace).collect();
        if parts.len() != 4 {
            return Err(perr(lineno, "expected 'i j k value'"));
        }
        let idx = |s: &str| -> Result<usize, LieAlgebraError> {
            let v: usize = s
                .parse()
                .map_err(|_| perr(lineno, format!("bad index '{s}'")))?;
            if v == 0 {
                return Err(perr(lineno, "indices are 1-based"));
            }
            Ok(v - 1)
        };
        let (i, j, k) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
        if i >= j {
            return Err(perr(lineno, "only entries with i < j may be listed"));
        }
        raw.push((lineno, i, j, k, parts[3].trim().to_string()));
    }
    let dim = dim.ok_or_else(|| perr(0, "missing 'dim' header"))?;
    let field = field.ok_or_else(|| perr(0, "missing 'field' header"))?;
    for (lineno, i, j, k, _) in &raw {
        if [i, j, k].iter().any(|&&x| x >= dim) {
            return Err(perr(*lineno, "index exceeds dimension"));
        }
    }
    match field {
        CoeffField::Rational => {
            let mut entries = Vec::new();
            for (lineno, i, j, k, v) in raw {
                let q = parse_rational(&v).map_err(|e| perr(lineno, e.to_string()))?;
                entries.push((i, j, k, q));
            }
            LieAlgebra::from_upper_entries(dim, field, Rational::zero(), &entries)
                .map(AnyAlgebra::Rational)
        }
        CoeffField::Quad(d) => {
            let mut entries = Vec::new();
            for (lineno, i, j, k, v) in raw {
                let q =
                    QuadFieldElem::parse(&v, Some(d)).map_err(|e| perr(lineno, e.to_string()))?;
                entries.push((i, j, k, q));
            }
            LieAlgebra::from_upper_entries(dim, field, QuadFieldElem::zero(d), &entries)
                .map(AnyAlgebra::Quad)
        }
    }
}

pub fn write_algebra(g: &AnyAlgebra) -> String {
    let mut out = format!("dim {}\nfield {}\n", g.dim(), g.field());
    match g {
        AnyAlgebra::Rational(g) => {
            for (i, j, k, v) in g.upper_entries() {
                let _ = writeln!(out, "{} {} {} {}", i + 1, j + 1, k + 1, v);
            }
        }
        AnyAlgebra::Quad(g) => {
            for (i, j, k, v) in g.upper_entries() {
                let _ = writeln!(out, "{} {} {} {}", i + 1, j + 1, k + 1, v);
            }
        }
    }
    out
}
