//! Sectioned TOML description of a scheme, window and region.
//!
//! ```toml
//! [field]
//! d = 2
//! [algebra]
//! builtin = "heisenberg"      # or: file = "h3.alg"
//! [lattice]
//! denominators = [1, 1, 2]
//! [window]
//! bounds = ["2", "2", "4"]
//! [region]
//! radius = 20
//! ```

use super::{build_scheme, CutProjectError, Scheme, Window};
use crate::exactfield::{parse_rational, QuadFieldElem, Rational};
use crate::liealg::{parse_algebra, LieAlgebra};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational, CutProjectError> {
        match self {
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Text(s) => {
                parse_rational(s).map_err(|e| CutProjectError::Config(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub builtin: Option<String>,
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub denominators: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub bounds: Vec<Number>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub radius: Number,
    pub core_radius: Option<Number>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub field: FieldSection,
    pub algebra: AlgebraSection,
    pub lattice: LatticeSection,
    pub window: Option<WindowSection>,
    pub region: Option<RegionSection>,
}

/// Builtin algebras: `heisenberg`, `filiform4`, `abelianN`.
pub fn builtin_algebra(name: &str) -> Option<LieAlgebra<Rational>> {
    match name {
        "heisenberg" | "h3" => Some(LieAlgebra::heisenberg()),
        "filiform4" => Some(LieAlgebra::filiform4()),
        _ => {
            let n: usize = name.strip_prefix("abelian")?.parse().ok()?;
            (n >= 1).then(|| LieAlgebra::abelian(n))
        }
    }
}

impl SchemeConfig {
    pub fn parse(text: &str) -> Result<Self, CutProjectError> {
        toml::from_str(text).map_err(|e| CutProjectError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The algebra over `Q(sqrt d)`; relative files resolve against `base`.
    pub fn algebra(&self, base: &Path) -> Result<LieAlgebra<QuadFieldElem>, CutProjectError> {
        let d = self.field.d;
        let bad = |e: String| CutProjectError::Config(e);
        match (&self.algebra.builtin, &self.algebra.file) {
            (Some(name), None) => builtin_algebra(name)
                .ok_or_else(|| bad(format!("unknown builtin algebra '{name}'")))?
                .lift_to_quad(d)
                .map_err(|e| bad(e.to_string())),
            (None, Some(file)) => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| bad(format!("{}: {e}", path.display())))?;
                parse_algebra(&text)
                    .and_then(|a| a.into_quad(d))
                    .map_err(|e| bad(e.to_string()))
            }
            _ => Err(bad(
                "[algebra] needs exactly one of 'builtin' or 'file'".into()
            )),
        }
    }

    pub fn scheme(&self, base: &Path) -> Result<Arc<Scheme>, CutProjectError> {
        let g = self.algebra(base)?;
        Ok(Arc::new(build_scheme(
            &g,
            self.field.d,
            &self.lattice.denominators,
        )?))
    }

    pub fn window(&self) -> Result<Window, CutProjectError> {
        let w = self
            .window
            .as_ref()
            .ok_or_else(|| CutProjectError::Config("missing [window] section".into()))?;
        Window::new(
            w.bounds
                .iter()
                .map(Number::to_rational)
                .collect::<Result<_, _>>()?,
        )
    }

    pub fn radius(&self) -> Result<Rational, CutProjectError> {
        self.region
            .as_ref()
            .ok_or_else(|| CutProjectError::Config("missing [region] section".into()))?
            .radius
            .to_rational()
    }

    pub fn core_radius(&self) -> Result<Option<Rational>, CutProjectError> {
        self.region
            .as_ref()
            .and_then(|r| r.core_radius.as_ref())
            .map(Number::to_rational)
            .transpose()
    }
}

/// Reads and parses a config file.
pub fn load_scheme_config(path: &Path) -> Result<SchemeConfig, CutProjectError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CutProjectError::Config(format!("{}: {e}", path.display())))?;
    SchemeConfig::parse(&text)
}
