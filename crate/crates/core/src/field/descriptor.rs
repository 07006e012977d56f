use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shape of an exact field. Towers nest one variable per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Rationals,
    PrimeField(u64),
    RatFunc {
        base: Box<FieldDescriptor>,
        var: String,
    },
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FieldDescriptor {
    /// Ground descriptor and the tower variables above it, innermost first.
    fn flatten(&self) -> (&FieldDescriptor, Vec<&str>) {
        match self {
            FieldDescriptor::RatFunc { base, var } => {
                let (g, mut vars) = base.flatten();
                vars.push(var);
                (g, vars)
            }
            other => (other, Vec::new()),
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (ground, vars) = self.flatten();
        let g = match ground {
            FieldDescriptor::Rationals => "q".to_string(),
            FieldDescriptor::PrimeField(p) => format!("fp:{p}"),
            FieldDescriptor::RatFunc { .. } => unreachable!(),
        };
        if vars.is_empty() {
            write!(f, "{g}")
        } else {
            write!(f, "ratfunc({g};{})", vars.join(","))
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg} in field descriptor `{s}`"),
        };
        if s == "q" || s == "Q" {
            return Ok(FieldDescriptor::Rationals);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p = p.trim().parse::<u64>().map_err(|_| bad("invalid prime"))?;
            return Ok(FieldDescriptor::PrimeField(p));
        }
        if let Some(inner) = s.strip_prefix("ratfunc(").and_then(|r| r.strip_suffix(')')) {
            let semi = inner.rfind(';').ok_or_else(|| bad("missing `;`"))?;
            let mut desc: FieldDescriptor = inner[..semi].parse()?;
            let vars = &inner[semi + 1..];
            for v in vars.split(',') {
                let v = v.trim();
                if !is_identifier(v) {
                    return Err(bad("invalid variable name"));
                }
                desc = FieldDescriptor::RatFunc {
                    base: Box::new(desc),
                    var: v.to_string(),
                };
            }
            return Ok(desc);
        }
        Err(bad("unrecognised form"))
    }
}
