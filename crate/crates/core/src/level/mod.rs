//! Isotropy and representation, levels and sublevels of fields and
//! Cayley-Dickson algebras, and the proposition sweep.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::forms::DiagonalForm;

mod cascade;
mod compose;
mod isotropy;
mod oracle;
mod verify;

pub use cascade::{algebra_level, algebra_sublevel, field_level};
pub use compose::compose_squares;
pub use isotropy::{is_universal, isotropy, represents, split_ratfunc_isotropy};
pub use oracle::{brute_level_oracle, ORACLE_LIMIT};
pub use verify::{verify_propositions, AlphaSweep, CheckStatus, PropositionCheck};

/// Bounds for randomized and enumerative searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest absolute numerator or denominator tried over the rationals.
    pub height: i64,
    /// Largest tower-variable degree tried.
    pub degree: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            height: 10,
            degree: 2,
            trials: 10_000,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn new(height: i64, degree: usize, trials: u64, seed: u64) -> Result<SearchBudget> {
        let b = SearchBudget {
            height,
            degree,
            trials,
            seed,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.height < 1 || self.degree < 1 || self.trials < 1 {
            return Err(Error::Invalid(
                "search budget bounds must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "height": self.height,
            "degree": self.degree,
            "trials": self.trials,
            "seed": self.seed,
        })
    }
}

impl fmt::Display for SearchBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "height={},degree={},trials={},seed={}",
            self.height, self.degree, self.trials, self.seed
        )
    }
}

/// `height=10,degree=2,trials=10000,seed=0`; omitted keys keep defaults.
impl FromStr for SearchBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<SearchBudget> {
        let mut b = SearchBudget::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("budget entry `{part}` is not key=value")))?;
            let bad = || Error::Invalid(format!("bad budget value `{part}`"));
            match key.trim() {
                "height" => b.height = value.trim().parse().map_err(|_| bad())?,
                "degree" => b.degree = value.trim().parse().map_err(|_| bad())?,
                "trials" => b.trials = value.trim().parse().map_err(|_| bad())?,
                "seed" => b.seed = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::Invalid(format!("unknown budget key `{other}`"))),
            }
        }
        b.validate()?;
        Ok(b)
    }
}

/// How an anisotropy verdict was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    Exhaustive,
    Definiteness,
    SplitRecursion,
    SquareTest,
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::Exhaustive => "exhaustive",
            Certificate::Definiteness => "definiteness",
            Certificate::SplitRecursion => "split-recursion",
            Certificate::SquareTest => "rank≤2-square-test",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotropyResult {
    Isotropic { witness: Vec<Elem> },
    Anisotropic { certificate: Certificate },
    Unknown { budget: SearchBudget },
}

impl IsotropyResult {
    /// Panics unless `witness` is a nonzero zero of `form`.
    pub fn isotropic(form: &DiagonalForm, witness: Vec<Elem>) -> IsotropyResult {
        let f = form.field();
        assert!(
            witness.iter().any(|x| !f.is_zero(x)),
            "zero isotropy witness"
        );
        assert!(
            f.is_zero(&form.evaluate(&witness).expect("witness rank")),
            "isotropy witness does not evaluate to zero"
        );
        IsotropyResult::Isotropic { witness }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, IsotropyResult::Isotropic { .. })
    }

    pub fn is_anisotropic(&self) -> bool {
        matches!(self, IsotropyResult::Anisotropic { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, IsotropyResult::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&[Elem]> {
        match self {
            IsotropyResult::Isotropic { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn to_json(&self, form: &DiagonalForm) -> Value {
        let f = form.field();
        match self {
            IsotropyResult::Isotropic { witness } => json!({
                "verdict": "isotropic",
                "witness": witness.iter().map(|x| f.format(x)).collect::<Vec<_>>(),
            }),
            IsotropyResult::Anisotropic { certificate } => json!({
                "verdict": "anisotropic",
                "certificate": certificate.tag(),
            }),
            IsotropyResult::Unknown { budget } => json!({
                "verdict": "unknown",
                "budget": budget.to_json(),
            }),
        }
    }
}

/// Level or sublevel of a field or algebra.
///
/// A finite level `n` carries `n` elements whose squares sum to `-1`; a
/// finite sublevel `n` carries `n + 1` nonzero elements whose squares sum
/// to `0`. Fields use the one-dimensional algebra over themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelValue {
    Finite {
        n: usize,
        witness: Vec<AlgebraElement>,
    },
    Infinite {
        reason: &'static str,
    },
    Range {
        lo: usize,
        hi: Option<usize>,
        witness: Option<Vec<AlgebraElement>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Level,
    Sublevel,
}

fn sum_of_squares(witness: &[AlgebraElement]) -> Option<AlgebraElement> {
    let mut it = witness.iter();
    let first = it.next()?.square();
    Some(it.fold(first, |acc, y| acc.add(&y.square()).unwrap()))
}

pub(crate) fn check_witness(kind: Kind, witness: &[AlgebraElement]) -> bool {
    let Some(total) = sum_of_squares(witness) else {
        return false;
    };
    let alg = total.algebra();
    match kind {
        Kind::Level => total == alg.scalar(alg.field().from_i64(-1)),
        Kind::Sublevel => witness.iter().all(|y| !y.is_zero()) && total.is_zero(),
    }
}

impl LevelValue {
    /// `-1 = y_1² + ... + y_n²`; panics on a bad witness.
    pub fn level(witness: Vec<AlgebraElement>) -> LevelValue {
        assert!(
            check_witness(Kind::Level, &witness),
            "invalid level witness"
        );
        LevelValue::Finite {
            n: witness.len(),
            witness,
        }
    }

    /// `0 = y_1² + ... + y_(n+1)²` with every `y_i` nonzero; panics on a
    /// bad witness.
    pub fn sublevel(witness: Vec<AlgebraElement>) -> LevelValue {
        assert!(witness.len() >= 2, "sublevel witness needs two terms");
        assert!(
            check_witness(Kind::Sublevel, &witness),
            "invalid sublevel witness"
        );
        LevelValue::Finite {
            n: witness.len() - 1,
            witness,
        }
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            LevelValue::Finite { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LevelValue::Infinite { .. })
    }

    /// Best known lower bound.
    pub fn lower(&self) -> Option<usize> {
        match self {
            LevelValue::Finite { n, .. } => Some(*n),
            LevelValue::Infinite { .. } => None,
            LevelValue::Range { lo, .. } => Some(*lo),
        }
    }

    /// Best known upper bound; `None` when unbounded or infinite.
    pub fn upper(&self) -> Option<usize> {
        match self {
            LevelValue::Finite { n, .. } => Some(*n),
            LevelValue::Infinite { .. } => None,
            LevelValue::Range { hi, .. } => *hi,
        }
    }

    pub fn witness(&self) -> Option<&[AlgebraElement]> {
        match self {
            LevelValue::Finite { witness, .. } => Some(witness),
            LevelValue::Range {
                witness: Some(w), ..
            } => Some(w),
            _ => None,
        }
    }

    /// `{"level": n | "infinite" | null, "lower", "upper", "witness"}`
    /// under the given key (`level` or `sublevel`).
    pub fn to_json(&self, key: &str) -> Value {
        let fmt_witness = |w: &[AlgebraElement]| -> Value {
            w.iter()
                .map(|y| Value::String(y.algebra().format_element(y)))
                .collect()
        };
        let mut obj = serde_json::Map::new();
        match self {
            LevelValue::Finite { n, witness } => {
                obj.insert(key.into(), json!(n));
                obj.insert("lower".into(), json!(n));
                obj.insert("upper".into(), json!(n));
                obj.insert("witness".into(), fmt_witness(witness));
            }
            LevelValue::Infinite { reason } => {
                obj.insert(key.into(), json!("infinite"));
                obj.insert("reason".into(), json!(reason));
            }
            LevelValue::Range { lo, hi, witness } => {
                obj.insert(key.into(), Value::Null);
                obj.insert("lower".into(), json!(lo));
                obj.insert("upper".into(), json!(hi));
                obj.insert(
                    "witness".into(),
                    witness.as_deref().map(fmt_witness).unwrap_or(Value::Null),
                );
            }
        }
        Value::Object(obj)
    }
}

/// Scalar elements of the algebra as a witness list.
pub(crate) fn scalars(alg: &Algebra, xs: &[Elem]) -> Vec<AlgebraElement> {
    xs.iter().map(|x| alg.scalar(x.clone())).collect()
}
