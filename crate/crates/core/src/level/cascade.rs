//! Level and sublevel by a chain of sufficient criteria, each backed by an
//! explicit witness or an anisotropy decision.
//!
//! Writing `y = y_1 + y''` with `y''` pure, `y² = T_C(y) + 2 y_1 y''`, and
//! `u² = T_P(u)` for pure `u`. So
//! - `T_C` isotropic gives a pure `u` with `u² = -1`, and for `-1` not a
//!   square in `K` the converse holds;
//! - a zero `(a, p_1, ..., p_n)` of `<1> ⊥ n×T_P` gives pure `u_i` with
//!   `Σ u_i² = -1`;
//! - when `s(K) ≥ 2^k` and `<1> ⊥ (2^k - 1)×T_P` is anisotropic, the level
//!   exceeds `2^k - 1`;
//! - for the sublevel, `T_C` or `2×T_P` isotropic gives sublevel 1 and
//!   both anisotropic rule it out when `-1` is not a square; the same holds
//!   for `<1> ⊥ n×T_P` and `(n+1)×T_P` at `n = 2^k - 1`.

use super::isotropy::{isotropy, universal_representation};
use super::oracle::{brute_level_oracle, ORACLE_LIMIT};
use super::{scalars, IsotropyResult, LevelValue, SearchBudget};
use crate::algebra::{Algebra, AlgebraElement};
use crate::field::{Elem, Field};
use crate::forms::DiagonalForm;

/// Largest `n` for which `<1> ⊥ n×T_P` is examined.
const MAX_SUMMANDS: usize = 8;

/// Level of a field: exact for prime fields (with a residue witness),
/// infinite for formally real fields, and the ground level for towers
/// over a prime field (constant witness).
pub fn field_level(field: &Field) -> LevelValue {
    let k = Algebra::new(field, vec![]).unwrap();
    if field.is_formally_real() {
        return LevelValue::Infinite {
            reason: "formally real field",
        };
    }
    let ground = field.ground();
    let minus_one = ground.from_i64(-1);
    let w = match ground.sqrt(&minus_one) {
        Some(r) => vec![r],
        None => {
            let p = ground.prime_modulus().unwrap();
            (1..p)
                .find_map(|a| {
                    let a = Elem::Fp(a);
                    let rest = ground.sub(&minus_one, &ground.square(&a));
                    ground.sqrt(&rest).map(|b| vec![a, b])
                })
                .expect("-1 is a sum of two squares in every finite field")
        }
    };
    let lifted: Vec<Elem> = w.into_iter().map(|x| field.embed_from(ground, x)).collect();
    LevelValue::level(scalars(&k, &lifted))
}

fn pure(alg: &Algebra, coeffs: &[Elem]) -> AlgebraElement {
    let mut c = vec![alg.field().zero()];
    c.extend_from_slice(coeffs);
    alg.element(c).unwrap()
}

/// Pure `u` with `u² = -1` from a zero `y` of `T_C`.
fn pure_root_of_minus_one(alg: &Algebra, tp: &DiagonalForm, y: &[Elem]) -> AlgebraElement {
    let f = alg.field();
    if !f.is_zero(&y[0]) {
        let scaled: Vec<Elem> = y[1..].iter().map(|x| f.div(x, &y[0]).unwrap()).collect();
        return pure(alg, &scaled);
    }
    // y_1 = 0: T_P is isotropic, hence represents -1
    let rep = universal_representation(tp.coeffs(), f, &y[1..], &f.from_i64(-1));
    pure(alg, &rep)
}

/// `n` pure elements whose squares sum to `-1`, from a zero of
/// `<1> ⊥ n×T_P`.
fn pure_sum_witness(alg: &Algebra, tp: &DiagonalForm, n: usize, w: &[Elem]) -> Vec<AlgebraElement> {
    let f = alg.field();
    let coords: Vec<Elem> = if !f.is_zero(&w[0]) {
        w[1..].iter().map(|x| f.div(x, &w[0]).unwrap()).collect()
    } else {
        let ntp = tp.n_times(n).unwrap();
        universal_representation(ntp.coeffs(), f, &w[1..], &f.from_i64(-1))
    };
    coords.chunks(tp.rank()).map(|c| pure(alg, c)).collect()
}

/// Nonzero pure elements whose squares sum to zero, from a zero of
/// `m×T_P`. A single nonzero `u` has `u² = 0` and is doubled.
fn pure_zero_sum(alg: &Algebra, tp: &DiagonalForm, w: &[Elem]) -> Vec<AlgebraElement> {
    let mut us: Vec<AlgebraElement> = w
        .chunks(tp.rank())
        .map(|c| pure(alg, c))
        .filter(|u| !u.is_zero())
        .collect();
    if us.len() == 1 {
        us.push(us[0].clone());
    }
    us
}

/// All coefficients of `T_C` are positive constants times monomials over a
/// formally real field. Then every `n×T_C` is anisotropic (the splitting
/// ends in positive definite forms over the rationals), so `-1` and `0`
/// are not sums of nonzero squares.
fn positive_trace(alg: &Algebra) -> bool {
    let f = alg.field();
    f.is_formally_real()
        && alg.square_coefficients().iter().all(|c| {
            f.monomial_parts(c)
                .and_then(|(_, k)| f.ground().real_sign(&k))
                .is_some_and(|s| s > 0)
        })
}

fn oracle_feasible(alg: &Algebra) -> bool {
    alg.field().prime_modulus().is_some_and(|p| {
        (p as u128)
            .checked_pow(alg.dim() as u32)
            .is_some_and(|size| size <= ORACLE_LIMIT)
    })
}

fn unit_form(f: &Field) -> DiagonalForm {
    DiagonalForm::new(f, vec![f.one()]).unwrap()
}

fn resolve(
    alg: &Algebra,
    lo: usize,
    hi: Option<Vec<AlgebraElement>>,
    finite: fn(Vec<AlgebraElement>) -> LevelValue,
    from_oracle: fn((LevelValue, LevelValue)) -> LevelValue,
    offset: usize,
) -> LevelValue {
    if let Some(w) = &hi {
        if w.len() - offset == lo {
            return finite(hi.unwrap());
        }
    }
    if oracle_feasible(alg) {
        if let Ok(r) = brute_level_oracle(alg) {
            return from_oracle(r);
        }
    }
    LevelValue::Range {
        lo,
        hi: hi.as_ref().map(|w| w.len() - offset),
        witness: hi,
    }
}

/// Level of `alg`: `-1` a square in `K`, then `T_C` isotropy, then upper
/// bounds from `<1> ⊥ n×T_P` and the field level against lower bounds
/// from anisotropy, then the exhaustive oracle for small finite algebras.
pub fn algebra_level(alg: &Algebra, budget: &SearchBudget) -> LevelValue {
    let f = alg.field();
    if let Some(r) = f.sqrt(&f.from_i64(-1)) {
        return LevelValue::level(vec![alg.scalar(r)]);
    }
    if positive_trace(alg) {
        return LevelValue::Infinite {
            reason: "positive trace form over a formally real field",
        };
    }
    let base_level = field_level(f).finite();
    let mut lo = 1;
    let mut hi: Option<Vec<AlgebraElement>> = match field_level(f) {
        LevelValue::Finite { witness, .. } => Some(
            witness
                .iter()
                .map(|w| alg.scalar(w.coeffs()[0].clone()))
                .collect(),
        ),
        _ => None,
    };
    if alg.dim() == 1 {
        return resolve(alg, lo, hi, LevelValue::level, |r| r.0, 0);
    }
    let tc = DiagonalForm::trace_form(alg);
    let tp = DiagonalForm::pure_trace_form(alg).unwrap();
    match isotropy(&tc, budget) {
        IsotropyResult::Isotropic { witness } => {
            return LevelValue::level(vec![pure_root_of_minus_one(alg, &tp, &witness)]);
        }
        IsotropyResult::Anisotropic { .. } => lo = 2,
        IsotropyResult::Unknown { .. } => {}
    }
    for n in 2..=MAX_SUMMANDS {
        if hi.as_ref().is_some_and(|w| w.len() <= n) {
            break;
        }
        let form = unit_form(f).orth_sum(&tp.n_times(n).unwrap()).unwrap();
        match isotropy(&form, budget) {
            IsotropyResult::Isotropic { witness } => {
                hi = Some(pure_sum_witness(alg, &tp, n, &witness));
                break;
            }
            IsotropyResult::Anisotropic { .. }
                if (n + 1).is_power_of_two() && base_level.is_none_or(|s| s > n) =>
            {
                lo = lo.max(n + 1);
            }
            _ => {}
        }
    }
    resolve(alg, lo, hi, LevelValue::level, |r| r.0, 0)
}

fn with_leading_one(alg: &Algebra, level_witness: &[AlgebraElement]) -> Vec<AlgebraElement> {
    let mut w = vec![alg.one()];
    w.extend(level_witness.iter().filter(|y| !y.is_zero()).cloned());
    w
}

/// Sublevel of `alg`, never above the level: `-1` a square in `K`, then
/// `T_C` or `2×T_P` isotropy, then `<1> ⊥ n×T_P` and `(n+1)×T_P` at
/// `n = 2^k - 1`, then the exhaustive oracle for small finite algebras.
pub fn algebra_sublevel(alg: &Algebra, budget: &SearchBudget) -> LevelValue {
    let f = alg.field();
    if let Some(r) = f.sqrt(&f.from_i64(-1)) {
        return LevelValue::sublevel(vec![alg.one(), alg.scalar(r)]);
    }
    if positive_trace(alg) {
        return LevelValue::Infinite {
            reason: "positive trace form over a formally real field",
        };
    }
    let level = algebra_level(alg, budget);
    let mut hi = level.witness().map(|w| with_leading_one(alg, w));
    if alg.dim() == 1 {
        // over a field, 0 = Σ y_i² with y_1 ≠ 0 gives -1 = Σ (y_i / y_1)²
        let lo = level.lower().unwrap_or(1);
        return resolve(alg, lo, hi, LevelValue::sublevel, |r| r.1, 1);
    }
    let tc = DiagonalForm::trace_form(alg);
    let tp = DiagonalForm::pure_trace_form(alg).unwrap();
    let base_level = field_level(f).finite();
    let mut lo = 1;

    let r_tc = isotropy(&tc, budget);
    if let IsotropyResult::Isotropic { witness } = &r_tc {
        let u = pure_root_of_minus_one(alg, &tp, witness);
        return LevelValue::sublevel(vec![alg.one(), u]);
    }
    let r_tp = isotropy(&tp.n_times(2).unwrap(), budget);
    if let IsotropyResult::Isotropic { witness } = &r_tp {
        return LevelValue::sublevel(pure_zero_sum(alg, &tp, witness));
    }
    if r_tc.is_anisotropic() && r_tp.is_anisotropic() {
        lo = 2;
    }

    let mut n = 3;
    while n <= MAX_SUMMANDS {
        if hi.as_ref().is_some_and(|w| w.len() - 1 <= n) || base_level.is_some_and(|s| s <= n) {
            break;
        }
        let a = isotropy(
            &unit_form(f).orth_sum(&tp.n_times(n).unwrap()).unwrap(),
            budget,
        );
        let b = isotropy(&tp.n_times(n + 1).unwrap(), budget);
        let candidate = match (&a, &b) {
            (IsotropyResult::Isotropic { witness }, _) => Some(with_leading_one(
                alg,
                &pure_sum_witness(alg, &tp, n, witness),
            )),
            (_, IsotropyResult::Isotropic { witness }) => Some(pure_zero_sum(alg, &tp, witness)),
            _ => None,
        };
        if let Some(c) = candidate {
            if hi.as_ref().is_none_or(|h| c.len() < h.len()) {
                hi = Some(c);
            }
            break;
        }
        if a.is_anisotropic() && b.is_anisotropic() {
            lo = n + 1;
        }
        n = 2 * n + 1;
    }
    resolve(alg, lo, hi, LevelValue::sublevel, |r| r.1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(desc: &str, alphas: &str) -> Algebra {
        Algebra::parse(&Field::parse_descriptor(desc).unwrap(), alphas).unwrap()
    }

    fn witness_residues(v: &LevelValue) -> Vec<String> {
        v.witness()
            .unwrap()
            .iter()
            .map(|y| y.algebra().format_element(y))
            .collect()
    }

    #[test]
    fn field_levels() {
        let f13 = field_level(&Field::prime(13).unwrap());
        assert_eq!(f13.finite(), Some(1));
        assert_eq!(witness_residues(&f13), ["5"]);
        let f7 = field_level(&Field::prime(7).unwrap());
        assert_eq!(f7.finite(), Some(2));
        assert_eq!(witness_residues(&f7), ["2", "3"]);
        assert!(field_level(&Field::rationals()).is_infinite());
        assert!(field_level(&Field::parse_descriptor("ratfunc(q;x)").unwrap()).is_infinite());
        let t = field_level(&Field::parse_descriptor("ratfunc(fp:7;X)").unwrap());
        assert_eq!(t.finite(), Some(2));
    }

    #[test]
    fn level_examples() {
        let b = SearchBudget::default();
        assert_eq!(algebra_level(&alg("fp:7", "1,1"), &b).finite(), Some(1));
        assert_eq!(algebra_level(&alg("fp:7", "4"), &b).finite(), Some(2));
        assert_eq!(
            algebra_level(&alg("ratfunc(fp:7;X)", "X"), &b).finite(),
            Some(2)
        );
        for alphas in ["1", "2,3", "5,6,7"] {
            assert_eq!(algebra_level(&alg("fp:13", alphas), &b).finite(), Some(1));
        }
    }

    #[test]
    fn sublevel_examples() {
        let b = SearchBudget::default();
        assert_eq!(algebra_sublevel(&alg("fp:13", "2"), &b).finite(), Some(1));
        assert_eq!(algebra_sublevel(&alg("fp:7", "1,1"), &b).finite(), Some(1));
        assert_eq!(algebra_sublevel(&alg("fp:7", "4"), &b).finite(), Some(2));
        assert_eq!(algebra_sublevel(&alg("fp:7", ""), &b).finite(), Some(2));
    }

    #[test]
    fn rationals() {
        let b = SearchBudget::default();
        let real = alg("q", "1");
        assert!(algebra_level(&real, &b).is_infinite());
        assert!(algebra_sublevel(&real, &b).is_infinite());
        // Hamilton quaternions: f2² = -1
        assert_eq!(algebra_level(&alg("q", "-1,-1"), &b).finite(), Some(1));
        assert_eq!(algebra_level(&alg("q", "1,1"), &b).finite(), Some(1));
        assert!(algebra_level(&alg("ratfunc(q;x)", "x"), &b).is_infinite());
        // <1,x> anisotropic, sums of two squares not found by the search
        let r = algebra_level(&alg("ratfunc(q;x)", "-x^2-1"), &b);
        assert_eq!(r.lower(), Some(2));
        // <1,-1> is a subform of T_C here
        assert_eq!(
            algebra_level(&alg("ratfunc(q;x)", "x,-1"), &b).finite(),
            Some(1)
        );
    }

    #[test]
    fn cascade_decides_prime_fields_without_oracle() {
        let b = SearchBudget::default();
        assert!(oracle_feasible(&alg("fp:7", "3")));
        let big = alg("fp:10007", "5");
        assert!(!oracle_feasible(&big));
        assert!(algebra_level(&big, &b).finite().is_some());
        assert!(algebra_sublevel(&big, &b).finite().is_some());
    }
}
