use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Certificate, IsotropyResult, SearchBudget};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::forms::DiagonalForm;

/// Binary forms over `F_p` are enumerated in full while `p² ≤` this.
const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

pub(crate) enum Outcome {
    Isotropic(Vec<Elem>),
    Anisotropic(Certificate),
    Unknown,
}

/// Decide isotropy of `form`, or search for a witness within `budget`.
///
/// Over `F_p` the answer is exact. Over the rationals anisotropy is only
/// reported for definite forms. Over rational function towers, forms whose
/// coefficients are constants times monomials are split along the top
/// variable into `f0 ⊥ X f1`, and `f0 ⊥ X f1` is isotropic exactly when `f0`
/// or `f1` is isotropic over the base. Binary forms are decided everywhere
/// by a square test. Anything else is a bounded search that reports
/// `Unknown` on failure.
pub fn isotropy(form: &DiagonalForm, budget: &SearchBudget) -> IsotropyResult {
    match decide(form.field(), form.coeffs(), budget) {
        Outcome::Isotropic(w) => IsotropyResult::isotropic(form, w),
        Outcome::Anisotropic(certificate) => IsotropyResult::Anisotropic { certificate },
        Outcome::Unknown => IsotropyResult::Unknown { budget: *budget },
    }
}

pub(crate) fn decide(field: &Field, coeffs: &[Elem], budget: &SearchBudget) -> Outcome {
    if coeffs.is_empty() {
        return Outcome::Anisotropic(Certificate::Exhaustive);
    }
    if let Some(p) = field.prime_modulus() {
        return decide_prime(field, p, coeffs);
    }
    if field.is_ratfunc() && coeffs.iter().all(|c| field.monomial_parts(c).is_some()) {
        match split(field, coeffs, budget) {
            Outcome::Unknown => {}
            decided => return decided,
        }
    }
    if field.is_rationals() {
        let signs: Vec<i8> = coeffs.iter().map(|c| field.real_sign(c).unwrap()).collect();
        if signs.iter().all(|&s| s == signs[0]) {
            return Outcome::Anisotropic(Certificate::Definiteness);
        }
    }
    if coeffs.len() <= 2 {
        return square_test(field, coeffs);
    }
    match solve_last(field, coeffs, &field.zero(), budget) {
        Some(w) => Outcome::Isotropic(w),
        None => Outcome::Unknown,
    }
}

fn square_test(field: &Field, coeffs: &[Elem]) -> Outcome {
    if coeffs.len() == 1 {
        return Outcome::Anisotropic(Certificate::SquareTest);
    }
    let ratio = field.neg(&field.div(&coeffs[1], &coeffs[0]).unwrap());
    match field.sqrt(&ratio) {
        Some(r) => Outcome::Isotropic(vec![r, field.one()]),
        None => Outcome::Anisotropic(Certificate::SquareTest),
    }
}

/// Smallest-first solution of `c z² = need` in `F_p`, if any.
fn solve_residue(field: &Field, c: &Elem, need: &Elem) -> Option<Elem> {
    field.sqrt(&field.div(need, c).unwrap())
}

fn decide_prime(field: &Field, p: u64, coeffs: &[Elem]) -> Outcome {
    let m = coeffs.len();
    match m {
        1 => Outcome::Anisotropic(Certificate::Exhaustive),
        2 if p.saturating_mul(p) <= EXHAUSTIVE_LIMIT => {
            // lexicographic scan; for fixed x the smallest y is the smaller root
            for x in 1..p {
                let xe = Elem::Fp(x);
                let need = field.neg(&field.mul(&coeffs[0], &field.square(&xe)));
                if let Some(y) = solve_residue(field, &coeffs[1], &need) {
                    return Outcome::Isotropic(vec![xe, y]);
                }
            }
            Outcome::Anisotropic(Certificate::Exhaustive)
        }
        2 => square_test(field, coeffs),
        _ => {
            // a nonzero zero exists on the last three coordinates; scan them in
            // lexicographic order with the leading coordinates set to zero
            let (a, b, c) = (&coeffs[m - 3], &coeffs[m - 2], &coeffs[m - 1]);
            for x in 0..p {
                for y in 0..p {
                    if x == 0 && y == 0 {
                        continue;
                    }
                    let (xe, ye) = (Elem::Fp(x), Elem::Fp(y));
                    let s = field.add(
                        &field.mul(a, &field.square(&xe)),
                        &field.mul(b, &field.square(&ye)),
                    );
                    if let Some(z) = solve_residue(field, c, &field.neg(&s)) {
                        let mut w = vec![field.zero(); m - 3];
                        w.extend([xe, ye, z]);
                        return Outcome::Isotropic(w);
                    }
                }
            }
            unreachable!("every form of rank ≥ 3 over a finite field is isotropic")
        }
    }
}

/// Split `coeffs` along the top variable `X` into `f0 ⊥ X f1` after
/// removing even powers of `X`, and recurse on the base.
fn split(field: &Field, coeffs: &[Elem], budget: &SearchBudget) -> Outcome {
    let base = field.base().unwrap();
    let x = field.top_var().unwrap();
    // (position, reduced base coefficient, half exponent)
    let mut parts: [Vec<(usize, Elem, i64)>; 2] = [Vec::new(), Vec::new()];
    for (i, c) in coeffs.iter().enumerate() {
        let (e, b) = field.valuation(c).unwrap();
        parts[e.rem_euclid(2) as usize].push((i, b, e.div_euclid(2)));
    }
    let mut undecided = false;
    for part in &parts {
        let sub: Vec<Elem> = part.iter().map(|(_, b, _)| b.clone()).collect();
        match decide(base, &sub, budget) {
            Outcome::Isotropic(w) => {
                let mut lifted = vec![field.zero(); coeffs.len()];
                for ((i, _, half), wi) in part.iter().zip(w) {
                    let scale = field.pow(&x, -half).unwrap();
                    lifted[*i] = field.mul(&field.embed(wi), &scale);
                }
                return Outcome::Isotropic(lifted);
            }
            Outcome::Anisotropic(_) => {}
            Outcome::Unknown => undecided = true,
        }
    }
    if undecided {
        Outcome::Unknown
    } else {
        Outcome::Anisotropic(Certificate::SplitRecursion)
    }
}

/// `f0 ⊥ X f1` over `K(X)` from the decisions for `f0` and `f1` over `K`.
pub fn split_ratfunc_isotropy(
    f0: &DiagonalForm,
    f1: &DiagonalForm,
    budget: &SearchBudget,
) -> Result<bool> {
    if f0.field() != f1.field() {
        return Err(Error::DescriptorMismatch);
    }
    let r0 = isotropy(f0, budget);
    let r1 = isotropy(f1, budget);
    if r0.is_isotropic() || r1.is_isotropic() {
        return Ok(true);
    }
    if r0.is_unknown() {
        return Err(Error::BaseUndecided("first summand"));
    }
    if r1.is_unknown() {
        return Err(Error::BaseUndecided("second summand"));
    }
    Ok(false)
}

/// Small elements, simplest first.
fn pool(field: &Field, height: i64, degree: usize) -> Vec<Elem> {
    if field.is_rationals() {
        let mut out = vec![field.zero()];
        for n in 1..=height {
            out.push(field.from_i64(n));
            out.push(field.from_i64(-n));
        }
        for d in 2..=height {
            for n in 1..=height {
                if n.gcd(&d) == 1 {
                    let q = Elem::Q(BigRational::new(BigInt::from(n), BigInt::from(d)));
                    out.push(field.neg(&q));
                    out.insert(out.len() - 1, q);
                }
            }
        }
        return out;
    }
    if let Some(p) = field.prime_modulus() {
        let mut out = vec![field.zero()];
        for n in 1..=(height as u64).min((p - 1) / 2) {
            out.push(field.from_i64(n as i64));
            out.push(field.from_i64(-(n as i64)));
        }
        return out;
    }
    let base = field.base().unwrap();
    let base_pool = pool(base, height, degree);
    let small = &base_pool[..base_pool.len().min(3)];
    let mut out: Vec<Elem> = base_pool
        .iter()
        .take(2 * height as usize + 1)
        .map(|c| field.embed(c.clone()))
        .collect();
    let x = field.top_var().unwrap();
    for d in 1..=degree {
        let lead = field.pow(&x, d as i64).unwrap();
        // lower coefficients range over `small`
        let mut idx = vec![0usize; d];
        loop {
            for sign in [1, -1] {
                let mut e = if sign == 1 {
                    lead.clone()
                } else {
                    field.neg(&lead)
                };
                for (k, &j) in idx.iter().enumerate() {
                    let term = field.mul(
                        &field.embed(small[j].clone()),
                        &field.pow(&x, k as i64).unwrap(),
                    );
                    e = field.add(&e, &term);
                }
                out.push(e);
            }
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < small.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
    }
    out
}

/// Every `k`-tuple of indices in `0..=s` whose maximum is `s`.
fn shell(
    k: usize,
    s: usize,
    buf: &mut Vec<usize>,
    has_max: bool,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if buf.len() == k {
        return visit(buf);
    }
    let last = buf.len() + 1 == k;
    let lo = if last && !has_max { s } else { 0 };
    for v in lo..=s {
        buf.push(v);
        let flow = shell(k, s, buf, has_max || v == s, visit);
        buf.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// Search for `x ≠ 0` with `Σ a_i x_i² = target` by choosing the leading
/// coordinates and solving for the last one. Small elements are tried
/// first in growing shells, then seeded random ones, `budget.trials`
/// attempts in all.
pub(crate) fn solve_last(
    field: &Field,
    coeffs: &[Elem],
    target: &Elem,
    budget: &SearchBudget,
) -> Option<Vec<Elem>> {
    let m = coeffs.len();
    let last = &coeffs[m - 1];
    let attempt = |xs: &[Elem]| -> Option<Vec<Elem>> {
        let s = coeffs.iter().zip(xs).fold(field.zero(), |acc, (a, x)| {
            field.add(&acc, &field.mul(a, &field.square(x)))
        });
        let r = field.div(&field.sub(target, &s), last).unwrap();
        let z = field.sqrt(&r)?;
        let mut v = xs.to_vec();
        v.push(z);
        v.iter().any(|x| !field.is_zero(x)).then_some(v)
    };
    if m == 1 {
        return attempt(&[]);
    }
    let k = m - 1;
    let pool = pool(field, budget.height, budget.degree);
    let mut trials = 0u64;
    let mut found = None;
    for s in 0..pool.len() {
        let flow = shell(k, s, &mut Vec::with_capacity(k), false, &mut |idx| {
            if trials >= budget.trials {
                return ControlFlow::Break(());
            }
            trials += 1;
            let xs: Vec<Elem> = idx.iter().map(|&i| pool[i].clone()).collect();
            match attempt(&xs) {
                Some(w) => {
                    found = Some(w);
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        });
        if flow.is_break() {
            return found;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    while trials < budget.trials {
        trials += 1;
        let xs: Vec<Elem> = (0..k)
            .map(|_| field.random(&mut rng, budget.height, budget.degree, true))
            .collect();
        if let Some(w) = attempt(&xs) {
            return Some(w);
        }
    }
    None
}

/// From a zero `v` of `form`, a vector representing `a ≠ 0`: with `e_i` the
/// first basis vector where `v_i ≠ 0`, `e_i + λv` for
/// `λ = (a - a_i) / (2 a_i v_i)`.
pub(crate) fn universal_representation(
    coeffs: &[Elem],
    field: &Field,
    v: &[Elem],
    a: &Elem,
) -> Vec<Elem> {
    let i = v
        .iter()
        .position(|x| !field.is_zero(x))
        .expect("nonzero isotropy witness");
    let ai = &coeffs[i];
    let denom = field.mul(&field.from_i64(2), &field.mul(ai, &v[i]));
    let lambda = field.div(&field.sub(a, ai), &denom).unwrap();
    let mut w: Vec<Elem> = v.iter().map(|x| field.mul(&lambda, x)).collect();
    w[i] = field.add(&w[i], &field.one());
    w
}

/// A vector `x` with `form(x) = a`, if one is found.
///
/// Over `F_p` the answer is exact. Elsewhere an isotropy witness is turned
/// into a representation (isotropic forms are universal); failing that a
/// bounded search runs.
pub fn represents(form: &DiagonalForm, a: &Elem, budget: &SearchBudget) -> Option<Vec<Elem>> {
    let field = form.field();
    let coeffs = form.coeffs();
    let m = coeffs.len();
    if field.is_zero(a) {
        return isotropy(form, budget).witness().map(<[Elem]>::to_vec);
    }
    let w = if let Some(p) = field.prime_modulus() {
        if m == 1 {
            field
                .sqrt(&field.div(a, &coeffs[0]).unwrap())
                .map(|r| vec![r])
        } else {
            // nondegenerate binary forms over F_p are universal
            (0..p).find_map(|x| {
                let xe = Elem::Fp(x);
                let rest = field.sub(a, &field.mul(&coeffs[m - 2], &field.square(&xe)));
                let z = solve_residue(field, &coeffs[m - 1], &rest)?;
                let mut w = vec![field.zero(); m - 2];
                w.extend([xe, z]);
                Some(w)
            })
        }
    } else if let IsotropyResult::Isotropic { witness } = isotropy(form, budget) {
        Some(universal_representation(coeffs, field, &witness, a))
    } else {
        solve_last(field, coeffs, a, budget)
    };
    if let Some(w) = &w {
        assert_eq!(&form.evaluate(w).unwrap(), a, "representation witness");
    }
    w
}

/// Does `form` over `F_p` represent every nonzero residue?
pub fn is_universal(form: &DiagonalForm) -> Result<bool> {
    let field = form.field();
    let p = field.prime_modulus().ok_or(Error::WrongField {
        expected: "prime field",
    })?;
    let budget = SearchBudget::default();
    Ok((1..p).all(|a| represents(form, &Elem::Fp(a), &budget).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(desc: &str, coeffs: &str) -> DiagonalForm {
        DiagonalForm::parse(&Field::parse_descriptor(desc).unwrap(), coeffs).unwrap()
    }

    fn elems(f: &DiagonalForm, s: &str) -> Vec<Elem> {
        f.field().parse_list(s).unwrap()
    }

    // all nonzero vectors of F_p^m
    fn brute_isotropic(f: &DiagonalForm) -> bool {
        let p = f.field().prime_modulus().unwrap();
        let m = f.rank();
        let total = p.pow(m as u32);
        (1..total).any(|mut idx| {
            let v: Vec<Elem> = (0..m)
                .map(|_| {
                    let r = idx % p;
                    idx /= p;
                    Elem::Fp(r)
                })
                .collect();
            f.field().is_zero(&f.evaluate(&v).unwrap())
        })
    }

    #[test]
    fn examples() {
        let b = SearchBudget::default();
        let h = form("q", "1,-1");
        assert_eq!(isotropy(&h, &b).witness().unwrap(), &elems(&h, "1,1")[..]);

        let f = form("fp:7", "1,4");
        assert_eq!(
            isotropy(&f, &b),
            IsotropyResult::Anisotropic {
                certificate: Certificate::Exhaustive
            }
        );
        assert!(!brute_isotropic(&f));

        let g = form("ratfunc(fp:7;X)", "1,X");
        assert_eq!(
            isotropy(&g, &b),
            IsotropyResult::Anisotropic {
                certificate: Certificate::SplitRecursion
            }
        );

        let t = form("fp:3", "1,1,1");
        assert_eq!(isotropy(&t, &b).witness().unwrap(), &elems(&t, "1,1,1")[..]);
    }

    #[test]
    fn prime_field_decisions_match_enumeration() {
        let b = SearchBudget::default();
        for p in [3u64, 5, 7, 11] {
            let f = Field::prime(p).unwrap();
            for m in 1..=3usize {
                let mut idx = vec![1u64; m];
                loop {
                    let coeffs: Vec<Elem> = idx.iter().map(|&r| Elem::Fp(r)).collect();
                    let form = DiagonalForm::new(&f, coeffs).unwrap();
                    let r = isotropy(&form, &b);
                    assert_eq!(r.is_isotropic(), brute_isotropic(&form), "{p} {idx:?}");
                    assert!(!r.is_unknown());
                    let mut k = 0;
                    while k < m {
                        idx[k] += 1;
                        if idx[k] < p {
                            break;
                        }
                        idx[k] = 1;
                        k += 1;
                    }
                    if k == m {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn rationals() {
        let b = SearchBudget::default();
        assert_eq!(
            isotropy(&form("q", "1,1,3"), &b),
            IsotropyResult::Anisotropic {
                certificate: Certificate::Definiteness
            }
        );
        assert_eq!(
            isotropy(&form("q", "1,-2"), &b),
            IsotropyResult::Anisotropic {
                certificate: Certificate::SquareTest
            }
        );
        assert!(isotropy(&form("q", "1,1,-2"), &b).is_isotropic());
        assert!(isotropy(&form("q", "2,3,-5,7"), &b).is_isotropic());
        // anisotropic at 3 and at infinity-free search: left undecided
        let tight = SearchBudget { trials: 200, ..b };
        assert!(isotropy(&form("q", "1,1,-3"), &tight).is_unknown());
    }

    #[test]
    fn towers() {
        let b = SearchBudget::default();
        let r = isotropy(&form("ratfunc(fp:7;X1,X2)", "1,X1,X2,-X1*X2"), &b);
        assert_eq!(
            r,
            IsotropyResult::Anisotropic {
                certificate: Certificate::SplitRecursion
            }
        );
        // X1^2 is a square: <1,-X1^2> is hyperbolic
        let h = form("ratfunc(q;X1)", "1,-X1^2");
        assert!(isotropy(&h, &b).is_isotropic());
        let odd = form("ratfunc(fp:7;X1,X2)", "X2^3,-X2*X1^2,3");
        assert!(isotropy(&odd, &b).is_isotropic());
        // not monomial: falls back to search
        let s = form("ratfunc(q;X)", "1,X+1,-X-1");
        assert!(isotropy(&s, &b).is_isotropic());
    }

    #[test]
    fn split_examples() {
        let b = SearchBudget::default();
        assert!(split_ratfunc_isotropy(&form("fp:7", "1,-1"), &form("fp:7", "1"), &b).unwrap());
        assert!(!split_ratfunc_isotropy(&form("fp:7", "1"), &form("fp:7", "1"), &b).unwrap());
        assert!(!split_ratfunc_isotropy(&form("fp:7", "1,4"), &form("fp:7", "1,4"), &b).unwrap());
        let tight = SearchBudget { trials: 10, ..b };
        assert_eq!(
            split_ratfunc_isotropy(&form("q", "1,1,-3"), &form("q", "1"), &tight),
            Err(Error::BaseUndecided("first summand"))
        );
    }

    #[test]
    fn representation_examples() {
        let b = SearchBudget::default();
        let q = Field::rationals();
        assert_eq!(
            represents(&form("q", "1,1"), &q.from_i64(2), &b).unwrap(),
            vec![q.one(), q.one()]
        );
        assert_eq!(
            represents(&form("q", "1,-1"), &q.from_i64(5), &b).unwrap(),
            vec![q.from_i64(3), q.from_i64(2)]
        );
        let f7 = Field::prime(7).unwrap();
        assert_eq!(
            represents(&form("fp:7", "1,4"), &f7.from_i64(4), &b).unwrap(),
            vec![f7.zero(), f7.one()]
        );
        assert!(represents(&form("fp:7", "1"), &f7.from_i64(3), &b).is_none());
        assert!(represents(&form("q", "1,1"), &q.from_i64(-1), &b).is_none());
    }

    #[test]
    fn universality() {
        assert!(is_universal(&form("fp:7", "1,-1")).unwrap());
        assert!(!is_universal(&form("fp:7", "1")).unwrap());
        assert!(is_universal(&form("fp:5", "1,1")).unwrap());
        assert_eq!(
            is_universal(&form("q", "1,-1")),
            Err(Error::WrongField {
                expected: "prime field"
            })
        );
    }
}
