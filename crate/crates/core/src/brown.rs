//! Division algebras over rational-function towers: `A_i` over
//! `F_i = F_(i-1)(X_i)` is `A_(i-1)` doubled with parameter `X_i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::field::{Elem, Field, Poly};
use crate::level::{algebra_level, field_level, LevelValue, SearchBudget};

/// `A_0` over `F_0`, then `A_1, ..., A_t` with `α = X_1, ..., X_t`.
#[derive(Clone, Debug)]
pub struct BrownTower {
    bottom: Algebra,
    /// `F_0, ..., F_t`
    fields: Vec<Field>,
}

impl BrownTower {
    /// Tower of height `t` over the base field itself (`A_0 = K`).
    pub fn new(base: &Field, t: usize) -> Result<BrownTower> {
        BrownTower::over(&Algebra::new(base, vec![])?, t)
    }

    /// Tower of height `t` starting from an arbitrary algebra `A_0`.
    pub fn over(bottom: &Algebra, t: usize) -> Result<BrownTower> {
        if t == 0 {
            return Err(Error::Invalid(
                "tower height must be at least 1; use the base field itself".into(),
            ));
        }
        let mut fields = vec![bottom.field().clone()];
        for j in 1..=t {
            let next = fields[j - 1].adjoin(&format!("X{j}"))?;
            fields.push(next);
        }
        Ok(BrownTower {
            bottom: bottom.clone(),
            fields,
        })
    }

    pub fn base(&self) -> &Field {
        &self.fields[0]
    }

    pub fn t(&self) -> usize {
        self.fields.len() - 1
    }

    /// `F_t`
    pub fn field(&self) -> &Field {
        &self.fields[self.t()]
    }

    pub fn level_field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    /// `A_t` over `F_t`.
    pub fn algebra(&self) -> Algebra {
        self.level_algebra(self.t())
    }

    /// Parameters of `A_j` embedded in `F_i` (`j ≤ i`).
    fn alphas(&self, j: usize, i: usize) -> Vec<Elem> {
        let f = &self.fields[i];
        let mut out: Vec<Elem> = self
            .bottom
            .alphas()
            .iter()
            .map(|a| f.embed_from(self.base(), a.clone()))
            .collect();
        out.extend((1..=j).map(|k| f.var(&format!("X{k}")).unwrap()));
        out
    }

    /// `A_i` over `F_i`.
    pub fn level_algebra(&self, i: usize) -> Algebra {
        Algebra::new(&self.fields[i], self.alphas(i, i)).unwrap()
    }

    /// `A_(i-1)` with scalars extended to `F_i`: where the halves of an
    /// element of `A_i` live.
    pub fn lower_over(&self, i: usize) -> Algebra {
        Algebra::new(&self.fields[i], self.alphas(i - 1, i)).unwrap()
    }

    pub fn to_json(&self) -> Value {
        let alg = self.algebra();
        json!({
            "field": alg.field().descriptor().to_string(),
            "alphas": alg.alphas().iter().map(|a| alg.field().format(a)).collect::<Vec<_>>(),
            "t": self.t(),
            "dim": alg.dim(),
        })
    }
}

/// Brown tower of height `t ≥ 1` over `base`.
pub fn brown_tower(base: &Field, t: usize) -> Result<BrownTower> {
    BrownTower::new(base, t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroDivisorOutcome {
    Found {
        x: AlgebraElement,
        y: AlgebraElement,
        trial: u64,
    },
    NoneWithinBudget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDivisorReport {
    pub outcome: ZeroDivisorOutcome,
    pub budget: SearchBudget,
}

impl ZeroDivisorReport {
    pub fn found(&self) -> bool {
        matches!(self.outcome, ZeroDivisorOutcome::Found { .. })
    }

    pub fn to_json(&self) -> Value {
        match &self.outcome {
            ZeroDivisorOutcome::Found { x, y, trial } => {
                let alg = x.algebra();
                json!({
                    "outcome": "found",
                    "x": alg.format_element(x),
                    "y": alg.format_element(y),
                    "trial": trial,
                    "budget": self.budget.to_json(),
                })
            }
            ZeroDivisorOutcome::NoneWithinBudget => json!({
                "outcome": "none-within-budget",
                "budget": self.budget.to_json(),
            }),
        }
    }
}

/// Some nonzero `v` with `m·v = 0`, by elimination; `None` if `m` is
/// nonsingular.
fn kernel_vector(f: &Field, mut m: Vec<Vec<Elem>>) -> Option<Vec<Elem>> {
    let n = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(r) = (row..n).find(|&r| !f.is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(row, r);
        let inv = f.inv(&m[row][col]).unwrap();
        for c in col..cols {
            m[row][c] = f.mul(&m[row][c], &inv);
        }
        for r in 0..n {
            if r != row && !f.is_zero(&m[r][col]) {
                let k = m[r][col].clone();
                for c in col..cols {
                    let d = f.mul(&k, &m[row][c]);
                    m[r][c] = f.sub(&m[r][c], &d);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![f.zero(); cols];
    v[free] = f.one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = f.neg(&m[r][free]);
    }
    Some(v)
}

/// Matrix of `y ↦ x·y` in the basis, column `j` = `x·f_j`.
fn left_multiplication(alg: &Algebra, x: &[Elem]) -> Vec<Vec<Elem>> {
    let q = alg.dim();
    let f = alg.field();
    let cols: Vec<Vec<Elem>> = (0..q)
        .map(|j| {
            let mut e = vec![f.zero(); q];
            e[j] = f.one();
            alg.mul_coeffs(x, &e)
        })
        .collect();
    (0..q)
        .map(|i| (0..q).map(|j| cols[j][i].clone()).collect())
        .collect()
}

const SPECIALIZATION_POINTS: usize = 8;

/// Is `L_x` nonsingular at some specialization of the tower variables?
/// Then it is nonsingular over the function field.
fn nonsingular_somewhere(alg: &Algebra, x: &[Elem], rng: &mut ChaCha8Rng, height: i64) -> bool {
    let f = alg.field();
    let g = f.ground();
    let vars = f.tower_height();
    for _ in 0..SPECIALIZATION_POINTS {
        let point: Vec<Elem> = (0..vars).map(|_| g.random(rng, height, 0, false)).collect();
        let at_point = |v: &[Elem]| -> Option<Vec<Elem>> {
            v.iter().map(|c| f.specialize(c, &point)).collect()
        };
        let (Some(alphas), Some(xs)) = (at_point(alg.alphas()), at_point(x)) else {
            continue;
        };
        let Ok(ground_alg) = Algebra::new(g, alphas) else {
            continue;
        };
        if kernel_vector(g, left_multiplication(&ground_alg, &xs)).is_none() {
            return true;
        }
    }
    false
}

/// Randomized search for `x, y ≠ 0` with `x·y = 0`.
///
/// Trial `i` draws `x` from a ChaCha8 stream keyed by `(seed, i)`, with
/// polynomial coefficients of degree at most `degree` and integer
/// coefficients bounded by `height`. `L_x` is first tested at random
/// specializations of the tower variables; if it stays singular there, an
/// exact kernel vector is computed. The reported pair is the one with the
/// smallest trial index, whatever the thread count.
pub fn zero_divisor_search(alg: &Algebra, budget: &SearchBudget) -> ZeroDivisorReport {
    let f = alg.field();
    let found = (0..budget.trials).into_par_iter().find_map_first(|trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(trial);
        let x = alg.random(&mut rng, budget.height, budget.degree, false);
        if x.is_zero() {
            return None;
        }
        if f.is_ratfunc() && nonsingular_somewhere(alg, x.coeffs(), &mut rng, budget.height) {
            return None;
        }
        let v = kernel_vector(f, left_multiplication(alg, x.coeffs()))?;
        let y = alg.element(v).unwrap();
        Some((trial, x, y))
    });
    let outcome = match found {
        Some((trial, x, y)) => {
            let prod = x.mul(&y).unwrap();
            assert!(
                !y.is_zero() && prod.is_zero(),
                "zero divisor failed re-verification"
            );
            ZeroDivisorOutcome::Found { x, y, trial }
        }
        None => ZeroDivisorOutcome::NoneWithinBudget,
    };
    ZeroDivisorReport {
        outcome,
        budget: *budget,
    }
}

/// One leading-coefficient product checked during the certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingCheck {
    pub product: &'static str,
    pub nonzero: bool,
}

/// Valuation bookkeeping for a would-be zero product
/// `(a + b·v)(c + d·v) = 0` in `A_i`, with `a, b, c, d` in `A_(i-1)`.
///
/// After clearing denominators, `a = Σ_(j≥m) x_j X^j` and likewise `b`
/// (order `n`, leading `y_n`), `c` (`p`, `z_p`), `d` (`r`, `w_r`). The two
/// halves of the product force `m + p = n + r + 1` and `n + p = m + r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCertificate {
    pub tower: Value,
    pub level: usize,
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub r: i64,
    pub equations: Vec<String>,
    pub leading_checks: Vec<LeadingCheck>,
    pub contradiction: bool,
}

impl ParityCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "tower": self.tower,
            "level-index": self.level,
            "valuations": {"m": self.m, "n": self.n, "p": self.p, "r": self.r},
            "equations": self.equations,
            "leading-checks": self.leading_checks.iter()
                .map(|c| json!({"product": c.product, "nonzero": c.nonzero}))
                .collect::<Vec<_>>(),
            "contradiction": self.contradiction,
        })
    }
}

fn lcm(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let g = a.gcd(f, b);
    a.mul(f, b).divrem(f, &g).0
}

/// Multiply a pair of elements by the least common multiple of all their
/// coefficient denominators, so that every coefficient is a polynomial in
/// the top variable.
fn clear_denominators(a: &AlgebraElement, b: &AlgebraElement) -> (AlgebraElement, AlgebraElement) {
    let f = a.algebra().field();
    let base = f.base().unwrap();
    let l = a
        .coeffs()
        .iter()
        .chain(b.coeffs())
        .fold(Poly::constant(base, base.one()), |acc, c| {
            lcm(base, &acc, &f.ratfn(c).unwrap().den)
        });
    let k = f.from_ratfn(l, Poly::constant(base, base.one()));
    (a.scale(&k), b.scale(&k))
}

/// Order in the top variable and the leading element in `lower`.
fn expansion(x: &AlgebraElement, lower: &Algebra) -> (i64, AlgebraElement) {
    let f = x.algebra().field();
    let vals: Vec<Option<(i64, Elem)>> = x
        .coeffs()
        .iter()
        .map(|c| (!f.is_zero(c)).then(|| f.valuation(c).unwrap()))
        .collect();
    let order = vals.iter().flatten().map(|(v, _)| *v).min().unwrap();
    let lead = vals
        .into_iter()
        .map(|v| match v {
            Some((k, c)) if k == order => c,
            _ => lower.field().zero(),
        })
        .collect();
    (order, lower.element(lead).unwrap())
}

/// Parity certificate at level `i` for the quadruple `(a, b, c, d)`,
/// elements of [`BrownTower::lower_over`]`(i)`.
pub fn parity_certificate(
    tower: &BrownTower,
    level: usize,
    a: &AlgebraElement,
    b: &AlgebraElement,
    c: &AlgebraElement,
    d: &AlgebraElement,
) -> Result<ParityCertificate> {
    if level == 0 || level > tower.t() {
        return Err(Error::Invalid(format!(
            "level index {level} outside 1..={}",
            tower.t()
        )));
    }
    let ambient = tower.lower_over(level);
    for (x, name) in [(a, "a"), (b, "b"), (c, "c"), (d, "d")] {
        if *x.algebra() != ambient {
            return Err(Error::DescriptorMismatch);
        }
        if x.is_zero() {
            return Err(Error::ZeroInput(name));
        }
    }
    let lower = tower.level_algebra(level - 1);
    let (a, b) = clear_denominators(a, b);
    let (c, d) = clear_denominators(c, d);
    let (m, xm) = expansion(&a, &lower);
    let (n, yn) = expansion(&b, &lower);
    let (p, zp) = expansion(&c, &lower);
    let (r, wr) = expansion(&d, &lower);

    // the leading terms of each half must survive for the orders to add
    let mut leading_checks = Vec::new();
    for (name, x, y) in [
        ("x_m*z_p", &xm, &zp),
        ("conj(w_r)*y_n", &wr.conjugate(), &yn),
        ("y_n*conj(z_p)", &yn, &zp.conjugate()),
        ("w_r*x_m", &wr, &xm),
    ] {
        let nonzero = !x.mul(y)?.is_zero();
        leading_checks.push(LeadingCheck {
            product: name,
            nonzero,
        });
        if !nonzero {
            return Err(Error::LeadingProductZero(name));
        }
    }

    // a c + X conj(d) b = 0 gives m + p = n + r + 1;
    // b conj(c) + d a = 0 gives n + p = m + r.
    // Subtracting: 2(m - n) = 1.
    let first_holds = m + p == n + r + 1;
    let second_holds = n + p == m + r;
    let contradiction = !(first_holds && second_holds);
    Ok(ParityCertificate {
        tower: tower.to_json(),
        level,
        m,
        n,
        p,
        r,
        equations: vec![
            format!("m+p = n+r+1: {} = {}", m + p, n + r + 1),
            format!("n+p = m+r: {} = {}", n + p, m + r),
            "2m = 2n+1".to_string(),
        ],
        leading_checks,
        contradiction,
    })
}

/// Tower of height `t` over `base` with its level: the base level as upper
/// bound (a scalar witness) and the cascade's lower bound.
#[derive(Clone, Debug)]
pub struct PrescribedLevel {
    pub tower: BrownTower,
    pub level: LevelValue,
    pub upper: usize,
    pub lower: usize,
}

impl PrescribedLevel {
    pub fn to_json(&self) -> Value {
        json!({
            "tower": self.tower.to_json(),
            "level": self.level.to_json("level"),
            "upper": self.upper,
            "lower": self.lower,
        })
    }
}

pub fn prescribed_level_algebra(
    base: &Field,
    t: usize,
    budget: &SearchBudget,
) -> Result<PrescribedLevel> {
    let base_level = field_level(base);
    let Some(witness) = base_level.witness() else {
        return Err(Error::InfiniteBaseLevel);
    };
    let tower = BrownTower::new(base, t)?;
    let alg = tower.algebra();
    let f = alg.field();
    let scalars: Vec<AlgebraElement> = witness
        .iter()
        .map(|y| alg.scalar(f.embed_from(base, y.coeffs()[0].clone())))
        .collect();
    let upper_value = LevelValue::level(scalars);
    let upper = upper_value.finite().unwrap();
    let lower = algebra_level(&alg, budget).lower().unwrap_or(1);
    let level = if lower == upper {
        upper_value
    } else {
        LevelValue::Range {
            lo: lower,
            hi: Some(upper),
            witness: upper_value.witness().map(<[_]>::to_vec),
        }
    };
    Ok(PrescribedLevel {
        tower,
        level,
        upper,
        lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::DiagonalForm;
    use crate::level::{isotropy, Certificate, IsotropyResult};

    fn budget(trials: u64) -> SearchBudget {
        SearchBudget {
            trials,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn towers() {
        let f7 = Field::prime(7).unwrap();
        let b = brown_tower(&f7, 1).unwrap();
        assert_eq!(b.algebra().dim(), 2);
        assert_eq!(b.field().descriptor().to_string(), "ratfunc(fp:7;X1)");
        let b = brown_tower(&Field::rationals(), 2).unwrap();
        assert_eq!(b.algebra().dim(), 4);
        assert_eq!(b.to_json()["alphas"], json!(["X1", "X2"]));
        assert!(brown_tower(&f7, 0).is_err());
        assert!(matches!(Field::prime(2), Err(Error::CharTwoOrNotPrime(2))));
    }

    #[test]
    fn zero_divisors_found() {
        let f7 = Field::prime(7).unwrap();
        let alg = Algebra::parse(&f7, "4").unwrap();
        let r = zero_divisor_search(&alg, &budget(100));
        let ZeroDivisorOutcome::Found { x, y, .. } = &r.outcome else {
            panic!("expected a zero divisor");
        };
        assert!(x.mul(y).unwrap().is_zero());
        // the known pair
        let a = alg.parse_element("-2,1").unwrap();
        let b = alg.parse_element("2,1").unwrap();
        assert!(a.mul(&b).unwrap().is_zero());

        let sed = Algebra::parse(&f7, "1,1,1,1").unwrap();
        assert!(zero_divisor_search(&sed, &budget(1000)).found());
    }

    #[test]
    fn brown_search_finds_nothing() {
        let f7 = Field::prime(7).unwrap();
        let alg = brown_tower(&f7, 1).unwrap().algebra();
        assert!(!zero_divisor_search(&alg, &budget(5000)).found());
    }

    #[test]
    fn search_is_reproducible() {
        let f7 = Field::prime(7).unwrap();
        let alg = Algebra::parse(&f7, "1,1,1").unwrap();
        let a = zero_divisor_search(&alg, &budget(50));
        let b = zero_divisor_search(&alg, &budget(50));
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let q = Field::rationals();
        let e = |v: i64| q.from_i64(v);
        let m = vec![vec![e(1), e(2)], vec![e(2), e(4)]];
        let v = kernel_vector(&q, m).unwrap();
        assert_eq!(v, vec![e(-2), e(1)]);
        assert!(kernel_vector(&q, vec![vec![e(1), e(2)], vec![e(3), e(4)]]).is_none());
    }

    #[test]
    fn constant_quadruple() {
        let f7 = Field::prime(7).unwrap();
        let tower = brown_tower(&f7, 1).unwrap();
        let amb = tower.lower_over(1);
        let one = amb.one();
        let cert = parity_certificate(&tower, 1, &one, &one, &one, &one).unwrap();
        assert_eq!((cert.m, cert.n, cert.p, cert.r), (0, 0, 0, 0));
        assert!(cert.contradiction);
        assert!(cert.leading_checks.iter().all(|c| c.nonzero));
        assert_eq!(
            parity_certificate(&tower, 1, &amb.zero(), &one, &one, &one),
            Err(Error::ZeroInput("a"))
        );
    }

    #[test]
    fn denominators_are_cleared() {
        let f7 = Field::prime(7).unwrap();
        let tower = brown_tower(&f7, 1).unwrap();
        let amb = tower.lower_over(1);
        let a = amb.parse_element("X1^2/(X1+1)").unwrap();
        let b = amb.parse_element("1/X1").unwrap();
        let cert = parity_certificate(&tower, 1, &a, &b, &amb.one(), &amb.one()).unwrap();
        // a, b scaled by X1(X1+1): a = X1^3, b = X1 + 1
        assert_eq!((cert.m, cert.n), (3, 0));
        let json = cert.to_json();
        assert_eq!(json["valuations"]["m"], json!(3));
        assert_eq!(json["level-index"], json!(1));
    }

    #[test]
    fn zero_divisor_below_is_reported() {
        let f7 = Field::prime(7).unwrap();
        let tower = BrownTower::over(&Algebra::parse(&f7, "4").unwrap(), 1).unwrap();
        let amb = tower.lower_over(1);
        let a = amb.parse_element("-2,1").unwrap();
        let c = amb.parse_element("2,1").unwrap();
        let one = amb.one();
        assert_eq!(
            parity_certificate(&tower, 1, &a, &one, &c, &one),
            Err(Error::LeadingProductZero("x_m*z_p"))
        );
    }

    #[test]
    fn random_quadruples_level_two() {
        let f7 = Field::prime(7).unwrap();
        let tower = brown_tower(&f7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for level in [1, 2] {
            let amb = tower.lower_over(level);
            for _ in 0..50 {
                let q: Vec<AlgebraElement> = (0..4)
                    .map(|_| loop {
                        let x = amb.random(&mut rng, 3, 2, true);
                        if !x.is_zero() {
                            break x;
                        }
                    })
                    .collect();
                let cert = parity_certificate(&tower, level, &q[0], &q[1], &q[2], &q[3]).unwrap();
                assert!(cert.contradiction);
            }
        }
    }

    #[test]
    fn norm_forms_split_anisotropic() {
        for base in [Field::prime(7).unwrap(), Field::rationals()] {
            for t in [1, 2] {
                let alg = brown_tower(&base, t).unwrap().algebra();
                let r = isotropy(&DiagonalForm::norm_form(&alg), &SearchBudget::default());
                assert_eq!(
                    r,
                    IsotropyResult::Anisotropic {
                        certificate: Certificate::SplitRecursion
                    }
                );
            }
        }
    }

    #[test]
    fn prescribed_levels() {
        let b = SearchBudget::default();
        for (p, want) in [(7, 2), (13, 1)] {
            for t in [1, 2] {
                let r = prescribed_level_algebra(&Field::prime(p).unwrap(), t, &b).unwrap();
                assert_eq!(r.level.finite(), Some(want));
                assert_eq!((r.lower, r.upper), (want, want));
            }
        }
        assert_eq!(
            prescribed_level_algebra(&Field::rationals(), 1, &b).unwrap_err(),
            Error::InfiniteBaseLevel
        );
    }
}
