//! Exact fields: the rationals, odd prime fields, and towers of rational
//! function fields `K(X1)(X2)...` built one variable at a time.
//!
//! A [`Field`] is a cheap, shareable context; [`Elem`] values carry no
//! reference to their field and every operation goes through the context.
//! All elements are kept in canonical form, so derived equality is field
//! equality.

mod descriptor;
mod expr;
pub(crate) use expr::{has_top_level_sum, join_terms, scaled_term};
pub mod poly;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub use descriptor::FieldDescriptor;
pub use poly::Poly;

use crate::error::{Error, Result};

/// An exact field element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    /// Reduced fraction.
    Q(BigRational),
    /// Residue in `[0, p)`.
    Fp(u64),
    /// Fraction of two polynomials in the top tower variable.
    Rf(Box<RatFn>),
}

/// `num / den` with `gcd(num, den) = 1`, `den` monic and `den = 1` for zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

#[derive(Debug)]
enum Kind {
    Rationals,
    Prime(u64),
    RatFunc { base: Field, var: String },
}

/// Arithmetic context for one exact field.
#[derive(Clone)]
pub struct Field(Arc<Kind>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.descriptor())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.descriptor() == other.descriptor()
    }
}

impl Eq for Field {}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Tonelli-Shanks; `a` must be a nonzero quadratic residue mod odd prime `p`.
fn sqrt_mod(a: u64, p: u64) -> u64 {
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| powmod(z, (p - 1) / 2, p) == p - 1)
        .unwrap();
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulmod(tt, tt, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    r.min(p - r)
}

impl Field {
    pub fn new(desc: &FieldDescriptor) -> Result<Field> {
        let kind = match desc {
            FieldDescriptor::Rationals => Kind::Rationals,
            FieldDescriptor::PrimeField(p) => {
                if *p == 2 || !is_prime(*p) || *p > u32::MAX as u64 {
                    return Err(Error::CharTwoOrNotPrime(*p));
                }
                Kind::Prime(*p)
            }
            FieldDescriptor::RatFunc { base, var } => {
                let base = Field::new(base)?;
                if base.vars().iter().any(|v| v == var) {
                    return Err(Error::BadTower(format!("duplicate variable `{var}`")));
                }
                if !descriptor::is_identifier(var) {
                    return Err(Error::BadTower(format!("invalid variable name `{var}`")));
                }
                Kind::RatFunc {
                    base,
                    var: var.clone(),
                }
            }
        };
        Ok(Field(Arc::new(kind)))
    }

    pub fn rationals() -> Field {
        Field(Arc::new(Kind::Rationals))
    }

    pub fn prime(p: u64) -> Result<Field> {
        Field::new(&FieldDescriptor::PrimeField(p))
    }

    /// Adjoin one indeterminate on top of `self`.
    pub fn adjoin(&self, var: &str) -> Result<Field> {
        Field::new(&FieldDescriptor::RatFunc {
            base: Box::new(self.descriptor()),
            var: var.to_string(),
        })
    }

    /// Parse a descriptor string such as `q`, `fp:7` or `ratfunc(q;X1,X2)`.
    pub fn parse_descriptor(s: &str) -> Result<Field> {
        Field::new(&s.parse::<FieldDescriptor>()?)
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match &*self.0 {
            Kind::Rationals => FieldDescriptor::Rationals,
            Kind::Prime(p) => FieldDescriptor::PrimeField(*p),
            Kind::RatFunc { base, var } => FieldDescriptor::RatFunc {
                base: Box::new(base.descriptor()),
                var: var.clone(),
            },
        }
    }

    /// Field the top variable was adjoined to.
    pub fn base(&self) -> Option<&Field> {
        match &*self.0 {
            Kind::RatFunc { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn var_name(&self) -> Option<&str> {
        match &*self.0 {
            Kind::RatFunc { var, .. } => Some(var),
            _ => None,
        }
    }

    /// Tower variables, innermost first.
    pub fn vars(&self) -> Vec<String> {
        match &*self.0 {
            Kind::RatFunc { base, var } => {
                let mut v = base.vars();
                v.push(var.clone());
                v
            }
            _ => Vec::new(),
        }
    }

    /// The prime field or the rationals at the bottom of the tower.
    pub fn ground(&self) -> &Field {
        match &*self.0 {
            Kind::RatFunc { base, .. } => base.ground(),
            _ => self,
        }
    }

    pub fn is_ratfunc(&self) -> bool {
        matches!(&*self.0, Kind::RatFunc { .. })
    }

    pub fn prime_modulus(&self) -> Option<u64> {
        match &*self.0 {
            Kind::Prime(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(&*self.0, Kind::Rationals)
    }

    pub fn characteristic(&self) -> u64 {
        self.ground().prime_modulus().unwrap_or(0)
    }

    /// Orderings of the rationals extend to every rational function tower
    /// over them; prime fields have finite level.
    pub fn is_formally_real(&self) -> bool {
        self.ground().is_rationals()
    }

    pub fn tower_height(&self) -> usize {
        match &*self.0 {
            Kind::RatFunc { base, .. } => base.tower_height() + 1,
            _ => 0,
        }
    }

    // ---- constants and conversions ----

    pub fn zero(&self) -> Elem {
        match &*self.0 {
            Kind::Rationals => Elem::Q(BigRational::zero()),
            Kind::Prime(_) => Elem::Fp(0),
            Kind::RatFunc { base, .. } => Elem::Rf(Box::new(RatFn {
                num: Poly::zero(),
                den: Poly::constant(base, base.one()),
            })),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match &*self.0 {
            Kind::Rationals => Elem::Q(BigRational::from_integer(n.clone())),
            Kind::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(*p));
                Elem::Fp(r.to_u64().unwrap())
            }
            Kind::RatFunc { base, .. } => self.embed(base.from_bigint(n)),
        }
    }

    /// Lift an element of the base field to a constant of this field.
    pub fn embed(&self, c: Elem) -> Elem {
        let base = self.base().expect("embed needs a rational function field");
        Elem::Rf(Box::new(RatFn {
            num: Poly::constant(base, c),
            den: Poly::constant(base, base.one()),
        }))
    }

    /// Lift an element of any field lower in the tower.
    pub fn embed_from(&self, from: &Field, c: Elem) -> Elem {
        if from == self {
            return c;
        }
        let base = self.base().expect("source field is not below this field");
        let inner = base.embed_from(from, c);
        self.embed(inner)
    }

    /// The top tower variable as an element.
    pub fn top_var(&self) -> Option<Elem> {
        let base = self.base()?;
        Some(self.from_ratfn(
            Poly::monomial(base, base.one(), 1),
            Poly::constant(base, base.one()),
        ))
    }

    /// Element for the named tower variable.
    pub fn var(&self, name: &str) -> Option<Elem> {
        match &*self.0 {
            Kind::RatFunc { base, var } => {
                if var == name {
                    self.top_var()
                } else {
                    base.var(name).map(|e| self.embed(e))
                }
            }
            _ => None,
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Elem> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.div(&n, &d)
    }

    /// Polynomial parts of a rational function field element.
    pub fn ratfn<'a>(&self, a: &'a Elem) -> Option<&'a RatFn> {
        match a {
            Elem::Rf(r) => Some(r),
            _ => None,
        }
    }

    /// Build a canonical element from numerator and denominator over the base.
    pub fn from_ratfn(&self, num: Poly, den: Poly) -> Elem {
        let base = self.base().expect("rational function field");
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return self.zero();
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(base, &den);
            if g.is_one(base) {
                (num, den)
            } else {
                (num.divrem(base, &g).0, den.divrem(base, &g).0)
            }
        };
        let (lc, den) = den.monic(base);
        let num = if base.is_one(&lc) {
            num
        } else {
            num.scale(base, &base.inv(&lc).unwrap())
        };
        Elem::Rf(Box::new(RatFn { num, den }))
    }

    // ---- arithmetic ----

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Q(q) => q.is_zero(),
            Elem::Fp(r) => *r == 0,
            Elem::Rf(r) => r.num.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        match (&*self.0, a) {
            (_, Elem::Q(q)) => q.is_one(),
            (_, Elem::Fp(r)) => *r == 1,
            (Kind::RatFunc { base, .. }, Elem::Rf(r)) => r.num.is_one(base) && r.den.is_one(base),
            _ => false,
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (&*self.0, a, b) {
            (Kind::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            (Kind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => Elem::Fp((x + y) % p),
            (Kind::RatFunc { base, .. }, Elem::Rf(x), Elem::Rf(y)) => {
                if x.num.is_zero() {
                    return b.clone();
                }
                if y.num.is_zero() {
                    return a.clone();
                }
                if x.den == y.den {
                    let num = x.num.add(base, &y.num);
                    return self.from_ratfn(num, x.den.clone());
                }
                let num = x.num.mul(base, &y.den).add(base, &y.num.mul(base, &x.den));
                self.from_ratfn(num, x.den.mul(base, &y.den))
            }
            _ => panic!("element does not belong to {:?}", self),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (&*self.0, a) {
            (Kind::Rationals, Elem::Q(x)) => Elem::Q(-x),
            (Kind::Prime(p), Elem::Fp(x)) => Elem::Fp((p - x) % p),
            (Kind::RatFunc { base, .. }, Elem::Rf(x)) => Elem::Rf(Box::new(RatFn {
                num: x.num.neg(base),
                den: x.den.clone(),
            })),
            _ => panic!("element does not belong to {:?}", self),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&*self.0, a, b) {
            (Kind::Rationals, Elem::Q(x), Elem::Q(y)) => Elem::Q(x * y),
            (Kind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => Elem::Fp(mulmod(*x, *y, *p)),
            (Kind::RatFunc { base, .. }, Elem::Rf(x), Elem::Rf(y)) => {
                if x.num.is_zero() || y.num.is_zero() {
                    return self.zero();
                }
                if x.den.is_one(base) && y.den.is_one(base) {
                    return Elem::Rf(Box::new(RatFn {
                        num: x.num.mul(base, &y.num),
                        den: x.den.clone(),
                    }));
                }
                // cross-cancel before multiplying
                let g1 = x.num.gcd(base, &y.den);
                let g2 = y.num.gcd(base, &x.den);
                let xn = x.num.divrem(base, &g1).0;
                let yd = y.den.divrem(base, &g1).0;
                let yn = y.num.divrem(base, &g2).0;
                let xd = x.den.divrem(base, &g2).0;
                let num = xn.mul(base, &yn);
                let den = xd.mul(base, &yd);
                let (lc, den) = den.monic(base);
                let num = num.scale(base, &base.inv(&lc).unwrap());
                Elem::Rf(Box::new(RatFn { num, den }))
            }
            _ => panic!("element does not belong to {:?}", self),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(match (&*self.0, a) {
            (Kind::Rationals, Elem::Q(x)) => Elem::Q(x.recip()),
            (Kind::Prime(p), Elem::Fp(x)) => Elem::Fp(powmod(*x, p - 2, *p)),
            (Kind::RatFunc { .. }, Elem::Rf(x)) => self.from_ratfn(x.den.clone(), x.num.clone()),
            _ => panic!("element does not belong to {:?}", self),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Result<Elem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    pub fn square(&self, a: &Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    // ---- squares ----

    /// A square root of `a` if `a` is a square in this field.
    ///
    /// Prime fields use Euler's criterion and Tonelli-Shanks (the smaller
    /// root is returned); rationals need square numerator and denominator;
    /// rational functions need square numerator and denominator polynomials,
    /// decided by polynomial square root extraction with recursion on the
    /// leading coefficient.
    pub fn sqrt(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        match (&*self.0, a) {
            (Kind::Rationals, Elem::Q(x)) => {
                if x.is_negative() {
                    return None;
                }
                let n = x.numer().sqrt();
                let d = x.denom().sqrt();
                (&n * &n == *x.numer() && &d * &d == *x.denom())
                    .then(|| Elem::Q(BigRational::new(n, d)))
            }
            (Kind::Prime(p), Elem::Fp(x)) => {
                (powmod(*x, (p - 1) / 2, *p) == 1).then(|| Elem::Fp(sqrt_mod(*x, *p)))
            }
            (Kind::RatFunc { base, .. }, Elem::Rf(x)) => {
                let n = x.num.sqrt(base)?;
                let d = x.den.sqrt(base)?;
                Some(self.from_ratfn(n, d))
            }
            _ => panic!("element does not belong to {:?}", self),
        }
    }

    pub fn is_square(&self, a: &Elem) -> bool {
        self.sqrt(a).is_some()
    }

    /// `a` and `b` are nonzero and lie in the same square class.
    pub fn same_square_class(&self, a: &Elem, b: &Elem) -> bool {
        if self.is_zero(a) || self.is_zero(b) {
            return false;
        }
        self.is_square(&self.div(a, b).unwrap())
    }

    /// Sign under the real embedding; `None` outside the rationals.
    pub fn real_sign(&self, a: &Elem) -> Option<i8> {
        match a {
            Elem::Q(x) => Some(if x.is_positive() {
                1
            } else if x.is_negative() {
                -1
            } else {
                0
            }),
            _ => None,
        }
    }

    // ---- valuations ----

    /// Order at zero of the top variable and the coefficient of the lowest
    /// term: `a = leading * X^order + higher terms`.
    pub fn valuation(&self, a: &Elem) -> Result<(i64, Elem)> {
        let base = self.base().ok_or(Error::WrongField {
            expected: "rational function",
        })?;
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        let r = self.ratfn(a).unwrap();
        let on = r.num.order(base).unwrap();
        let od = r.den.order(base).unwrap();
        let lead = base.div(&r.num.coeffs[on], &r.den.coeffs[od])?;
        Ok((on as i64 - od as i64, lead))
    }

    /// Is `a` a nonzero constant times a monomial in the tower variables?
    /// Returns the exponent of each variable (innermost first) and the
    /// ground-field constant.
    pub fn monomial_parts(&self, a: &Elem) -> Option<(Vec<i64>, Elem)> {
        if self.is_zero(a) {
            return None;
        }
        match &*self.0 {
            Kind::RatFunc { base, .. } => {
                let r = self.ratfn(a).unwrap();
                let on = r.num.order(base)?;
                let od = r.den.order(base)?;
                if r.num.coeffs.len() != on + 1 || r.den.coeffs.len() != od + 1 {
                    return None;
                }
                let c = base.div(&r.num.coeffs[on], &r.den.coeffs[od]).ok()?;
                let (mut exps, k) = base.monomial_parts(&c)?;
                exps.push(on as i64 - od as i64);
                Some((exps, k))
            }
            _ => Some((Vec::new(), a.clone())),
        }
    }

    /// Substitute ground-field values for the tower variables (innermost
    /// first). `None` if a denominator vanishes at the point.
    pub fn specialize(&self, a: &Elem, point: &[Elem]) -> Option<Elem> {
        match &*self.0 {
            Kind::RatFunc { base, .. } => {
                let (x, rest) = point.split_last()?;
                let r = self.ratfn(a).unwrap();
                let g = self.ground();
                let eval = |p: &Poly| -> Option<Elem> {
                    let mut acc = g.zero();
                    for c in p.coeffs.iter().rev() {
                        let cv = base.specialize(c, rest)?;
                        acc = g.add(&g.mul(&acc, x), &cv);
                    }
                    Some(acc)
                };
                let n = eval(&r.num)?;
                let d = eval(&r.den)?;
                g.div(&n, &d).ok()
            }
            _ => Some(a.clone()),
        }
    }

    // ---- text ----

    pub fn parse(&self, text: &str) -> Result<Elem> {
        expr::parse(self, text)
    }

    /// Canonical text; `parse(format(a)) == a`.
    pub fn format(&self, a: &Elem) -> String {
        expr::format(self, a)
    }

    /// Parse a comma separated list of expressions (commas inside
    /// parentheses do not split).
    pub fn parse_list(&self, text: &str) -> Result<Vec<Elem>> {
        split_top_level(text, ',')
            .into_iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| self.parse(s))
            .collect()
    }

    // ---- sampling ----

    /// Random element with integer coefficients in `[-height, height]` and
    /// tower-variable degrees up to `degree`. Denominators are included
    /// when `fractions` is set.
    pub fn random<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        height: i64,
        degree: usize,
        fractions: bool,
    ) -> Elem {
        match &*self.0 {
            Kind::Rationals => {
                let n = rng.gen_range(-height..=height);
                let d = if fractions {
                    rng.gen_range(1..=height.max(1))
                } else {
                    1
                };
                Elem::Q(BigRational::new(n.into(), d.into()))
            }
            Kind::Prime(p) => Elem::Fp(rng.gen_range(0..*p)),
            Kind::RatFunc { base, .. } => {
                let nd = rng.gen_range(0..=degree);
                let num: Vec<Elem> = (0..=nd)
                    .map(|_| base.random(rng, height, degree, false))
                    .collect();
                let num = Poly::from_coeffs(base, num);
                let den = if fractions && rng.gen_bool(0.3) {
                    let dd = rng.gen_range(1..=degree.max(1));
                    let mut c: Vec<Elem> = (0..dd)
                        .map(|_| base.random(rng, height, degree, false))
                        .collect();
                    c.push(base.one());
                    Poly::from_coeffs(base, c)
                } else {
                    Poly::constant(base, base.one())
                };
                self.from_ratfn(num, den)
            }
        }
    }

    /// Random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        height: i64,
        degree: usize,
        fractions: bool,
    ) -> Elem {
        loop {
            let e = self.random(rng, height, degree, fractions);
            if !self.is_zero(&e) {
                return e;
            }
        }
    }

    /// Every element of a prime field, in residue order.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        self.prime_modulus().map(|p| (0..p).map(Elem::Fp).collect())
    }
}

/// Split on `sep` outside parentheses.
pub(crate) fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}
