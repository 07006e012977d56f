//! Dense univariate polynomials over a [`Field`].
//!
//! Coefficients are stored lowest degree first with trailing zeros stripped,
//! so the zero polynomial is the empty vector and `degree = len - 1`.

use super::{Elem, Field};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    pub(crate) coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(f: &Field, c: Elem) -> Self {
        Self::from_coeffs(f, vec![c])
    }

    pub fn from_coeffs(f: &Field, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `c * x^k`
    pub fn monomial(f: &Field, c: Elem, k: usize) -> Self {
        if f.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![f.zero(); k];
        coeffs.push(c);
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    /// Exponent of the lowest nonzero term.
    pub fn order(&self, f: &Field) -> Option<usize> {
        self.coeffs.iter().position(|c| !f.is_zero(c))
    }

    pub fn is_one(&self, f: &Field) -> bool {
        self.coeffs.len() == 1 && f.is_one(&self.coeffs[0])
    }

    pub fn add(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Poly::from_coeffs(f, out)
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, f: &Field, other: &Poly) -> Poly {
        self.add(f, &other.neg(f))
    }

    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::from_coeffs(f, out)
    }

    pub fn scale(&self, f: &Field, c: &Elem) -> Poly {
        if f.is_zero(c) {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, f: &Field, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![f.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divide by `x^k`; the low `k` coefficients must be zero.
    pub fn unshift(&self, k: usize) -> Poly {
        Poly {
            coeffs: self.coeffs[k.min(self.coeffs.len())..].to_vec(),
        }
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn divrem(&self, f: &Field, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = f
            .inv(divisor.lead().unwrap())
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + dd], &lead_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                if !f.is_zero(b) {
                    rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, b));
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(f, quot), Poly::from_coeffs(f, rem))
    }

    /// Scale to leading coefficient one; returns the removed leading coefficient.
    pub fn monic(&self, f: &Field) -> (Elem, Poly) {
        match self.lead() {
            None => (f.zero(), Poly::zero()),
            Some(lc) if f.is_one(lc) => (lc.clone(), self.clone()),
            Some(lc) => {
                let inv = f.inv(lc).expect("nonzero leading coefficient");
                (lc.clone(), self.scale(f, &inv))
            }
        }
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, f: &Field, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return Poly::constant(f, f.one());
            }
            let (_, r) = a.divrem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f).1
    }

    /// Square root in the polynomial ring, if one exists.
    pub fn sqrt(&self, f: &Field) -> Option<Poly> {
        let Some(deg) = self.degree() else {
            return Some(Poly::zero());
        };
        if deg % 2 == 1 {
            return None;
        }
        let m = deg / 2;
        let top = f.sqrt(self.lead().unwrap())?;
        let two_top_inv = f.inv(&f.add(&top, &top)).ok()?;
        let mut root = vec![f.zero(); m + 1];
        root[m] = top;
        for k in (0..m).rev() {
            let partial = Poly::from_coeffs(f, root.clone());
            let residual = self.sub(f, &partial.mul(f, &partial));
            let c = residual
                .coeffs
                .get(m + k)
                .cloned()
                .unwrap_or_else(|| f.zero());
            root[k] = f.mul(&c, &two_top_inv);
        }
        let root = Poly::from_coeffs(f, root);
        (root.mul(f, &root) == *self).then_some(root)
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, f: &Field, x: &Elem) -> Elem {
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }
}
