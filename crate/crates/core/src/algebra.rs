//! Algebras obtained from a field by repeated Cayley-Dickson doubling.
//!
//! `A_t = A_{t-1} ⊕ A_{t-1}u` with `u² = α_t` and product
//!
//! ```text
//! (a1, a2)(b1, b2) = (a1 b1 + α conj(b2) a2,  a2 conj(b1) + b2 a1)
//! ```
//!
//! Elements are dense coefficient vectors in the doubling basis: for
//! `A_t`, basis vector `f_{k + 2^(t-1)} = f_k · u`, so the octonion basis is
//! `1, f2, f3 = v, f4 = f2 v, f5 = u, f6 = f2 u, f7 = f3 u, f8 = f4 u`.
//! Indices in the public API are 1-based to match that labelling.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// `f_i f_j = coeff · f_index` (index 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisProduct {
    pub index: usize,
    pub coeff: Elem,
}

struct Inner {
    field: Field,
    alphas: Vec<Elem>,
    table: OnceLock<Vec<Vec<BasisProduct>>>,
}

/// Descriptor of `K{α_1, ..., α_t}`: a field and the doubling parameters.
#[derive(Clone)]
pub struct Algebra(Arc<Inner>);

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphas: Vec<String> = self
            .alphas()
            .iter()
            .map(|a| self.field().format(a))
            .collect();
        write!(
            f,
            "Algebra({}; [{}])",
            self.field().descriptor(),
            alphas.join(", ")
        )
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field && self.0.alphas == other.0.alphas)
    }
}

impl Eq for Algebra {}

/// An element together with the algebra it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    alg: Algebra,
    coeffs: Vec<Elem>,
}

fn conj_slice(f: &Field, a: &[Elem]) -> Vec<Elem> {
    let mut out = Vec::with_capacity(a.len());
    out.push(a[0].clone());
    out.extend(a[1..].iter().map(|c| f.neg(c)));
    out
}

fn is_zero_slice(f: &Field, a: &[Elem]) -> bool {
    a.iter().all(|c| f.is_zero(c))
}

/// Product in the algebra with the given parameters; `a.len() = 2^alphas.len()`.
fn mul_rec(f: &Field, alphas: &[Elem], a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let n = a.len();
    if n == 1 {
        return vec![f.mul(&a[0], &b[0])];
    }
    if is_zero_slice(f, a) || is_zero_slice(f, b) {
        return vec![f.zero(); n];
    }
    let h = n / 2;
    let (alpha, lower) = alphas.split_last().unwrap();
    let (a1, a2) = a.split_at(h);
    let (b1, b2) = b.split_at(h);
    let a2_zero = is_zero_slice(f, a2);
    let b2_zero = is_zero_slice(f, b2);

    let mut first = mul_rec(f, lower, a1, b1);
    if !a2_zero && !b2_zero {
        let t = mul_rec(f, lower, &conj_slice(f, b2), a2);
        for (x, y) in first.iter_mut().zip(&t) {
            *x = f.add(x, &f.mul(alpha, y));
        }
    }
    let mut second = if a2_zero {
        vec![f.zero(); h]
    } else {
        mul_rec(f, lower, a2, &conj_slice(f, b1))
    };
    if !b2_zero {
        let t = mul_rec(f, lower, b2, a1);
        for (x, y) in second.iter_mut().zip(&t) {
            *x = f.add(x, y);
        }
    }
    first.extend(second);
    first
}

impl Algebra {
    /// `t = alphas.len()`; `t = 0` is the field itself.
    pub fn new(field: &Field, alphas: Vec<Elem>) -> Result<Algebra> {
        if let Some(i) = alphas.iter().position(|a| field.is_zero(a)) {
            return Err(Error::ZeroAlpha { index: i + 1 });
        }
        Ok(Algebra(Arc::new(Inner {
            field: field.clone(),
            alphas,
            table: OnceLock::new(),
        })))
    }

    /// Parse comma separated parameters in the field's expression grammar.
    pub fn parse(field: &Field, alphas: &str) -> Result<Algebra> {
        Algebra::new(field, field.parse_list(alphas)?)
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn alphas(&self) -> &[Elem] {
        &self.0.alphas
    }

    pub fn t(&self) -> usize {
        self.0.alphas.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.t()
    }

    /// Same algebra with the last doubling removed.
    pub fn parent(&self) -> Option<Algebra> {
        let (_, lower) = self.alphas().split_last()?;
        Some(Algebra::new(self.field(), lower.to_vec()).unwrap())
    }

    pub fn element(&self, coeffs: Vec<Elem>) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        Ok(AlgebraElement {
            alg: self.clone(),
            coeffs,
        })
    }

    /// Parse a comma separated coefficient list.
    pub fn parse_element(&self, text: &str) -> Result<AlgebraElement> {
        self.element(self.field().parse_list(text)?)
    }

    pub fn zero(&self) -> AlgebraElement {
        self.scalar(self.field().zero())
    }

    pub fn one(&self) -> AlgebraElement {
        self.scalar(self.field().one())
    }

    pub fn scalar(&self, c: Elem) -> AlgebraElement {
        let mut coeffs = vec![self.field().zero(); self.dim()];
        coeffs[0] = c;
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    /// Basis vector `f_i`, 1-based (`f_1 = 1`).
    pub fn basis(&self, i: usize) -> AlgebraElement {
        assert!((1..=self.dim()).contains(&i), "basis index out of range");
        let mut coeffs = vec![self.field().zero(); self.dim()];
        coeffs[i - 1] = self.field().one();
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    pub fn random<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        height: i64,
        degree: usize,
        fractions: bool,
    ) -> AlgebraElement {
        let coeffs = (0..self.dim())
            .map(|_| self.field().random(rng, height, degree, fractions))
            .collect();
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.alg != *self {
            return Err(Error::DescriptorMismatch);
        }
        Ok(())
    }

    /// Product of raw coefficient vectors.
    pub fn mul_coeffs(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        mul_rec(self.field(), self.alphas(), a, b)
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(AlgebraElement {
            alg: self.clone(),
            coeffs: self.mul_coeffs(&x.coeffs, &y.coeffs),
        })
    }

    pub fn conjugate(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            coeffs: conj_slice(self.field(), &x.coeffs),
        }
    }

    /// `t(x) = x + conj(x) = 2 x_1`.
    pub fn trace(&self, x: &AlgebraElement) -> Elem {
        let f = self.field();
        f.add(&x.coeffs[0], &x.coeffs[0])
    }

    /// Scalar part of `x · conj(x)`; the pure part of that product is zero.
    pub fn norm(&self, x: &AlgebraElement) -> Elem {
        let f = self.field();
        let mut p = self.mul_coeffs(&x.coeffs, &conj_slice(f, &x.coeffs));
        assert!(is_zero_slice(f, &p[1..]), "x·conj(x) must be a scalar");
        p.swap_remove(0)
    }

    pub fn scalar_part(&self, x: &AlgebraElement) -> Elem {
        x.coeffs[0].clone()
    }

    pub fn pure_part(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut coeffs = x.coeffs.clone();
        coeffs[0] = self.field().zero();
        AlgebraElement {
            alg: self.clone(),
            coeffs,
        }
    }

    /// `f_i f_j` computed from the doubling product (1-based indices).
    pub fn basis_product(&self, i: usize, j: usize) -> BasisProduct {
        if let Some(table) = self.0.table.get() {
            return table[i - 1][j - 1].clone();
        }
        self.compute_basis_product(i, j)
    }

    fn compute_basis_product(&self, i: usize, j: usize) -> BasisProduct {
        let p = self.mul_coeffs(&self.basis(i).coeffs, &self.basis(j).coeffs);
        let f = self.field();
        let nonzero: Vec<usize> = (0..p.len()).filter(|&k| !f.is_zero(&p[k])).collect();
        assert_eq!(nonzero.len(), 1, "basis products are monomial");
        let k = nonzero[0];
        BasisProduct {
            index: k + 1,
            coeff: p[k].clone(),
        }
    }

    /// The full structure-constant table, computed once per descriptor.
    pub fn full_table(&self) -> &[Vec<BasisProduct>] {
        self.0.table.get_or_init(|| {
            let n = self.dim();
            (1..=n)
                .map(|i| (1..=n).map(|j| self.compute_basis_product(i, j)).collect())
                .collect()
        })
    }

    /// `f_i² = β_i · 1` for every basis vector.
    pub fn square_coefficients(&self) -> Vec<Elem> {
        (1..=self.dim())
            .map(|i| {
                let bp = self.basis_product(i, i);
                debug_assert_eq!(bp.index, 1);
                bp.coeff
            })
            .collect()
    }

    /// Label of basis vector `f_i` as printed in tables.
    pub fn basis_label(i: usize) -> String {
        if i == 1 {
            "1".to_string()
        } else {
            format!("f{i}")
        }
    }

    /// `coeff·f_index`, e.g. `-a*f3`, `a*b`, `f4`.
    pub fn format_product(&self, bp: &BasisProduct) -> String {
        let mono = if bp.index == 1 {
            String::new()
        } else {
            Self::basis_label(bp.index)
        };
        crate::field::scaled_term(self.field(), &bp.coeff, &mono)
    }

    pub fn format_element(&self, x: &AlgebraElement) -> String {
        let f = self.field();
        let terms: Vec<String> = x
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(k, c)| {
                let mono = if k == 0 {
                    String::new()
                } else {
                    Self::basis_label(k + 1)
                };
                let s = crate::field::scaled_term(f, c, &mono);
                if k == 0 && crate::field::has_top_level_sum(&s) {
                    format!("({s})")
                } else {
                    s
                }
            })
            .collect();
        crate::field::join_terms(&terms)
    }

    /// The multiplication table laid out with row and column labels.
    pub fn table_text(&self) -> String {
        let n = self.dim();
        let table = self.full_table();
        let mut cells: Vec<Vec<String>> = Vec::with_capacity(n + 1);
        let mut header = vec!["·".to_string()];
        header.extend((1..=n).map(Self::basis_label));
        cells.push(header);
        for (i, row) in table.iter().enumerate() {
            let mut r = vec![Self::basis_label(i + 1)];
            r.extend(row.iter().map(|bp| self.format_product(bp)));
            cells.push(r);
        }
        let widths: Vec<usize> = (0..=n)
            .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap())
            .collect();
        let mut out = String::new();
        for (ri, r) in cells.iter().enumerate() {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            out.push_str(&line[0]);
            out.push_str(" |");
            for s in &line[1..] {
                out.push(' ');
                out.push_str(s);
            }
            out = out.trim_end().to_string();
            out.push('\n');
            if ri == 0 {
                let total = widths.iter().sum::<usize>() + n + 2;
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        out
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        is_zero_slice(self.alg.field(), &self.coeffs)
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.alg.multiply(self, other)
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.alg.check(other)?;
        let f = self.alg.field();
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(&self.alg.field().from_i64(-1))
    }

    pub fn scale(&self, c: &Elem) -> AlgebraElement {
        let f = self.alg.field();
        AlgebraElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    pub fn conjugate(&self) -> AlgebraElement {
        self.alg.conjugate(self)
    }

    pub fn square(&self) -> AlgebraElement {
        self.mul(self).unwrap()
    }

    /// Scalar value if the element lies in `K·1`.
    pub fn as_scalar(&self) -> Option<&Elem> {
        let f = self.alg.field();
        is_zero_slice(f, &self.coeffs[1..]).then(|| &self.coeffs[0])
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alg.format_element(self))
    }
}
