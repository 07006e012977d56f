//! Regular diagonal quadratic forms `<a_1, ..., a_m>` and the trace, pure
//! trace and norm forms of a Cayley-Dickson algebra.

use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// `<a_1, ..., a_m>` with every `a_i` nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    field: Field,
    coeffs: Vec<Elem>,
}

/// Result of the sufficient subform test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubformVerdict {
    Yes,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HyperbolicVerdict {
    Yes,
    No,
    Unknown,
}

impl DiagonalForm {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> Result<DiagonalForm> {
        if coeffs.is_empty() {
            return Err(Error::Invalid(
                "a form needs at least one coefficient".into(),
            ));
        }
        if let Some(i) = coeffs.iter().position(|c| field.is_zero(c)) {
            return Err(Error::ZeroCoefficient { index: i + 1 });
        }
        Ok(DiagonalForm {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn parse(field: &Field, coeffs: &str) -> Result<DiagonalForm> {
        DiagonalForm::new(field, field.parse_list(coeffs)?)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    fn same_field(&self, other: &DiagonalForm) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DescriptorMismatch);
        }
        Ok(())
    }

    pub fn orth_sum(&self, other: &DiagonalForm) -> Result<DiagonalForm> {
        self.same_field(other)?;
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().cloned());
        Ok(DiagonalForm {
            field: self.field.clone(),
            coeffs,
        })
    }

    /// `n × φ = φ ⊥ ... ⊥ φ`.
    pub fn n_times(&self, n: usize) -> Result<DiagonalForm> {
        if n == 0 {
            return Err(Error::Invalid("n × φ needs n ≥ 1".into()));
        }
        Ok(DiagonalForm {
            field: self.field.clone(),
            coeffs: (0..n).flat_map(|_| self.coeffs.iter().cloned()).collect(),
        })
    }

    /// `xφ = <x> ⊗ φ`.
    pub fn scale(&self, x: &Elem) -> Result<DiagonalForm> {
        if self.field.is_zero(x) {
            return Err(Error::ZeroScalar);
        }
        Ok(DiagonalForm {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| self.field.mul(c, x)).collect(),
        })
    }

    pub fn neg(&self) -> DiagonalForm {
        self.scale(&self.field.from_i64(-1)).unwrap()
    }

    /// Coefficients `a_i b_j`, `i` outer and `j` inner.
    pub fn tensor(&self, other: &DiagonalForm) -> Result<DiagonalForm> {
        self.same_field(other)?;
        let f = &self.field;
        Ok(DiagonalForm {
            field: f.clone(),
            coeffs: self
                .coeffs
                .iter()
                .flat_map(|a| other.coeffs.iter().map(move |b| f.mul(a, b)))
                .collect(),
        })
    }

    /// `<1, a_1> ⊗ ... ⊗ <1, a_n>` in doubling order: the coefficient at
    /// index `s` is the product of the `a_i` whose bit `i - 1` is set in `s`,
    /// which matches the Cayley-Dickson basis order.
    pub fn pfister(field: &Field, gens: &[Elem]) -> Result<DiagonalForm> {
        if let Some(i) = gens.iter().position(|g| field.is_zero(g)) {
            return Err(Error::ZeroGenerator { index: i + 1 });
        }
        let mut coeffs = vec![field.one()];
        for g in gens {
            let doubled: Vec<Elem> = coeffs.iter().map(|c| field.mul(c, g)).collect();
            coeffs.extend(doubled);
        }
        Ok(DiagonalForm {
            field: field.clone(),
            coeffs,
        })
    }

    /// `φ'` where `φ = <1> ⊥ φ'`.
    pub fn pure_subform(&self) -> Result<DiagonalForm> {
        if self.rank() < 2 || !self.field.is_one(&self.coeffs[0]) {
            return Err(Error::NotUnital);
        }
        Ok(DiagonalForm {
            field: self.field.clone(),
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// `T_C = <1, β_2, ..., β_q>` with `f_i² = β_i`.
    pub fn trace_form(alg: &Algebra) -> DiagonalForm {
        DiagonalForm {
            field: alg.field().clone(),
            coeffs: alg.square_coefficients(),
        }
    }

    /// `T_P = <β_2, ..., β_q>`.
    pub fn pure_trace_form(alg: &Algebra) -> Result<DiagonalForm> {
        if alg.dim() < 2 {
            return Err(Error::DimensionOne);
        }
        let mut coeffs = alg.square_coefficients();
        coeffs.remove(0);
        Ok(DiagonalForm {
            field: alg.field().clone(),
            coeffs,
        })
    }

    /// `n_C = <1> ⊥ -T_P`.
    pub fn norm_form(alg: &Algebra) -> DiagonalForm {
        let f = alg.field();
        let one = DiagonalForm {
            field: f.clone(),
            coeffs: vec![f.one()],
        };
        match DiagonalForm::pure_trace_form(alg) {
            Ok(tp) => one.orth_sum(&tp.neg()).unwrap(),
            Err(_) => one,
        }
    }

    /// `Σ a_i v_i²`.
    pub fn evaluate(&self, v: &[Elem]) -> Result<Elem> {
        if v.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: v.len(),
            });
        }
        let f = &self.field;
        Ok(self
            .coeffs
            .iter()
            .zip(v)
            .fold(f.zero(), |acc, (a, x)| f.add(&acc, &f.mul(a, &f.square(x)))))
    }

    /// Product of the coefficients.
    pub fn determinant(&self) -> Elem {
        let f = &self.field;
        self.coeffs.iter().fold(f.one(), |acc, c| f.mul(&acc, c))
    }

    /// `Some(true)` if all coefficients share a sign under the real
    /// embedding; `None` outside the rationals.
    pub fn is_definite(&self) -> Option<bool> {
        let signs: Option<Vec<i8>> = self
            .coeffs
            .iter()
            .map(|c| self.field.real_sign(c))
            .collect();
        let signs = signs?;
        Some(signs.iter().all(|&s| s == signs[0]))
    }

    /// Injective embedding of `self`'s coefficients into `other`'s up to
    /// square classes. A sufficient criterion only: failure is `Unknown`.
    pub fn is_subform_semi(&self, other: &DiagonalForm) -> Result<SubformVerdict> {
        self.same_field(other)?;
        let f = &self.field;
        let adj: Vec<Vec<usize>> = self
            .coeffs
            .iter()
            .map(|a| {
                (0..other.rank())
                    .filter(|&j| f.same_square_class(a, &other.coeffs[j]))
                    .collect()
            })
            .collect();
        // augmenting-path bipartite matching
        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            seen: &mut [bool],
            owner: &mut [Option<usize>],
        ) -> bool {
            for &v in &adj[u] {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                if owner[v].is_none() || augment(owner[v].unwrap(), adj, seen, owner) {
                    owner[v] = Some(u);
                    return true;
                }
            }
            false
        }
        let mut owner = vec![None; other.rank()];
        for u in 0..self.rank() {
            let mut seen = vec![false; other.rank()];
            if !augment(u, &adj, &mut seen, &mut owner) {
                return Ok(SubformVerdict::Unknown);
            }
        }
        Ok(SubformVerdict::Yes)
    }

    /// `φ ≃ H ⊥ ... ⊥ H`?
    ///
    /// Necessary conditions (even rank, discriminant `(-1)^(m/2) det` a
    /// square, indefinite over the rationals) can answer `No`. Over prime
    /// fields rank and discriminant classify regular forms, so the answer
    /// is exact. Elsewhere a pairing of coefficients `a, b` with `-ab` a
    /// square proves `Yes`; otherwise `Unknown`.
    pub fn is_hyperbolic(&self) -> HyperbolicVerdict {
        let f = &self.field;
        let m = self.rank();
        if m % 2 == 1 {
            return HyperbolicVerdict::No;
        }
        let mut disc = self.determinant();
        if (m / 2) % 2 == 1 {
            disc = f.neg(&disc);
        }
        if !f.is_square(&disc) {
            return HyperbolicVerdict::No;
        }
        if f.prime_modulus().is_some() {
            return HyperbolicVerdict::Yes;
        }
        if self.is_definite() == Some(true) {
            return HyperbolicVerdict::No;
        }
        fn pair(f: &Field, rest: &mut Vec<Elem>) -> bool {
            let Some(a) = rest.pop() else {
                return true;
            };
            for i in 0..rest.len() {
                if f.is_square(&f.neg(&f.mul(&a, &rest[i]))) {
                    let b = rest.remove(i);
                    if pair(f, rest) {
                        return true;
                    }
                    rest.insert(i, b);
                }
            }
            rest.push(a);
            false
        }
        let mut rest = self.coeffs.clone();
        if pair(f, &mut rest) {
            HyperbolicVerdict::Yes
        } else {
            HyperbolicVerdict::Unknown
        }
    }

    pub fn format_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| self.field.format(c)).collect()
    }

    /// `{"coeffs": [...], "field": "<descriptor>"}`
    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.descriptor().to_string(),
            "coeffs": self.format_coeffs(),
        })
    }

    pub fn from_json(v: &Value) -> Result<DiagonalForm> {
        let bad = || Error::Invalid("form JSON needs `field` and `coeffs`".into());
        let field =
            Field::parse_descriptor(v.get("field").and_then(Value::as_str).ok_or_else(bad)?)?;
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| c.as_str().ok_or_else(bad).and_then(|s| field.parse(s)))
            .collect::<Result<Vec<_>>>()?;
        DiagonalForm::new(&field, coeffs)
    }
}

/// Symmetric matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    field: Field,
    rows: Vec<Vec<Elem>>,
}

impl GramMatrix {
    pub fn new(field: &Field, rows: Vec<Vec<Elem>>) -> Result<GramMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSymmetric);
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(GramMatrix {
            field: field.clone(),
            rows,
        })
    }

    pub fn diagonal(field: &Field, diag: &[Elem]) -> GramMatrix {
        let n = diag.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            diag[i].clone()
                        } else {
                            field.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        GramMatrix {
            field: field.clone(),
            rows,
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Congruence diagonalization by symmetric row and column elimination.
    /// A zero pivot is replaced by a nonzero diagonal entry further down or,
    /// failing that, fixed by adding a row/column with a nonzero off-diagonal
    /// entry (the pivot becomes `2 m_ij`).
    pub fn diagonalize(&self) -> Result<DiagonalForm> {
        let f = &self.field;
        let n = self.size();
        if n == 0 {
            return Err(Error::Singular);
        }
        let mut m = self.rows.clone();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            if f.is_zero(&m[i][i]) {
                if let Some(j) = (i + 1..n).find(|&j| !f.is_zero(&m[j][j])) {
                    m.swap(i, j);
                    for row in m.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !f.is_zero(&m[i][j])) {
                    for k in 0..n {
                        m[i][k] = f.add(&m[i][k], &m[j][k]);
                    }
                    for row in m.iter_mut() {
                        row[i] = f.add(&row[i], &row[j]);
                    }
                } else {
                    return Err(Error::Singular);
                }
            }
            let pivot = m[i][i].clone();
            for j in i + 1..n {
                if f.is_zero(&m[j][i]) {
                    continue;
                }
                let c = f.div(&m[j][i], &pivot)?;
                for k in 0..n {
                    let t = f.mul(&c, &m[i][k]);
                    m[j][k] = f.sub(&m[j][k], &t);
                }
                for row in m.iter_mut() {
                    let t = f.mul(&c, &row[i]);
                    row[j] = f.sub(&row[j], &t);
                }
            }
            diag.push(pivot);
        }
        DiagonalForm::new(f, diag)
    }

    /// Determinant by fraction-field Gaussian elimination.
    pub fn determinant(&self) -> Elem {
        let f = &self.field;
        let n = self.size();
        let mut m = self.rows.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !f.is_zero(&m[r][c])) else {
                return f.zero();
            };
            if p != c {
                m.swap(p, c);
                det = f.neg(&det);
            }
            det = f.mul(&det, &m[c][c]);
            let inv = f.inv(&m[c][c]).unwrap();
            for r in c + 1..n {
                if f.is_zero(&m[r][c]) {
                    continue;
                }
                let factor = f.mul(&m[r][c], &inv);
                for k in c..n {
                    let t = f.mul(&factor, &m[c][k]);
                    m[r][k] = f.sub(&m[r][k], &t);
                }
            }
        }
        det
    }
}
