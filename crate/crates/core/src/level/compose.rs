use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// `(Σ a_i²)(Σ b_i²) = c_1² + Σ rest_j²` with `c_1 = Σ a_i b_i`, for
/// `n ∈ {1, 2, 4, 8}`.
///
/// With every doubling parameter `-1` the norm is the sum of `n` squares
/// and is multiplicative up to dimension 8; the coefficients of
/// `conj(x)·y` give `c_1` (scalar part) and `rest`.
pub fn compose_squares(field: &Field, a: &[Elem], b: &[Elem]) -> Result<(Elem, Vec<Elem>)> {
    let n = a.len();
    if !matches!(n, 1 | 2 | 4 | 8) {
        return Err(Error::UnsupportedN(n));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let t = n.trailing_zeros() as usize;
    let alg = Algebra::new(field, vec![field.from_i64(-1); t])?;
    let x = alg.element(a.to_vec())?;
    let y = alg.element(b.to_vec())?;
    let mut z = x.conjugate().mul(&y)?.into_coeffs();
    let rest = z.split_off(1);
    Ok((z.pop().unwrap(), rest))
}
