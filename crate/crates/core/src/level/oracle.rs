use rayon::prelude::*;

use super::LevelValue;
use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::field::Elem;

/// Largest algebra (number of elements) the oracle enumerates.
pub const ORACLE_LIMIT: u128 = 10_000_000;

const NONE: u32 = u32::MAX;

/// Elements of a finite algebra encoded as base-`p` integers, coordinate
/// `i` at digit `i`.
struct Codec {
    p: u64,
    q: usize,
    size: u32,
}

impl Codec {
    fn decode(&self, mut idx: u32, out: &mut [u64]) {
        for d in out.iter_mut() {
            *d = (idx as u64) % self.p;
            idx = (idx as u64 / self.p) as u32;
        }
    }

    fn encode(&self, digits: &[u64]) -> u32 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d) as u32
    }

    /// `a - b`
    fn sub(&self, a: u32, b: u32) -> u32 {
        let mut x = vec![0; self.q];
        let mut y = vec![0; self.q];
        self.decode(a, &mut x);
        self.decode(b, &mut y);
        for (u, v) in x.iter_mut().zip(&y) {
            *u = (*u + self.p - v) % self.p;
        }
        self.encode(&x)
    }

    fn element(&self, alg: &Algebra, idx: u32) -> AlgebraElement {
        let mut d = vec![0; self.q];
        self.decode(idx, &mut d);
        alg.element(d.into_iter().map(Elem::Fp).collect()).unwrap()
    }
}

/// Squares of every element and, per value, its smallest nonzero root.
struct SquareTable {
    codec: Codec,
    /// `root[v]`: smallest nonzero `y` with `y² = v`
    root: Vec<u32>,
    /// distinct values `y²` for nonzero `y`, ascending
    values: Vec<u32>,
}

impl SquareTable {
    fn build(alg: &Algebra) -> Result<SquareTable> {
        let p = alg.field().prime_modulus().ok_or(Error::WrongField {
            expected: "prime field",
        })?;
        let q = alg.dim();
        let size = (p as u128).checked_pow(q as u32).unwrap_or(u128::MAX);
        if size > ORACLE_LIMIT {
            return Err(Error::TooLarge {
                size,
                limit: ORACLE_LIMIT,
            });
        }
        let codec = Codec {
            p,
            q,
            size: size as u32,
        };
        let residue = |e: &Elem| match e {
            Elem::Fp(r) => *r,
            _ => unreachable!(),
        };
        // structure constants: f_i f_j = c f_k
        let table: Vec<(usize, u64)> = alg
            .full_table()
            .iter()
            .flatten()
            .map(|bp| (bp.index - 1, residue(&bp.coeff)))
            .collect();
        let squares: Vec<u32> = (0..codec.size)
            .into_par_iter()
            .map_init(
                || (vec![0u64; q], vec![0u64; q]),
                |(y, out), idx| {
                    codec.decode(idx, y);
                    out.iter_mut().for_each(|o| *o = 0);
                    for i in 0..q {
                        if y[i] == 0 {
                            continue;
                        }
                        for j in 0..q {
                            if y[j] == 0 {
                                continue;
                            }
                            let (k, c) = table[i * q + j];
                            out[k] = (out[k] + c * (y[i] * y[j] % p)) % p;
                        }
                    }
                    codec.encode(out)
                },
            )
            .collect();
        let mut root = vec![NONE; codec.size as usize];
        for (y, &v) in squares.iter().enumerate().skip(1) {
            if root[v as usize] == NONE {
                root[v as usize] = y as u32;
            }
        }
        let values = (0..codec.size)
            .filter(|&v| root[v as usize] != NONE)
            .collect();
        Ok(SquareTable {
            codec,
            root,
            values,
        })
    }

    fn root(&self, v: u32) -> Option<u32> {
        let r = self.root[v as usize];
        (r != NONE).then_some(r)
    }

    /// `terms` square values summing to `target`; with `allow_zero_roots`
    /// a summand may be `0 = 0²`.
    fn split(&self, target: u32, terms: usize, allow_zero_roots: bool, out: &mut Vec<u32>) -> bool {
        if terms == 1 {
            if let Some(r) = self.root(target) {
                out.push(r);
                return true;
            }
            if allow_zero_roots && target == 0 {
                out.push(0);
                return true;
            }
            return false;
        }
        for &v in &self.values {
            out.push(self.root[v as usize]);
            if self.split(self.codec.sub(target, v), terms - 1, allow_zero_roots, out) {
                return true;
            }
            out.pop();
        }
        false
    }
}

/// Most summands the oracle tries before giving up. Finite algebras over
/// `F_p` have level at most 2 (scalars already do), so this is never hit.
const MAX_TERMS: usize = 4;

/// Level and sublevel of a finite algebra by exhaustive enumeration of the
/// squares of all `p^(2^t)` elements and of their sums.
pub fn brute_level_oracle(alg: &Algebra) -> Result<(LevelValue, LevelValue)> {
    let table = SquareTable::build(alg)?;
    let c = &table.codec;
    let minus_one = {
        let mut d = vec![0; c.q];
        d[0] = c.p - 1;
        c.encode(&d)
    };
    let elements =
        |idx: &[u32]| -> Vec<AlgebraElement> { idx.iter().map(|&i| c.element(alg, i)).collect() };

    let mut level = LevelValue::Range {
        lo: MAX_TERMS + 1,
        hi: None,
        witness: None,
    };
    for k in 1..=MAX_TERMS {
        let mut roots = Vec::new();
        if table.split(minus_one, k, true, &mut roots) {
            level = LevelValue::level(elements(&roots));
            break;
        }
    }

    // every sum of n + 1 nonzero squares, n below the level; the level
    // witness with a leading 1 bounds the sublevel from above
    let hi = level.finite().unwrap_or(MAX_TERMS);
    let mut sublevel = None;
    for n in 1..hi {
        let mut roots = Vec::new();
        if table.split(0, n + 1, false, &mut roots) {
            sublevel = Some(LevelValue::sublevel(elements(&roots)));
            break;
        }
    }
    let sublevel = match (sublevel, &level) {
        (Some(s), _) => s,
        (None, LevelValue::Finite { witness, .. }) => {
            let mut w = vec![alg.one()];
            w.extend(witness.iter().cloned());
            LevelValue::sublevel(w)
        }
        (None, _) => LevelValue::Range {
            lo: hi,
            hi: None,
            witness: None,
        },
    };
    Ok((level, sublevel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn alg(p: u64, alphas: &str) -> Algebra {
        Algebra::parse(&Field::prime(p).unwrap(), alphas).unwrap()
    }

    #[test]
    fn examples() {
        let (s, _) = brute_level_oracle(&alg(7, "1,1")).unwrap();
        assert_eq!(s.finite(), Some(1));
        let (s, sb) = brute_level_oracle(&alg(7, "4")).unwrap();
        assert_eq!(s.finite(), Some(2));
        assert_eq!(sb.finite(), Some(2));
        for alphas in ["", "1", "2", "1,5", "3,7"] {
            let (s, sb) = brute_level_oracle(&alg(13, alphas)).unwrap();
            assert_eq!(s.finite(), Some(1), "{alphas}");
            assert_eq!(sb.finite(), Some(1), "{alphas}");
        }
    }

    #[test]
    fn prime_fields() {
        // residue search: -1 is a square exactly when p = 1 mod 4
        for p in [3u64, 5, 7, 11, 13, 17, 19] {
            let (s, sb) = brute_level_oracle(&alg(p, "")).unwrap();
            let want = if p % 4 == 1 { 1 } else { 2 };
            assert_eq!(s.finite(), Some(want));
            assert_eq!(sb.finite(), Some(want));
        }
    }

    #[test]
    fn nilpotents_give_sublevel_one() {
        // pure part <1,1,-1> is isotropic: some u ≠ 0 has u² = 0
        let (_, sb) = brute_level_oracle(&alg(3, "1,1")).unwrap();
        assert_eq!(sb.finite(), Some(1));
        let w = sb.witness().unwrap();
        assert!(w.iter().all(|y| !y.is_zero()));
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            brute_level_oracle(&alg(7, "1,1,1,1")),
            Err(Error::TooLarge { .. })
        ));
        let q = Algebra::parse(&Field::rationals(), "1").unwrap();
        assert!(matches!(
            brute_level_oracle(&q),
            Err(Error::WrongField { .. })
        ));
    }
}
