use cdalg::level::{isotropy, represents, SearchBudget};
use cdalg::{Algebra, DiagonalForm, Elem, Field};
use proptest::prelude::*;

fn residues(p: u64, n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..p, n)
}

fn elems(v: &[u64]) -> Vec<Elem> {
    v.iter().map(|&r| Elem::Fp(r)).collect()
}

proptest! {
    #[test]
    fn octonions_are_alternative(
        alphas in prop::collection::vec(1u64..11, 3),
        x in residues(11, 8),
        y in residues(11, 8),
    ) {
        let f = Field::prime(11).unwrap();
        let alg = Algebra::new(&f, elems(&alphas)).unwrap();
        let x = alg.element(elems(&x)).unwrap();
        let y = alg.element(elems(&y)).unwrap();
        let xx = x.mul(&x).unwrap();
        prop_assert_eq!(xx.mul(&y).unwrap(), x.mul(&x.mul(&y).unwrap()).unwrap());
        prop_assert_eq!(
            alg.norm(&x.mul(&y).unwrap()),
            f.mul(&alg.norm(&x), &alg.norm(&y))
        );
    }

    #[test]
    fn conjugation_reverses_products(
        alphas in prop::collection::vec(1u64..7, 4),
        x in residues(7, 16),
        y in residues(7, 16),
    ) {
        let f = Field::prime(7).unwrap();
        let alg = Algebra::new(&f, elems(&alphas)).unwrap();
        let x = alg.element(elems(&x)).unwrap();
        let y = alg.element(elems(&y)).unwrap();
        prop_assert_eq!(
            x.mul(&y).unwrap().conjugate(),
            y.conjugate().mul(&x.conjugate()).unwrap()
        );
    }

    #[test]
    fn rational_field_axioms(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let q = Field::rationals();
        let x = q.div(&q.from_i64(a), &q.from_i64(b)).unwrap();
        let y = q.div(&q.from_i64(c), &q.from_i64(d)).unwrap();
        prop_assert_eq!(q.sub(&q.add(&x, &y), &y), x.clone());
        if !q.is_zero(&y) {
            prop_assert_eq!(q.mul(&q.div(&x, &y).unwrap(), &y), x.clone());
        }
        prop_assert_eq!(q.parse(&q.format(&x)).unwrap(), x);
    }

    #[test]
    fn ternary_forms_mod_p_are_isotropic(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17]), seed in 0u64..1000) {
        let f = Field::prime(p).unwrap();
        let coeffs: Vec<Elem> = (0..3).map(|i| Elem::Fp(1 + (seed * 7 + i * 13) % (p - 1))).collect();
        let form = DiagonalForm::new(&f, coeffs).unwrap();
        let r = isotropy(&form, &SearchBudget::default());
        let w = r.witness().unwrap();
        prop_assert!(f.is_zero(&form.evaluate(w).unwrap()));
    }

    #[test]
    fn binary_forms_mod_p_are_universal(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), a in 1u64..3, c in 1u64..13) {
        let f = Field::prime(p).unwrap();
        let form = DiagonalForm::new(&f, vec![Elem::Fp(a % p), f.one()]).unwrap();
        let target = Elem::Fp(c % p);
        prop_assume!(!f.is_zero(&target));
        let w = represents(&form, &target, &SearchBudget::default()).unwrap();
        prop_assert_eq!(form.evaluate(&w).unwrap(), target);
    }
}
