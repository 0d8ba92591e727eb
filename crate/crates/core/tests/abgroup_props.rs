use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use zcycles::abgroup::*;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..10, c), r))
}

fn small_group() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..7, 1..4)
}

/// Tensor power by the naive presentation: pure tensors of cyclic generators,
/// one torsion relation per slot.
fn brute_tensor_order(moduli: &[i64], r: usize) -> BigInt {
    let k = moduli.len();
    let count = k.pow(r as u32);
    let mut rels = Vec::new();
    for t in 0..count {
        let mut idx = vec![0; r];
        let mut x = t;
        for s in (0..r).rev() {
            idx[s] = x % k;
            x /= k;
        }
        for &i in &idx {
            let mut row = vec![BigInt::zero(); count];
            row[t] = BigInt::from(moduli[i]);
            rels.push(row);
        }
    }
    let m = Matrix::from_rows(rels, count);
    snf(&m).diag.iter().product()
}

proptest! {
    #[test]
    fn snf_round_trip(rows in small_matrix()) {
        let m = Matrix::from_i64(&rows);
        let s = snf(&m);
        let prod = s.left.mul(&m).mul(&s.right);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let expect = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&prod[(i, j)], &expect);
            }
        }
        prop_assert_eq!(s.left.determinant().magnitude().clone(), 1u32.into());
        prop_assert_eq!(s.right.determinant().magnitude().clone(), 1u32.into());
    }

    #[test]
    fn tensor_matches_brute_force(moduli in small_group(), r in 1usize..4) {
        let g = FgAbGroup::from_i64(&moduli);
        let tp = tensor_power(&g, r);
        let gm: Vec<i64> = g.invariant_factors().iter().map(|d| i64::try_from(d).unwrap()).collect();
        prop_assert_eq!(tp.group().order().unwrap(), brute_tensor_order(&gm, r));
    }

    #[test]
    fn sym_wedge_index(moduli in small_group(), r in 2usize..4) {
        let g = FgAbGroup::from_i64(&moduli);
        let w = wedge_power(&g, r, false);
        let s = sym_invariants(&w.tensor);
        let total = w.tensor.group().order().unwrap();
        prop_assert_eq!(total, s.order().unwrap() * w.group.order().unwrap());
        for gen in s.generators() {
            prop_assert!(w.group.is_zero(&w.projection.apply(&gen)));
        }
    }

    #[test]
    fn kernel_is_exact(moduli in small_group(), target in small_group(), seed in prop::collection::vec(-20i64..20, 9)) {
        let src = FgAbGroup::from_i64(&moduli);
        let tgt = FgAbGroup::from_i64(&target);
        // build a well-defined map by scaling each column by the target exponent over gcd
        let e = tgt.exponent().unwrap();
        let cols: Vec<Elem> = (0..src.ngens()).map(|i| {
            let d = &src.invariant_factors()[i];
            let k = &e / num_integer::Integer::gcd(&e, d);
            (0..tgt.ngens()).map(|j| BigInt::from(seed[(i * 3 + j) % 9]) * &k).collect()
        }).collect();
        let h = AbHom::from_images(src.clone(), tgt.clone(), &cols).unwrap();
        let ker = h.kernel();
        let im = h.image();
        for x in src.elements() {
            prop_assert_eq!(ker.contains(&x), tgt.is_zero(&h.apply(&x)));
            prop_assert!(im.contains(&h.apply(&x)));
        }
        prop_assert_eq!(ker.order().unwrap() * im.order().unwrap(), src.order().unwrap());
    }

    #[test]
    fn quotient_is_exact(moduli in small_group(), gen in prop::collection::vec(0i64..7, 3)) {
        let g = FgAbGroup::from_i64(&moduli);
        let x: Elem = g.reduced((0..g.ngens()).map(|i| BigInt::from(gen[i % 3])).collect());
        let s = Subgroup::new(g.clone(), &[x]);
        let (q, p) = quotient(&g, &s);
        for y in g.elements() {
            prop_assert_eq!(q.is_zero(&p.apply(&y)), s.contains(&y));
        }
        prop_assert_eq!(q.order().unwrap() * s.order().unwrap(), g.order().unwrap());
    }
}
