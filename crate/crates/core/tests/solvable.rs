use latlab_core::linalg::rat;
use latlab_core::solvable::{
    closure_check_with, covolume_by_enumeration, covolume_product, doubling_primes, first_primes, gamma_closure_check,
    heisenberg_reduce, in_unit_cube, indices, lattice_certificate, HeisenbergElement, LatticeVerdict, TruncatedModel,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::collections::HashSet;

type Elem = (Vec<u64>, Vec<u64>);

/// `[G_m : Gamma_m]` by walking right cosets, written independently of the
/// library: `(a, b)(c, c - 1) = (ac, a(c - 1) + b)`.
fn coset_count(primes: &[u64], m: usize) -> usize {
    let mut g: Vec<Elem> = vec![(vec![], vec![])];
    for (n, &p) in primes.iter().enumerate() {
        g = g
            .into_iter()
            .flat_map(|(a, b)| {
                let bs: Vec<u64> = if n < m { (0..p).collect() } else { vec![0] };
                (1..p).flat_map(move |x| {
                    let (a, b) = (a.clone(), b.clone());
                    bs.clone().into_iter().map(move |y| ([a.as_slice(), &[x]].concat(), [b.as_slice(), &[y]].concat()))
                })
            })
            .collect();
    }
    let mut gamma: Vec<Vec<u64>> = vec![vec![]];
    for (n, &p) in primes.iter().enumerate() {
        let choices: Vec<u64> = if n < m { (1..p).collect() } else { vec![1] };
        gamma = gamma.into_iter().flat_map(|c| choices.iter().map(move |&x| [c.as_slice(), &[x]].concat())).collect();
    }
    let mut seen: HashSet<Elem> = HashSet::new();
    let mut cosets = 0;
    for x in &g {
        if seen.contains(x) {
            continue;
        }
        cosets += 1;
        for c in &gamma {
            let a: Vec<u64> = (0..primes.len()).map(|n| x.0[n] * c[n] % primes[n]).collect();
            let b: Vec<u64> = (0..primes.len())
                .map(|n| (x.0[n] * ((c[n] + primes[n] - 1) % primes[n]) + x.1[n]) % primes[n])
                .collect();
            seen.insert((a, b));
        }
    }
    cosets
}

fn q(n: u128, d: u128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn covolume_of_the_five_seven_eleven_truncation() {
    let primes = [5, 7, 11];
    assert_eq!(covolume_product(&primes, 3).unwrap(), rat(77, 48));
    let counted = covolume_by_enumeration(&primes, 3).unwrap();
    assert_eq!(counted.covolume, rat(77, 48));
    // independent coset walk, normalized by the compact part 4 * 6 * 10
    assert_eq!(coset_count(&primes, 3), 385);
    assert_eq!(counted.cosets, 385);
    assert_eq!(covolume_product(&primes, 0).unwrap(), rat(1, 1));
}

#[test]
fn indices_are_p_and_p_minus_one() {
    let primes = [5, 7, 11];
    for m in 1..=3 {
        let r = indices(&primes, m).unwrap();
        assert!(r.enumerated);
        assert_eq!((r.g_index, r.gamma_index), (primes[m - 1], primes[m - 1] - 1));
    }
    let two = indices(&[3, 2], 2).unwrap();
    assert_eq!((two.g_index, two.gamma_index), (2, 1));
}

#[test]
fn covolume_times_lattice_order_is_group_order() {
    let primes = first_primes(6);
    assert_eq!(primes, vec![2, 3, 5, 7, 11, 13]);
    for m in 0..=6 {
        let model = TruncatedModel::new(&primes, m).unwrap();
        let lhs = covolume_product(&primes, m).unwrap() * q(model.order_gamma(m), 1) * q(model.compact_order(), 1);
        assert_eq!(lhs, q(model.order_g(m), 1), "m = {m}");
        if model.order_g(m) <= 200_000 {
            let cosets = coset_count(&primes[..m], m) as u128;
            assert_eq!(q(cosets, model.compact_order()), covolume_product(&primes, m).unwrap(), "m = {m}");
        }
    }
}

#[test]
fn partial_products_increase() {
    let c = lattice_certificate(&doubling_primes(5), 5, &rat(1, 1)).unwrap();
    assert_eq!(doubling_primes(5), vec![5, 11, 23, 47, 97]);
    assert!(c.strictly_increasing);
    assert_eq!(c.verdict, LatticeVerdict::ConsistentNonUniform);
    let all = lattice_certificate(&first_primes(1000), 1000, &rat(1, 1)).unwrap();
    assert_eq!(all.verdict, LatticeVerdict::NotLatticeCandidate);
    let one = lattice_certificate(&[7], 1, &rat(1, 1)).unwrap();
    assert_eq!(one.verdict, LatticeVerdict::StabilizesAtOne);
}

#[test]
fn affine_subgroup_closure() {
    assert!(gamma_closure_check(&[2, 3, 5, 7, 11, 13, 101, 1009], 500, 3).unwrap());
    // (a, a) is not closed: (2, 2)(3, 3) = (6, 8)
    let bad = closure_check_with(&[5], 0, 0, |a, p| (a % p, a % p)).unwrap();
    assert!(!bad[0].closed);
    assert!(gamma_closure_check(&[9], 10, 0).is_err());
}

#[test]
fn heisenberg_examples() {
    let g = HeisenbergElement::new(rat(5, 2), rat(-3, 4), rat(13, 4));
    let s = heisenberg_reduce(&g);
    assert!(s.gamma.is_integral());
    assert!(in_unit_cube(&s.rest));
    assert_eq!(s.gamma.mul(&s.rest), g);
    let inside = HeisenbergElement::new(rat(1, 2), rat(1, 4), rat(3, 4));
    assert_eq!(heisenberg_reduce(&inside).gamma, HeisenbergElement::identity());
    let integral = HeisenbergElement::new(rat(3, 1), rat(-2, 1), rat(7, 1));
    assert_eq!(heisenberg_reduce(&integral).rest, HeisenbergElement::identity());
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn cube_coordinate() -> impl Strategy<Value = BigRational> {
    (1i64..12).prop_flat_map(|d| (0..d).prop_map(move |n| rat(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn heisenberg_reduction_recomposes(x in rational(), y in rational(), z in rational()) {
        let g = HeisenbergElement::new(x, y, z);
        let s = heisenberg_reduce(&g);
        prop_assert!(s.gamma.is_integral());
        prop_assert!(in_unit_cube(&s.rest));
        prop_assert_eq!(s.gamma.mul(&s.rest), g);
    }

    #[test]
    fn heisenberg_reduction_is_unique(
        a in -20i64..20, b in -20i64..20, c in -20i64..20,
        x in cube_coordinate(), y in cube_coordinate(), z in cube_coordinate(),
    ) {
        let gamma = HeisenbergElement::new(rat(a, 1), rat(b, 1), rat(c, 1));
        let rest = HeisenbergElement::new(x, y, z);
        let s = heisenberg_reduce(&gamma.mul(&rest));
        prop_assert_eq!(s.gamma, gamma);
        prop_assert_eq!(s.rest, rest);
    }
}
