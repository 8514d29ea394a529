use latlab_core::hyp_geom::BoundaryPoint;
use latlab_core::linalg::rat;
use latlab_core::presets::sl2z;
use latlab_core::smallness::{
    commutator, commutator_ladder, cyclic_circle_defect, icosahedral_group, jordan_abelian_index_with,
    margulis_short_subgroup, nilpotency_class, quaternion_group, rotation3, so3_angle, su2_angle, FiniteGroup,
    MatrixSet, NilpotencyVerdict, ShortSubgroupKind,
};
use latlab_core::{HPoint, MatrixElement, RatMatrix};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// `1 + E` with `E` uniform in direction and `||E|| <= eps`.
fn near_identity(rng: &mut impl Rng, n: usize, eps: f64) -> DMatrix<f64> {
    let e = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let scale = eps * rng.gen_range(0.0..=1.0) / e.norm();
    DMatrix::identity(n, n) + e * scale
}

#[test]
fn commutator_contraction_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    for i in 0..1000 {
        let n = 2 + i % 3;
        let a = near_identity(&mut rng, n, 0.1);
        let b = near_identity(&mut rng, n, 0.1);
        let c = commutator(&a, &b).unwrap();
        // direct oracle for the commutator
        let direct = &a * &b * a.clone().try_inverse().unwrap() * b.clone().try_inverse().unwrap();
        assert!((&c - &direct).norm() < 1e-14);
        if c.dist_to_identity() > 8.0 * a.dist_to_identity() * b.dist_to_identity() {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn five_level_ladders_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let s = MatrixSet::new((0..3).map(|_| near_identity(&mut rng, 3, 0.1)).collect()).unwrap();
        let l = commutator_ladder(&s, 5).unwrap();
        assert!(l.bound_asserted);
        assert!(l.violations.is_empty(), "{:?} vs {:?}", l.m, l.bound);
        for n in 0..=5 {
            assert!(l.m[n] <= l.epsilon * (8.0 * l.epsilon).powi(n as i32) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn heisenberg_generators_have_class_two() {
    let x = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
    let y = RatMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]).unwrap();
    let s = MatrixSet::new(vec![x.clone(), y.clone()]).unwrap();
    let r = nilpotency_class(&s, 6, 0.0).unwrap();
    assert!(r.exact);
    assert_eq!(r.verdict, NilpotencyVerdict::Class(2));
    // [x, y] is the central generator
    let z = commutator(&x, &y).unwrap();
    assert_eq!(*z.get(0, 2), rat(1, 1));
}

#[test]
fn free_looking_pair_exceeds_cutoff() {
    let a = RatMatrix::from_i64(&[&[1, 2], &[0, 1]]).unwrap();
    let b = RatMatrix::from_i64(&[&[1, 0], &[2, 1]]).unwrap();
    let r = nilpotency_class(&MatrixSet::new(vec![a, b]).unwrap(), 3, 0.0).unwrap();
    assert_eq!(r.verdict, NilpotencyVerdict::ExceedsCutoff(3));
}

type Perm = [u8; 5];

fn compose(p: &Perm, q: &Perm) -> Perm {
    let mut r = [0; 5];
    for i in 0..5 {
        r[i] = p[q[i] as usize];
    }
    r
}

fn even(p: &Perm) -> bool {
    let mut inversions = 0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            inversions += (p[i] > p[j]) as u32;
        }
    }
    inversions % 2 == 0
}

fn all_perms() -> Vec<Perm> {
    let mut out = Vec::new();
    for code in 0..3125u32 {
        let mut p = [0u8; 5];
        let mut c = code;
        for slot in p.iter_mut() {
            *slot = (c % 5) as u8;
            c /= 5;
        }
        if p.iter().collect::<HashSet<_>>().len() == 5 {
            out.push(p);
        }
    }
    out
}

fn generated(gens: &[Perm]) -> HashSet<Perm> {
    let mut set: HashSet<Perm> = HashSet::from([[0, 1, 2, 3, 4]]);
    let mut frontier: Vec<Perm> = set.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(g, &x);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// Largest abelian subgroup of A_5 acting on five letters: abelian subgroups
/// of A_5 are cyclic or Klein four-groups, so two generators suffice.
fn a5_abelian_index_by_permutations() -> usize {
    let a5: Vec<Perm> = all_perms().into_iter().filter(even).collect();
    assert_eq!(a5.len(), 60);
    let mut best = 1;
    for a in &a5 {
        for b in &a5 {
            if compose(a, b) == compose(b, a) {
                best = best.max(generated(&[*a, *b]).len());
            }
        }
    }
    60 / best
}

#[test]
fn icosahedral_abelian_index_is_twelve() {
    let f = icosahedral_group().unwrap();
    assert_eq!(f.order(), 60);
    assert_eq!(a5_abelian_index_by_permutations(), 12);
    // a tiny epsilon admits only the identity
    let r = jordan_abelian_index_with(&f, 0.1, so3_angle).unwrap();
    assert_eq!(r.oracle_index, 12);
    assert!(r.oracle_verified_abelian);
    assert!(f.is_abelian(&r.oracle_subgroup));
    assert_eq!(f.subgroup_closure(&r.oracle_subgroup), r.oracle_subgroup);
    assert_eq!(r.index, 60);
    // fifth turns generate everything
    assert!(jordan_abelian_index_with(&f, 1.3, so3_angle).is_err());
}

#[test]
fn cyclic_rotations_are_their_own_abelian_part() {
    let g = rotation3([0.0, 0.0, 1.0], std::f64::consts::TAU / 12.0);
    let f = FiniteGroup::generate(&[g], 1000).unwrap();
    assert_eq!(f.order(), 12);
    let r = jordan_abelian_index_with(&f, 0.6, so3_angle).unwrap();
    assert_eq!((r.index, r.oracle_index), (1, 1));
}

#[test]
fn quaternion_group_index_two() {
    let q = quaternion_group().unwrap();
    assert_eq!(q.order(), 8);
    let r = jordan_abelian_index_with(&q, 0.5, su2_angle).unwrap();
    assert_eq!(r.oracle_index, 2);
    assert!(r.oracle_verified_abelian);
    // -1 rotates nothing, so the small part is the center {1, -1}
    assert_eq!(r.subgroup.len(), 2);
}

#[test]
fn characters_have_zero_defect() {
    let n = 12;
    let chi: Vec<Complex<f64>> =
        (0..n).map(|k| Complex::from_polar(1.0, std::f64::consts::TAU * 5.0 * k as f64 / n as f64)).collect();
    assert!(cyclic_circle_defect(&chi).unwrap() < 1e-12);
    // a rounded-off rotation is a quasi-morphism with a small defect
    let bent: Vec<Complex<f64>> = (0..n).map(|k| Complex::from_polar(1.0, 0.01 * (k as f64).sqrt())).collect();
    let d = cyclic_circle_defect(&bent).unwrap();
    assert!(d > 0.0 && d < 0.1);
}

#[test]
fn margulis_short_subgroups_of_the_modular_group() {
    let g = sl2z();
    let high = margulis_short_subgroup(&g, &HPoint::plane(0.1, 5.0).unwrap(), 0.5, 6).unwrap();
    assert_eq!(high.kind, ShortSubgroupKind::Parabolic { fixed: BoundaryPoint::Infinity });
    let low = margulis_short_subgroup(&g, &HPoint::plane(0.0, 2.0).unwrap(), 0.1, 6).unwrap();
    assert_eq!(low.kind, ShortSubgroupKind::Trivial);
    assert!(low.short.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn commutator_bound_for_any_small_pair(seed in any::<u64>(), n in 2usize..5, eps in 0.001f64..0.12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = near_identity(&mut rng, n, eps);
        let b = near_identity(&mut rng, n, eps);
        let c = commutator(&a, &b).unwrap();
        prop_assert!(c.dist_to_identity() <= 8.0 * a.dist_to_identity() * b.dist_to_identity() + 1e-15);
    }
}
