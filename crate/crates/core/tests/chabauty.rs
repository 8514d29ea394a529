use latlab_core::chabauty::{
    box_sweep, chabauty_distance, chabauty_limit, covolume, covolume_exact, enumerate, mahler_subsequence,
    planar_canonical, reduce_basis, rotating_square_family, shortest_vector, shrinking_family, sup_formula_check,
    EuclideanLatticeSubgroup, Family, ENUM_CAP,
};
use latlab_core::linalg::rat;
use latlab_core::LabError;
use num_rational::BigRational;
use proptest::prelude::*;

fn z_scaled(a: f64) -> EuclideanLatticeSubgroup {
    EuclideanLatticeSubgroup::lattice(&[vec![a]]).unwrap()
}

#[test]
fn inverse_integers_approach_the_line() {
    let line = EuclideanLatticeSubgroup::whole(1).unwrap();
    for n in 1..=100 {
        let d = chabauty_distance(&z_scaled(1.0 / n as f64), &line, 10.0).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12, "n = {n}: {d}");
    }
}

#[test]
fn distance_to_the_trivial_group() {
    // within radius 3 the farthest point of 2Z from {0} is 2
    let d = chabauty_distance(&z_scaled(2.0), &EuclideanLatticeSubgroup::trivial(1).unwrap(), 3.0).unwrap();
    assert!((d - 2.0).abs() < 1e-12);
}

#[test]
fn limits_of_named_families() {
    let radii = [1.0, 5.0, 10.0];
    let line = chabauty_limit(&Family::InverseIntegers, &radii, 1e-6, 10_000_000).unwrap();
    assert!(line.converged);
    assert_eq!(line.merged, 1);
    assert_eq!(line.limit.connected().len(), 1);
    for c in &line.checks {
        assert!(c.monotone, "{:?}", c.distances);
    }
    let trivial = chabauty_limit(&Family::Multiples, &radii, 1e-6, 10_000_000).unwrap();
    assert_eq!(trivial.escaped, 1);
    assert!(trivial.limit.discrete().is_empty() && trivial.limit.connected().is_empty());
    assert!(matches!(chabauty_limit(&Family::Alternating, &radii, 1e-6, 10_000_000), Err(LabError::NoLimit { .. })));
}

#[test]
fn rotating_line_converges_to_the_axis() {
    let l = chabauty_limit(&Family::RotatingLine, &[2.0, 4.0], 1e-6, 10_000_000).unwrap();
    assert!(l.converged);
    let v = &l.limit.discrete()[0];
    assert!((v[0].abs() - 1.0).abs() < 1e-6 && v[1].abs() < 1e-6);
}

#[test]
fn mahler_extracts_from_rotating_squares() {
    let r = mahler_subsequence(&rotating_square_family(200), 1.0 + 1e-9, 1.0 - 1e-9, 1e-3).unwrap();
    assert!(r.verified);
    assert!(r.indices.len() >= 2);
    assert!(r.indices.windows(2).all(|w| w[0] < w[1]));
    assert!((r.limit_covolume - 1.0).abs() < 1e-9);
    assert!((r.limit_shortest - 1.0).abs() < 1e-9);
    for row in &r.limit {
        assert!(row.iter().all(|x| x.abs() <= r.bound));
    }
}

#[test]
fn mahler_rejects_shrinking_vectors() {
    match mahler_subsequence(&shrinking_family(50), 1.0 + 1e-9, 0.5, 1e-3) {
        Err(LabError::Rejected { index, .. }) => assert_eq!(index, 2),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn hexagonal_shortest_vectors() {
    let b = vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
    let s = shortest_vector(&b).unwrap();
    assert!((s.length - 1.0).abs() < 1e-12);
    assert_eq!(s.minimal_vectors.len(), 6);
    let c = planar_canonical(&b).unwrap();
    assert!((covolume(&c).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-12);
}

#[test]
fn exact_covolume() {
    let b = vec![vec![rat(1, 2), rat(1, 3)], vec![rat(0, 1), rat(3, 1)]];
    assert_eq!(covolume_exact(&b).unwrap(), rat(3, 2));
}

#[test]
fn enumeration_counts_lattice_points() {
    // Z^2 points of norm at most 2, minus the origin: 4 + 4 + 4
    let pts = enumerate(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2.0, ENUM_CAP).unwrap();
    assert_eq!(pts.len(), 12);
}

#[test]
fn supremum_is_attained_by_a_fundamental_box() {
    let b = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
    let r = sup_formula_check(&b, &box_sweep(&b, 40).unwrap()).unwrap();
    assert!(r.consistent, "{r:?}");
    assert!((r.best_volume - 2.0).abs() < 1e-9);
}

fn small_basis(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), dim).prop_filter("well conditioned", move |b| {
        covolume(b).map_or(false, |c| {
            let longest = b.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
            c > 0.3 * longest.powi(dim as i32 - 1).max(0.3)
        })
    })
}

fn unimodular(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    // a product of elementary moves
    prop::collection::vec((0..dim, 0..dim, -2i64..=2), 1..6).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, k) in ops {
            if i != j {
                for c in 0..dim {
                    u[i][c] += k * u[j][c];
                }
            }
        }
        u
    })
}

fn apply(u: &[Vec<i64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    u.iter()
        .map(|row| (0..b[0].len()).map(|c| row.iter().zip(b).map(|(&k, v)| k as f64 * v[c]).sum()).collect())
        .collect()
}

fn apply_exact(u: &[Vec<i64>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    u.iter()
        .map(|row| (0..b[0].len()).map(|c| row.iter().zip(b).map(|(&k, v)| rat(k, 1) * &v[c]).sum()).collect())
        .collect()
}

fn subgroup() -> impl Strategy<Value = EuclideanLatticeSubgroup> {
    prop_oneof![
        (0.2f64..3.0).prop_map(z_scaled),
        Just(EuclideanLatticeSubgroup::whole(1).unwrap()),
        Just(EuclideanLatticeSubgroup::trivial(1).unwrap()),
    ]
}

fn planar_lattice() -> impl Strategy<Value = EuclideanLatticeSubgroup> {
    small_basis(2).prop_map(|b| EuclideanLatticeSubgroup::lattice(&b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_a_metric_on_the_line(a in subgroup(), b in subgroup(), c in subgroup(), r in 0.5f64..5.0) {
        let ab = chabauty_distance(&a, &b, r).unwrap();
        let ba = chabauty_distance(&b, &a, r).unwrap();
        let bc = chabauty_distance(&b, &c, r).unwrap();
        let ac = chabauty_distance(&a, &c, r).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(chabauty_distance(&a, &a, r).unwrap() < 1e-12);
    }

    #[test]
    fn distance_is_a_metric_on_planar_lattices(a in planar_lattice(), b in planar_lattice(), c in planar_lattice()) {
        let r = 3.0;
        let ab = chabauty_distance(&a, &b, r).unwrap();
        let ba = chabauty_distance(&b, &a, r).unwrap();
        let ac = chabauty_distance(&a, &c, r).unwrap();
        let bc = chabauty_distance(&b, &c, r).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn covolume_is_unimodular_invariant(
        entries in prop::collection::vec(-20i64..=20, 4),
        u in unimodular(2),
    ) {
        let b = vec![vec![rat(entries[0], 3), rat(entries[1], 5)], vec![rat(entries[2], 7), rat(entries[3], 2)]];
        let before = covolume_exact(&b);
        let after = covolume_exact(&apply_exact(&u, &b));
        match (before, after) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn reduction_preserves_the_lattice(b in small_basis(3), u in unimodular(3)) {
        let moved = apply(&u, &b);
        let r = reduce_basis(&moved).unwrap();
        let c0 = covolume(&b).unwrap();
        prop_assert!((covolume(&r).unwrap() - c0).abs() < 1e-8 * c0.max(1.0));
        let s0 = shortest_vector(&b).unwrap().length;
        let s1 = shortest_vector(&r).unwrap().length;
        prop_assert!((s0 - s1).abs() < 1e-8 * s0.max(1.0));
    }

    #[test]
    fn planar_canonical_form_is_a_lattice_invariant(b in small_basis(2), u in unimodular(2)) {
        let c0 = planar_canonical(&b).unwrap();
        let c1 = planar_canonical(&apply(&u, &b)).unwrap();
        for (x, y) in c0.iter().flatten().zip(c1.iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-7, "{:?} vs {:?}", c0, c1);
        }
    }
}
