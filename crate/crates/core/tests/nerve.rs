use latlab_core::nerve::{
    abelianization, build_eps_net, count_presentations, degree_bound, growth_profile, nerve, presentation_from_nerve,
    smith_diagonal, word_count, FlatTorus, HyperbolicSurface, NerveComplex, NetSpace, Presentation, TreeChoice,
    NET_CAP,
};
use latlab_core::presets::{octagon_center, octagon_circumradius, octagon_genus2};
use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::OnceLock;

fn torus_nerve() -> &'static NerveComplex {
    static C: OnceLock<NerveComplex> = OnceLock::new();
    C.get_or_init(|| {
        let s = FlatTorus;
        let net = build_eps_net(&s, &s.sample(4000).unwrap(), 0.15, NET_CAP).unwrap();
        assert!(net.maximal);
        nerve(&s, &net, 0.18).unwrap()
    })
}

fn check_shape(c: &NerveComplex, p: &Presentation) {
    assert_eq!(p.generators, c.edges.len() - c.vertices + 1);
    assert!(p.max_relator_length() <= 3);
    assert_eq!(p.relators.len(), c.triangles.len());
}

#[test]
fn torus_presentation_abelianizes_to_z2() {
    let c = torus_nerve();
    assert_eq!(c.component_count(), 1);
    let p = presentation_from_nerve(c, TreeChoice::BreadthFirst).unwrap();
    check_shape(c, &p);
    let ab = abelianization(&p).unwrap();
    assert_eq!(ab.rank, 2);
    assert!(ab.torsion.is_empty());
}

#[test]
fn torus_rank_is_stable_across_scales() {
    for (eps, r) in [(0.1, 0.12), (0.2, 0.22)] {
        let s = FlatTorus;
        let net = build_eps_net(&s, &s.sample(4000).unwrap(), eps, NET_CAP).unwrap();
        let c = nerve(&s, &net, r).unwrap();
        let p = presentation_from_nerve(&c, TreeChoice::BreadthFirst).unwrap();
        check_shape(&c, &p);
        assert_eq!(abelianization(&p).unwrap().rank, 2, "eps = {eps}");
    }
}

#[test]
fn genus_two_surface_presentation_has_rank_four() {
    let (eps, r) = (0.5, 0.6);
    let s =
        HyperbolicSurface::new(&octagon_genus2(), octagon_center(), octagon_circumradius(), 2.0 * r + 0.5, 4).unwrap();
    let net = build_eps_net(&s, &s.sample(20000).unwrap(), eps, NET_CAP).unwrap();
    let c = nerve(&s, &net, r).unwrap();
    let p = presentation_from_nerve(&c, TreeChoice::BreadthFirst).unwrap();
    check_shape(&c, &p);
    let ab = abelianization(&p).unwrap();
    assert_eq!(ab.rank, 4);
    assert!(ab.torsion.is_empty());
}

#[test]
fn degrees_respect_the_packing_bound() {
    let s = FlatTorus;
    assert!(torus_nerve().max_degree() <= degree_bound(&s, 0.15, 0.18));
    // at r = eps in the plane: (2.5 / 0.5)^2 - 1
    assert_eq!(degree_bound(&s, 0.1, 0.1), 24);
    let h = HyperbolicSurface::new(&octagon_genus2(), octagon_center(), octagon_circumradius(), 1.7, 4).unwrap();
    let net = build_eps_net(&h, &h.sample(5000).unwrap(), 0.5, NET_CAP).unwrap();
    let c = nerve(&h, &net, 0.6).unwrap();
    assert!(c.max_degree() <= degree_bound(&h, 0.5, 0.6), "{} > {}", c.max_degree(), degree_bound(&h, 0.5, 0.6));
}

#[test]
fn balls_smaller_than_the_spacing_are_rejected() {
    let s = FlatTorus;
    let net = build_eps_net(&s, &s.sample(1000).unwrap(), 0.3, NET_CAP).unwrap();
    assert!(nerve(&s, &net, 0.2).is_err());
}

#[test]
fn disconnected_complex_is_reported() {
    let c = NerveComplex { vertices: 3, edges: vec![(0, 1)], triangles: vec![] };
    assert!(presentation_from_nerve(&c, TreeChoice::BreadthFirst).is_err());
}

/// All nonempty words of length at most 3 over `x_1^{+-1} .. x_g^{+-1}`.
fn words(g: i32) -> Vec<Vec<i32>> {
    let letters: Vec<i32> = (1..=g).flat_map(|x| [x, -x]).collect();
    let mut out: Vec<Vec<i32>> = Vec::new();
    let mut layer: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..3 {
        layer = layer.iter().flat_map(|w| letters.iter().map(move |&l| [w.as_slice(), &[l]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Multisets of at most `k` words, as sorted index lists.
fn multisets(n: usize, k: usize) -> BTreeSet<Vec<usize>> {
    let mut all = BTreeSet::from([vec![]]);
    let mut layer = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for i in start..n {
                let mut e: Vec<usize> = m.clone();
                e.push(i);
                next.push(e);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn enumerate_presentations(bound: usize) -> usize {
    (0..=bound).map(|g| multisets(words(g as i32).len(), bound).len()).sum()
}

#[test]
fn counting_matches_enumeration() {
    assert_eq!(enumerate_presentations(1), 16);
    assert_eq!(count_presentations(1.0, 1).unwrap(), BigUint::from(16u32));
    assert_eq!(count_presentations(1.0, 2).unwrap(), BigUint::from(enumerate_presentations(2)));
    for g in 0..4 {
        assert_eq!(word_count(g), BigUint::from(words(g as i32).len()));
    }
}

#[test]
fn growth_ratio_sits_in_a_window() {
    let p = growth_profile(1.0, &[4, 8, 16, 32]).unwrap();
    assert!(p.within(1.0, 8.0), "{:?}", p.rows);
    assert!(p.max_step_drift < 0.2, "{}", p.max_step_drift);
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abelianization_ignores_the_spanning_tree(seed in any::<u64>()) {
        let c = torus_nerve();
        let p = presentation_from_nerve(c, TreeChoice::Random(seed)).unwrap();
        prop_assert_eq!(p.generators, c.edges.len() - c.vertices + 1);
        prop_assert!(p.max_relator_length() <= 3);
        let ab = abelianization(&p).unwrap();
        prop_assert_eq!(ab.rank, 2);
        prop_assert!(ab.torsion.is_empty());
    }

    #[test]
    fn smith_form_matches_determinantal_divisors(m in prop::collection::vec(prop::collection::vec(-9i128..10, 3), 3)) {
        let mut work = m.clone();
        let mut d = smith_diagonal(&mut work, 3).unwrap();
        d.resize(3, 0);
        let entries = m.iter().flatten().fold(0, |g, &x| gcd(g, x));
        let mut minors = 0;
        for (r1, r2) in [(0, 1), (0, 2), (1, 2)] {
            for (c1, c2) in [(0, 1), (0, 2), (1, 2)] {
                minors = gcd(minors, m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]);
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        prop_assert_eq!(d[0], entries);
        prop_assert_eq!(d[0] * d[1], minors);
        prop_assert_eq!(d[0] * d[1] * d[2], det.abs());
        prop_assert!(d[1] == 0 || d[0] == 0 || d[1] % d[0] == 0);
    }
}
