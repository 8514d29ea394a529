use latlab_core::hyp_geom::BoundaryPoint;
use latlab_core::lattice_lab::{
    covolume_h2, gradient_lemma_check, injectivity_radius, recurrence_search, regular_polygon, span_check,
    thick_thin_scan, Bump, DomainSpec, PolygonVertex, PsiField, RecurrenceTarget, SampleRegion, ThinKind,
    WORD_BALL_CAP,
};
use latlab_core::linalg::rat;
use latlab_core::presets::{by_name, cusp_model, cyclic_hyperbolic, default_region, octagon_genus2, sl2z, Preset};
use latlab_core::{HPoint, MoebiusIsometry};
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::f64::consts::PI;

fn closed_form_at_2i() -> f64 {
    // z -> z + 1 moves 2i by acosh(1 + 1/8); the injectivity radius is half
    0.5 * 1.125f64.acosh()
}

#[test]
fn injectivity_radius_of_the_modular_group_at_2i() {
    let p = HPoint::plane(0.0, 2.0).unwrap();
    let r6 = injectivity_radius(&sl2z(), &p, 6).unwrap();
    let r8 = injectivity_radius(&sl2z(), &p, 8).unwrap();
    assert!((r6.value - closed_form_at_2i()).abs() < 1e-4);
    assert!((r6.value - r8.value).abs() < 1e-9);
}

#[test]
fn word_ball_sizes_grow() {
    let g = sl2z();
    let sizes: Vec<usize> = (1..=5).map(|l| g.word_ball(l, WORD_BALL_CAP).unwrap().len()).collect();
    assert!(sizes.windows(2).all(|w| w[1] > w[0]), "{sizes:?}");
}

fn scan(name: &str, radius: usize, n: usize) -> latlab_core::lattice_lab::ThickThinReport {
    let Preset::Hyperbolic(g) = by_name(name).unwrap() else { panic!("{name} is not hyperbolic") };
    let samples = default_region(name).samples(n).unwrap();
    thick_thin_scan(&g, 0.2, &samples, radius).unwrap()
}

#[test]
fn modular_surface_has_one_cusp() {
    let r = scan("sl2z", 6, 2000);
    assert_eq!(r.components.len(), 1);
    assert!(matches!(r.components[0].kind, ThinKind::Cusp { fixed: BoundaryPoint::Infinity }));
}

#[test]
fn short_geodesic_has_one_tube() {
    let r = scan("cyclic-hyperbolic(0.05)", 6, 2000);
    assert_eq!(r.components.len(), 1);
    match r.components[0].kind {
        ThinKind::Tube { core_length, .. } => assert!((core_length - 0.05).abs() < 1e-8),
        ref k => panic!("expected a tube, got {k:?}"),
    }
}

#[test]
fn genus_two_surface_is_thick_at_small_epsilon() {
    let r = scan("octagon-genus2", 3, 1000);
    assert!(r.components.is_empty());
    assert_eq!(r.thin_sample_count, 0);
}

fn cusp_sweep() -> Vec<HPoint> {
    (0..100).map(|i| HPoint::plane(0.1 * (i % 7) as f64 - 0.3, 0.5 * 20f64.powf(i as f64 / 99.0)).unwrap()).collect()
}

#[test]
fn psi_gradient_lemma_on_the_cusp() {
    let f = PsiField::new(&cusp_model(), 0.3, 6, Bump::Standard).unwrap();
    let r = gradient_lemma_check(&f, &cusp_sweep(), 1e-4, 1e-12, 1e-9).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
}

#[test]
fn plateau_bump_breaks_the_lemma() {
    let f = PsiField::new(&cusp_model(), 0.3, 6, Bump::Plateau).unwrap();
    let r = gradient_lemma_check(&f, &cusp_sweep(), 1e-4, 1e-12, 1e-9).unwrap();
    assert!(!r.violations.is_empty());
}

#[test]
fn psi_vanishes_exactly_where_nothing_is_short() {
    let f = PsiField::new(&cusp_model(), 0.3, 6, Bump::Standard).unwrap();
    // T moves iy by 2 asinh(1/(2y)), below 0.3 once y > 3.3
    assert_eq!(f.value(&HPoint::plane(0.0, 2.0).unwrap()).unwrap().value, 0.0);
    assert!(f.value(&HPoint::plane(0.0, 8.0).unwrap()).unwrap().value > 0.0);
}

#[test]
fn fundamental_domain_areas() {
    let modular = covolume_h2(&DomainSpec::Sl2zStandard).unwrap();
    assert!((modular.value - PI / 3.0).abs() < 1e-3);

    let ideal = DomainSpec::Polygon(vec![
        PolygonVertex::Ideal(BoundaryPoint::Finite(0.0.into())),
        PolygonVertex::Ideal(BoundaryPoint::Finite(1.0.into())),
        PolygonVertex::Ideal(BoundaryPoint::Infinity),
    ]);
    let t = covolume_h2(&ideal).unwrap();
    assert_eq!(t.pi_multiple, Some(rat(1, 1)));
    assert_eq!(t.value, PI);

    let oct = covolume_h2(&DomainSpec::PolygonAngles(vec![rat(1, 4); 8])).unwrap();
    assert_eq!(oct.pi_multiple, Some(rat(4, 1)));
    let genus = covolume_h2(&DomainSpec::Genus(2)).unwrap();
    assert_eq!(genus.pi_multiple, Some(rat(4, 1)));
}

#[test]
fn regular_octagon_area_by_vertices() {
    let vs = regular_polygon(8, PI / 4.0).unwrap();
    let c = covolume_h2(&DomainSpec::Polygon(vs)).unwrap();
    assert!((c.value - 4.0 * PI).abs() < 1e-8);
}

#[test]
fn spherical_angle_sums_are_rejected() {
    assert!(covolume_h2(&DomainSpec::PolygonAngles(vec![rat(1, 2); 4])).is_err());
}

#[test]
fn irrational_rotation_recurs() {
    let hits = recurrence_search(&RecurrenceTarget::Translation(vec![2f64.sqrt()]), 0.01, 2000).unwrap();
    assert!(!hits.hits.is_empty());
    for n in &hits.hits {
        let x = *n as f64 * 2f64.sqrt();
        assert!((x - x.round()).abs() < 0.02);
    }
}

#[test]
fn unipotent_element_recurs_in_sl2() {
    let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    let hits = recurrence_search(&RecurrenceTarget::Sl2(g), 0.1, 20).unwrap();
    assert_eq!(hits.hits, (1..=10).map(|k| 2 * k).collect::<Vec<_>>());
}

#[test]
fn zariski_dense_groups_span_all_matrices() {
    assert_eq!(span_check(&sl2z(), 3).unwrap().dimension, 4);
    assert_eq!(span_check(&octagon_genus2(), 2).unwrap().dimension, 4);
    // a cyclic hyperbolic group lives in the diagonal matrices
    let c = span_check(&cyclic_hyperbolic(0.5).unwrap(), 4).unwrap();
    assert_eq!(c.dimension, 2);
    assert!(c.regular_witness.is_some());
}

fn sl2_real() -> impl Strategy<Value = MoebiusIsometry> {
    (0.5f64..2.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(a, b, c)| MoebiusIsometry::real(a, b, c, (1.0 + b * c) / a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn injectivity_radius_is_conjugation_equivariant(h in sl2_real(), x in -0.5f64..0.5, y in 1.0f64..3.0) {
        let g = sl2z();
        let p = HPoint::plane(x, y).unwrap();
        let a = injectivity_radius(&g, &p, 4).unwrap().value;
        let b = injectivity_radius(&g.conjugated(&h).unwrap(), &h.act(&p), 4).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn psi_stencils_agree(x in -0.5f64..0.5, y in 4.0f64..10.0) {
        let f = PsiField::new(&cusp_model(), 0.3, 6, Bump::Standard).unwrap();
        let p = HPoint::plane(x, y).unwrap();
        let coarse = f.gradient(&p, 1e-3).unwrap();
        let fine = f.gradient(&p, 1e-4).unwrap();
        let scale = fine.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        for (a, b) in coarse.iter().zip(&fine) {
            prop_assert!((a - b).abs() <= 1e-3 * scale + 1e-12);
        }
    }

    #[test]
    fn disk_samples_stay_in_the_disk(n in 1usize..200, r in 0.1f64..3.0) {
        let c = HPoint::plane(0.0, 1.0).unwrap();
        for p in (SampleRegion::Disk { center: (0.0, 1.0), radius: r }).samples(n).unwrap() {
            prop_assert!(p.distance_to(&c) <= r + 1e-9);
        }
    }
}
