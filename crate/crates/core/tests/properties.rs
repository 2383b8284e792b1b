use std::f64::consts::PI;

use grafting::deflate::{self, cone_audit};
use grafting::graft::{graft, WeightedMulticurve};
use grafting::inflate::{inflate, seed_of};
use grafting::ortho;
use grafting::pants::{build_pants, FNSurface, PantsDecomposition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn decomposition(kind: u8) -> PantsDecomposition {
    match kind {
        0 => PantsDecomposition::genus2_theta(),
        1 => PantsDecomposition::genus2_loops(),
        _ => PantsDecomposition::genus3_ring(),
    }
}

fn surface_data(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.5..4.0f64, n),
        prop::collection::vec(-3.0..3.0f64, n),
        prop::collection::vec(0.1..2.0f64, n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn area_is_euler_term_plus_lamination_length((kind, l, t, a) in (0u8..3, surface_data(6))
        .prop_map(|(k, (l, t, a))| (k, l, t, a))) {
        let dec = decomposition(kind);
        let n = dec.curve_count();
        let (l, a) = (&l[..n], &a[..n]);
        let fns = FNSurface::new(dec.clone(), l.to_vec(), t[..n].to_vec()).unwrap();
        let g = graft(&fns, &WeightedMulticurve::new(a.to_vec()).unwrap()).unwrap();
        let expected = 2.0 * PI * dec.abs_euler_characteristic() as f64 + l.iter().zip(a).map(|(x, y)| x * y).sum::<f64>();
        prop_assert!((g.hyperbolic_area() + g.cylinder_area() - expected).abs() < 1e-9);
        prop_assert!((g.area() - expected).abs() < 1e-9);
    }

    #[test]
    fn spine_arcs_partition_each_boundary(l1 in 0.3..6.0f64, l2 in 0.3..6.0f64, l3 in 0.3..6.0f64) {
        let spine = ortho::pants_spine(l1, l2, l3).unwrap();
        let l = [l1, l2, l3];
        for i in 0..3 {
            let total: f64 = spine.boundary_arcs(i).iter().map(|a| a.length).sum();
            prop_assert!((total - l[i]).abs() < 1e-9);
            for k in 0..7 {
                let s = l[i] * (k as f64 + 0.31) / 7.0;
                let (j, s2) = spine.partner(i, s).unwrap();
                let (back_i, back_s) = spine.partner(j, s2).unwrap();
                prop_assert_eq!(back_i, i);
                let d = (back_s - s).rem_euclid(l[i]);
                prop_assert!(d.min(l[i] - d) < 1e-9);
            }
        }
        prop_assert!(spine.widths().iter().all(|w| *w >= 0.0));
    }

    #[test]
    fn twist_by_a_full_turn_keeps_the_flat_gluing(l in prop::collection::vec(1.0..3.0f64, 3), t in prop::collection::vec(-2.0..2.0f64, 3), e in 0usize..3) {
        let dec = PantsDecomposition::genus2_theta();
        let mu = WeightedMulticurve::new(vec![1.0; 3]).unwrap();
        let g1 = graft(&FNSurface::new(dec.clone(), l.clone(), t.clone()).unwrap(), &mu).unwrap();
        let mut t2 = t.clone();
        t2[e] += l[e];
        let g2 = graft(&FNSurface::new(dec, l.clone(), t2).unwrap(), &mu).unwrap();
        let (f1, _) = deflate::deflate(&g1).unwrap();
        let (f2, _) = deflate::deflate(&g2).unwrap();
        prop_assert_eq!(f1.arcs.len(), f2.arcs.len());
        for (a, b) in f1.arcs.iter().zip(&f2.arcs) {
            let period = f1.circle_length(a.circle);
            let d = (a.start - b.start).rem_euclid(period);
            prop_assert!(d.min(period - d) < 1e-9);
            prop_assert_eq!(a.partner, b.partner);
        }
        prop_assert!((f2.twists[e] - f1.twists[e] - l[e]).abs() < 1e-12);
    }

    #[test]
    fn inflation_inverts_deflation(l in prop::collection::vec(1.5..3.0f64, 3), t in prop::collection::vec(-4.0..4.0f64, 3), a in prop::collection::vec(0.1..2.0f64, 3)) {
        // lengths in [1.5, 3] satisfy the triangle inequality: Theta spines
        let fns = FNSurface::new(PantsDecomposition::genus2_theta(), l, t).unwrap();
        let g = graft(&fns, &WeightedMulticurve::new(a).unwrap()).unwrap();
        let back = inflate(&seed_of(&g).unwrap()).unwrap();
        for e in 0..3 {
            prop_assert!((back.length(e) - g.length(e)).abs() < 1e-9);
            prop_assert!((back.twist(e) - g.twist(e)).abs() < 1e-9);
            prop_assert!((back.height(e) - g.height(e)).abs() < 1e-9);
        }
    }

    #[test]
    fn cone_excess_is_four_pi_times_genus_minus_one(kind in 0u8..3, l in prop::collection::vec(0.8..3.0f64, 6), t in prop::collection::vec(-2.0..2.0f64, 6)) {
        let dec = decomposition(kind);
        let n = dec.curve_count();
        let genus = dec.genus() as f64;
        let fns = FNSurface::new(dec, l[..n].to_vec(), t[..n].to_vec()).unwrap();
        let g = graft(&fns, &WeightedMulticurve::new(vec![1.0; n]).unwrap()).unwrap();
        let (flat, _) = deflate::deflate(&g).unwrap();
        let classes = cone_audit(&flat).unwrap();
        let excess: f64 = classes.iter().map(|c| c.angle - 2.0 * PI).sum();
        prop_assert!((excess - 4.0 * PI * (genus - 1.0)).abs() < 1e-9);
        prop_assert!(classes.iter().all(|c| c.angle >= 2.0 * PI - 1e-12));
    }

    #[test]
    fn pants_distance_is_a_metric(l1 in 0.5..5.0f64, l2 in 0.5..5.0f64, l3 in 0.5..5.0f64, seed in any::<u64>()) {
        let pg = build_pants(l1, l2, l3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = pg.sample_uniform(&mut rng);
        let q = pg.sample_uniform(&mut rng);
        let r = pg.sample_uniform(&mut rng);
        let (pq, qr, pr) = (pg.distance(&p, &q), pg.distance(&q, &r), pg.distance(&p, &r));
        prop_assert!((pq - pg.distance(&q, &p)).abs() < 1e-8);
        prop_assert!(pr <= pq + qr + 1e-8);
        prop_assert!(pg.distance(&p, &p) < 1e-7);
    }
}
