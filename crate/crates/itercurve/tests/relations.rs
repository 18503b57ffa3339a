use itercurve::exactfield::Level;
use itercurve::numkernel::{constant, zeta, ApproxR, Constant, Context};
use itercurve::relations::{
    combine, dim_series, phi_power_residual, pslq, reproduce_dim_table, shuffle_relations,
    verify_distribution, PslqOutcome, PslqParams, SeriesId,
};
use itercurve::Curve;
use num_bigint::BigInt;
use proptest::prelude::*;

fn ints(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).unwrap()).collect()
}

/// `r` is a nonzero multiple of `e`.
fn proportional(r: &[i64], e: &[i64]) -> bool {
    let (i, &ei) = e.iter().enumerate().find(|(_, x)| **x != 0).unwrap();
    let ri = r[i];
    ri != 0 && r.iter().zip(e).all(|(a, b)| a * ei == b * ri)
}

#[test]
fn pslq_examples() {
    let ctx = Context::new(60).unwrap();
    let b = ctx.bits();
    let pi = constant(Constant::Pi, b);
    let z2 = zeta(2, &ctx).unwrap();
    let out = pslq(&[z2, &pi * &pi], &ctx, &PslqParams::default()).unwrap();
    let r = out.relation().expect("relation");
    assert!(proportional(&ints(&r.coeffs), &[6, -1]));
    let l2 = constant(Constant::Log2, b);
    let out = pslq(&[l2.clone(), l2.mul_int(2)], &ctx, &PslqParams::default()).unwrap();
    assert!(proportional(
        &ints(&out.relation().unwrap().coeffs),
        &[2, -1]
    ));
    assert!(pslq(&[l2], &ctx, &PslqParams::default()).is_err());
}

#[test]
fn pslq_reports_norm_bound_without_relation() {
    let ctx = Context::new(100).unwrap();
    let b = ctx.bits();
    let xs = [
        ApproxR::from_int(1, b),
        constant(Constant::Pi, b),
        constant(Constant::Log2, b),
    ];
    let params = PslqParams {
        max_norm: 1e10,
        ..PslqParams::default()
    };
    match pslq(&xs, &ctx, &params).unwrap() {
        PslqOutcome::NoRelation { norm_bound, .. } => assert!(norm_bound >= 1e10, "{norm_bound}"),
        PslqOutcome::Relation(r) => panic!("spurious relation {:?}", r.coeffs),
    }
}

#[test]
fn dimension_series() {
    let v = |s: &str, k| ints(&dim_series(s.parse().unwrap(), k));
    assert_eq!(v("mzv_d", 5), [1, 0, 1, 1, 1, 2]);
    assert_eq!(v("D_g", 5), [1, 2, 4, 8, 16, 32]);
    assert_eq!(v("D_h", 5), [1, 3, 8, 21, 55, 144]);
    for k in 0..=12 {
        let (g, g0, g1) = (v("D_g", 12), v("D_g0", 12), v("D_g1", 12));
        let (h, h0, h1) = (v("D_h", 12), v("D_h0", 12), v("D_h1", 12));
        assert_eq!(g[k], g0[k] + g1[k]);
        assert_eq!(h[k], h0[k] + h1[k]);
    }
    // with no relations in the ring the generating function is 1/(1 - dim t)
    let a = v("A_FR(0,0,2)", 6);
    assert_eq!(a, [1, 2, 4, 8, 16, 32, 64]);
    let h = v("H_FR(0,0,2)", 6);
    assert_eq!(h, [1, 3, 7, 15, 31, 63, 127]);
    assert!("D_x".parse::<SeriesId>().is_err());
    assert!("A_FR(1,2)".parse::<SeriesId>().is_err());
}

#[test]
fn shuffle_relation_ranks_and_residuals() {
    assert_eq!(shuffle_relations(Curve::G, 2).unwrap().rank, 1);
    assert_eq!(shuffle_relations(Curve::H, 2).unwrap().rank, 1);
    assert_eq!(shuffle_relations(Curve::H, 3).unwrap().rank, 9);
    assert!(shuffle_relations(Curve::G, 1).is_err());
    let ctx = Context::new(60).unwrap();
    for (curve, kmax) in [(Curve::G, 4), (Curve::H, 3)] {
        for k in 2..=kmax {
            for id in shuffle_relations(curve, k).unwrap().identities {
                let r = id.residual(&ctx).unwrap();
                assert!(r.abs_le_pow10(50), "{id}: {}", r.to_decimal(5));
            }
        }
    }
    for k in 2..=5 {
        assert!(phi_power_residual(Curve::G, k, &ctx)
            .unwrap()
            .abs_le_pow10(50));
        assert!(phi_power_residual(Curve::H, k, &ctx)
            .unwrap()
            .abs_le_pow10(50));
    }
}

#[test]
fn distribution_identities() {
    let ctx = Context::new(40).unwrap();
    for level in [Level::N4, Level::N6] {
        let rows = verify_distribution(6, level, &ctx).unwrap();
        assert_eq!(rows.len(), 25);
        for r in &rows {
            assert!(r.pass, "{} k={}", r.name, r.k);
        }
    }
    assert!(verify_distribution(1, Level::N4, &ctx).is_err());
}

#[test]
fn dimension_tables_low_weight() {
    let params = PslqParams::default();
    for (curve, kmax, p) in [(Curve::G, 3, 150), (Curve::H, 2, 200)] {
        let ctx = Context::new(p).unwrap();
        let t = reproduce_dim_table(curve, kmax, &ctx, &params, false).unwrap();
        assert_eq!(t.rows.len(), kmax + 1);
        for row in &t.rows {
            assert!(row.matches_reference, "{curve} k={}: {row:?}", row.k);
            assert!(row.rank as u64 <= row.d);
            assert!(row.rank_parity0 as u64 <= row.d0);
            assert!(row.rank_parity1 as u64 <= row.d1);
            if row.k >= 1 {
                assert_eq!(row.rank + row.relations_found, row.count_b);
            }
            if row.k >= 2 {
                assert!(row.relations_found >= shuffle_relations(curve, row.k).unwrap().rank);
            }
        }
    }
    let ctx = Context::new(30).unwrap();
    assert!(reproduce_dim_table(Curve::H, 4, &ctx, &params, false).is_err());
}

fn planted() -> impl Strategy<Value = (i64, i64, i64)> {
    (-20i64..=20, -20i64..=20, -20i64..=20)
        .prop_filter("nonzero", |(a, b, c)| (*a, *b, *c) != (0, 0, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planted_relations_are_recovered((a, b, c) in planted()) {
        let ctx = Context::new(60).unwrap();
        let bits = ctx.bits();
        let base = [constant(Constant::Pi, bits), constant(Constant::Log2, bits), zeta(3, &ctx).unwrap()];
        let x = combine(&[a.into(), b.into(), c.into()], &base);
        let xs = [base[0].clone(), base[1].clone(), base[2].clone(), x];
        let out = pslq(&xs, &ctx, &PslqParams::default()).unwrap();
        let r = out.relation().expect("planted relation");
        prop_assert!(proportional(&ints(&r.coeffs), &[a, b, c, -1]));
    }
}
