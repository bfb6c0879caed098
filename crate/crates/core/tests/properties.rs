use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use tailfit_core::empirical::rank_transform;
use tailfit_core::mestim::{min_power_integral, profile_zeta};
use tailfit_core::simulate::rng_for;
use tailfit_core::{Rectangle, TailFamily, ThetaVector};

fn unit_to_theta(family: TailFamily, u: (f64, f64)) -> Vec<f64> {
    let b = family.search_bounds();
    [u.0, u.1].iter().zip(&b).map(|(t, c)| c.lo + (c.hi - c.lo) * (0.05 + 0.9 * t)).collect()
}

fn family_strategy() -> impl Strategy<Value = TailFamily> {
    prop::sample::select(TailFamily::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c_is_homogeneous(family in family_strategy(), u in (0.0..1.0f64, 0.0..1.0f64),
                        x in 0.01..4.0f64, y in 0.01..4.0f64, t in 0.1..6.0f64) {
        let v = unit_to_theta(family, u);
        prop_assume!(family.contains(&v));
        let th = ThetaVector::new(family, v).unwrap();
        let order = 1.0 / family.eta_of(&th).unwrap();
        let lhs = family.eval_c(&th, t * x, t * y).unwrap();
        let rhs = t.powf(order) * family.eval_c(&th, x, y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn rect_integral_is_additive(family in family_strategy(), u in (0.0..1.0f64, 0.0..1.0f64),
                                 x0 in 0.0..1.5f64, w in 0.1..1.5f64, y0 in 0.0..1.5f64, h in 0.1..1.5f64,
                                 cut in 0.1..0.9f64) {
        let v = unit_to_theta(family, u);
        prop_assume!(family.contains(&v));
        let th = ThetaVector::new(family, v).unwrap();
        let xm = x0 + cut * w;
        let whole = family.rect_integral_c(&th, &Rectangle::new(x0, x0 + w, y0, y0 + h).unwrap()).unwrap();
        let left = family.rect_integral_c(&th, &Rectangle::new(x0, xm, y0, y0 + h).unwrap()).unwrap();
        let right = family.rect_integral_c(&th, &Rectangle::new(xm, x0 + w, y0, y0 + h).unwrap()).unwrap();
        prop_assert!(whole > 0.0);
        prop_assert!((whole - left - right).abs() <= 1e-8 * whole, "{whole} vs {}", left + right);
    }

    #[test]
    fn empirical_integral_is_rank_invariant(seed in 0u64..1000, n in 5usize..60, k in 1usize..5) {
        let mut rng = rng_for(seed, 0);
        let data = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>());
        let warped = data.map(|x| (3.0 * x).exp() - 7.0);
        let rect = Rectangle::new(0.2, 1.7, 0.0, 2.5).unwrap();
        let k = k.min(n);
        let a = rank_transform(&data).unwrap().rect_integral_q((0, 1), k, &rect).unwrap();
        let b = rank_transform(&warped).unwrap().rect_integral_q((0, 1), k, &rect).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
        prop_assert!(a >= 0.0 && a <= rect.area() * k as f64 / n as f64 * 2.5 + 1e-12);
    }

    #[test]
    fn zeta_is_scale_equivariant(v in prop::collection::vec(0.1..3.0f64, 5), b in prop::collection::vec(0.0..3.0f64, 5),
                                 s in 0.01..100.0f64) {
        prop_assume!(b.iter().any(|&x| x > 0.01));
        let z = profile_zeta(&v, &b).unwrap();
        let bs: Vec<f64> = b.iter().map(|x| x * s).collect();
        let zs = profile_zeta(&v, &bs).unwrap();
        prop_assert!((zs - s * z).abs() <= 1e-12 * (s * z).max(1e-300));
    }

    #[test]
    fn min_power_integral_is_symmetric(p in 0.5..2.0f64, a in 0.0..2.0f64, wa in 0.0..2.0f64,
                                       b in 0.0..2.0f64, wb in 0.0..2.0f64) {
        let x = min_power_integral(p, a, a + wa, b, b + wb);
        let y = min_power_integral(p, b, b + wb, a, a + wa);
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        // bounded by the integral of the smaller box corner power
        prop_assert!(x >= -1e-15 && x <= wa * wb * (a + wa).min(b + wb).powf(p) + 1e-12);
    }
}
