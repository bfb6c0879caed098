use tailfit_core::empirical::rank_transform;
use tailfit_core::mestim::{fit_bivariate, plugin_covariance_ai};
use tailfit_core::simulate::simulate;
use tailfit_core::spatial::{fit_spatial, sup_curve_error};
use tailfit_core::{
    FitOptions, Margins, SimModel, SimSpec, SpatialMethod, SpatialModel, TailFamily, TailIndexMode, WeightPreset,
    WeightScheme,
};

fn scheme(family: TailFamily) -> WeightScheme {
    WeightScheme::preset(family, &family.default_reference(), WeightPreset::G1).unwrap()
}

#[test]
fn m1_end_to_end() {
    let data = simulate(&SimSpec::new(SimModel::M1 { theta: 0.75 }, 5000, 7)).unwrap();
    let s = rank_transform(&data).unwrap();
    let w = scheme(TailFamily::InvertedHuslerReiss);
    let fit = fit_bivariate(&s, (0, 1), TailFamily::InvertedHuslerReiss, &w, TailIndexMode::FixedK(800), &FitOptions::default())
        .unwrap();
    let t = fit.theta_hat.values()[0];
    assert!((t - 0.75).abs() < 0.1, "{t}");
    assert!(fit.converged);
    assert!((fit.eta_hat - 1.0 / (2.0 * t)).abs() < 1e-12);
    let cov = plugin_covariance_ai(TailFamily::InvertedHuslerReiss, &fit, &w).unwrap();
    assert!(cov[(0, 0)] > 0.0 && cov[(0, 0)].sqrt() < 0.1);
}

#[test]
fn m2_margins_do_not_matter() {
    let spec = SimSpec::new(SimModel::M2 { nu: 0.4, phi: 0.9, r: 2.0 }, 3000, 4);
    let a = simulate(&spec).unwrap();
    let b = simulate(&spec.clone().with_margins(Margins::Uniform)).unwrap();
    let w = scheme(TailFamily::InvertedAsymLogistic);
    let opts = FitOptions::default();
    let fit = |d| {
        let s = rank_transform(d).unwrap();
        fit_bivariate(&s, (0, 1), TailFamily::InvertedAsymLogistic, &w, TailIndexMode::EffectiveM(200), &opts).unwrap()
    };
    let (fa, fb) = (fit(&a), fit(&b));
    assert_eq!(fa.theta_hat, fb.theta_hat);
    assert_eq!(fa.k_used, fb.k_used);
}

#[test]
fn spatial_end_to_end() {
    let coords = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.2], [1.5, 1.5], [0.4, 2.4], [2.5, 0.3]];
    let spec = SimSpec::new(SimModel::SpatialIbr { coords: coords.clone(), alpha: 1.0, beta: 3.0 }, 4000, 9);
    let s = rank_transform(&simulate(&spec).unwrap()).unwrap();
    let model = SpatialModel::new(coords).unwrap();
    let w = scheme(TailFamily::InvertedHuslerReiss);
    for method in [SpatialMethod::LeastSquares, SpatialMethod::Joint] {
        let fit = fit_spatial(&s, &model, 150, &w, method, &FitOptions::default()).unwrap();
        let err = sup_curve_error((fit.alpha_hat, fit.beta_hat), (1.0, 3.0), 3.0, 301);
        assert!(err < 0.15, "{method:?}: {err}");
        assert_eq!(fit.pairs.len(), 15);
    }
}
