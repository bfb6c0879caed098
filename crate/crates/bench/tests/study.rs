use tailfit_bench::study::{write_raw_csv, write_summary_csv, StudyKind};
use tailfit_bench::{run_bias_rmse_vs_k, run_parameter_grid, run_study, Metric, SimModel, SimSpec, StudyError, StudySpec, TailFamily};
use tailfit_bench::{WeightPreset, ZetaProfile};

fn m1_spec(reps: usize) -> StudySpec {
    StudySpec {
        name: "t".into(),
        kind: StudyKind::BiasRmseVsK,
        generator: SimSpec::new(SimModel::M1 { theta: 0.75 }, 1000, 0),
        grid: Vec::new(),
        family: TailFamily::InvertedHuslerReiss,
        weights: WeightPreset::G1,
        theta_ref: None,
        zeta_profile: ZetaProfile::InnerProduct,
        thresholds: vec![100, 200],
        replications: reps,
        seed: 11,
        metrics: Metric::ALL.to_vec(),
        spatial_methods: vec![],
    }
}

fn csvs(spec: &StudySpec, threads: usize) -> (Vec<u8>, Vec<u8>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let res = pool.install(|| run_study(spec)).unwrap();
    let mut raw = Vec::new();
    let mut sum = Vec::new();
    write_raw_csv(&res, &mut raw).unwrap();
    write_summary_csv(&res, &spec.metrics, &mut sum).unwrap();
    (raw, sum)
}

#[test]
fn replications_guard() {
    assert!(matches!(run_study(&m1_spec(1)), Err(StudyError::InvalidSpec(_))));
    let mut s = m1_spec(4);
    s.thresholds.clear();
    assert!(matches!(run_study(&s), Err(StudyError::InvalidSpec(_))));
}

#[test]
fn thread_count_does_not_change_output() {
    let s = m1_spec(6);
    assert_eq!(csvs(&s, 1), csvs(&s, 3));
}

#[test]
fn rmse_dominates_bias() {
    let res = run_study(&m1_spec(8)).unwrap();
    assert_eq!(res.failed, 0);
    for r in res.rows("theta") {
        let (b, e, v) = (r.bias.unwrap(), r.rmse.unwrap(), r.variance.unwrap());
        assert!(e * e + 1e-12 >= b * b);
        assert!((e * e - b * b - v).abs() <= 1e-10 * (e * e).max(1e-300));
        assert!(r.coverage.is_some());
        assert_eq!(r.quantiles.as_ref().unwrap().len(), 5);
    }
}

#[test]
fn single_point_grid_matches_threshold_sweep() {
    let mut a = m1_spec(4);
    a.thresholds = vec![150];
    a.metrics = vec![Metric::Bias, Metric::Rmse];
    let mut b = a.clone();
    b.kind = StudyKind::ParameterGrid;
    b.grid = vec![a.generator.model.clone()];
    let ra = run_bias_rmse_vs_k(&a).unwrap();
    let rb = run_parameter_grid(&b).unwrap();
    assert_eq!(ra.raw, rb.raw);
    let (x, y) = (ra.rows("theta").next().unwrap(), rb.rows("theta").next().unwrap());
    assert_eq!((x.bias, x.rmse), (y.bias, y.rmse));
    assert!(y.quantiles.is_some());
}

#[test]
fn wrong_kind_rejected() {
    let s = m1_spec(3);
    assert!(run_parameter_grid(&s).is_err());
    let mut bad = s.clone();
    bad.family = TailFamily::RandomScale;
    assert!(matches!(run_study(&bad), Err(StudyError::InvalidSpec(_))));
}
