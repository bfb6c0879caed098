//! Monte Carlo studies: simulate → fit over replications, thresholds and
//! parameter grids, then summarize.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tailfit_core::empirical::rank_transform;
use tailfit_core::families::inverted_asym_logistic_theta;
use tailfit_core::mestim::{fit_bivariate, plugin_covariance_ai};
use tailfit_core::simulate::simulate_stream;
use tailfit_core::spatial::{
    fit_joint, fit_least_squares, link_theta_at, pairwise_fits, sup_curve_error, SpatialMethod, SpatialModel,
};
use tailfit_core::{
    FitOptions, SimModel, SimSpec, TailFamily, TailIndexMode, ThetaVector, WeightPreset, WeightScheme, ZetaProfile,
};

use crate::layout::spread_pairs;
use crate::metrics;
use crate::{Result, StudyError};

/// Number of distances on which the curve error is evaluated.
pub const CURVE_GRID_POINTS: usize = 301;
/// Upper end of the distance band for the curve error.
pub const CURVE_GRID_MAX: f64 = 3.0;
/// Number of pairs compared between pairwise and spatial estimates.
pub const COMPARISON_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bias,
    Rmse,
    EuclidBias,
    EuclidRmse,
    SupThetaCurveError,
    BoxplotQuantiles,
    /// Share of replications whose 95% plug-in interval covers the truth.
    Coverage,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Bias,
        Metric::Rmse,
        Metric::EuclidBias,
        Metric::EuclidRmse,
        Metric::SupThetaCurveError,
        Metric::BoxplotQuantiles,
        Metric::Coverage,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Bias => "bias",
            Metric::Rmse => "rmse",
            Metric::EuclidBias => "euclid_bias",
            Metric::EuclidRmse => "euclid_rmse",
            Metric::SupThetaCurveError => "sup_theta_curve_error",
            Metric::BoxplotQuantiles => "boxplot_quantiles",
            Metric::Coverage => "coverage",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = StudyError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| StudyError::InvalidSpec(format!("unknown metric '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Sweep the threshold `k` at fixed truth.
    BiasRmseVsK,
    /// Sweep the truth at fixed `k`.
    ParameterGrid,
    /// Spatial fits, sweeping the effective sample size `m`.
    Spatial,
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Bias, Metric::Rmse]
}

fn default_methods() -> Vec<SpatialMethod> {
    vec![SpatialMethod::LeastSquares]
}

/// A Monte Carlo study design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub name: String,
    pub kind: StudyKind,
    /// Sample-generating template; its model is replaced by each grid point.
    pub generator: SimSpec,
    /// Truth models swept by a parameter grid; empty means the generator's model.
    #[serde(default)]
    pub grid: Vec<SimModel>,
    pub family: TailFamily,
    #[serde(default = "default_weights")]
    pub weights: WeightPreset,
    /// Reference point of the weight norms; defaults to the family's.
    #[serde(default)]
    pub theta_ref: Option<Vec<f64>>,
    #[serde(default)]
    pub zeta_profile: ZetaProfile,
    /// `k` values for bivariate studies, `m` values for spatial ones.
    pub thresholds: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_methods")]
    pub spatial_methods: Vec<SpatialMethod>,
}

fn default_weights() -> WeightPreset {
    WeightPreset::G1
}

impl StudySpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(StudyError::InvalidSpec("replications must be at least 2".into()));
        }
        if self.thresholds.is_empty() {
            return Err(StudyError::InvalidSpec("threshold sweep is empty".into()));
        }
        if self.thresholds.contains(&0) {
            return Err(StudyError::InvalidSpec("thresholds must be positive".into()));
        }
        let spatial = matches!(self.generator.model, SimModel::SpatialIbr { .. });
        if (self.kind == StudyKind::Spatial) != spatial {
            return Err(StudyError::InvalidSpec("spatial studies need a spatial generator and vice versa".into()));
        }
        if self.kind == StudyKind::Spatial {
            if self.family != TailFamily::InvertedHuslerReiss {
                return Err(StudyError::InvalidSpec("spatial studies fit the inverted Hüsler–Reiss family".into()));
            }
            if self.spatial_methods.is_empty() {
                return Err(StudyError::InvalidSpec("no spatial method selected".into()));
            }
        }
        if self.metrics.contains(&Metric::Coverage) && !self.family.is_asymptotically_independent() {
            return Err(StudyError::InvalidSpec("coverage needs a plug-in covariance family".into()));
        }
        if self.metrics.contains(&Metric::Coverage) && self.family == TailFamily::RandomScale {
            return Err(StudyError::InvalidSpec("coverage is not available for random_scale".into()));
        }
        for model in self.models() {
            let mut g = self.generator.clone();
            g.model = model.clone();
            g.validate()?;
            truth_of(&model, self.family)?;
        }
        for &t in &self.thresholds {
            if t > self.generator.n {
                return Err(StudyError::InvalidSpec(format!("threshold {t} exceeds n={}", self.generator.n)));
            }
        }
        Ok(())
    }

    /// Truth models, in sweep order.
    pub fn models(&self) -> Vec<SimModel> {
        if self.grid.is_empty() {
            vec![self.generator.model.clone()]
        } else {
            self.grid.clone()
        }
    }

    fn weight_scheme(&self) -> Result<WeightScheme> {
        let theta_ref = match &self.theta_ref {
            Some(v) => ThetaVector::new(self.family, v.clone())?,
            None => self.family.default_reference(),
        };
        Ok(WeightScheme::preset(self.family, &theta_ref, self.weights)?)
    }

    fn fit_options(&self) -> FitOptions {
        let mut o = FitOptions::with_seed(self.seed);
        o.zeta_profile = self.zeta_profile;
        o
    }
}

/// Parameter values implied by a generating model for the fitted family.
pub fn truth_of(model: &SimModel, family: TailFamily) -> Result<Vec<f64>> {
    match (model, family) {
        (SimModel::M1 { theta }, TailFamily::InvertedHuslerReiss) => Ok(vec![*theta]),
        (SimModel::M2 { nu, phi, r }, TailFamily::InvertedAsymLogistic) => {
            let (a, b) = inverted_asym_logistic_theta(*nu, *phi, *r);
            Ok(vec![a, b])
        }
        (SimModel::M3 { alpha_r, alpha_w }, TailFamily::RandomScale) => Ok(vec![alpha_r / alpha_w]),
        (SimModel::SpatialIbr { alpha, beta, .. }, TailFamily::InvertedHuslerReiss) => Ok(vec![*alpha, *beta]),
        _ => Err(StudyError::InvalidSpec(format!("no known truth for fitting {family} to {model:?}"))),
    }
}

/// Short human label of a grid point.
pub fn model_label(model: &SimModel) -> String {
    match model {
        SimModel::M1 { theta } => format!("m1(theta={theta})"),
        SimModel::M2 { nu, phi, r } => format!("m2(nu={nu};phi={phi};r={r})"),
        SimModel::M3 { alpha_r, alpha_w } => format!("m3(alpha_r={alpha_r};alpha_w={alpha_w})"),
        SimModel::SpatialIbr { coords, alpha, beta } => {
            format!("ibr(d={};alpha={alpha};beta={beta})", coords.len())
        }
    }
}

/// One fitted replication at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRecord {
    pub point: usize,
    pub threshold: usize,
    pub method: String,
    pub replication: usize,
    pub estimate: Vec<f64>,
    pub k: usize,
    pub m: f64,
    pub converged: bool,
    pub boundary: bool,
    /// Plug-in standard errors of the parameter coordinates.
    pub std_error: Option<Vec<f64>>,
    pub sup_error: Option<f64>,
    pub error: Option<String>,
}

/// Metrics of one parameter coordinate (or the Euclidean / curve summaries).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub point: usize,
    pub label: String,
    pub threshold: usize,
    pub method: String,
    /// `theta1`, `theta2`, `alpha`, `beta`, `euclid` or `curve`.
    pub param: String,
    pub truth: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub mean: f64,
    pub bias: Option<f64>,
    pub abs_bias: Option<f64>,
    pub rmse: Option<f64>,
    pub variance: Option<f64>,
    pub mc_se: Option<f64>,
    pub euclid_bias: Option<f64>,
    pub euclid_rmse: Option<f64>,
    pub sup_error_mean: Option<f64>,
    pub quantiles: Option<Vec<f64>>,
    pub coverage: Option<f64>,
}

/// Pairwise-versus-spatial spread at one test pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub point: usize,
    pub threshold: usize,
    pub pair: (usize, usize),
    pub distance: f64,
    pub truth: f64,
    pub iqr_spatial: f64,
    pub iqr_pairwise: f64,
    pub var_spatial: f64,
    pub var_pairwise: f64,
    pub n: usize,
}

/// Outcome of a study. Everything except `wall_clock_secs` is a
/// deterministic function of the spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub name: String,
    pub seed: u64,
    pub labels: Vec<String>,
    pub truths: Vec<Vec<f64>>,
    pub summary: Vec<SummaryRow>,
    pub raw: Vec<RawRecord>,
    pub comparison: Vec<ComparisonRow>,
    pub failed: usize,
    pub total: usize,
    pub wall_clock_secs: f64,
}

impl StudyResult {
    /// Summary rows of a given parameter label.
    pub fn rows<'a>(&'a self, param: &'a str) -> impl Iterator<Item = &'a SummaryRow> + 'a {
        self.summary.iter().filter(move |r| r.param == param)
    }

    /// Estimates of successful replications at `(point, threshold, method)`.
    pub fn estimates(&self, point: usize, threshold: usize, method: &str) -> Vec<Vec<f64>> {
        self.raw
            .iter()
            .filter(|r| r.point == point && r.threshold == threshold && r.method == method && r.error.is_none())
            .map(|r| r.estimate.clone())
            .collect()
    }
}

/// Stream index of replication `rep` at grid point `point`.
pub fn stream_id(point: usize, rep: usize) -> u64 {
    ((point as u64) << 32) | rep as u64
}

fn param_names(kind: StudyKind, dim: usize) -> Vec<String> {
    match kind {
        StudyKind::Spatial => vec!["alpha".into(), "beta".into()],
        _ if dim == 1 => vec!["theta".into()],
        _ => (1..=dim).map(|j| format!("theta{j}")).collect(),
    }
}

struct SpatialRep {
    records: Vec<RawRecord>,
    /// `(threshold, test-pair slot, θ̂ pairwise, θ(Δ; ϑ̂_LS))`
    compare: Vec<(usize, usize, f64, f64)>,
}

fn bivariate_replication(spec: &StudySpec, weights: &WeightScheme, point: usize, model: &SimModel, rep: usize) -> Vec<RawRecord> {
    let mut gen = spec.generator.clone();
    gen.model = model.clone();
    gen.seed = spec.seed;
    let opts = spec.fit_options();
    let want_se = spec.metrics.contains(&Metric::Coverage);
    let failed = |t: usize, msg: String| RawRecord {
        point,
        threshold: t,
        method: "bivariate".into(),
        replication: rep,
        estimate: Vec::new(),
        k: t,
        m: 0.0,
        converged: false,
        boundary: false,
        std_error: None,
        sup_error: None,
        error: Some(msg),
    };
    let sample = match simulate_stream(&gen, stream_id(point, rep)).and_then(|d| rank_transform(&d)) {
        Ok(s) => s,
        Err(e) => return spec.thresholds.iter().map(|&t| failed(t, e.to_string())).collect(),
    };
    spec.thresholds
        .iter()
        .map(|&k| match fit_bivariate(&sample, (0, 1), spec.family, weights, TailIndexMode::FixedK(k), &opts) {
            Ok(f) => {
                let std_error = if want_se {
                    plugin_covariance_ai(spec.family, &f, weights)
                        .ok()
                        .map(|c| (0..f.theta_hat.values().len()).map(|i| c[(i, i)].max(0.0).sqrt()).collect())
                } else {
                    None
                };
                RawRecord {
                    point,
                    threshold: k,
                    method: "bivariate".into(),
                    replication: rep,
                    estimate: f.theta_hat.values().to_vec(),
                    k: f.k_used,
                    m: f.m_used,
                    converged: f.converged,
                    boundary: f.boundary,
                    std_error,
                    sup_error: None,
                    error: None,
                }
            }
            Err(e) => failed(k, e.to_string()),
        })
        .collect()
}

fn spatial_replication(
    spec: &StudySpec,
    weights: &WeightScheme,
    model: &SpatialModel,
    test_pairs: &[usize],
    point: usize,
    sim: &SimModel,
    rep: usize,
) -> SpatialRep {
    let mut gen = spec.generator.clone();
    gen.model = sim.clone();
    gen.seed = spec.seed;
    let SimModel::SpatialIbr { alpha, beta, .. } = *sim else { unreachable!("validated spatial generator") };
    let opts = spec.fit_options();
    let mut out = SpatialRep { records: Vec::new(), compare: Vec::new() };
    let failed = |m: usize, method: SpatialMethod, msg: String| RawRecord {
        point,
        threshold: m,
        method: method_name(method).into(),
        replication: rep,
        estimate: Vec::new(),
        k: 0,
        m: m as f64,
        converged: false,
        boundary: false,
        std_error: None,
        sup_error: None,
        error: Some(msg),
    };
    let sample = match simulate_stream(&gen, stream_id(point, rep)).and_then(|d| rank_transform(&d)) {
        Ok(s) => s,
        Err(e) => {
            for &m in &spec.thresholds {
                for &method in &spec.spatial_methods {
                    out.records.push(failed(m, method, e.to_string()));
                }
            }
            return out;
        }
    };
    for &m in &spec.thresholds {
        for &method in &spec.spatial_methods {
            let res = match method {
                SpatialMethod::LeastSquares => pairwise_fits(&sample, model, m, weights, &opts).and_then(|pw| {
                    let fit = fit_least_squares(&pw.thetas(), model, &opts)?;
                    for (slot, &s) in test_pairs.iter().enumerate() {
                        if let Some((_, f)) = pw.fits.iter().find(|(idx, _)| *idx == s) {
                            out.compare.push((m, slot, f.theta_hat.values()[0], fit.theta_at(model.distances()[s])));
                        }
                    }
                    Ok(fit)
                }),
                SpatialMethod::Joint => fit_joint(&sample, model, m, weights, &opts),
            };
            out.records.push(match res {
                Ok(fit) => RawRecord {
                    point,
                    threshold: m,
                    method: method_name(method).into(),
                    replication: rep,
                    estimate: vec![fit.alpha_hat, fit.beta_hat],
                    k: 0,
                    m: m as f64,
                    converged: fit.converged,
                    boundary: fit.boundary,
                    std_error: None,
                    sup_error: Some(sup_curve_error(
                        (fit.alpha_hat, fit.beta_hat),
                        (alpha, beta),
                        CURVE_GRID_MAX,
                        CURVE_GRID_POINTS,
                    )),
                    error: None,
                },
                Err(e) => failed(m, method, e.to_string()),
            });
        }
    }
    out
}

pub fn method_name(m: SpatialMethod) -> &'static str {
    match m {
        SpatialMethod::LeastSquares => "least_squares",
        SpatialMethod::Joint => "joint",
    }
}

/// Runs any study kind. Replications run in parallel on the current rayon
/// pool; results are collected in a fixed order, so the output does not
/// depend on the number of threads.
pub fn run_study(spec: &StudySpec) -> Result<StudyResult> {
    spec.validate()?;
    let start = Instant::now();
    let weights = spec.weight_scheme()?;
    let models = spec.models();
    let truths: Vec<Vec<f64>> = models.iter().map(|m| truth_of(m, spec.family)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..models.len()).flat_map(|p| (0..spec.replications).map(move |r| (p, r))).collect();

    let mut raw = Vec::new();
    let mut comparison = Vec::new();
    if spec.kind == StudyKind::Spatial {
        // every grid point shares the generator's layout
        let SimModel::SpatialIbr { coords, .. } = &spec.generator.model else { unreachable!("validated") };
        let model = SpatialModel::new(coords.clone())?;
        for g in &models {
            if let SimModel::SpatialIbr { coords: c, .. } = g {
                if c != coords {
                    return Err(StudyError::InvalidSpec("all spatial grid points must share one layout".into()));
                }
            }
        }
        let test_pairs = spread_pairs(model.distances(), COMPARISON_PAIRS);
        let reps: Vec<SpatialRep> = jobs
            .par_iter()
            .map(|&(p, r)| spatial_replication(spec, &weights, &model, &test_pairs, p, &models[p], r))
            .collect();
        let mut per: Vec<Vec<(usize, usize, usize, f64, f64)>> = Vec::new();
        for (&(p, _), rep) in jobs.iter().zip(reps) {
            raw.extend(rep.records);
            per.push(rep.compare.into_iter().map(|(m, slot, a, b)| (p, m, slot, a, b)).collect());
        }
        let flat: Vec<_> = per.into_iter().flatten().collect();
        for (p, g) in models.iter().enumerate() {
            let SimModel::SpatialIbr { alpha, beta, .. } = *g else { continue };
            for &m in &spec.thresholds {
                for (slot, &s) in test_pairs.iter().enumerate() {
                    let sel: Vec<&(usize, usize, usize, f64, f64)> =
                        flat.iter().filter(|c| c.0 == p && c.1 == m && c.2 == slot).collect();
                    if sel.len() < 2 {
                        continue;
                    }
                    let pw: Vec<f64> = sel.iter().map(|c| c.3).collect();
                    let sp: Vec<f64> = sel.iter().map(|c| c.4).collect();
                    let delta = model.distances()[s];
                    comparison.push(ComparisonRow {
                        point: p,
                        threshold: m,
                        pair: model.pairs()[s],
                        distance: delta,
                        truth: link_theta_at(delta, alpha, beta),
                        iqr_spatial: metrics::iqr(&sp),
                        iqr_pairwise: metrics::iqr(&pw),
                        var_spatial: metrics::variance(&sp),
                        var_pairwise: metrics::variance(&pw),
                        n: sel.len(),
                    });
                }
            }
        }
    } else {
        let reps: Vec<Vec<RawRecord>> =
            jobs.par_iter().map(|&(p, r)| bivariate_replication(spec, &weights, p, &models[p], r)).collect();
        raw = reps.into_iter().flatten().collect();
    }
    // order: point, threshold, method, replication
    raw.sort_by(|a, b| {
        (a.point, a.threshold, &a.method, a.replication).cmp(&(b.point, b.threshold, &b.method, b.replication))
    });

    let methods: Vec<String> = if spec.kind == StudyKind::Spatial {
        spec.spatial_methods.iter().map(|&m| method_name(m).to_string()).collect()
    } else {
        vec!["bivariate".into()]
    };
    let labels: Vec<String> = models.iter().map(model_label).collect();
    let mut summary = Vec::new();
    for (p, truth) in truths.iter().enumerate() {
        for &t in &spec.thresholds {
            for method in &methods {
                summary.extend(summarize(spec, p, &labels[p], t, method, truth, &raw));
            }
        }
    }
    let failed = raw.iter().filter(|r| r.error.is_some()).count();
    Ok(StudyResult {
        name: spec.name.clone(),
        seed: spec.seed,
        labels,
        truths,
        summary,
        total: raw.len(),
        failed,
        raw,
        comparison,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

fn summarize(
    spec: &StudySpec,
    point: usize,
    label: &str,
    threshold: usize,
    method: &str,
    truth: &[f64],
    raw: &[RawRecord],
) -> Vec<SummaryRow> {
    let recs: Vec<&RawRecord> =
        raw.iter().filter(|r| r.point == point && r.threshold == threshold && r.method == method).collect();
    let ok: Vec<&&RawRecord> = recs.iter().filter(|r| r.error.is_none()).collect();
    let n_failed = recs.len() - ok.len();
    let has = |m: Metric| spec.metrics.contains(&m);
    let names = param_names(spec.kind, truth.len());
    let base = |param: String, truth: f64, mean: f64| SummaryRow {
        point,
        label: label.to_string(),
        threshold,
        method: method.to_string(),
        param,
        truth,
        n_ok: ok.len(),
        n_failed,
        mean,
        bias: None,
        abs_bias: None,
        rmse: None,
        variance: None,
        mc_se: None,
        euclid_bias: None,
        euclid_rmse: None,
        sup_error_mean: None,
        quantiles: None,
        coverage: None,
    };
    let mut rows = Vec::new();
    if ok.is_empty() {
        for (j, name) in names.iter().enumerate() {
            rows.push(base(name.clone(), truth[j], f64::NAN));
        }
        return rows;
    }
    let est: Vec<Vec<f64>> = ok.iter().map(|r| r.estimate.clone()).collect();
    for (j, name) in names.iter().enumerate() {
        let col: Vec<f64> = est.iter().map(|e| e[j]).collect();
        let mut row = base(name.clone(), truth[j], metrics::mean(&col));
        if has(Metric::Bias) {
            let b = metrics::bias(&col, truth[j]);
            row.bias = Some(b);
            row.abs_bias = Some(b.abs());
            row.mc_se = Some(metrics::mc_standard_error(&col));
        }
        if has(Metric::Rmse) {
            row.rmse = Some(metrics::rmse(&col, truth[j]));
            row.variance = Some(metrics::variance(&col));
        }
        if has(Metric::BoxplotQuantiles) {
            row.quantiles = Some(metrics::quantiles(&col, &metrics::BOXPLOT_LEVELS));
        }
        if has(Metric::Coverage) {
            let covered: Vec<bool> = ok
                .iter()
                .filter_map(|r| r.std_error.as_ref().map(|se| (r.estimate[j] - truth[j]).abs() <= 1.96 * se[j]))
                .collect();
            if !covered.is_empty() {
                row.coverage = Some(covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64);
            }
        }
        rows.push(row);
    }
    if has(Metric::EuclidBias) || has(Metric::EuclidRmse) {
        let mut row = base("euclid".into(), f64::NAN, f64::NAN);
        if has(Metric::EuclidBias) {
            row.euclid_bias = Some(metrics::euclid_bias(&est, truth));
        }
        if has(Metric::EuclidRmse) {
            row.euclid_rmse = Some(metrics::euclid_rmse(&est, truth));
        }
        rows.push(row);
    }
    if has(Metric::SupThetaCurveError) {
        let sup: Vec<f64> = ok.iter().filter_map(|r| r.sup_error).collect();
        if !sup.is_empty() {
            let mut row = base("curve".into(), 0.0, metrics::mean(&sup));
            row.sup_error_mean = Some(metrics::mean(&sup));
            rows.push(row);
        }
    }
    rows
}

/// Threshold sweep at the generator's truth.
pub fn run_bias_rmse_vs_k(spec: &StudySpec) -> Result<StudyResult> {
    if spec.kind != StudyKind::BiasRmseVsK {
        return Err(StudyError::InvalidSpec(format!("expected a bias_rmse_vs_k study, got {:?}", spec.kind)));
    }
    run_study(spec)
}

/// Truth sweep; box-plot quantiles are always reported.
pub fn run_parameter_grid(spec: &StudySpec) -> Result<StudyResult> {
    if spec.kind != StudyKind::ParameterGrid {
        return Err(StudyError::InvalidSpec(format!("expected a parameter_grid study, got {:?}", spec.kind)));
    }
    let mut s = spec.clone();
    if !s.metrics.contains(&Metric::BoxplotQuantiles) {
        s.metrics.push(Metric::BoxplotQuantiles);
    }
    run_study(&s)
}

/// Spatial `m` sweep with curve errors and the pairwise comparison.
pub fn run_spatial_study(spec: &StudySpec) -> Result<StudyResult> {
    if spec.kind != StudyKind::Spatial {
        return Err(StudyError::InvalidSpec(format!("expected a spatial study, got {:?}", spec.kind)));
    }
    run_study(spec)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per replication × sweep point × method.
pub fn write_raw_csv<W: Write>(res: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let dim = res.truths.first().map_or(0, Vec::len);
    let mut header: Vec<String> =
        ["study", "point", "label", "threshold", "method", "replication", "k", "m", "converged", "boundary"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    header.extend((1..=dim).map(|j| format!("est{j}")));
    header.extend((1..=dim).map(|j| format!("se{j}")));
    header.extend(["sup_error".to_string(), "error".to_string()]);
    w.write_record(&header)?;
    for r in &res.raw {
        let mut row = vec![
            res.name.clone(),
            r.point.to_string(),
            res.labels[r.point].clone(),
            r.threshold.to_string(),
            r.method.clone(),
            r.replication.to_string(),
            r.k.to_string(),
            r.m.to_string(),
            r.converged.to_string(),
            r.boundary.to_string(),
        ];
        row.extend((0..dim).map(|j| r.estimate.get(j).map(|v| v.to_string()).unwrap_or_default()));
        row.extend((0..dim).map(|j| {
            r.std_error.as_ref().and_then(|s| s.get(j)).map(|v| v.to_string()).unwrap_or_default()
        }));
        row.push(fmt_opt(r.sup_error));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary metrics, one row per sweep point × method × parameter.
pub fn write_summary_csv<W: Write>(res: &StudyResult, metrics_sel: &[Metric], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let has = |m: Metric| metrics_sel.contains(&m);
    let mut header: Vec<&str> =
        vec!["study", "point", "label", "threshold", "method", "param", "truth", "n_ok", "n_failed", "mean"];
    if has(Metric::Bias) {
        header.extend(["bias", "abs_bias", "mc_se"]);
    }
    if has(Metric::Rmse) {
        header.extend(["rmse", "variance"]);
    }
    if has(Metric::EuclidBias) {
        header.push("euclid_bias");
    }
    if has(Metric::EuclidRmse) {
        header.push("euclid_rmse");
    }
    if has(Metric::SupThetaCurveError) {
        header.push("sup_error_mean");
    }
    if has(Metric::BoxplotQuantiles) {
        header.extend(["q025", "q25", "q50", "q75", "q975"]);
    }
    if has(Metric::Coverage) {
        header.push("coverage");
    }
    w.write_record(&header)?;
    for r in &res.summary {
        let mut row = vec![
            res.name.clone(),
            r.point.to_string(),
            r.label.clone(),
            r.threshold.to_string(),
            r.method.clone(),
            r.param.clone(),
            r.truth.to_string(),
            r.n_ok.to_string(),
            r.n_failed.to_string(),
            r.mean.to_string(),
        ];
        if has(Metric::Bias) {
            row.extend([fmt_opt(r.bias), fmt_opt(r.abs_bias), fmt_opt(r.mc_se)]);
        }
        if has(Metric::Rmse) {
            row.extend([fmt_opt(r.rmse), fmt_opt(r.variance)]);
        }
        if has(Metric::EuclidBias) {
            row.push(fmt_opt(r.euclid_bias));
        }
        if has(Metric::EuclidRmse) {
            row.push(fmt_opt(r.euclid_rmse));
        }
        if has(Metric::SupThetaCurveError) {
            row.push(fmt_opt(r.sup_error_mean));
        }
        if has(Metric::BoxplotQuantiles) {
            match &r.quantiles {
                Some(q) => row.extend(q.iter().map(|v| v.to_string())),
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        if has(Metric::Coverage) {
            row.push(fmt_opt(r.coverage));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Pairwise-versus-spatial comparison rows.
pub fn write_comparison_csv<W: Write>(res: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "study", "point", "threshold", "s1", "s2", "distance", "truth", "iqr_spatial", "iqr_pairwise", "var_spatial",
        "var_pairwise", "n",
    ])?;
    for c in &res.comparison {
        w.write_record([
            res.name.clone(),
            c.point.to_string(),
            c.threshold.to_string(),
            c.pair.0.to_string(),
            c.pair.1.to_string(),
            c.distance.to_string(),
            c.truth.to_string(),
            c.iqr_spatial.to_string(),
            c.iqr_pairwise.to_string(),
            c.var_spatial.to_string(),
            c.var_pairwise.to_string(),
            c.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
