//! Spatial fitting of inverted Brown–Resnick tail models with a fractal
//! variogram, pooling information across all location pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical::{RankedSample, TailIndexMode};
use crate::error::{Result, TailError};
use crate::families::{CoordBounds, TailFamily, ThetaVector};
use crate::mestim::{
    empirical_moment_vector, fit_bivariate, model_moments_unchecked, profile_zeta_with, residual_norm, BivariateFit,
    FitOptions, WeightScheme,
};
use crate::normal;
use crate::optimize::multistart_minimize;

/// Smallest `α` searched; the domain is `(0, 2]`.
pub const ALPHA_MIN: f64 = 1e-6;

/// Map from spatial parameters to the pairwise bivariate parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialLink {
    /// `θ = Φ((Δ/β)^{α/2} / 2)` for inverted Hüsler–Reiss pairs.
    #[default]
    FractalVariogramIhr,
}

impl SpatialLink {
    pub fn bivariate_family(&self) -> TailFamily {
        match self {
            SpatialLink::FractalVariogramIhr => TailFamily::InvertedHuslerReiss,
        }
    }

    /// Bivariate parameter at distance `delta`.
    pub fn theta(&self, delta: f64, alpha: f64, beta: f64) -> f64 {
        match self {
            SpatialLink::FractalVariogramIhr => link_theta_at(delta, alpha, beta),
        }
    }
}

/// `Φ((Δ/β)^{α/2} / 2)`.
pub fn link_theta_at(delta: f64, alpha: f64, beta: f64) -> f64 {
    normal::cdf(0.5 * (delta / beta).powf(0.5 * alpha))
}

fn check_vartheta(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0 && beta > 0.0 && beta.is_finite()) {
        return Err(TailError::ParamOutOfDomain(format!("(α, β)=({alpha}, {beta}) not in (0,2]×(0,∞)")));
    }
    Ok(())
}

/// Locations, the pairs used for fitting and their distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialModel {
    coords: Vec<[f64; 2]>,
    pairs: Vec<(usize, usize)>,
    distances: Vec<f64>,
    link: SpatialLink,
}

impl SpatialModel {
    /// Model over all `d(d−1)/2` pairs.
    pub fn new(coords: Vec<[f64; 2]>) -> Result<Self> {
        let d = coords.len();
        let pairs = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        Self::with_pairs(coords, pairs)
    }

    /// Model over a chosen list of pairs `(s₁, s₂)` with `s₁ < s₂`.
    pub fn with_pairs(coords: Vec<[f64; 2]>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(TailError::InvalidInput("need at least two locations".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if !(c[0].is_finite() && c[1].is_finite()) {
                return Err(TailError::NonFiniteInput { row: i, col: 0 });
            }
        }
        if pairs.is_empty() {
            return Err(TailError::SpatialNoData);
        }
        let mut distances = Vec::with_capacity(pairs.len());
        for &(a, b) in &pairs {
            if a >= b || b >= coords.len() {
                return Err(TailError::InvalidInput(format!("pair ({a}, {b}) must satisfy s1 < s2 < d")));
            }
            let delta = (coords[a][0] - coords[b][0]).hypot(coords[a][1] - coords[b][1]);
            if delta <= 0.0 {
                return Err(TailError::InvalidInput(format!("locations {a} and {b} coincide")));
            }
            distances.push(delta);
        }
        Ok(Self { coords, pairs, distances, link: SpatialLink::FractalVariogramIhr })
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn link(&self) -> SpatialLink {
        self.link
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    /// `h^{(s)}(ϑ)` for pair index `s`.
    pub fn link_theta(&self, alpha: f64, beta: f64, s: usize) -> Result<f64> {
        check_vartheta(alpha, beta)?;
        let delta = *self
            .distances
            .get(s)
            .ok_or_else(|| TailError::InvalidInput(format!("pair index {s} out of range")))?;
        Ok(self.link.theta(delta, alpha, beta))
    }

    /// Optimizer box for `(α, log β)`.
    fn search_bounds(&self) -> Vec<CoordBounds> {
        let lo = self.distances.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.distances.iter().copied().fold(0.0, f64::max);
        vec![CoordBounds { lo: ALPHA_MIN, hi: 2.0 }, CoordBounds { lo: (lo / 100.0).ln(), hi: (hi * 100.0).ln() }]
    }
}

/// Estimator aggregating pairwise information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialMethod {
    LeastSquares,
    Joint,
}

/// Outcome of fitting one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResult {
    /// Index into [`SpatialModel::pairs`].
    pub index: usize,
    pub pair: (usize, usize),
    pub distance: f64,
    pub k: usize,
    pub m: f64,
    pub theta_hat: Option<f64>,
    pub zeta_hat: Option<f64>,
    pub converged: bool,
    pub boundary: bool,
}

/// A pair that was excluded, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedPair {
    pub pair: (usize, usize),
    pub reason: String,
}

/// Per-pair bivariate fits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseFits {
    pub fits: Vec<(usize, BivariateFit)>,
    pub dropped: Vec<DroppedPair>,
}

impl PairwiseFits {
    /// `(pair index, θ̂^{(s)})` of the retained pairs.
    pub fn thetas(&self) -> Vec<(usize, f64)> {
        self.fits.iter().map(|(s, f)| (*s, f.theta_hat.values()[0])).collect()
    }
}

/// Spatial estimate `ϑ̂ = (α̂, β̂)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialFit {
    pub method: SpatialMethod,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub objective: f64,
    pub m_target: usize,
    pub pairs: Vec<PairResult>,
    pub dropped: Vec<DroppedPair>,
    pub converged: bool,
    pub boundary: bool,
}

impl SpatialFit {
    /// `θ(Δ; ϑ̂)`.
    pub fn theta_at(&self, delta: f64) -> f64 {
        link_theta_at(delta, self.alpha_hat, self.beta_hat)
    }
}

fn check_spatial_weights(model: &SpatialModel, weights: &WeightScheme) -> Result<()> {
    if weights.family() != model.link.bivariate_family() {
        return Err(TailError::InvalidWeights(format!(
            "spatial fitting needs a {} scheme, got {}",
            model.link.bivariate_family(),
            weights.family()
        )));
    }
    Ok(())
}

fn check_sample(sample: &RankedSample, model: &SpatialModel, m: usize) -> Result<()> {
    if sample.d() != model.d() {
        return Err(TailError::InvalidInput(format!(
            "sample has {} columns but the model has {} locations",
            sample.d(),
            model.d()
        )));
    }
    if m == 0 || m > sample.n() {
        return Err(TailError::InvalidInput(format!("m={m} must lie in 1..={}", sample.n())));
    }
    Ok(())
}

/// Bivariate fits for every pair, each with `k̂^{(s)}` chosen from the common `m`.
/// Pairs whose fit fails are dropped and reported.
pub fn pairwise_fits(
    sample: &RankedSample,
    model: &SpatialModel,
    m: usize,
    weights: &WeightScheme,
    opts: &FitOptions,
) -> Result<PairwiseFits> {
    check_spatial_weights(model, weights)?;
    check_sample(sample, model, m)?;
    let family = model.link.bivariate_family();
    let outcomes: Vec<_> = model
        .pairs
        .par_iter()
        .map(|&pair| fit_bivariate(sample, pair, family, weights, TailIndexMode::EffectiveM(m), opts))
        .collect();
    let mut fits = Vec::new();
    let mut dropped = Vec::new();
    for (s, res) in outcomes.into_iter().enumerate() {
        match res {
            Ok(f) => fits.push((s, f)),
            Err(e) => dropped.push(DroppedPair { pair: model.pairs[s], reason: e.to_string() }),
        }
    }
    Ok(PairwiseFits { fits, dropped })
}

fn check_identifiable(model: &SpatialModel, used: &[usize]) -> Result<()> {
    if used.is_empty() {
        return Err(TailError::SpatialNoData);
    }
    let d0 = model.distances[used[0]];
    if used.iter().all(|&s| (model.distances[s] - d0).abs() <= 1e-12 * d0) {
        return Err(TailError::Underidentified(format!(
            "{} usable pair(s), all at distance {d0}",
            used.len()
        )));
    }
    Ok(())
}

fn boundary_flag(model: &SpatialModel, x: &[f64]) -> bool {
    model.search_bounds().iter().zip(x).any(|(b, &v)| v - b.lo <= 1e-6 || b.hi - v <= 1e-6)
}

/// Least-squares estimator: minimizes `Σ_s (h^{(s)}(ϑ) − θ̂^{(s)})²`.
///
/// `thetas` holds `(pair index, θ̂^{(s)})`.
pub fn fit_least_squares(thetas: &[(usize, f64)], model: &SpatialModel, opts: &FitOptions) -> Result<SpatialFit> {
    let used: Vec<usize> = thetas.iter().map(|t| t.0).collect();
    if let Some(&s) = used.iter().find(|&&s| s >= model.pairs.len()) {
        return Err(TailError::InvalidInput(format!("pair index {s} out of range")));
    }
    check_identifiable(model, &used)?;
    let link = model.link;
    let obj = |x: &[f64]| {
        let (alpha, beta) = (x[0], x[1].exp());
        thetas.iter().map(|&(s, t)| (link.theta(model.distances[s], alpha, beta) - t).powi(2)).sum::<f64>()
    };
    let res = multistart_minimize(obj, &model.search_bounds(), &opts.optim);
    let pairs = thetas
        .iter()
        .map(|&(s, t)| PairResult {
            index: s,
            pair: model.pairs[s],
            distance: model.distances[s],
            k: 0,
            m: 0.0,
            theta_hat: Some(t),
            zeta_hat: None,
            converged: true,
            boundary: false,
        })
        .collect();
    Ok(SpatialFit {
        method: SpatialMethod::LeastSquares,
        alpha_hat: res.x[0],
        beta_hat: res.x[1].exp(),
        objective: res.f,
        m_target: 0,
        pairs,
        dropped: Vec::new(),
        converged: res.converged,
        boundary: boundary_flag(model, &res.x),
    })
}

/// Pairwise fits followed by the least-squares aggregation.
pub fn fit_spatial_least_squares(
    sample: &RankedSample,
    model: &SpatialModel,
    m: usize,
    weights: &WeightScheme,
    opts: &FitOptions,
) -> Result<SpatialFit> {
    let pw = pairwise_fits(sample, model, m, weights, opts)?;
    let mut fit = fit_least_squares(&pw.thetas(), model, opts)?;
    for (p, (_, f)) in fit.pairs.iter_mut().zip(&pw.fits) {
        p.k = f.k_used;
        p.m = f.m_used;
        p.converged = f.converged;
        p.boundary = f.boundary;
    }
    fit.m_target = m;
    fit.dropped = pw.dropped;
    Ok(fit)
}

/// Empirical moment vector of one pair with its resolved `(k, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMoments {
    pub index: usize,
    pub k: usize,
    pub m: f64,
    pub b: Vec<f64>,
}

/// `b^{(s)}` for every pair at `k̂^{(s)}` chosen from the common `m`.
pub fn pair_moments(
    sample: &RankedSample,
    model: &SpatialModel,
    m: usize,
    weights: &WeightScheme,
) -> Result<(Vec<PairMoments>, Vec<DroppedPair>)> {
    check_spatial_weights(model, weights)?;
    check_sample(sample, model, m)?;
    let outcomes: Vec<Result<PairMoments>> = model
        .pairs
        .par_iter()
        .enumerate()
        .map(|(s, &pair)| {
            let choice = sample.select_khat(pair, m)?;
            let b = empirical_moment_vector(sample, pair, choice.resolved_k, weights)?;
            if b.iter().all(|&x| x == 0.0) {
                return Err(TailError::NoTailData);
            }
            Ok(PairMoments { index: s, k: choice.resolved_k, m: choice.resolved_m, b })
        })
        .collect();
    let mut ok = Vec::new();
    let mut dropped = Vec::new();
    for (s, r) in outcomes.into_iter().enumerate() {
        match r {
            Ok(p) => ok.push(p),
            Err(e) => dropped.push(DroppedPair { pair: model.pairs[s], reason: e.to_string() }),
        }
    }
    Ok((ok, dropped))
}

/// Joint estimator from precomputed pair moments: minimizes
/// `Σ_s ‖ζ̂^{(s)}(ϑ) v(h^{(s)}(ϑ)) − b^{(s)}‖²` with per-pair profiled scales.
pub fn fit_joint_moments(
    moments: &[PairMoments],
    model: &SpatialModel,
    weights: &WeightScheme,
    opts: &FitOptions,
) -> Result<SpatialFit> {
    check_spatial_weights(model, weights)?;
    let used: Vec<usize> = moments.iter().map(|p| p.index).collect();
    if let Some(&s) = used.iter().find(|&&s| s >= model.pairs.len()) {
        return Err(TailError::InvalidInput(format!("pair index {s} out of range")));
    }
    check_identifiable(model, &used)?;
    let family = model.link.bivariate_family();
    let link = model.link;
    let mode = opts.zeta_profile;
    let pair_term = |p: &PairMoments, alpha: f64, beta: f64| -> Result<(f64, f64, f64)> {
        let theta = link.theta(model.distances[p.index], alpha, beta);
        let v = model_moments_unchecked(family, &[theta], weights);
        let (a, b) = model.pairs[p.index];
        let z = profile_zeta_with(&v, &p.b, mode).map_err(|e| match e {
            TailError::NonPositiveZeta(..) => TailError::NonPositiveZeta(a, b),
            other => other,
        })?;
        Ok((theta, z, residual_norm(z, &v, &p.b).powi(2)))
    };
    let obj = |x: &[f64]| {
        let (alpha, beta) = (x[0], x[1].exp());
        let mut total = 0.0;
        for p in moments {
            match pair_term(p, alpha, beta) {
                Ok((_, _, r)) => total += r,
                Err(_) => return f64::INFINITY,
            }
        }
        total
    };
    let res = multistart_minimize(obj, &model.search_bounds(), &opts.optim);
    let (alpha, beta) = (res.x[0], res.x[1].exp());
    let mut pairs = Vec::with_capacity(moments.len());
    let mut objective = 0.0;
    for p in moments {
        let (_, z, r) = pair_term(p, alpha, beta)?;
        objective += r;
        pairs.push(PairResult {
            index: p.index,
            pair: model.pairs[p.index],
            distance: model.distances[p.index],
            k: p.k,
            m: p.m,
            theta_hat: None,
            zeta_hat: Some(z),
            converged: res.converged,
            boundary: false,
        });
    }
    Ok(SpatialFit {
        method: SpatialMethod::Joint,
        alpha_hat: alpha,
        beta_hat: beta,
        objective,
        m_target: 0,
        pairs,
        dropped: Vec::new(),
        converged: res.converged,
        boundary: boundary_flag(model, &res.x),
    })
}

/// Joint estimator on a ranked sample.
pub fn fit_joint(
    sample: &RankedSample,
    model: &SpatialModel,
    m: usize,
    weights: &WeightScheme,
    opts: &FitOptions,
) -> Result<SpatialFit> {
    let (moments, dropped) = pair_moments(sample, model, m, weights)?;
    let mut fit = fit_joint_moments(&moments, model, weights, opts)?;
    fit.m_target = m;
    fit.dropped = dropped;
    Ok(fit)
}

/// Dispatches to the least-squares or joint estimator.
pub fn fit_spatial(
    sample: &RankedSample,
    model: &SpatialModel,
    m: usize,
    weights: &WeightScheme,
    method: SpatialMethod,
    opts: &FitOptions,
) -> Result<SpatialFit> {
    match method {
        SpatialMethod::LeastSquares => fit_spatial_least_squares(sample, model, m, weights, opts),
        SpatialMethod::Joint => fit_joint(sample, model, m, weights, opts),
    }
}

/// `sup_{Δ ∈ grid} |θ(Δ; a) − θ(Δ; b)|` over `points` equispaced distances in `[0, upper]`.
pub fn sup_curve_error(a: (f64, f64), b: (f64, f64), upper: f64, points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let delta = upper * i as f64 / (points - 1).max(1) as f64;
            (link_theta_at(delta, a.0, a.1) - link_theta_at(delta, b.0, b.1)).abs()
        })
        .fold(0.0, f64::max)
}

/// Reference spatial parameter as a bivariate parameter at distance `delta`.
pub fn theta_vector_at(delta: f64, alpha: f64, beta: f64) -> Result<ThetaVector> {
    check_vartheta(alpha, beta)?;
    ThetaVector::new(TailFamily::InvertedHuslerReiss, vec![link_theta_at(delta, alpha, beta)])
}
