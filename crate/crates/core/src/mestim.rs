//! Bivariate M-estimation of a parametric tail model with a profiled scale.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::empirical::{RankedSample, TailIndexMode};
use crate::error::{Result, TailError};
use crate::families::{TailFamily, ThetaVector};
use crate::optimize::{multistart_minimize, OptimOptions};
use crate::rect::Rectangle;

/// Lower clamp of the profiled scale.
pub const ZETA_EPS: f64 = 1e-12;

/// Distance to the edge of the search box at which an estimate is flagged.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// The five standard rectangles `I₁ … I₅`.
pub fn standard_rectangles() -> [Rectangle; 5] {
    let r = |a, b, c, d| Rectangle { x_lo: a, x_hi: b, y_lo: c, y_hi: d };
    [
        r(0.0, 1.0, 0.0, 1.0),
        r(0.0, 2.0, 0.0, 2.0),
        r(0.5, 1.5, 0.5, 1.5),
        r(0.0, 1.0, 0.0, 3.0),
        r(0.0, 3.0, 0.0, 1.0),
    ]
}

/// Named subsets of the standard rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightPreset {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
}

impl WeightPreset {
    pub const ALL: [WeightPreset; 7] = [
        WeightPreset::G1,
        WeightPreset::G2,
        WeightPreset::G3,
        WeightPreset::G4,
        WeightPreset::G5,
        WeightPreset::G6,
        WeightPreset::G7,
    ];

    /// Zero-based indices into [`standard_rectangles`].
    pub fn indices(&self) -> &'static [usize] {
        match self {
            WeightPreset::G1 => &[0, 1, 2, 3, 4],
            WeightPreset::G2 => &[0, 1],
            WeightPreset::G3 => &[0, 2],
            WeightPreset::G4 => &[0, 3, 4],
            WeightPreset::G5 => &[0, 1, 2],
            WeightPreset::G6 => &[0, 1, 3, 4],
            WeightPreset::G7 => &[0, 2, 3, 4],
        }
    }

    pub fn rectangles(&self) -> Vec<Rectangle> {
        let all = standard_rectangles();
        self.indices().iter().map(|&i| all[i]).collect()
    }
}

impl fmt::Display for WeightPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = WeightPreset::ALL.iter().position(|p| p == self).expect("listed") + 1;
        write!(f, "g{i}")
    }
}

impl FromStr for WeightPreset {
    type Err = TailError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        WeightPreset::ALL
            .iter()
            .find(|p| p.to_string() == t)
            .copied()
            .ok_or_else(|| TailError::InvalidWeights(format!("unknown preset '{s}' (expected g1..g7)")))
    }
}

/// Piecewise-constant weight function: indicators of rectangles, each
/// normalized by the integral of `c` at a reference parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    family: TailFamily,
    rects: Vec<Rectangle>,
    norms: Vec<f64>,
    theta_ref: Vec<f64>,
}

impl WeightScheme {
    pub fn new(family: TailFamily, theta_ref: &ThetaVector, rects: Vec<Rectangle>) -> Result<Self> {
        if theta_ref.family() != family {
            return Err(TailError::InvalidWeights(format!(
                "reference parameter belongs to {}, not {family}",
                theta_ref.family()
            )));
        }
        if rects.len() < family.parameter_dim() + 1 {
            return Err(TailError::InvalidWeights(format!(
                "{} rectangles cannot identify {} parameters plus a scale",
                rects.len(),
                family.parameter_dim()
            )));
        }
        let mut norms = Vec::with_capacity(rects.len());
        for (j, r) in rects.iter().enumerate() {
            let a = family.rect_integral_c(theta_ref, r)?;
            if !(a > 0.0 && a.is_finite()) {
                return Err(TailError::InvalidWeights(format!("rectangle {j} has zero weight norm")));
            }
            norms.push(a);
        }
        Ok(Self { family, rects, norms, theta_ref: theta_ref.values().to_vec() })
    }

    pub fn preset(family: TailFamily, theta_ref: &ThetaVector, preset: WeightPreset) -> Result<Self> {
        Self::new(family, theta_ref, preset.rectangles())
    }

    pub fn family(&self) -> TailFamily {
        self.family
    }

    pub fn rects(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn theta_ref(&self) -> ThetaVector {
        ThetaVector::new(self.family, self.theta_ref.clone()).expect("validated at construction")
    }

    pub fn q(&self) -> usize {
        self.rects.len()
    }

    /// Largest corner coordinate over all rectangles.
    pub fn t_max(&self) -> f64 {
        self.rects.iter().map(Rectangle::max_corner).fold(0.0, f64::max)
    }
}

/// The scheme using all five standard rectangles.
pub fn default_weights(family: TailFamily, theta_ref: &ThetaVector) -> Result<WeightScheme> {
    WeightScheme::preset(family, theta_ref, WeightPreset::G1)
}

fn check_scheme(family: TailFamily, weights: &WeightScheme) -> Result<()> {
    if weights.family != family {
        return Err(TailError::InvalidWeights(format!(
            "scheme was built for {}, not {family}",
            weights.family
        )));
    }
    Ok(())
}

/// `v_j(θ) = ∫∫_{I_j} c_θ / a_j`.
pub fn model_moment_vector(family: TailFamily, theta: &ThetaVector, weights: &WeightScheme) -> Result<Vec<f64>> {
    check_scheme(family, weights)?;
    weights.rects.iter().zip(&weights.norms).map(|(r, a)| Ok(family.rect_integral_c(theta, r)? / a)).collect()
}

pub(crate) fn model_moments_unchecked(family: TailFamily, theta: &[f64], weights: &WeightScheme) -> Vec<f64> {
    weights.rects.iter().zip(&weights.norms).map(|(r, a)| family.rect_integral_unchecked(theta, r) / a).collect()
}

/// `b_j = ∫∫_{I_j} Q̂ₙ(kx/n, ky/n) dx dy / a_j`, exact.
pub fn empirical_moment_vector(
    sample: &RankedSample,
    pair: (usize, usize),
    k: usize,
    weights: &WeightScheme,
) -> Result<Vec<f64>> {
    let tail = sample.pair_tail(pair, k, weights.t_max())?;
    Ok(weights.rects.iter().zip(&weights.norms).map(|(r, a)| tail.rect_integral(r) / a).collect())
}

/// How the scale `ζ` is profiled out of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaProfile {
    /// Exact minimizer `⟨v,b⟩/⟨v,v⟩` of `‖ζv − b‖`.
    #[default]
    InnerProduct,
    /// `Σb_j / Σv_j`.
    RatioOfSums,
}

/// `max(⟨v,b⟩/⟨v,v⟩, ZETA_EPS)`.
pub fn profile_zeta(v: &[f64], b: &[f64]) -> Result<f64> {
    profile_zeta_with(v, b, ZetaProfile::InnerProduct)
}

/// Profiled scale under the chosen rule. The ratio-of-sums rule is not
/// clamped and fails with `NonPositiveZeta` when the ratio is not positive.
pub fn profile_zeta_with(v: &[f64], b: &[f64], mode: ZetaProfile) -> Result<f64> {
    match mode {
        ZetaProfile::InnerProduct => {
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv == 0.0 {
                return Err(TailError::ZeroModelVector);
            }
            let vb: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            Ok((vb / vv).max(ZETA_EPS))
        }
        ZetaProfile::RatioOfSums => {
            let sv: f64 = v.iter().sum();
            if sv == 0.0 {
                return Err(TailError::ZeroModelVector);
            }
            let z = b.iter().sum::<f64>() / sv;
            if z > 0.0 {
                Ok(z)
            } else {
                Err(TailError::NonPositiveZeta(0, 1))
            }
        }
    }
}

/// `‖ζv − b‖`.
pub fn residual_norm(zeta: f64, v: &[f64], b: &[f64]) -> f64 {
    v.iter().zip(b).map(|(x, y)| (zeta * x - y).powi(2)).sum::<f64>().sqrt()
}

/// Settings of the bivariate fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub optim: OptimOptions,
    pub zeta_profile: ZetaProfile,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { optim: OptimOptions::default(), zeta_profile: ZetaProfile::InnerProduct }
    }
}

impl FitOptions {
    pub fn with_seed(seed: u64) -> Self {
        let mut o = Self::default();
        o.optim.seed = seed;
        o
    }
}

/// Minimizer of the profiled objective for a given empirical vector `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentFit {
    pub theta_hat: ThetaVector,
    pub zeta_hat: f64,
    pub objective: f64,
    pub converged: bool,
    pub boundary: bool,
    pub n_restarts_used: usize,
}

/// Result of [`fit_bivariate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariateFit {
    pub pair: (usize, usize),
    pub theta_hat: ThetaVector,
    pub zeta_hat: f64,
    /// `n·ζ̂/m`.
    pub sigma_hat: f64,
    pub eta_hat: f64,
    pub objective: f64,
    pub k_used: usize,
    pub m_used: f64,
    pub converged: bool,
    pub boundary: bool,
    pub n_restarts_used: usize,
}

fn profiled_objective(family: TailFamily, weights: &WeightScheme, b: &[f64], mode: ZetaProfile, theta: &[f64]) -> f64 {
    if !family.contains(theta) {
        return f64::INFINITY;
    }
    let v = model_moments_unchecked(family, theta, weights);
    match profile_zeta_with(&v, b, mode) {
        Ok(z) => residual_norm(z, &v, b),
        Err(_) => f64::INFINITY,
    }
}

fn on_boundary(family: TailFamily, theta: &[f64]) -> bool {
    let near_box = family
        .search_bounds()
        .iter()
        .zip(theta)
        .any(|(b, &t)| t - b.lo <= BOUNDARY_TOL || b.hi - t <= BOUNDARY_TOL);
    let near_sum = family == TailFamily::InvertedAsymLogistic && theta[0] + theta[1] - 1.0 <= BOUNDARY_TOL;
    near_box || near_sum
}

/// Minimizes `θ ↦ ‖ζ̂(θ)v(θ) − b‖` over the search box of `family`.
///
/// `converged` is cleared when the optimizer hit its iteration limit or an
/// interior estimate fails a coordinate-wise local-minimum check.
pub fn fit_moments(family: TailFamily, weights: &WeightScheme, b: &[f64], opts: &FitOptions) -> Result<MomentFit> {
    check_scheme(family, weights)?;
    if b.len() != weights.q() {
        return Err(TailError::InvalidInput(format!("b has length {}, scheme has {}", b.len(), weights.q())));
    }
    if b.iter().all(|&x| x == 0.0) {
        return Err(TailError::NoTailData);
    }
    let obj = |t: &[f64]| profiled_objective(family, weights, b, opts.zeta_profile, t);
    let bounds = family.search_bounds();
    let res = multistart_minimize(obj, &bounds, &opts.optim);
    if !res.f.is_finite() {
        return Err(TailError::NoTailData);
    }
    let boundary = on_boundary(family, &res.x);
    let mut converged = res.converged;
    if converged && !boundary {
        for (i, bd) in bounds.iter().enumerate() {
            let h = 1e-4 * (bd.hi - bd.lo);
            for s in [-h, h] {
                let mut t = res.x.clone();
                t[i] = (t[i] + s).clamp(bd.lo, bd.hi);
                if obj(&t) < res.f - opts.optim.f_tol {
                    converged = false;
                }
            }
        }
    }
    let theta_hat = ThetaVector::new(family, res.x)?;
    let v = model_moment_vector(family, &theta_hat, weights)?;
    let zeta_hat = profile_zeta_with(&v, b, opts.zeta_profile)?;
    Ok(MomentFit {
        objective: residual_norm(zeta_hat, &v, b),
        theta_hat,
        zeta_hat,
        converged,
        boundary,
        n_restarts_used: res.n_restarts,
    })
}

/// Fits `family` to one pair of columns of a ranked sample.
pub fn fit_bivariate(
    sample: &RankedSample,
    pair: (usize, usize),
    family: TailFamily,
    weights: &WeightScheme,
    mode: TailIndexMode,
    opts: &FitOptions,
) -> Result<BivariateFit> {
    check_scheme(family, weights)?;
    let choice = sample.resolve(pair, mode)?;
    let b = empirical_moment_vector(sample, pair, choice.resolved_k, weights)?;
    let mf = fit_moments(family, weights, &b, opts)?;
    let m = choice.resolved_m;
    let sigma_hat = if m > 0.0 { sample.n() as f64 * mf.zeta_hat / m } else { f64::INFINITY };
    Ok(BivariateFit {
        pair,
        eta_hat: family.eta_of(&mf.theta_hat)?,
        theta_hat: mf.theta_hat,
        zeta_hat: mf.zeta_hat,
        sigma_hat,
        objective: mf.objective,
        k_used: choice.resolved_k,
        m_used: m,
        converged: mf.converged,
        boundary: mf.boundary,
        n_restarts_used: mf.n_restarts_used,
    })
}

/// `∫_{lo₁}^{hi₁} ∫_{lo₂}^{hi₂} min(s, t)^p ds dt`.
pub fn min_power_integral(p: f64, lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> f64 {
    // G(s, t) = ∫₀ˢ∫₀ᵗ min^p
    let g = |s: f64, t: f64| {
        let (a, b) = if s <= t { (s, t) } else { (t, s) };
        2.0 * a.powf(p + 2.0) / ((p + 1.0) * (p + 2.0)) + (b - a) * a.powf(p + 1.0) / (p + 1.0)
    };
    g(hi1, hi2) - g(lo1, hi2) - g(hi1, lo2) + g(lo1, lo2)
}

/// `A_{jl} = ∫_{I_j}∫_{I_l} c_θ(x∧x′, y∧y′) / (a_j a_l)` for product-form `c`.
pub fn covariance_kernel_matrix(family: TailFamily, theta: &ThetaVector, weights: &WeightScheme) -> Result<DMatrix<f64>> {
    check_scheme(family, weights)?;
    let t = theta.values();
    let (p, q) = match family {
        TailFamily::InvertedHuslerReiss => (t[0], t[0]),
        TailFamily::InvertedAsymLogistic => (t[0], t[1]),
        other => return Err(TailError::UnsupportedFamily(other.name())),
    };
    let n = weights.q();
    let (r, a) = (&weights.rects, &weights.norms);
    Ok(DMatrix::from_fn(n, n, |j, l| {
        let fx = min_power_integral(p, r[j].x_lo, r[j].x_hi, r[l].x_lo, r[l].x_hi);
        let fy = min_power_integral(q, r[j].y_lo, r[j].y_hi, r[l].y_lo, r[l].y_hi);
        fx * fy / (a[j] * a[l])
    }))
}

/// Central-difference Jacobian of `Ψ(θ, σ) = σ v(θ) − v(θ̂)` at `(θ̂, 1)`;
/// columns are `∂/∂θ₁ … ∂/∂θ_p, ∂/∂σ`.
pub fn moment_jacobian(family: TailFamily, theta: &ThetaVector, weights: &WeightScheme, rel_step: f64) -> Result<DMatrix<f64>> {
    check_scheme(family, weights)?;
    let t = theta.values();
    let p = t.len();
    let q = weights.q();
    let mut jac = DMatrix::zeros(q, p + 1);
    for i in 0..p {
        let h = rel_step * t[i].abs().max(1e-3);
        let mut up = t.to_vec();
        let mut dn = t.to_vec();
        up[i] += h;
        dn[i] -= h;
        let vu = model_moments_unchecked(family, &up, weights);
        let vd = model_moments_unchecked(family, &dn, weights);
        for j in 0..q {
            jac[(j, i)] = (vu[j] - vd[j]) / (2.0 * h);
        }
    }
    let v = model_moments_unchecked(family, t, weights);
    for j in 0..q {
        jac[(j, p)] = v[j];
    }
    Ok(jac)
}

/// Estimated covariance of `(θ̂, nζ̂/m)`: `Σ/m` with
/// `Σ = (JᵀJ)⁻¹JᵀAJ(JᵀJ)⁻¹`, available for product-form families.
pub fn plugin_covariance_ai(family: TailFamily, fit: &BivariateFit, weights: &WeightScheme) -> Result<DMatrix<f64>> {
    let sigma = asymptotic_covariance_ai(family, &fit.theta_hat, weights)?;
    Ok(sigma / fit.m_used)
}

/// `Σ = (JᵀJ)⁻¹JᵀAJ(JᵀJ)⁻¹` at `θ`.
pub fn asymptotic_covariance_ai(family: TailFamily, theta: &ThetaVector, weights: &WeightScheme) -> Result<DMatrix<f64>> {
    let a = covariance_kernel_matrix(family, theta, weights)?;
    let j = moment_jacobian(family, theta, weights, 1e-5)?;
    let jtj = j.transpose() * &j;
    let scale = jtj.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let eig = jtj.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| e <= 1e-10 * scale) {
        return Err(TailError::SingularJ);
    }
    let inv = jtj.try_inverse().ok_or(TailError::SingularJ)?;
    let s = &inv * j.transpose() * a * &j * &inv;
    Ok((&s + s.transpose()) * 0.5)
}

/// Objective value `‖ζ v(θ) − b‖` for arbitrary `(θ, ζ)`.
pub fn objective_at(family: TailFamily, theta: &ThetaVector, zeta: f64, weights: &WeightScheme, b: &[f64]) -> Result<f64> {
    let v = model_moment_vector(family, theta, weights)?;
    Ok(residual_norm(zeta, &v, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ihr(t: f64) -> ThetaVector {
        ThetaVector::new(TailFamily::InvertedHuslerReiss, vec![t]).unwrap()
    }

    #[test]
    fn default_scheme_norms() {
        let w = default_weights(TailFamily::InvertedHuslerReiss, &ihr(0.6)).unwrap();
        assert_relative_eq!(w.norms()[0], 0.390625, max_relative = 1e-12);
        assert_relative_eq!(w.norms()[1], 3.589682, max_relative = 1e-6);
        assert_eq!(w.t_max(), 3.0);
        assert_eq!(w.q(), 5);
    }

    #[test]
    fn model_vector_at_reference_is_ones() {
        for fam in TailFamily::ALL {
            let r = fam.default_reference();
            let w = default_weights(fam, &r).unwrap();
            for v in model_moment_vector(fam, &r, &w).unwrap() {
                assert_relative_eq!(v, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn model_vector_closed_form() {
        let w = default_weights(TailFamily::InvertedHuslerReiss, &ihr(0.6)).unwrap();
        let v = model_moment_vector(TailFamily::InvertedHuslerReiss, &ihr(0.8), &w).unwrap();
        assert_relative_eq!(v[0], (1.0 / (1.8f64 * 1.8)) / 0.390625, max_relative = 1e-12);
        assert_relative_eq!(v[0], 0.790123, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_rectangle_is_rejected() {
        let mut rects = standard_rectangles().to_vec();
        rects[2] = Rectangle { x_lo: 1.0, x_hi: 1.0, y_lo: 0.0, y_hi: 1.0 };
        assert!(matches!(
            WeightScheme::new(TailFamily::InvertedHuslerReiss, &ihr(0.6), rects),
            Err(TailError::InvalidWeights(_))
        ));
    }

    #[test]
    fn too_few_rectangles_is_rejected() {
        let r = TailFamily::InvertedAsymLogistic.default_reference();
        assert!(WeightScheme::preset(TailFamily::InvertedAsymLogistic, &r, WeightPreset::G2).is_err());
        assert!(WeightScheme::preset(TailFamily::InvertedAsymLogistic, &r, WeightPreset::G4).is_ok());
    }

    #[test]
    fn presets_parse() {
        for p in WeightPreset::ALL {
            assert_eq!(p.to_string().parse::<WeightPreset>().unwrap(), p);
        }
        assert!("g8".parse::<WeightPreset>().is_err());
        assert_eq!(WeightPreset::G6.rectangles().len(), 4);
    }

    #[test]
    fn empirical_vector_on_toy_sample() {
        let s = RankedSample::from_ranks(4, vec![vec![4, 2, 3, 1], vec![4, 3, 2, 1]]).unwrap();
        let w = default_weights(TailFamily::InvertedHuslerReiss, &ihr(0.6)).unwrap();
        let b = empirical_moment_vector(&s, (0, 1), 2, &w).unwrap();
        assert_relative_eq!(b[0], 0.16, max_relative = 1e-12);
    }

    #[test]
    fn zeta_profile_examples() {
        assert_relative_eq!(profile_zeta(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 2.0);
        assert_eq!(profile_zeta(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), ZETA_EPS);
        assert_relative_eq!(profile_zeta(&[1.0, 1.0], &[1.0, 3.0]).unwrap(), 2.0);
        assert_eq!(profile_zeta(&[0.0, 0.0], &[1.0, 1.0]), Err(TailError::ZeroModelVector));
        assert_relative_eq!(profile_zeta_with(&[1.0, 3.0], &[1.0, 1.0], ZetaProfile::RatioOfSums).unwrap(), 0.5);
    }

    #[test]
    fn noise_free_inversion_ihr() {
        let fam = TailFamily::InvertedHuslerReiss;
        let w = default_weights(fam, &fam.default_reference()).unwrap();
        let v = model_moment_vector(fam, &ihr(0.83), &w).unwrap();
        let b: Vec<f64> = v.iter().map(|x| 0.7 * x).collect();
        let f = fit_moments(fam, &w, &b, &FitOptions::default()).unwrap();
        assert!((f.theta_hat.values()[0] - 0.83).abs() < 1e-6);
        assert!((f.zeta_hat - 0.7).abs() < 1e-6);
        assert!(f.converged && !f.boundary);
    }

    #[test]
    fn zero_b_is_no_tail_data() {
        let fam = TailFamily::InvertedHuslerReiss;
        let w = default_weights(fam, &fam.default_reference()).unwrap();
        assert_eq!(fit_moments(fam, &w, &[0.0; 5], &FitOptions::default()), Err(TailError::NoTailData));
    }

    #[test]
    fn min_power_integral_matches_quadrature() {
        let p = 1.3;
        let exact = min_power_integral(p, 0.5, 1.5, 0.0, 3.0);
        let num = crate::quadrature::integrate_rect_2d(|s, t| s.min(t).powf(p), 0.5, 1.5, 0.0, 3.0, 1e-11);
        assert_relative_eq!(exact, num, max_relative = 1e-8);
    }

    #[test]
    fn covariance_is_symmetric_psd() {
        let fam = TailFamily::InvertedAsymLogistic;
        let w = default_weights(fam, &fam.default_reference()).unwrap();
        let th = ThetaVector::new(fam, vec![0.7, 0.85]).unwrap();
        let s = asymptotic_covariance_ai(fam, &th, &w).unwrap();
        assert_eq!(s.shape(), (3, 3));
        assert!((&s - s.transpose()).amax() < 1e-12);
        assert!(s.symmetric_eigen().eigenvalues.iter().all(|&e| e >= -1e-10));
    }

    #[test]
    fn covariance_unsupported_for_ad() {
        let fam = TailFamily::HuslerReissAD;
        let w = default_weights(fam, &fam.default_reference()).unwrap();
        assert_eq!(
            asymptotic_covariance_ai(fam, &fam.default_reference(), &w),
            Err(TailError::UnsupportedFamily("husler_reiss_ad"))
        );
    }

    #[test]
    fn jacobian_matches_richardson() {
        let fam = TailFamily::InvertedAsymLogistic;
        let w = default_weights(fam, &fam.default_reference()).unwrap();
        let th = ThetaVector::new(fam, vec![0.65, 0.9]).unwrap();
        let j = moment_jacobian(fam, &th, &w, 1e-5).unwrap();
        let t = th.values();
        for i in 0..2 {
            let h = 1e-3;
            let at = |d: f64| {
                let mut x = t.to_vec();
                x[i] += d;
                model_moments_unchecked(fam, &x, &w)
            };
            let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
            for r in 0..5 {
                let rich = (8.0 * (p1[r] - m1[r]) - (p2[r] - m2[r])) / (12.0 * h);
                assert_relative_eq!(j[(r, i)], rich, max_relative = 1e-4);
            }
        }
    }
}
