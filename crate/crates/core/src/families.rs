//! Parametric survival tail functions `c_θ`, their homogeneity index `1/η`,
//! the extremal dependence coefficient `χ`, and the two stable tail
//! dependence functions `ℓ` they are built from.
//!
//! Every family is normalized so that `c_θ(1, 1) = 1` and is homogeneous:
//! `c_θ(tx, ty) = t^{1/η(θ)} c_θ(x, y)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};
use crate::normal;
use crate::quadrature;
use crate::rect::Rectangle;

/// Margin used to keep estimates inside open parameter bounds.
pub const THETA_EPS: f64 = 1e-8;

const QUAD_REL_TOL: f64 = 1e-9;

/// Parameter of the Hüsler–Reiss model; `Independent` stands for `λ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HrLambda {
    Finite(f64),
    Independent,
}

/// Bivariate stable tail dependence functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stdf {
    HuslerReiss(HrLambda),
    AsymLogistic { nu: f64, phi: f64, r: f64 },
}

impl Stdf {
    pub fn husler_reiss(lambda: f64) -> Result<Self> {
        let s = Stdf::HuslerReiss(HrLambda::Finite(lambda));
        s.validate()?;
        Ok(s)
    }

    pub fn asym_logistic(nu: f64, phi: f64, r: f64) -> Result<Self> {
        let s = Stdf::AsymLogistic { nu, phi, r };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Stdf::HuslerReiss(HrLambda::Finite(l)) if !(l >= 0.0 && l.is_finite()) => Err(
                TailError::ParamOutOfRange(format!("Hüsler–Reiss λ={l} must be in [0, ∞)")),
            ),
            Stdf::AsymLogistic { nu, phi, r }
                if !((0.0..=1.0).contains(&nu) && (0.0..=1.0).contains(&phi) && r >= 1.0 && r.is_finite()) =>
            {
                Err(TailError::ParamOutOfRange(format!(
                    "asymmetric logistic (ν={nu}, φ={phi}, r={r}) needs ν,φ ∈ [0,1], r ≥ 1"
                )))
            }
            _ => Ok(()),
        }
    }

    /// `ℓ(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        if !(x >= 0.0 && y >= 0.0) {
            return Err(TailError::InvalidInput(format!("ℓ needs x, y ≥ 0, got ({x}, {y})")));
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        match *self {
            Stdf::HuslerReiss(HrLambda::Independent) => x + y,
            Stdf::HuslerReiss(HrLambda::Finite(l)) => {
                if x == 0.0 || y == 0.0 {
                    return x + y;
                }
                if l == 0.0 {
                    return x.max(y);
                }
                let d = (x.ln() - y.ln()) / (2.0 * l);
                x * normal::cdf(l + d) + y * normal::cdf(l - d)
            }
            Stdf::AsymLogistic { nu, phi, r } => {
                (1.0 - nu) * x + (1.0 - phi) * y + power_mean(nu * x, phi * y, r)
            }
        }
    }

    /// `x + y − ℓ(x, y)`, computed without cancellation where possible.
    pub(crate) fn excess(&self, x: f64, y: f64) -> f64 {
        match *self {
            Stdf::HuslerReiss(HrLambda::Independent) => 0.0,
            Stdf::HuslerReiss(HrLambda::Finite(l)) => {
                if x == 0.0 || y == 0.0 {
                    return 0.0;
                }
                if l == 0.0 {
                    return x.min(y);
                }
                let d = (x.ln() - y.ln()) / (2.0 * l);
                x * normal::sf(l + d) + y * normal::sf(l - d)
            }
            Stdf::AsymLogistic { nu, phi, r } => power_mean_gap(nu * x, phi * y, r),
        }
    }

    /// `∂ℓ/∂x (x, y)` for `x > 0`.
    pub fn d_dx(&self, x: f64, y: f64) -> f64 {
        match *self {
            Stdf::HuslerReiss(HrLambda::Independent) => 1.0,
            Stdf::HuslerReiss(HrLambda::Finite(l)) => {
                if y == 0.0 {
                    return 1.0;
                }
                if x == 0.0 {
                    return 0.0;
                }
                if l == 0.0 {
                    return if x > y { 1.0 } else if x < y { 0.0 } else { 0.5 };
                }
                normal::cdf(l + (x.ln() - y.ln()) / (2.0 * l))
            }
            Stdf::AsymLogistic { nu, phi, r } => {
                let a = nu * x;
                let s = power_mean(a, phi * y, r);
                if s == 0.0 {
                    return 1.0 - nu;
                }
                (1.0 - nu) + nu * (a / s).powf(r - 1.0)
            }
        }
    }

    /// `ℓ(1, 1)`, the extremal coefficient.
    pub fn extremal_coefficient(&self) -> f64 {
        self.eval_unchecked(1.0, 1.0)
    }
}

/// `a + b − (a^r + b^r)^{1/r}` for nonnegative `a`, `b`, stable as `r → 1`.
fn power_mean_gap(a: f64, b: f64, r: f64) -> f64 {
    let m = a + b;
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (p, q) = (a / m, b / m);
    let e = r - 1.0;
    // p^r + q^r = 1 + δ
    let delta = p * (e * p.ln()).exp_m1() + q * (e * q.ln()).exp_m1();
    (-m * (delta.ln_1p() / r).exp_m1()).max(0.0)
}

/// `(a^r + b^r)^{1/r}` for nonnegative `a`, `b`, scaled against overflow.
fn power_mean(a: f64, b: f64, r: f64) -> f64 {
    let hi = a.max(b);
    if hi == 0.0 {
        return 0.0;
    }
    let lo = a.min(b);
    hi * (1.0 + (lo / hi).powf(r)).powf(1.0 / r)
}

/// Multiplicative constant `K_λ` of the random-scale scaling function `q`.
pub fn random_scale_k(lambda: f64) -> f64 {
    if lambda < 1.0 {
        2.0 * (1.0 - lambda) / (2.0 - lambda)
    } else if lambda == 1.0 {
        2.0
    } else if lambda < 2.0 {
        (1.0 - 1.0 / lambda).powf(lambda - 1.0) * 2.0 * (lambda - 1.0) / (lambda * (2.0 - lambda))
    } else if lambda == 2.0 {
        0.5
    } else {
        (1.0 - 1.0 / lambda).powi(2) / (1.0 - 2.0 / lambda)
    }
}

/// `(θ₁, θ₂)` of the inverted asymmetric logistic model with stdf parameters `(ν, φ, r)`.
pub fn inverted_asym_logistic_theta(nu: f64, phi: f64, r: f64) -> (f64, f64) {
    let s = (nu.powf(r) + phi.powf(r)).powf(1.0 / r - 1.0);
    (1.0 - nu + nu.powf(r) * s, 1.0 - phi + phi.powf(r) * s)
}

/// `(ν, φ)` of the max-normalized asymmetric logistic representative with asymmetry `ω ∈ (−1, 1)`.
pub fn asym_logistic_weights(omega: f64) -> (f64, f64) {
    ((1.0 + omega).min(1.0), (1.0 - omega).min(1.0))
}

/// Parametric families of survival tail functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    /// `c(x,y) = (xy)^θ`, `θ = Φ(λ) ∈ (1/2, 1]`.
    InvertedHuslerReiss,
    /// `c(x,y) = x^{θ₁} y^{θ₂}`, `θ ∈ (0,1]²`, `θ₁ + θ₂ > 1`.
    InvertedAsymLogistic,
    /// Pareto random scale `R·(W₁, W₂)`, parameter `λ = α_R/α_W > 0`.
    RandomScale,
    /// Domain of attraction of the Hüsler–Reiss distribution, `λ > 0`.
    HuslerReissAD,
    /// Domain of attraction of the asymmetric logistic distribution,
    /// parameter `(ω, r)`; see [`asym_logistic_weights`].
    AsymLogisticAD,
}

/// Bounds of one coordinate of `Θ`, margins already applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordBounds {
    pub lo: f64,
    pub hi: f64,
}

impl TailFamily {
    pub const ALL: [TailFamily; 5] = [
        TailFamily::InvertedHuslerReiss,
        TailFamily::InvertedAsymLogistic,
        TailFamily::RandomScale,
        TailFamily::HuslerReissAD,
        TailFamily::AsymLogisticAD,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TailFamily::InvertedHuslerReiss => "inverted_husler_reiss",
            TailFamily::InvertedAsymLogistic => "inverted_asym_logistic",
            TailFamily::RandomScale => "random_scale",
            TailFamily::HuslerReissAD => "husler_reiss_ad",
            TailFamily::AsymLogisticAD => "asym_logistic_ad",
        }
    }

    pub fn parameter_dim(&self) -> usize {
        match self {
            TailFamily::InvertedAsymLogistic | TailFamily::AsymLogisticAD => 2,
            _ => 1,
        }
    }

    pub fn is_asymptotically_independent(&self) -> bool {
        matches!(
            self,
            TailFamily::InvertedHuslerReiss | TailFamily::InvertedAsymLogistic | TailFamily::RandomScale
        )
    }

    /// Closed-form `c` of product type `x^{p} y^{q}`.
    fn product_exponents(&self, theta: &[f64]) -> Option<(f64, f64)> {
        match self {
            TailFamily::InvertedHuslerReiss => Some((theta[0], theta[0])),
            TailFamily::InvertedAsymLogistic => Some((theta[0], theta[1])),
            _ => None,
        }
    }

    /// Whether `theta` lies in `Θ` (with the `THETA_EPS` margin on open bounds).
    pub fn contains(&self, theta: &[f64]) -> bool {
        if theta.len() != self.parameter_dim() || theta.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            TailFamily::InvertedHuslerReiss => theta[0] >= 0.5 + THETA_EPS && theta[0] <= 1.0,
            TailFamily::InvertedAsymLogistic => {
                theta.iter().all(|t| (THETA_EPS..=1.0).contains(t)) && theta[0] + theta[1] >= 1.0 + THETA_EPS
            }
            TailFamily::RandomScale | TailFamily::HuslerReissAD => theta[0] >= THETA_EPS,
            TailFamily::AsymLogisticAD => theta[0].abs() <= 1.0 - THETA_EPS && theta[1] >= 1.0 + THETA_EPS,
        }
    }

    /// Box used by the optimizer. Unbounded coordinates of `Θ` are truncated
    /// where `c_θ` stops changing appreciably (e.g. all `λ ≥ 2` share one
    /// random-scale `c`).
    pub fn search_bounds(&self) -> Vec<CoordBounds> {
        let b = |lo, hi| CoordBounds { lo, hi };
        match self {
            TailFamily::InvertedHuslerReiss => vec![b(0.5 + THETA_EPS, 1.0)],
            TailFamily::InvertedAsymLogistic => vec![b(THETA_EPS, 1.0), b(THETA_EPS, 1.0)],
            TailFamily::RandomScale => vec![b(THETA_EPS, 2.0)],
            TailFamily::HuslerReissAD => vec![b(THETA_EPS, 5.0)],
            TailFamily::AsymLogisticAD => vec![b(-1.0 + THETA_EPS, 1.0 - THETA_EPS), b(1.0 + THETA_EPS, 20.0)],
        }
    }

    /// Reference point used to normalize the default weight scheme.
    pub fn default_reference(&self) -> ThetaVector {
        let v = match self {
            TailFamily::InvertedHuslerReiss => vec![0.6],
            TailFamily::InvertedAsymLogistic => vec![0.6, 0.6],
            TailFamily::RandomScale => vec![1.0],
            TailFamily::HuslerReissAD => vec![1.0],
            TailFamily::AsymLogisticAD => vec![0.0, 2.0],
        };
        ThetaVector { family: *self, values: v }
    }

    fn check(&self, theta: &ThetaVector) -> Result<()> {
        if theta.family != *self {
            return Err(TailError::ThetaOutOfDomain { family: self.name(), values: theta.values.clone() });
        }
        Ok(())
    }

    /// `c_θ(x, y)`.
    pub fn eval_c(&self, theta: &ThetaVector, x: f64, y: f64) -> Result<f64> {
        self.check(theta)?;
        if !(x >= 0.0 && y >= 0.0) {
            return Err(TailError::InvalidInput(format!("c needs x, y ≥ 0, got ({x}, {y})")));
        }
        Ok(self.c_unchecked(&theta.values, x, y))
    }

    pub(crate) fn c_unchecked(&self, theta: &[f64], x: f64, y: f64) -> f64 {
        match self {
            TailFamily::InvertedHuslerReiss => (x * y).powf(theta[0]),
            TailFamily::InvertedAsymLogistic => x.powf(theta[0]) * y.powf(theta[1]),
            TailFamily::RandomScale => random_scale_c(theta[0], x, y),
            TailFamily::HuslerReissAD => {
                let l = theta[0];
                Stdf::HuslerReiss(HrLambda::Finite(l)).excess(x, y) / (2.0 * normal::sf(l))
            }
            TailFamily::AsymLogisticAD => {
                let stdf = self.stdf(theta).expect("AD family");
                stdf.excess(x, y) / stdf.excess(1.0, 1.0)
            }
        }
    }

    /// Stable tail dependence function behind an asymptotically dependent family.
    pub fn stdf(&self, theta: &[f64]) -> Option<Stdf> {
        match self {
            TailFamily::HuslerReissAD => Some(Stdf::HuslerReiss(HrLambda::Finite(theta[0]))),
            TailFamily::AsymLogisticAD => {
                let (nu, phi) = asym_logistic_weights(theta[0]);
                Some(Stdf::AsymLogistic { nu, phi, r: theta[1] })
            }
            _ => None,
        }
    }

    /// Homogeneity order `1/η` of `c_θ`.
    pub(crate) fn order(&self, theta: &[f64]) -> f64 {
        match self {
            TailFamily::InvertedHuslerReiss => 2.0 * theta[0],
            TailFamily::InvertedAsymLogistic => theta[0] + theta[1],
            TailFamily::RandomScale => theta[0].clamp(1.0, 2.0),
            TailFamily::HuslerReissAD | TailFamily::AsymLogisticAD => 1.0,
        }
    }

    /// Residual tail dependence coefficient `η(θ)`.
    pub fn eta_of(&self, theta: &ThetaVector) -> Result<f64> {
        self.check(theta)?;
        Ok(1.0 / self.order(&theta.values))
    }

    /// Extremal dependence coefficient `χ(θ)`. For the random-scale model
    /// with `λ < 1` this is `K_λ`.
    pub fn chi_of(&self, theta: &ThetaVector) -> Result<f64> {
        self.check(theta)?;
        let t = &theta.values;
        Ok(match self {
            TailFamily::InvertedHuslerReiss | TailFamily::InvertedAsymLogistic => 0.0,
            TailFamily::RandomScale if t[0] < 1.0 => random_scale_k(t[0]),
            TailFamily::RandomScale => 0.0,
            TailFamily::HuslerReissAD => 2.0 * normal::sf(t[0]),
            TailFamily::AsymLogisticAD => self.stdf(t).expect("AD family").excess(1.0, 1.0),
        })
    }

    /// `∫∫_rect c_θ`.
    pub fn rect_integral_c(&self, theta: &ThetaVector, rect: &Rectangle) -> Result<f64> {
        self.check(theta)?;
        Ok(self.rect_integral_unchecked(&theta.values, rect))
    }

    pub(crate) fn rect_integral_unchecked(&self, theta: &[f64], rect: &Rectangle) -> f64 {
        if rect.is_degenerate() {
            return 0.0;
        }
        if let Some((p, q)) = self.product_exponents(theta) {
            let fx = (rect.x_hi.powf(p + 1.0) - rect.x_lo.powf(p + 1.0)) / (p + 1.0);
            let fy = (rect.y_hi.powf(q + 1.0) - rect.y_lo.powf(q + 1.0)) / (q + 1.0);
            return fx * fy;
        }
        let s = |x0: f64, y0: f64| self.corner_integral(theta, x0, y0);
        s(rect.x_hi, rect.y_hi) - s(rect.x_lo, rect.y_hi) - s(rect.x_hi, rect.y_lo) + s(rect.x_lo, rect.y_lo)
    }

    /// `∫₀^{x0} ∫₀^{y0} c_θ`, reduced by homogeneity to one-dimensional
    /// integrals of `c` along the edges `x = 1` and `y = 1`:
    ///
    /// `S(x0, y0) = x0^{ρ+2} [∫₀ˢ c(1,t) dt + s^{ρ+2} ∫₀^{1/s} c(u,1) du] / (ρ+2)`
    /// with `s = y0/x0` and `ρ` the order of homogeneity.
    fn corner_integral(&self, theta: &[f64], x0: f64, y0: f64) -> f64 {
        if x0 <= 0.0 || y0 <= 0.0 {
            return 0.0;
        }
        let rho = self.order(theta);
        let s = y0 / x0;
        // breakpoints at 1 and, for the asymmetric logistic, around the ridge
        // where both power-mean terms are equal (sharp for large r)
        let ridge = match self {
            TailFamily::AsymLogisticAD => {
                let (nu, phi) = asym_logistic_weights(theta[0]);
                let w = (2.0 / theta[1]).min(0.5);
                Some((nu / phi, w))
            }
            _ => None,
        };
        let edge = |f: &dyn Fn(f64) -> f64, upper: f64, ridge: Option<(f64, f64)>| {
            let mut pts = vec![0.0, upper];
            if upper > 1.0 {
                pts.push(1.0);
            }
            if let Some((t, w)) = ridge {
                pts.extend([t * (1.0 - w), t, t * (1.0 + w)].into_iter().filter(|&p| p > 0.0 && p < upper));
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            quadrature::integrate_segments(f, &pts, QUAD_REL_TOL, 1e-15)
        };
        let (a, b) = match self {
            // symmetric, with closed-form edge integrals
            TailFamily::RandomScale => (random_scale_edge(theta[0], s), random_scale_edge(theta[0], 1.0 / s)),
            _ => (
                edge(&|t| self.c_unchecked(theta, 1.0, t), s, ridge),
                edge(&|u| self.c_unchecked(theta, u, 1.0), 1.0 / s, ridge.map(|(t, w)| (1.0 / t, w))),
            ),
        };
        x0.powf(rho + 2.0) * (a + s.powf(rho + 2.0) * b) / (rho + 2.0)
    }

    /// Reference route for `∫∫_rect c_θ`: direct two-dimensional adaptive
    /// quadrature with the rectangle split along the diagonal.
    pub fn rect_integral_c_2d(&self, theta: &ThetaVector, rect: &Rectangle, rel_tol: f64) -> Result<f64> {
        self.check(theta)?;
        let t = &theta.values;
        Ok(quadrature::integrate_rect_2d(
            |x, y| self.c_unchecked(t, x, y),
            rect.x_lo,
            rect.x_hi,
            rect.y_lo,
            rect.y_hi,
            rel_tol,
        ))
    }
}

/// Survival tail function of the Pareto random scale model, by regime of `λ`.
fn random_scale_c(lambda: f64, x: f64, y: f64) -> f64 {
    // the λ ≠ 1 formulas cancel catastrophically near λ = 1; interpolate
    // quadratically through λ = 1 ± δ and the exact λ = 1 value on the
    // normalized point (max coordinate 1), then rescale by homogeneity
    const DELTA: f64 = 1e-4;
    let e = lambda - 1.0;
    let big = x.max(y);
    if e != 0.0 && e.abs() < DELTA && big > 0.0 {
        let (u, v) = (x / big, y / big);
        let lo = random_scale_c_regime(1.0 - DELTA, u, v);
        let mid = random_scale_c_regime(1.0, u, v);
        let hi = random_scale_c_regime(1.0 + DELTA, u, v);
        let t = e / DELTA;
        let c1 = mid + 0.5 * t * (hi - lo) + 0.5 * t * t * (hi - 2.0 * mid + lo);
        return big.powf(lambda.max(1.0)) * c1;
    }
    random_scale_c_regime(lambda, x, y)
}

/// `(s^p − 1)/p`, tending to `ln s` as `p → 0`.
fn pow_m1_over(s: f64, p: f64) -> f64 {
    let l = s.ln();
    if p == 0.0 {
        l
    } else {
        (p * l).exp_m1() / p
    }
}

/// `∫₀ˢ c_λ(1, t) dt` for the random-scale model.
fn random_scale_edge(lambda: f64, s: f64) -> f64 {
    // same interpolation as `random_scale_c`: the normalized profile
    // h(r) = c(r, 1) is interpolated, the order of homogeneity is exact
    const DELTA: f64 = 1e-4;
    let rho = lambda.clamp(1.0, 2.0);
    let e = lambda - 1.0;
    if e != 0.0 && e.abs() < DELTA {
        let lo = random_scale_edge_regime(1.0 - DELTA, s, rho);
        let mid = random_scale_edge_regime(1.0, s, rho);
        let hi = random_scale_edge_regime(1.0 + DELTA, s, rho);
        let t = e / DELTA;
        return mid + 0.5 * t * (hi - lo) + 0.5 * t * t * (hi - 2.0 * mid + lo);
    }
    random_scale_edge_regime(lambda, s, rho)
}

/// `∫₀^{min(s,1)} h_l(t) dt + ∫₁ˢ t^ρ h_l(1/t) dt` with `h_l(r) = c_l(r, 1)`, `r ≤ 1`.
fn random_scale_edge_regime(l: f64, s: f64, rho: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let a = s.min(1.0);
    // ∫₁ˢ t^{q−1} dt
    let p = |q: f64| pow_m1_over(s, q);
    let (low, high) = if l < 1.0 {
        let low = ((2.0 - l) * a * a / 2.0 - l * l * a.powf((1.0 + l) / l) / (1.0 + l)) / (2.0 * (1.0 - l));
        let high = ((2.0 - l) * p(rho) - l * p(rho + 1.0 - 1.0 / l)) / (2.0 * (1.0 - l));
        (low, high)
    } else if l == 1.0 {
        let low = a * a * (0.625 - 0.25 * a.ln());
        // ∫₁ˢ t^{ρ−1}(1 + ln(t)/2) dt
        let high = p(rho) + 0.5 * (s.powf(rho) * s.ln() / rho - p(rho) / rho);
        (low, high)
    } else if l < 2.0 {
        let low = (l * a * a / 2.0 - (2.0 - l) * a.powf(l + 1.0) / (l + 1.0)) / (2.0 * (l - 1.0));
        let high = (l * p(rho) - (2.0 - l) * p(rho - l + 1.0)) / (2.0 * (l - 1.0));
        (low, high)
    } else {
        (a * a / 2.0, p(rho))
    };
    if s > 1.0 {
        low + high
    } else {
        low
    }
}

fn random_scale_c_regime(lambda: f64, x: f64, y: f64) -> f64 {
    let mu = x.min(y);
    let big = x.max(y);
    if mu <= 0.0 {
        return 0.0;
    }
    if lambda < 1.0 {
        let ratio = (mu / big).powf(1.0 / lambda);
        ((2.0 - lambda) * mu - lambda * big * ratio) / (2.0 * (1.0 - lambda))
    } else if lambda == 1.0 {
        mu * (1.0 + 0.5 * (big / mu).ln())
    } else if lambda < 2.0 {
        (lambda * mu * big.powf(lambda - 1.0) - (2.0 - lambda) * mu.powf(lambda)) / (2.0 * (lambda - 1.0))
    } else {
        mu * big
    }
}

impl fmt::Display for TailFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TailFamily {
    type Err = TailError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let fam = match key.as_str() {
            "inverted_husler_reiss" | "ihr" | "m1" => TailFamily::InvertedHuslerReiss,
            "inverted_asym_logistic" | "ial" | "m2" => TailFamily::InvertedAsymLogistic,
            "random_scale" | "rs" | "m3" => TailFamily::RandomScale,
            "husler_reiss_ad" | "hr_ad" => TailFamily::HuslerReissAD,
            "asym_logistic_ad" | "al_ad" => TailFamily::AsymLogisticAD,
            _ => return Err(TailError::InvalidInput(format!("unknown tail family '{s}'"))),
        };
        Ok(fam)
    }
}

/// A parameter vector validated against the domain of its family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaVector {
    family: TailFamily,
    values: Vec<f64>,
}

impl ThetaVector {
    pub fn new(family: TailFamily, values: Vec<f64>) -> Result<Self> {
        if !family.contains(&values) {
            return Err(TailError::ThetaOutOfDomain { family: family.name(), values });
        }
        Ok(Self { family, values })
    }

    pub fn family(&self) -> TailFamily {
        self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_mean_gap_is_stable_near_one() {
        for &(a, b) in &[(0.3, 0.9), (1.0, 1e-3), (2.5, 2.5)] {
            for &r in &[1.5, 3.0, 20.0] {
                let naive = a + b - power_mean(a, b, r);
                assert!((power_mean_gap(a, b, r) - naive).abs() < 1e-14, "{a} {b} {r}");
            }
            // first-order limit (r − 1)·[a ln((a+b)/a) + b ln((a+b)/b)]
            let e = 1e-9;
            let lim = a * ((a + b) / a).ln() + b * ((a + b) / b).ln();
            assert!((power_mean_gap(a, b, 1.0 + e) / e - lim).abs() < 1e-6 * lim);
        }
    }
    use approx::assert_relative_eq;

    fn th(f: TailFamily, v: &[f64]) -> ThetaVector {
        ThetaVector::new(f, v.to_vec()).unwrap()
    }

    #[test]
    fn eval_c_examples() {
        let ihr = TailFamily::InvertedHuslerReiss;
        assert_relative_eq!(ihr.eval_c(&th(ihr, &[0.6]), 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        let rs = TailFamily::RandomScale;
        assert_relative_eq!(rs.eval_c(&th(rs, &[2.0]), 2.0, 3.0).unwrap(), 6.0, epsilon = 1e-12);
        // 1.5·μ − 0.5·μ²/M at μ=1, M=2
        assert_relative_eq!(rs.eval_c(&th(rs, &[0.5]), 2.0, 1.0).unwrap(), 1.25, epsilon = 1e-12);
        let ial = TailFamily::InvertedAsymLogistic;
        assert_relative_eq!(
            ial.eval_c(&th(ial, &[0.7, 0.8]), 2.0, 2.0).unwrap(),
            2f64.powf(1.5),
            epsilon = 1e-12
        );
    }

    #[test]
    fn random_scale_edge_matches_quadrature() {
        for &l in &[0.1, 0.5, 0.5 + 1e-9, 0.8, 1.0 - 3e-5, 1.0, 1.0 + 3e-5, 1.4, 1.999, 2.0, 2.7] {
            for &s in &[0.2, 1.0, 1.7, 3.0, 6.0] {
                let pts: Vec<f64> = if s > 1.0 { vec![0.0, 1.0, s] } else { vec![0.0, s] };
                let num = quadrature::integrate_segments(|t| random_scale_c(l, 1.0, t), &pts, 1e-12, 1e-15);
                let closed = random_scale_edge(l, s);
                assert!((closed - num).abs() < 1e-9 * num.max(1.0), "λ={l}, s={s}: {closed} vs {num}");
            }
        }
    }

    #[test]
    fn eta_and_chi_examples() {
        let ihr = TailFamily::InvertedHuslerReiss;
        assert_relative_eq!(ihr.eta_of(&th(ihr, &[0.75])).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(ihr.chi_of(&th(ihr, &[0.9])).unwrap(), 0.0);
        let hr = TailFamily::HuslerReissAD;
        assert_eq!(hr.eta_of(&th(hr, &[0.3])).unwrap(), 1.0);
        assert_relative_eq!(hr.chi_of(&th(hr, &[1.0])).unwrap(), 0.317_310_507_862_914, epsilon = 1e-13);
        assert!((hr.chi_of(&th(hr, &[1e-6])).unwrap() - 1.0).abs() < 1e-5);
        let rs = TailFamily::RandomScale;
        assert_relative_eq!(rs.eta_of(&th(rs, &[1.6])).unwrap(), 0.625, epsilon = 1e-15);
        assert_eq!(rs.eta_of(&th(rs, &[0.4])).unwrap(), 1.0);
        assert_eq!(rs.eta_of(&th(rs, &[3.0])).unwrap(), 0.5);
        assert_relative_eq!(rs.chi_of(&th(rs, &[0.5])).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn stdf_examples() {
        let indep = Stdf::HuslerReiss(HrLambda::Independent);
        assert_eq!(indep.eval(1.0, 1.0).unwrap(), 2.0);
        let al = Stdf::asym_logistic(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(al.eval(3.0, 4.0).unwrap(), 7.0, epsilon = 1e-12);
        let hr = Stdf::husler_reiss(1.0).unwrap();
        assert_relative_eq!(hr.eval(1.0, 1.0).unwrap(), 1.682_689_492_137_086, epsilon = 1e-13);
        assert!(Stdf::asym_logistic(1.2, 0.5, 2.0).is_err());
        assert!(Stdf::husler_reiss(-1.0).is_err());
    }

    #[test]
    fn stdf_partial_matches_finite_difference() {
        let cases = [
            Stdf::husler_reiss(0.7).unwrap(),
            Stdf::asym_logistic(0.4, 0.9, 2.5).unwrap(),
        ];
        for s in cases {
            for &(x, y) in &[(0.3, 1.2), (1.0, 1.0), (2.0, 0.1)] {
                let h = 1e-6;
                let fd = (s.eval(x + h, y).unwrap() - s.eval(x - h, y).unwrap()) / (2.0 * h);
                assert!((s.d_dx(x, y) - fd).abs() < 1e-8, "{s:?} at ({x},{y})");
            }
        }
    }

    #[test]
    fn rect_integral_examples() {
        let ihr = TailFamily::InvertedHuslerReiss;
        let t = th(ihr, &[0.6]);
        let unit = Rectangle::square(0.0, 1.0).unwrap();
        assert_relative_eq!(ihr.rect_integral_c(&t, &unit).unwrap(), 0.390_625, epsilon = 1e-14);
        let two = Rectangle::square(0.0, 2.0).unwrap();
        let expected = (2f64.powf(1.6) / 1.6).powi(2);
        assert_relative_eq!(ihr.rect_integral_c(&t, &two).unwrap(), expected, epsilon = 1e-12);
        assert_relative_eq!(expected, 3.589_682, epsilon = 1e-6);
        let flat = Rectangle::new(1.0, 1.0, 0.0, 5.0).unwrap();
        for f in TailFamily::ALL {
            assert_eq!(f.rect_integral_c(&f.default_reference(), &flat).unwrap(), 0.0);
        }
    }

    #[test]
    fn homogeneity_route_matches_2d_quadrature() {
        let rects = [
            Rectangle::square(0.0, 1.0).unwrap(),
            Rectangle::square(0.5, 1.5).unwrap(),
            Rectangle::new(0.0, 1.0, 0.0, 3.0).unwrap(),
            Rectangle::new(0.2, 3.0, 0.1, 0.9).unwrap(),
        ];
        let params: [(TailFamily, &[f64]); 7] = [
            (TailFamily::RandomScale, &[0.4]),
            (TailFamily::RandomScale, &[1.0]),
            (TailFamily::RandomScale, &[1.5]),
            (TailFamily::RandomScale, &[2.0]),
            (TailFamily::HuslerReissAD, &[0.8]),
            (TailFamily::AsymLogisticAD, &[0.3, 2.0]),
            (TailFamily::AsymLogisticAD, &[-0.5, 4.0]),
        ];
        for (f, v) in params {
            let t = th(f, v);
            for r in &rects {
                let a = f.rect_integral_c(&t, r).unwrap();
                let b = f.rect_integral_c_2d(&t, r, 1e-11).unwrap();
                assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{f} {v:?} {r:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn random_scale_regimes_are_normalized_and_homogeneous() {
        let rs = TailFamily::RandomScale;
        for &l in &[0.05, 0.5, 1.0 - 1e-6, 1.0, 1.0 + 1e-6, 1.3, 1.99, 2.0, 3.5] {
            let t = th(rs, &[l]);
            assert!((rs.eval_c(&t, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-9, "λ={l}");
            let order = 1.0 / rs.eta_of(&t).unwrap();
            let (x, y) = (0.7, 2.3);
            let lhs = rs.eval_c(&t, 3.0 * x, 3.0 * y).unwrap();
            let rhs = 3f64.powf(order) * rs.eval_c(&t, x, y).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
        }
    }

    #[test]
    fn k_lambda_values() {
        assert_eq!(random_scale_k(2.0), 0.5);
        assert_eq!(random_scale_k(1.0), 2.0);
        assert_relative_eq!(random_scale_k(0.5), 2.0 / 3.0);
        assert!(random_scale_k(1e-9) > 0.999_999);
        assert!((random_scale_k(1e6) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn inverted_asym_logistic_theta_map() {
        // logistic ν = φ = 1: θ₁ = θ₂ = 2^{1/r}/2
        let (t1, t2) = inverted_asym_logistic_theta(1.0, 1.0, 2.0);
        assert_relative_eq!(t1, 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(t1, t2);
        // θ₁ + θ₂ = ℓ(1, 1)
        let (t1, t2) = inverted_asym_logistic_theta(0.44, 0.94, 2.0);
        let l11 = Stdf::asym_logistic(0.44, 0.94, 2.0).unwrap().extremal_coefficient();
        assert_relative_eq!(t1 + t2, l11, epsilon = 1e-14);
        assert!((t1 - 0.75).abs() < 0.01 && (t2 - 0.91).abs() < 0.01);
    }

    #[test]
    fn domain_validation() {
        assert!(ThetaVector::new(TailFamily::InvertedHuslerReiss, vec![0.5]).is_err());
        assert!(ThetaVector::new(TailFamily::InvertedHuslerReiss, vec![1.0]).is_ok());
        assert!(ThetaVector::new(TailFamily::InvertedAsymLogistic, vec![0.4, 0.5]).is_err());
        assert!(ThetaVector::new(TailFamily::InvertedAsymLogistic, vec![0.6, 0.5]).is_ok());
        assert!(ThetaVector::new(TailFamily::AsymLogisticAD, vec![0.0, 1.0]).is_err());
        let t = ThetaVector::new(TailFamily::RandomScale, vec![1.0]).unwrap();
        assert!(TailFamily::InvertedHuslerReiss.eval_c(&t, 1.0, 1.0).is_err());
        assert_eq!("m1".parse::<TailFamily>().unwrap(), TailFamily::InvertedHuslerReiss);
    }
}
