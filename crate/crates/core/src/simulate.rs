//! Samplers for the bivariate and spatial data-generating processes.
//!
//! All samplers draw from a caller-supplied RNG; [`rng_for`] builds the
//! ChaCha8 stream used for a given `(seed, stream)` so parallel replications
//! stay reproducible.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};
use crate::families::{HrLambda, Stdf};
use crate::normal;

/// Uniforms are clamped to this interval before the Fréchet transform.
const U_MIN: f64 = 1e-300;
const U_MAX: f64 = 1.0 - 1e-16;

/// Largest number of locations accepted by the spatial sampler.
pub const MAX_LOCATIONS: usize = 64;

/// RNG for replication `stream` of a study seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Data-generating model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SimModel {
    /// Inverted Hüsler–Reiss with `c = (xy)^θ`, `θ = Φ(λ) ∈ (1/2, 1]`.
    M1 { theta: f64 },
    /// Inverted asymmetric logistic.
    M2 { nu: f64, phi: f64, r: f64 },
    /// Pareto random scale `R·(W₁, W₂)`.
    M3 { alpha_r: f64, alpha_w: f64 },
    /// Inverted Brown–Resnick process with variogram `γ(h) = (‖h‖/β)^α`.
    SpatialIbr { coords: Vec<[f64; 2]>, alpha: f64, beta: f64 },
}

/// Marginal scale of the signal before noise is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Margins {
    Uniform,
    #[default]
    Frechet,
}

/// Independent additive Pareto noise with distribution function `1 − x^{−α}`, `x ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    pub pareto_alpha: f64,
}

impl Default for Noise {
    fn default() -> Self {
        Self { pareto_alpha: 4.0 }
    }
}

/// Simulation method for the spatial max-stable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialSampler {
    /// Exact extremal-functions algorithm.
    #[default]
    ExtremalFunctions,
    /// Sum-normalized spectral functions, stopped after `max_points`
    /// Poisson points (exact if the stopping rule fires first).
    NormalizedSpectral { max_points: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    #[serde(flatten)]
    pub model: SimModel,
    pub n: usize,
    #[serde(default)]
    pub noise: Option<Noise>,
    #[serde(default)]
    pub margins: Margins,
    #[serde(default)]
    pub sampler: SpatialSampler,
    #[serde(default)]
    pub seed: u64,
}

impl SimSpec {
    pub fn new(model: SimModel, n: usize, seed: u64) -> Self {
        Self { model, n, noise: None, margins: Margins::Frechet, sampler: SpatialSampler::default(), seed }
    }

    pub fn with_noise(mut self, noise: Option<Noise>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_margins(mut self, margins: Margins) -> Self {
        self.margins = margins;
        self
    }

    /// Number of columns produced.
    pub fn dim(&self) -> usize {
        match &self.model {
            SimModel::SpatialIbr { coords, .. } => coords.len(),
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(TailError::InvalidInput("n must be at least 1".into()));
        }
        if let Some(z) = self.noise {
            if !(z.pareto_alpha > 0.0 && z.pareto_alpha.is_finite()) {
                return Err(TailError::ParamOutOfRange(format!("noise α={} must be positive", z.pareto_alpha)));
            }
        }
        match &self.model {
            SimModel::M1 { theta } => {
                if !(*theta > 0.5 && *theta <= 1.0) {
                    return Err(TailError::ParamOutOfRange(format!("θ={theta} must lie in (1/2, 1]")));
                }
            }
            SimModel::M2 { nu, phi, r } => {
                Stdf::asym_logistic(*nu, *phi, *r)?;
            }
            SimModel::M3 { alpha_r, alpha_w } => {
                if !(*alpha_r > 0.0 && *alpha_w > 0.0 && alpha_r.is_finite() && alpha_w.is_finite()) {
                    return Err(TailError::ParamOutOfRange(format!(
                        "Pareto indices (α_R={alpha_r}, α_W={alpha_w}) must be positive"
                    )));
                }
            }
            SimModel::SpatialIbr { coords, alpha, beta } => {
                if !(*alpha > 0.0 && *alpha <= 2.0 && *beta > 0.0 && beta.is_finite()) {
                    return Err(TailError::ParamOutOfDomain(format!("(α, β)=({alpha}, {beta}) not in (0,2]×(0,∞)")));
                }
                check_coords(coords)?;
            }
        }
        Ok(())
    }
}

fn check_coords(coords: &[[f64; 2]]) -> Result<()> {
    if coords.len() < 2 || coords.len() > MAX_LOCATIONS {
        return Err(TailError::InvalidInput(format!(
            "need between 2 and {MAX_LOCATIONS} locations, got {}",
            coords.len()
        )));
    }
    for (i, c) in coords.iter().enumerate() {
        if !(c[0].is_finite() && c[1].is_finite()) {
            return Err(TailError::NonFiniteInput { row: i, col: 0 });
        }
        for (j, d) in coords[..i].iter().enumerate() {
            if c == d {
                return Err(TailError::InvalidInput(format!("locations {j} and {i} coincide")));
            }
        }
    }
    Ok(())
}

/// Hüsler–Reiss `λ` with `Φ(λ) = θ`; `θ = 1` is independence.
pub fn hr_lambda_from_theta(theta: f64) -> HrLambda {
    if theta >= 1.0 {
        HrLambda::Independent
    } else {
        HrLambda::Finite(normal::quantile(theta))
    }
}

/// Unit Fréchet quantile of a uniform.
pub fn frechet(u: f64) -> f64 {
    -1.0 / u.clamp(U_MIN, U_MAX).ln()
}

/// Unit Fréchet quantile of `1 − z`, accurate for small `z`.
fn frechet_of_complement(z: f64) -> f64 {
    let z = z.clamp(1.0 - U_MAX, 1.0 - U_MIN);
    -1.0 / (-z).ln_1p()
}

fn pareto(rng: &mut impl Rng, alpha: f64) -> f64 {
    // 1 − U lies in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    u.powf(-1.0 / alpha)
}

/// `C_{2|1}(v | u) = ∂C/∂u` of the extreme-value copula `C = exp(−ℓ(−log u, −log v))`.
fn conditional_cdf(stdf: &Stdf, x: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    let y = -v.ln();
    (x - stdf.eval_unchecked(x, y)).exp() * stdf.d_dx(x, y)
}

/// Solves `C_{2|1}(v | u) = w` by bisection on `(0, 1)`.
fn conditional_quantile(stdf: &Stdf, u: f64, w: f64) -> Result<f64> {
    let x = -u.ln();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f = conditional_cdf(stdf, x, mid);
        if !f.is_finite() {
            return Err(TailError::BisectionFailure);
        }
        if (f - w).abs() < 1e-12 {
            return Ok(mid);
        }
        if f < w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(TailError::BisectionFailure)
}

/// `n` draws `(U, V)` from the extreme-value copula with stdf `ℓ`, by
/// conditional inversion.
pub fn sample_bivariate_ev_copula(stdf: &Stdf, n: usize, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    stdf.validate()?;
    let mut out = DMatrix::zeros(n, 2);
    for i in 0..n {
        // U in (0, 1)
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        let w: f64 = rng.random();
        let v = match stdf {
            Stdf::HuslerReiss(HrLambda::Independent) => w,
            _ => conditional_quantile(stdf, u, w)?,
        };
        out[(i, 0)] = u;
        out[(i, 1)] = v;
    }
    Ok(out)
}

fn add_noise(data: &mut DMatrix<f64>, noise: Option<Noise>, rng: &mut impl Rng) {
    if let Some(z) = noise {
        // column-major order keeps the draw sequence independent of layout choices
        for v in data.iter_mut() {
            *v += pareto(rng, z.pareto_alpha);
        }
    }
}

/// Maps copula draws `Z` to the inverted vector `1 − Z` on the requested margins.
fn invert_margins(z: &mut DMatrix<f64>, margins: Margins) {
    for v in z.iter_mut() {
        *v = match margins {
            Margins::Uniform => 1.0 - *v,
            Margins::Frechet => frechet_of_complement(*v),
        };
    }
}

/// Inverted max-stable samples (M1 or M2), with optional noise.
pub fn sample_inverted(spec: &SimSpec, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let stdf = match spec.model {
        SimModel::M1 { theta } => Stdf::HuslerReiss(hr_lambda_from_theta(theta)),
        SimModel::M2 { nu, phi, r } => Stdf::AsymLogistic { nu, phi, r },
        _ => return Err(TailError::InvalidInput("sample_inverted needs an M1 or M2 spec".into())),
    };
    let mut z = sample_bivariate_ev_copula(&stdf, spec.n, rng)?;
    invert_margins(&mut z, spec.margins);
    add_noise(&mut z, spec.noise, rng);
    Ok(z)
}

/// Random-scale samples `(R W₁, R W₂)` (M3), with optional noise. Margins
/// are left on their natural scale.
pub fn sample_random_scale(spec: &SimSpec, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let SimModel::M3 { alpha_r, alpha_w } = spec.model else {
        return Err(TailError::InvalidInput("sample_random_scale needs an M3 spec".into()));
    };
    let mut out = DMatrix::zeros(spec.n, 2);
    for i in 0..spec.n {
        let r = pareto(rng, alpha_r);
        out[(i, 0)] = r * pareto(rng, alpha_w);
        out[(i, 1)] = r * pareto(rng, alpha_w);
    }
    add_noise(&mut out, spec.noise, rng);
    Ok(out)
}

/// Fractal variogram `(‖a − b‖/β)^α`.
pub fn fractal_variogram(a: [f64; 2], b: [f64; 2], alpha: f64, beta: f64) -> f64 {
    ((a[0] - b[0]).hypot(a[1] - b[1]) / beta).powf(alpha)
}

/// Precomputed Gaussian factors for log-Gaussian spectral functions
/// anchored at each location.
struct BrownResnick {
    d: usize,
    gamma: DMatrix<f64>,
    /// Lower Cholesky factor of the covariance of `W(·) − W(x_j)` on the
    /// locations other than `j`.
    chol: Vec<DMatrix<f64>>,
}

impl BrownResnick {
    fn new(coords: &[[f64; 2]], alpha: f64, beta: f64) -> Result<Self> {
        let d = coords.len();
        let gamma = DMatrix::from_fn(d, d, |i, j| fractal_variogram(coords[i], coords[j], alpha, beta));
        let mut chol = Vec::with_capacity(d);
        for j in 0..d {
            let others: Vec<usize> = (0..d).filter(|&i| i != j).collect();
            let cov = DMatrix::from_fn(d - 1, d - 1, |a, b| {
                let (p, q) = (others[a], others[b]);
                0.5 * (gamma[(p, j)] + gamma[(q, j)] - gamma[(p, q)]) + if a == b { 1e-10 } else { 0.0 }
            });
            let l = nalgebra::Cholesky::new(cov).ok_or(TailError::CholeskyFailure(j))?;
            chol.push(l.l());
        }
        Ok(Self { d, gamma, chol })
    }

    /// `log Y(x_i) = V_i − γ(x_i, x_j)/2` with `V ~ N(0, Σ_j)` and `Y(x_j) = 1`.
    fn log_spectral(&self, j: usize, rng: &mut impl Rng, out: &mut [f64]) {
        let eps = DVector::from_fn(self.d - 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = &self.chol[j] * eps;
        let mut a = 0;
        for (i, o) in out.iter_mut().enumerate() {
            if i == j {
                *o = 0.0;
            } else {
                *o = v[a] - 0.5 * self.gamma[(i, j)];
                a += 1;
            }
        }
    }

    /// One draw of the max-stable vector with unit Fréchet margins, by extremal functions.
    fn extremal_functions(&self, rng: &mut impl Rng, z: &mut [f64], buf: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.d {
            let mut e: f64 = rng.sample(Exp1);
            while 1.0 / e > z[j] {
                self.log_spectral(j, rng, buf);
                let zeta = 1.0 / e;
                if (0..j).all(|i| zeta * buf[i].exp() < z[i]) {
                    for (zi, &li) in z.iter_mut().zip(buf.iter()) {
                        *zi = zi.max(zeta * li.exp());
                    }
                }
                e += rng.sample::<f64, _>(Exp1);
            }
        }
    }

    /// One draw using sum-normalized spectral functions `Y/mean(Y)`, which are
    /// bounded by `d`; stops once `ζ·d` falls below `min Z` or after `max_points`.
    fn normalized_spectral(&self, rng: &mut impl Rng, z: &mut [f64], buf: &mut [f64], max_points: usize) {
        z.iter_mut().for_each(|v| *v = 0.0);
        let d = self.d as f64;
        let mut e = 0.0;
        for _ in 0..max_points.max(1) {
            e += rng.sample::<f64, _>(Exp1);
            let zeta = 1.0 / e;
            if zeta * d < z.iter().copied().fold(f64::INFINITY, f64::min) {
                break;
            }
            let j = rng.random_range(0..self.d);
            self.log_spectral(j, rng, buf);
            let mean = buf.iter().map(|l| l.exp()).sum::<f64>() / d;
            for (zi, &li) in z.iter_mut().zip(buf.iter()) {
                *zi = zi.max(zeta * li.exp() / mean);
            }
        }
    }
}

/// Max-stable Brown–Resnick vectors with unit Fréchet margins, one row per draw.
pub fn sample_brown_resnick(
    coords: &[[f64; 2]],
    alpha: f64,
    beta: f64,
    n: usize,
    sampler: SpatialSampler,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    check_coords(coords)?;
    let br = BrownResnick::new(coords, alpha, beta)?;
    let d = coords.len();
    let mut out = DMatrix::zeros(n, d);
    let mut z = vec![0.0; d];
    let mut buf = vec![0.0; d];
    for i in 0..n {
        match sampler {
            SpatialSampler::ExtremalFunctions => br.extremal_functions(rng, &mut z, &mut buf),
            SpatialSampler::NormalizedSpectral { max_points } => br.normalized_spectral(rng, &mut z, &mut buf, max_points),
        }
        for (j, &v) in z.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Inverted Brown–Resnick samples: `1 − exp(−1/Z)` on the requested margins, with optional noise.
pub fn sample_inverted_brown_resnick(spec: &SimSpec, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let SimModel::SpatialIbr { coords, alpha, beta } = &spec.model else {
        return Err(TailError::InvalidInput("sample_inverted_brown_resnick needs a spatial spec".into()));
    };
    let mut z = sample_brown_resnick(coords, *alpha, *beta, spec.n, spec.sampler, rng)?;
    for v in z.iter_mut() {
        // 1 − U = −expm1(−1/Z), computed without cancellation
        let one_minus_u = -(-1.0 / *v).exp_m1();
        *v = match spec.margins {
            Margins::Uniform => one_minus_u,
            Margins::Frechet => frechet(one_minus_u),
        };
    }
    add_noise(&mut z, spec.noise, rng);
    Ok(z)
}

/// Draws a sample for any spec using the spec's own seed.
pub fn simulate(spec: &SimSpec) -> Result<DMatrix<f64>> {
    simulate_stream(spec, 0)
}

/// Draws a sample for any spec on stream `stream` of the spec's seed.
pub fn simulate_stream(spec: &SimSpec, stream: u64) -> Result<DMatrix<f64>> {
    let mut rng = rng_for(spec.seed, stream);
    match spec.model {
        SimModel::M1 { .. } | SimModel::M2 { .. } => sample_inverted(spec, &mut rng),
        SimModel::M3 { .. } => sample_random_scale(spec, &mut rng),
        SimModel::SpatialIbr { .. } => sample_inverted_brown_resnick(spec, &mut rng),
    }
}

/// Column names `x1 … xd`.
pub fn column_names(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("x{j}")).collect()
}

/// Writes a sample as CSV with a header row.
pub fn write_sample_csv<W: Write>(data: &DMatrix<f64>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(column_names(data.ncols()))?;
    for i in 0..data.nrows() {
        w.write_record(data.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes location coordinates as CSV with columns `id,x,y`.
pub fn write_coords_csv<W: Write>(coords: &[[f64; 2]], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "x", "y"])?;
    for (i, c) in coords.iter().enumerate() {
        w.write_record([(i + 1).to_string(), c[0].to_string(), c[1].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` and, for spatial specs, the sidecar `<stem>.coords.csv`.
pub fn write_simulation(spec: &SimSpec, data: &DMatrix<f64>, path: &Path) -> Result<Option<std::path::PathBuf>> {
    write_sample_csv(data, std::fs::File::create(path)?)?;
    if let SimModel::SpatialIbr { coords, .. } = &spec.model {
        let side = path.with_extension("coords.csv");
        write_coords_csv(coords, std::fs::File::create(&side)?)?;
        return Ok(Some(side));
    }
    Ok(None)
}
