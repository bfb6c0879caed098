//! Derivative-free minimization over a box: Nelder–Mead with Latin
//! hypercube restarts and a terminal coordinate-grid refinement.
//!
//! Points are projected onto the box; constraints beyond the box are
//! expressed by the objective returning `+∞`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::families::CoordBounds;

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimOptions {
    pub n_starts: usize,
    pub seed: u64,
    /// Stop when the simplex spread in objective value is below this.
    pub f_tol: f64,
    /// ... and the simplex spread in every coordinate is below this.
    pub x_tol: f64,
    pub max_iter: usize,
    pub grid_half_width: f64,
    pub grid_points: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            n_starts: 8,
            seed: 0,
            f_tol: 1e-8,
            x_tol: 1e-8,
            max_iter: 2000,
            grid_half_width: 0.02,
            grid_points: 9,
        }
    }
}

/// Result of one Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMin {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Result of a multi-start minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMin {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
    pub n_restarts: usize,
    pub evaluations: usize,
}

fn project(x: &mut [f64], bounds: &[CoordBounds]) {
    for (v, b) in x.iter_mut().zip(bounds) {
        *v = v.clamp(b.lo, b.hi);
    }
}

/// Bounded Nelder–Mead from `x0` with initial simplex steps `step`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: &[f64],
    bounds: &[CoordBounds],
    opts: &OptimOptions,
) -> LocalMin {
    let p = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    let mut start = x0.to_vec();
    project(&mut start, bounds);
    simplex.push(start.clone());
    for i in 0..p {
        let mut v = start.clone();
        // step away from the nearer bound
        let b = bounds[i];
        v[i] = if v[i] + step[i] <= b.hi { v[i] + step[i] } else { v[i] - step[i] };
        project(&mut v, bounds);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=p).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = (values[p] - values[0]).abs();
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if x_spread <= opts.x_tol && (f_spread <= opts.f_tol || f_spread.is_nan()) {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..p).map(|j| simplex[..p].iter().map(|v| v[j]).sum::<f64>() / p as f64).collect();
        let along = |t: f64| {
            let mut x: Vec<f64> = centroid.iter().zip(&simplex[p]).map(|(c, w)| c + t * (c - w)).collect();
            project(&mut x, bounds);
            x
        };

        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[p] = xe;
                values[p] = fe;
            } else {
                simplex[p] = xr;
                values[p] = fr;
            }
            continue;
        }
        if fr < values[p - 1] {
            simplex[p] = xr;
            values[p] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[p] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[p].min(fr) {
            simplex[p] = xc;
            values[p] = fc;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=p {
            let v: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
            values[i] = eval(&v);
            simplex[i] = v;
        }
    }
    let best = (0..=p).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    LocalMin { x: simplex[best].clone(), f: values[best], iterations, evaluations: evals, converged }
}

/// Latin hypercube sample of `n` points inside the box, shrunk away from its faces.
pub fn latin_hypercube(n: usize, bounds: &[CoordBounds], rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; bounds.len()]; n];
    for (j, b) in bounds.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            strata.swap(i, rng.random_range(0..=i));
        }
        let width = b.hi - b.lo;
        let (lo, w) = (b.lo + 0.01 * width, 0.98 * width);
        for (i, s) in strata.into_iter().enumerate() {
            points[i][j] = lo + w * (s as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    points
}

/// Multi-start Nelder–Mead followed by a coordinate-grid refinement around
/// the incumbent and a final local polish. Deterministic given `opts.seed`.
pub fn multistart_minimize<F: Fn(&[f64]) -> f64>(f: F, bounds: &[CoordBounds], opts: &OptimOptions) -> GlobalMin {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let p = bounds.len();
    let n_starts = opts.n_starts.max(1);
    let mut starts = latin_hypercube(n_starts, bounds, &mut rng);
    // starts that violate non-box constraints are redrawn uniformly
    for s in starts.iter_mut() {
        let mut tries = 0;
        while !f(s).is_finite() && tries < 1000 {
            for (v, b) in s.iter_mut().zip(bounds) {
                *v = rng.random_range(b.lo..=b.hi);
            }
            tries += 1;
        }
    }
    let step: Vec<f64> = bounds.iter().map(|b| 0.1 * (b.hi - b.lo)).collect();
    let mut evaluations = 0;
    let mut best: Option<LocalMin> = None;
    for s in &starts {
        let run = nelder_mead(&f, s, &step, bounds, opts);
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|b| run.f < b.f) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one start");

    if opts.grid_points >= 2 && opts.grid_half_width > 0.0 {
        let g = opts.grid_points;
        let center = best.x.clone();
        let mut idx = vec![0usize; p];
        let mut grid_best: Option<(Vec<f64>, f64)> = None;
        'grid: loop {
            let mut x: Vec<f64> = (0..p)
                .map(|j| center[j] - opts.grid_half_width + 2.0 * opts.grid_half_width * idx[j] as f64 / (g - 1) as f64)
                .collect();
            project(&mut x, bounds);
            let v = f(&x);
            evaluations += 1;
            if v < best.f && grid_best.as_ref().is_none_or(|gb| v < gb.1) {
                grid_best = Some((x, v));
            }
            for j in 0..p {
                idx[j] += 1;
                if idx[j] < g {
                    continue 'grid;
                }
                idx[j] = 0;
            }
            break;
        }
        if let Some((x, _)) = grid_best {
            let fine: Vec<f64> = step.iter().map(|s| s * 0.1).collect();
            let run = nelder_mead(&f, &x, &fine, bounds, opts);
            evaluations += run.evaluations;
            if run.f < best.f {
                best = run;
            }
        }
    }
    GlobalMin { x: best.x, f: best.f, converged: best.converged, n_restarts: n_starts, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(lo: f64, hi: f64) -> CoordBounds {
        CoordBounds { lo, hi }
    }

    #[test]
    fn rosenbrock_in_box() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = OptimOptions { f_tol: 1e-14, x_tol: 1e-9, max_iter: 5000, ..Default::default() };
        let r = multistart_minimize(f, &[bx(-2.0, 2.0), bx(-1.0, 3.0)], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn boundary_minimum_is_reached() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let r = multistart_minimize(f, &[bx(0.0, 1.0)], &OptimOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // minimize distance to (0, 0) subject to x + y >= 1
        let f = |x: &[f64]| if x[0] + x[1] < 1.0 { f64::INFINITY } else { x[0] * x[0] + x[1] * x[1] };
        let r = multistart_minimize(f, &[bx(0.0, 1.0), bx(0.0, 1.0)], &OptimOptions::default());
        assert!((r.x[0] - 0.5).abs() < 1e-3 && (r.x[1] - 0.5).abs() < 1e-3, "{:?}", r.x);
    }

    #[test]
    fn deterministic_given_seed() {
        let f = |x: &[f64]| (x[0] - 0.3).abs().sqrt() + (x[1] + 0.2).powi(2);
        let opts = OptimOptions { seed: 42, ..Default::default() };
        let a = multistart_minimize(f, &[bx(-1.0, 1.0), bx(-1.0, 1.0)], &opts);
        let b = multistart_minimize(f, &[bx(-1.0, 1.0), bx(-1.0, 1.0)], &opts);
        assert_eq!(a, b);
    }

    #[test]
    fn latin_hypercube_fills_strata() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = latin_hypercube(8, &[bx(0.0, 8.0)], &mut rng);
        let mut strata: Vec<usize> = pts.iter().map(|p| p[0].floor() as usize).collect();
        strata.sort();
        assert_eq!(strata, (0..8).collect::<Vec<_>>());
    }
}
