//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one and two dimensions.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 400;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// ∫ₐᵇ f, refined until the error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && intervals.len() < MAX_INTERVALS {
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            intervals.push((lo, hi, v0, 0.0));
            err -= e0;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // Re-sum to shed the drift of the running total.
    intervals.iter().map(|iv| iv.2).sum()
}

/// ∫ over consecutive segments of `points` (sorted breakpoints including both ends).
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, points: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
    points
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], rel_tol, abs_tol))
        .sum()
}

/// Two-dimensional integral of `f` over `[x_lo, x_hi] × [y_lo, y_hi]`.
///
/// The rectangle is split along the diagonal `y = x` and each piece is
/// integrated as an iterated integral, so integrands whose only kink is
/// the diagonal are smooth on every piece.
pub fn integrate_rect_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    rel_tol: f64,
) -> f64 {
    if !(x_hi > x_lo && y_hi > y_lo) {
        return 0.0;
    }
    let inner_tol = rel_tol * 0.1;
    let abs_tol = 1e-15;
    let breaks = |lo: f64, hi: f64, extra: f64| {
        let mut p = vec![lo];
        if extra > lo && extra < hi {
            p.push(extra);
        }
        p.push(hi);
        p
    };
    // below the diagonal: y in [y_lo, min(x, y_hi)]
    let lower = {
        let lo = x_lo.max(y_lo);
        if x_hi > lo {
            let g = |x: f64| integrate(|y| f(x, y), y_lo, x.min(y_hi), inner_tol, abs_tol);
            integrate_segments(g, &breaks(lo, x_hi, y_hi), rel_tol, abs_tol)
        } else {
            0.0
        }
    };
    // above the diagonal: y in [max(x, y_lo), y_hi]
    let upper = {
        let hi = x_hi.min(y_hi);
        if hi > x_lo {
            let g = |x: f64| integrate(|y| f(x, y), x.max(y_lo), y_hi, inner_tol, abs_tol);
            integrate_segments(g, &breaks(x_lo, hi, y_lo), rel_tol, abs_tol)
        } else {
            0.0
        }
    };
    lower + upper
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-12, 0.0);
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫₀¹ x ln x = -1/4
        let v = integrate(|x| if x > 0.0 { x * x.ln() } else { 0.0 }, 0.0, 1.0, 1e-11, 0.0);
        assert!((v + 0.25).abs() < 1e-11);
        // ∫₀¹ x^{-1/2} = 2
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn min_kernel_over_rectangle() {
        // ∫₀¹∫₀¹ min(x, y) = 1/3
        let v = integrate_rect_2d(|x, y| x.min(y), 0.0, 1.0, 0.0, 1.0, 1e-10);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        // off-diagonal rectangle never touches the diagonal
        let v = integrate_rect_2d(|x, y| x * y, 2.0, 3.0, 0.0, 1.0, 1e-10);
        assert!((v - 2.5 * 0.5).abs() < 1e-12);
        assert_eq!(integrate_rect_2d(|x, y| x + y, 1.0, 1.0, 0.0, 5.0, 1e-10), 0.0);
    }
}
