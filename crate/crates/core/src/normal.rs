//! Standard normal distribution function and quantile.

use libm::erfc;
use std::f64::consts::SQRT_2;

/// Φ(x), evaluated through `erfc` so the lower tail keeps full relative precision.
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// 1 − Φ(x).
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Φ⁻¹(p) for p in (0, 1): Acklam's rational approximation polished by
/// two Halley steps against [`cdf`].
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let tail = |q: f64| {
        let t = (-2.0 * q.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    };
    let mut x = if p < 0.02425 {
        tail(p)
    } else if p > 1.0 - 0.02425 {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        // work on the smaller tail for relative accuracy
        let e = if x < 0.0 { cdf(x) - p } else { (1.0 - p) - sf(x) };
        let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // Simpson integration of the density, independent of erfc.
    fn cdf_oracle(x: f64) -> f64 {
        let n = 200_000;
        let h = x / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // Kahan-compensated composite Simpson rule
        let (mut s, mut comp) = (pdf(0.0) + pdf(x), 0.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            let term = w * pdf(i as f64 * h) - comp;
            let t = s + term;
            comp = (t - s) - term;
            s = t;
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn matches_density_quadrature() {
        for &x in &[-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.5] {
            let err = (cdf(x) - cdf_oracle(x)).abs();
            assert!(err < 1e-14, "x={x}: {err:e}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-10, 0.01, 0.3, 0.5, 0.6, 0.75, 0.9, 0.999] {
            assert!((cdf(quantile(p)) - p).abs() < 1e-13 * p.max(1e-3));
        }
        assert_eq!(cdf(f64::INFINITY), 1.0);
    }
}
