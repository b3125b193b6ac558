//! Standard Normal special functions.
//!
//! `cdf` and `log_cdf` follow W. J. Cody's rational Chebyshev approximations
//! (the ANORM routine), evaluated directly in `x` rather than `x/√2` so that
//! the tail exponent is formed without an extra rounding. The far tail is
//! available in log space for any `|x| < 1e170`, well past the point where
//! `Φ(x)` itself underflows (`x ≈ -37.5`).
//!
//! The unchecked functions (`pdf`, `cdf`, ...) propagate NaN; the
//! `std_normal_*` wrappers reject non-finite input.

// Coefficients are kept exactly as published.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `ln(√(2π))`
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_32: f64 = 5.656_854_249_492_381;

const A: [f64; 5] = [
    2.235_252_035_460_683_9,
    161.028_231_068_555_88,
    1_067.689_485_460_370_9,
    18_154.981_253_343_561,
    0.065_682_337_918_207_449,
];
const B: [f64; 4] = [
    47.202_581_904_688_242,
    976.098_551_737_776_69,
    10_260.932_208_618_978,
    45_507.789_335_026_73,
];
const C: [f64; 9] = [
    0.398_941_512_088_134_67,
    8.883_149_794_388_376,
    93.506_656_132_177_856,
    597.270_276_394_800_26,
    2_494.537_585_290_372_7,
    6_848.190_450_536_282_3,
    11_602.651_437_647_35,
    9_842.714_838_383_978,
    1.076_557_677_372_019_2e-8,
];
const D: [f64; 8] = [
    22.266_688_044_328_116,
    235.387_901_782_625,
    1_519.377_599_407_554_8,
    6_485.558_298_266_761,
    18_615.571_640_885_098,
    34_900.952_721_145_977,
    38_912.003_286_093_271,
    19_685.429_676_859_991,
];
const P: [f64; 6] = [
    0.215_898_534_057_956_99,
    0.127_401_161_160_247_36,
    0.022_235_277_870_649_807,
    0.001_421_619_193_227_893_5,
    2.911_287_495_116_879_2e-5,
    0.023_073_441_764_940_173,
];
const Q: [f64; 5] = [
    1.284_260_096_144_911_2,
    0.468_238_212_480_865_12,
    0.065_988_137_868_928_552,
    0.003_782_396_332_027_582_4,
    7.297_515_550_839_662e-5,
];

/// Upper bound of the central branch, `Φ⁻¹(3/4)`.
const CENTRAL: f64 = 0.674_489_75;

/// `Φ(x) - 1/2` for `|x| <= CENTRAL`, free of cancellation.
fn central_excess(x: f64) -> f64 {
    let xsq = x * x;
    let (mut num, mut den) = if x.abs() > f64::EPSILON * 0.5 {
        (A[4] * xsq, xsq)
    } else {
        (0.0, 0.0)
    };
    for i in 0..3 {
        num = (num + A[i]) * xsq;
        den = (den + B[i]) * xsq;
    }
    x * (num + A[3]) / (den + B[3])
}

/// Lower tail `Φ(-y) = exp(-ysq²/2)·exp(-del/2)·temp` for `y > CENTRAL`,
/// returned as `(ysq, del, temp)`. Splitting `y²` keeps the leading part of
/// the exponent exact.
fn lower_tail_parts(y: f64) -> (f64, f64, f64) {
    let temp = if y <= SQRT_32 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let xsq = 1.0 / (y * y);
        let mut num = P[5] * xsq;
        let mut den = xsq;
        for i in 0..4 {
            num = (num + P[i]) * xsq;
            den = (den + Q[i]) * xsq;
        }
        let r = xsq * (num + P[4]) / (den + Q[4]);
        (FRAC_1_SQRT_2PI - r) / y
    };
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (ysq, del, temp)
}

/// `ln Φ(-y)` for `y > CENTRAL`.
fn log_lower_tail(y: f64) -> f64 {
    let (ysq, del, temp) = lower_tail_parts(y);
    -ysq * ysq * 0.5 - del * 0.5 + temp.ln()
}

/// `Φ(-y)` for `y > CENTRAL`; underflows to zero beyond `y ≈ 38.5`.
fn lower_tail(y: f64) -> f64 {
    let (ysq, del, temp) = lower_tail_parts(y);
    (-ysq * ysq * 0.5).exp() * (-del * 0.5).exp() * temp
}

/// Standard Normal density `φ(x)`.
#[inline]
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `ln φ(x)`.
#[inline]
pub fn log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard Normal distribution function `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= CENTRAL {
        return 0.5 + central_excess(x);
    }
    let tail = lower_tail(y);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `ln Φ(x)`, finite for every finite `x` with `|x| < 1e170`.
pub fn log_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let y = x.abs();
    if y <= CENTRAL {
        return (0.5 + central_excess(x)).ln();
    }
    let lt = log_lower_tail(y);
    if x > 0.0 {
        (-lt.exp()).ln_1p()
    } else {
        lt
    }
}

/// `Φ(x) - 1/2`, computed without cancellation near zero.
pub fn cdf_minus_half(x: f64) -> f64 {
    if x.abs() <= CENTRAL {
        central_excess(x)
    } else if x > 0.0 {
        0.5 - log_lower_tail(x).exp()
    } else {
        log_lower_tail(-x).exp() - 0.5
    }
}

/// `ln(Φ(upper) - Φ(lower))`, the log probability that a standard Normal
/// variate falls in `(lower, upper)`. Infinite endpoints are allowed.
///
/// Both tails are handled through `log_cdf`, so intervals far out in either
/// tail keep full relative accuracy.
pub fn log_interval_prob(lower: f64, upper: f64) -> f64 {
    if lower.is_nan() || upper.is_nan() {
        return f64::NAN;
    }
    if lower >= upper {
        return f64::NEG_INFINITY;
    }
    if upper == f64::INFINITY {
        return log_cdf(-lower);
    }
    if lower == f64::NEG_INFINITY {
        return log_cdf(upper);
    }
    if lower > 0.0 {
        // Φ(-lower) - Φ(-upper)
        let a = log_cdf(-lower);
        let b = log_cdf(-upper);
        a + log_one_minus_exp(b - a)
    } else if upper < 0.0 {
        let a = log_cdf(upper);
        let b = log_cdf(lower);
        a + log_one_minus_exp(b - a)
    } else {
        (cdf_minus_half(upper) - cdf_minus_half(lower)).ln()
    }
}

/// `ln(1 - e^x)` for `x <= 0`.
pub fn log_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)` without overflow or underflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp over a slice; `-∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

// Acklam's rational approximation, relative error ~1.15e-9 before polishing.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam_lower(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    }
}

/// Quantile for `p <= 1/2`, polished with Halley steps on the log scale.
fn quantile_lower(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam_lower(p);
    let log_p = p.ln();
    for _ in 0..3 {
        // Newton on g(x) = ln Φ(x) - ln p keeps relative accuracy in the tail.
        let lc = log_cdf(x);
        let g = lc - log_p;
        if g == 0.0 {
            break;
        }
        let h = (log_pdf(x) - lc).exp(); // φ/Φ = g'
        let step = g / h;
        // g'' = -h (x + h); Halley correction
        let denom = 1.0 + 0.5 * step * (x + h);
        let next = x - step / denom;
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Standard Normal quantile `Φ⁻¹(p)` for `0 < p < 1`. NaN outside.
pub fn quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    if p <= 0.5 {
        quantile_lower(p)
    } else {
        // 1 - p is exact on [1/2, 1).
        -quantile_lower(1.0 - p)
    }
}

fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// Checked `φ(x)`.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    finite(x, "std_normal_pdf argument").map(pdf)
}

/// Checked `Φ(x)`.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    finite(x, "std_normal_cdf argument").map(cdf)
}

/// Checked `ln Φ(x)`.
pub fn std_normal_log_cdf(x: f64) -> Result<f64> {
    finite(x, "std_normal_log_cdf argument").map(log_cdf)
}

/// Checked `Φ⁻¹(p)`; `p` must lie strictly inside `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(quantile(p))
    } else {
        Err(Error::Domain {
            what: "std_normal_quantile probability",
            value: p,
        })
    }
}
